"""Classical and entangled values of random two-player XOR games."""

from .classical import (
    ClassicalResult,
    brute_force_oracle,
    chernoff_threshold,
    exact_value,
    greedy_value,
)
from .errors import DimensionError, GuardError, MatrixFormatError, NormError, XorGameError
from .game import (
    GameValue,
    SignStrategy,
    VectorStrategy,
    XorGame,
    chsh,
    evaluate_sign,
    evaluate_vector,
    gen_bernoulli,
    read_matrix,
    write_matrix,
)
from .quantum import QuantumBounds, alternating_ascent, full_spectrum, mp_construction, spectral_norm

__version__ = "0.1.0"
