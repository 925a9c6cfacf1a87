class XorGameError(ValueError):
    """Base class for invalid inputs to the xorgames library."""


class DimensionError(XorGameError):
    pass


class MatrixFormatError(XorGameError):
    pass


class NormError(XorGameError):
    pass


class GuardError(XorGameError):
    """An input exceeds a documented size guard (enumeration or memory budget)."""
