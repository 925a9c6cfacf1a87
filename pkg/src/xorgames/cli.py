"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 size-guard violation,
3 a verification check reported a failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import classical, harness, quantum, spectra, walk
from .errors import GuardError, XorGameError
from .game import evaluate_vector, gen_bernoulli, read_matrix, write_matrix

EXIT_OK, EXIT_USAGE, EXIT_GUARD, EXIT_CHECK = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part.strip()[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part.strip():
            out.append(int(part))
    return out


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _globals(defaults: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=d(0), help="top-level random seed (default 0)")
    p.add_argument("--out", default=d(None), help="write output to this path instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default=d("csv"))
    p.add_argument("--threads", type=int, default=d(None), help="worker threads for exact enumeration")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _globals(False)
    parser = _Parser(prog="xorgames", description="Classical and entangled values of random XOR games.",
                     parents=[_globals(True)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="write a random game in matrix text format")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)

    p = sub.add_parser("value", parents=[common], help="classical and quantum values of one game")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--file", help="matrix text file")
    src.add_argument("--n", type=int, help="random n x n game from --seed")
    p.add_argument("--no-exact", action="store_true")
    p.add_argument("--d", type=int)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--delta", type=float, default=0.05)

    p = sub.add_parser("sweep", parents=[common], help="seeded sweep over square random games")
    p.add_argument("--n-list", type=_int_list, required=True, help="e.g. 10-26 or 4,8,16")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--no-exact", action="store_true")
    p.add_argument("--no-greedy", action="store_true")
    p.add_argument("--no-quantum", action="store_true")
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--d", type=int)

    p = sub.add_parser("walk", parents=[common], help="reflecting random walk statistics")
    p.add_argument("--n", type=int, required=True)
    bias = p.add_mutually_exclusive_group()
    bias.add_argument("--alpha", type=float, help="bias eps = alpha / sqrt(n)")
    bias.add_argument("--eps", type=float)
    p.add_argument("--trials", type=int, default=0, help="Monte Carlo trials (0 to skip)")
    p.add_argument("--steps", action="store_true", help="emit per-step Pr[K_i=0] and E[K_i]")

    p = sub.add_parser("spectra", parents=[common], help="spectral statistics against the MP law")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=_float_list, default=[0.5, 1.0, 1.5])
    p.add_argument("--m-max", type=int, default=4)

    p = sub.add_parser("fit", parents=[common], help="fit a n^1.5 + b n to mean exact values")
    p.add_argument("--file", help="sweep CSV to fit (otherwise run an exact-only sweep)")
    p.add_argument("--n-list", type=_int_list, default=list(range(10, 27)))
    p.add_argument("--trials", type=int, default=50)

    p = sub.add_parser("identities", parents=[common], help="verify the walk and Catalan identities")
    p.add_argument("--m-max", type=int, default=20)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--p", type=float)

    p = sub.add_parser("concentration", parents=[common], help="spread of exact values over random games")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--trials", type=int, default=500)
    return parser


def _emit_rows(rows: list[dict], args, fh) -> None:
    if args.format == "json":
        json.dump(rows, fh, indent=1)
        fh.write("\n")
        return
    keys = list(rows[0]) if rows else []
    w = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: harness._fmt(v) for k, v in row.items()})


def _cmd_gen(args, fh):
    fh.write(write_matrix(gen_bernoulli(args.n, args.k or args.n, args.seed)))
    return EXIT_OK


def _cmd_value(args, fh):
    if args.file:
        with open(args.file, encoding="utf-8") as src:
            game = read_matrix(src.read())
    else:
        game = gen_bernoulli(args.n, args.n, args.seed)
    nk = game.n * game.k
    row = {"n": game.n, "k": game.k}
    if not args.no_exact:
        ex = classical.exact_value(game, threads=args.threads)
        row["classical_exact"] = ex.raw
    gr = classical.greedy_value(game, args.seed)
    row["classical_greedy"] = gr.raw
    qb = quantum.alternating_ascent(game, d=args.d, restarts=args.restarts, seed=args.seed)
    row["quantum_lb"] = qb.lower_raw
    row["quantum_ub"] = qb.upper_raw
    if game.n == game.k and game.n <= quantum.SPECTRUM_MAX_SIDE:
        mp = quantum.mp_construction(game, args.eps, args.delta)
        row["quantum_mp"] = evaluate_vector(game, mp.strategy).raw
    best_cl = row.get("classical_exact", gr.raw)
    row["delta_cl"] = best_cl / nk
    row["delta_q"] = qb.lower_raw / nk
    row["ratio"] = qb.lower_raw / best_cl if best_cl else None
    _emit_rows([row], args, fh)
    return EXIT_OK


def _cmd_sweep(args, fh):
    opts = harness.SweepOptions(
        exact=not args.no_exact, greedy=not args.no_greedy, quantum=not args.no_quantum,
        restarts=args.restarts, d=args.d, threads=args.threads,
    )
    records = harness.sweep(args.n_list, args.trials, args.seed, opts)
    if args.format == "json":
        harness.write_json(records, fh)
    else:
        harness.write_csv(records, fh)
    for col in ("classical_exact", "classical_greedy", "quantum_lb"):
        for s in harness.scaled_stats(records, col):
            print(f"# {col} n={s.n} count={s.count} mean={s.mean:.6f} median={s.median:.6f} max={s.max:.6f} (/n^1.5)",
                  file=sys.stderr)
    return EXIT_OK


def _cmd_walk(args, fh):
    if args.eps is not None:
        model = walk.WalkModel(args.n, args.eps)
    elif args.alpha is not None:
        model = walk.WalkModel.from_alpha(args.n, args.alpha)
    else:
        model = walk.WalkModel.from_greedy(args.n)
    dist = walk.dp_distribution(model)
    if args.steps:
        walk.write_steps_csv(dist, fh)
        return EXIT_OK
    row = {
        "n": model.n, "eps": model.eps, "alpha": model.alpha, "p": model.p,
        "expectation": dist.expectation,
        "expectation_over_sqrt_n": dist.expectation / math.sqrt(model.n) if model.n else None,
        "zero_visit_sum": dist.zero_visit_sum,
        "f_alpha": walk.f_alpha(model.alpha) if model.alpha > 0 else None,
    }
    if model.n <= walk.FORMULA_MAX_STEPS and model.n >= 1:
        row["zero_visit_formula"] = walk.zero_visit_formula(model.n, model.p)
    if args.trials:
        row["simulated_mean"] = walk.simulate(model, args.seed, args.trials)
    _emit_rows([row], args, fh)
    return EXIT_OK


def _cmd_spectra(args, fh):
    game = gen_bernoulli(args.n, args.n, args.seed)
    summary = spectra.summarize(game, args.c, args.m_max)
    rows = []
    for c in args.c:
        ov = summary.overlaps_right[c]
        rows.append({
            "stat": "tail", "param": c, "empirical": summary.tail_fractions[c], "limit": spectra.mp_tail(c),
        })
        rows.append({"stat": "overlap_mean", "param": c, "empirical": float(ov.mean()), "limit": spectra.mp_tail(c)})
    for m, val in enumerate(summary.moments, start=1):
        rows.append({"stat": "moment", "param": m, "empirical": float(val), "limit": spectra.catalan(m)})
    _emit_rows(rows, args, fh)
    return EXIT_OK


def _cmd_fit(args, fh):
    if args.file:
        with open(args.file, encoding="utf-8") as src:
            records = harness.read_csv(src)
    else:
        opts = harness.SweepOptions(greedy=False, quantum=False, threads=args.threads)
        records = harness.sweep(args.n_list, args.trials, args.seed, opts)
    fit = harness.fit_scaling(harness.mean_points(records))
    _emit_rows([{"a": fit.a, "b": fit.b, "residual": fit.residual, "ratio_2_over_a": fit.ratio}], args, fh)
    return EXIT_OK


def _cmd_identities(args, fh):
    checks = walk.identities_suite(args.m_max, args.n, args.p)
    _emit_rows([{"check": c.name, "passed": c.passed, "detail": c.detail} for c in checks], args, fh)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK


def _cmd_concentration(args, fh):
    rep = harness.concentration_report(args.n, args.trials, args.seed, args.threads)
    row = {
        "n": rep.n, "trials": rep.trials, "mean": rep.mean, "std": rep.std,
        "beyond_4n": rep.beyond_4n, "beyond_8n": rep.beyond_8n,
        "azuma_bound_4n": rep.azuma_bound_4n, "envelope_ok": rep.envelope_ok,
    }
    _emit_rows([row], args, fh)
    return EXIT_OK if rep.envelope_ok else EXIT_CHECK


COMMANDS = {
    "gen": _cmd_gen, "value": _cmd_value, "sweep": _cmd_sweep, "walk": _cmd_walk,
    "spectra": _cmd_spectra, "fit": _cmd_fit, "identities": _cmd_identities,
    "concentration": _cmd_concentration,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    buf = io.StringIO()
    try:
        code = COMMANDS[args.command](args, buf)
    except GuardError as exc:
        print(f"xorgames: guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (XorGameError, ValueError, OSError) as exc:
        print(f"xorgames: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as out:
            out.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
