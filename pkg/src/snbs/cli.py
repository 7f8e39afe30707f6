"""``snbs`` command line: ci, simulate, mc, advise and ecdf.

Exit codes: 0 success, 2 input or configuration error, 3 degenerate statistic.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import advisor, core, generators, harness
from .errors import AllBlocksDegenerateError, DegenerateNormalizerError, SNBSError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


class InputError(SNBSError):
    pass


def read_values(path: str) -> np.ndarray:
    """One finite decimal per line; blank lines are skipped. ``-`` reads stdin."""
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8", newline="") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from exc
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            v = float(line)
        except ValueError:
            raise InputError(f"{path}:{lineno}: not a number: {line!r}") from None
        if not math.isfinite(v):
            raise InputError(f"{path}:{lineno}: non-finite value {line!r}")
        out.append(v)
    return np.array(out, dtype=np.float64)


def _open_out(path: Optional[str]):
    if path is None or path == "-":
        return _NoClose(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="")


class _NoClose:
    def __init__(self, fh):
        self.fh = fh

    def __enter__(self):
        return self.fh

    def __exit__(self, *exc):
        self.fh.flush()


def _write_rows(path: Optional[str], header: Sequence[str], rows) -> None:
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _block_size(args, n: int) -> int:
    if args.b is not None:
        return args.b
    c = 1.0 if args.c is None else args.c
    return harness.block_size(n, c)


def _generator(args) -> generators.GeneratorConfig:
    kw = {}
    if args.rho is not None:
        kw["rho"] = args.rho
    if args.alpha_stable is not None:
        kw["alpha"] = args.alpha_stable
    if args.a is not None:
        kw["a"] = args.a
    if args.df is not None:
        kw["df"] = args.df
    return generators.model_config(args.model, n=args.n, d=args.d, seed=args.seed, **kw)


# -- subcommands -----------------------------------------------------------------


def cmd_ci(args) -> int:
    x = read_values(args.input)
    n = x.shape[0]
    b = _block_size(args, n)
    if n < 3 or not 2 <= b < n:
        raise InputError(f"need n >= 3 and 2 <= b < n (got n={n}, b={b})")
    ci = core.confidence_interval(x, b, args.level, args.side)
    q = ";".join(f"{k!r}:{v!r}" for k, v in sorted(ci.quantiles.items()))
    _write_rows(args.out, ("side", "level", "lo", "hi", "n", "b", "q", "mean", "d_n"),
                [(ci.side.value, repr(ci.level), repr(ci.lo), repr(ci.hi), ci.n, ci.b, q,
                  repr(ci.mean), repr(ci.d_n))])
    return EXIT_OK


def cmd_simulate(args) -> int:
    series = generators.generate(_generator(args))
    with _open_out(args.out) as fh:
        fh.writelines(f"{v!r}\n" for v in series.values.tolist())
    return EXIT_OK


def cmd_ecdf(args) -> int:
    series = generators.generate(_generator(args))
    b = _block_size(args, args.n)
    stats = core.block_statistics(series, b)
    t = stats.defined
    if t.shape[0] == 0:
        raise AllBlocksDegenerateError("every block normalizer is zero")
    if args.standardize:
        sd = float(np.std(t))
        if sd == 0.0:
            raise DegenerateNormalizerError("block statistics have zero spread")
        t = (t - float(np.mean(t))) / sd
    cdf = core.empirical_cdf(t)
    m = cdf.m
    rows = [(repr(v), repr((i + 1) / m)) for i, v in enumerate(cdf.sorted_values.tolist())]
    _write_rows(args.out, ("x", "F"), rows)
    return EXIT_OK


def _mc_config(args) -> harness.ExperimentConfig:
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"{args.config}: {exc.strerror}") from exc
        try:
            values = harness.read_config_file(text)
        except SNBSError as exc:
            raise InputError(f"{args.config}:{exc}") from exc
    # explicit flags win over the config file
    explicit = {"model": args.model, "n": args.n, "d": args.d, "c": args.c,
                "level": args.level_mc, "reps": args.reps, "master_seed": args.seed,
                "rho": args.rho, "alpha": args.alpha_stable, "a": args.a, "df": args.df}
    values.update({k: v for k, v in explicit.items() if v is not None})
    return harness.config_from_mapping(values)


def cmd_mc(args) -> int:
    config = _mc_config(args)
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    table = harness.run_experiment([config], workers=workers)
    row = table.rows[0]
    if row.error is not None:
        raise InputError(row.error)
    with _open_out(args.out) as fh:
        fh.write(table.to_csv())
    return EXIT_OK


def cmd_advise(args) -> int:
    acf = advisor.AutocovarianceSequence(read_values(args.acf))
    n, b, l = args.n, args.b, args.l
    if b is None:
        b = harness.block_size(n, 1.0 if args.c is None else args.c)
    m = b + l
    lam = advisor.min_eigenvalue(acf, m)
    rows = []
    for k in range(1, n + 1):
        rep = advisor.rho_bound(acf, k, m, lambda_m=lam)
        rows.append((rep.k, rep.m, repr(rep.bound)))
    _write_rows(args.out, ("k", "m", "bound"), rows)
    diag = advisor.a3_diagnostic(acf, n, b, l)
    w = csv.writer(sys.stderr, lineterminator="\n")
    w.writerow(("key", "value"))
    w.writerow(("lambda_m", repr(lam)))
    w.writerow(("diagnostic", repr(diag)))
    if args.regime:
        w.writerow(("recommended_b", advisor.recommend_block(
            args.regime, n, 1.0 if args.c is None else args.c,
            hurst=args.hurst, beta=args.beta, nu=args.nu)))
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _model_flags(p: argparse.ArgumentParser, *, n_default: Optional[int] = 100,
                 model_default: Optional[str] = "a", d_default: Optional[float] = 0.25):
    p.add_argument("--model", choices=generators.MODEL_LABELS, default=model_default)
    p.add_argument("--d", type=float, default=d_default, help="memory parameter of the filter")
    p.add_argument("--n", type=_positive_int, default=n_default, help="sample length")
    p.add_argument("--rho", type=float, help="TAR coefficient")
    p.add_argument("--alpha-stable", type=float, help="tail index (LMSD, MA(1) stable)")
    p.add_argument("--a", type=float, help="MA(1) coefficient")
    p.add_argument("--df", type=float, help="degrees of freedom of the t marginal")
    p.add_argument("--seed", type=int, default=None if model_default is None else 0)


def _block_flags(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--c", type=float, help="block multiplier, b = floor(c*sqrt(n))")
    g.add_argument("--b", type=int, help="explicit block size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snbs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ci", help="confidence interval for the mean of a series")
    p.add_argument("input", help="one value per line ('-' for stdin)")
    _block_flags(p)
    p.add_argument("--level", type=float, default=0.9)
    p.add_argument("--side", choices=[s.value for s in core.Side], default="lower")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("simulate", help="draw one path of a benchmark model")
    _model_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ecdf", help="knots of the block-statistic ECDF for one simulated path")
    _model_flags(p)
    _block_flags(p)
    p.add_argument("--standardize", action="store_true",
                   help="center and scale by the mean and sd of the block statistics")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ecdf)

    p = sub.add_parser("mc", help="Monte Carlo coverage of both one-sided intervals")
    _model_flags(p, n_default=None, model_default=None, d_default=None)
    p.add_argument("--c", type=float, help="block multiplier, b = floor(c*sqrt(n))")
    p.add_argument("--level", dest="level_mc", type=float)
    p.add_argument("--reps", type=_positive_int)
    p.add_argument("--workers", type=_positive_int)
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("advise", help="canonical-correlation bounds and block-size diagnostic")
    p.add_argument("--acf", required=True, help="autocovariances gamma(0), gamma(1), ... one per line")
    p.add_argument("--n", type=_positive_int, required=True)
    _block_flags(p)
    p.add_argument("--l", type=int, default=0, help="extra gap added to the block length")
    p.add_argument("--regime", choices=[r.value for r in advisor.Regime])
    p.add_argument("--hurst", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_advise)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DegenerateNormalizerError, AllBlocksDegenerateError) as exc:
        print(f"snbs: degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except SNBSError as exc:
        print(f"snbs: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
