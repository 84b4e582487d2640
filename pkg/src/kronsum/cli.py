"""Command-line harness: PDE experiments, timing sweeps and invariant checks.

Every command except ``verify`` writes CSV (header row, comma separated,
floats with 17 significant digits) to stdout or to ``--csv``.  Exit codes:
0 success, 1 solver error, 2 bad arguments, 3 verification failure.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import sys
import time
from typing import Iterable, Sequence

import numpy as np

from .bench import fit_slope, poisson_solve_seconds
from .errors import KronSumError
from .oracle import MAX_ORACLE_ORDER, oracle_solve_kron
from .pde import (
    ConvDiffProblem,
    _unflip,
    assemble_convdiff,
    assemble_poisson_rhs,
    constant_source_poisson,
    poisson_factors,
    relative_error,
    sine_poisson_2d,
    sine_poisson_3d,
    solve_convdiff_2d,
    solve_poisson,
)
from .solve import SchurKronSolver, SolveOptions, _decompose_all
from .spectral import complex_schur
from .verify import SUITES, run_all

EXIT_OK, EXIT_SOLVER, EXIT_ARGS, EXIT_VERIFY = 0, 1, 2, 3

POISSON_HEADER = ["N", "h", "max_error", "eps_error", "residual", "u_max", "oracle_relerr", "seconds"]
CONVDIFF_HEADER = ["N", "series_length", "eps_error", "term_norm", "oracle_relerr"]
BENCH_HEADER = ["dim", "N", "median_seconds"]

DEFAULT_SIZES = {
    "poisson2d": "63,127,255",
    "poisson3d": "15,31,63",
    "convdiff": "63",
    "bench2": "64..1024",
    "bench3": "16..128",
}


def parse_sizes(text: str) -> list[int]:
    """``"63,127"`` is a list; ``"64..1024"`` doubles from 64 up to 1024."""
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split(".."))
            if lo < 1 or hi < lo:
                raise ValueError
            sizes = []
            n = lo
            while n <= hi:
                sizes.append(n)
                n *= 2
        else:
            sizes = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError(f"sizes must be positive, got {text!r}")
    return sizes


def parse_pair(text: str) -> tuple[float, float]:
    try:
        c1, c2 = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected c1,c2, got {text!r}") from None
    return c1, c2


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = 0
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        v = 0.0
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _write(rows: Iterable[Sequence], header: Sequence[str], path: str | None) -> None:
    cm = open(path, "w", newline="") if path else contextlib.nullcontext(sys.stdout)
    with cm as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
            fh.flush()


def _opts(args) -> SolveOptions:
    kw = {}
    if args.tol is not None:
        kw["truncation_tol"] = args.tol
    if args.max_terms is not None:
        kw["max_terms"] = args.max_terms
    return SolveOptions(**kw)


def _oracle_guard(parser, sizes, dim):
    too_big = [n for n in sizes if n**dim > MAX_ORACLE_ORDER]
    if too_big:
        parser.error(f"--check-oracle needs N^{dim} <= {MAX_ORACLE_ORDER}; got N={too_big}")


def _poisson_rows(args, dim):
    opts = _opts(args)
    for n in args.n:
        if args.problem == "sine":
            problem = sine_poisson_2d(n) if dim == 2 else sine_poisson_3d(n)
        else:
            problem = constant_source_poisson(n, dims=dim)
        t0 = time.perf_counter()
        u, rep = solve_poisson(problem, opts)
        seconds = time.perf_counter() - t0
        oracle = None
        if args.check_oracle:
            ref = oracle_solve_kron(poisson_factors(problem), assemble_poisson_rhs(problem))
            oracle = relative_error(u, ref.real) if np.any(ref) else float(np.max(np.abs(u)))
        yield (n, problem.grids[0].h, rep.max_error, rep.eps_error, rep.residual,
               float(np.max(np.abs(u))), oracle, seconds)


def _convdiff_rows(args):
    opts = _opts(args)
    length = args.max_terms or 15
    c1, c2 = args.c
    for n in args.n:
        problem = ConvDiffProblem.manufactured(n, args.nu, (c1, c2))
        # the trace needs every partial sum, so run the series uncut
        _, rep = solve_convdiff_2d(problem, opts, trace_terms=length)
        partials = None
        if args.check_oracle:
            factors, y, _ = assemble_convdiff(problem)
            ref = _unflip(oracle_solve_kron(factors, y).real, problem)
            partials = _partial_fields(problem, opts, length)
        for j in range(length):
            oracle = relative_error(partials[j], ref) if partials is not None else None
            yield n, j + 1, rep.eps_trace[j], rep.term_norms[j], oracle


def _partial_fields(problem, opts, length):
    factors, y, _ = assemble_convdiff(problem)
    solver = SchurKronSolver(_decompose_all(factors, complex_schur, "auto"), factors, opts)
    return [_unflip(x.real, problem) for x, _ in solver.partial_solutions(y, length)]


def _bench_rows(args, sink):
    for n in args.n:
        t = poisson_solve_seconds(args.dim, n, args.repeat)
        sink.append((n, t))
        yield args.dim, n, t


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kronsum", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, sizes=True):
        if sizes:
            sp.add_argument("--n", type=parse_sizes, default=None,
                            help="grid sizes: list 63,127 or doubling range 64..1024")
        sp.add_argument("--tol", type=_positive_float, default=None, help="series truncation tolerance")
        sp.add_argument("--max-terms", type=_positive_int, default=None, help="series length cap")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--repeat", type=_positive_int, default=5, help="timed runs per size")
        sp.add_argument("--csv", default=None, help="output path (default stdout)")
        sp.add_argument("--threads", type=_positive_int, default=None, help="BLAS thread limit")

    for name in ("poisson2d", "poisson3d"):
        sp = sub.add_parser(name, help=f"{name[-2:]} Poisson convergence run")
        common(sp)
        sp.add_argument("--problem", choices=("sine", "constant"), default="sine")
        sp.add_argument("--check-oracle", action="store_true")

    sp = sub.add_parser("convdiff", help="convection-diffusion error against series length")
    common(sp)
    sp.add_argument("--nu", type=_positive_float, default=1.0)
    sp.add_argument("--c", type=parse_pair, default=(1.0, 1.0), help="convection c1,c2")
    sp.add_argument("--check-oracle", action="store_true")

    sp = sub.add_parser("bench", help="Poisson solve timings and fitted exponent")
    common(sp)
    sp.add_argument("--dim", type=int, choices=(2, 3), default=2)

    sp = sub.add_parser("verify", help="run the randomised invariant suites")
    common(sp, sizes=False)
    sp.add_argument("--suite", action="append", choices=sorted(SUITES), default=None)
    return p


def _dispatch(args, parser) -> int:
    cmd = args.command
    if cmd == "verify":
        results = run_all(args.seed, args.suite)
        for r in results:
            print(r.line())
        failed = [r for r in results if not r.ok]
        print(f"{len(results) - len(failed)}/{len(results)} suites passed")
        return EXIT_VERIFY if failed else EXIT_OK
    if args.n is None:
        key = f"bench{args.dim}" if cmd == "bench" else cmd
        args.n = parse_sizes(DEFAULT_SIZES[key])
    if cmd in ("poisson2d", "poisson3d"):
        dim = int(cmd[-2])
        if args.check_oracle:
            _oracle_guard(parser, args.n, dim)
        _write(_poisson_rows(args, dim), POISSON_HEADER, args.csv)
    elif cmd == "convdiff":
        if min(args.n) < 3:
            parser.error("convdiff needs N >= 3")
        if args.check_oracle:
            _oracle_guard(parser, args.n, 2)
        _write(_convdiff_rows(args), CONVDIFF_HEADER, args.csv)
    else:
        points: list[tuple[int, float]] = []
        _write(_bench_rows(args, points), BENCH_HEADER, args.csv)
        if len(points) >= 2:
            ns, ts = zip(*points)
            print(f"slope {fit_slope(ns, ts):.3f}", file=sys.stderr)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    limiter = contextlib.nullcontext()
    if args.threads is not None:
        from threadpoolctl import threadpool_limits

        limiter = threadpool_limits(limits=args.threads)
    try:
        with limiter:
            return _dispatch(args, parser)
    except (KronSumError, ArithmeticError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
