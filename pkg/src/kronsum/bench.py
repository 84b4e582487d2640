"""Timing helpers for the scaling benchmark.

Only the transform steps of the fast Poisson solve are timed: the eigenbasis
and the reciprocal eigenvalue-sum array are built once per grid outside the
timed region, and the residual check is switched off.  Their costs are
lower order and would otherwise blur the fitted exponent at small ``N``.
"""
from __future__ import annotations

import statistics
import time
from typing import Sequence

import numpy as np

from .pde import Grid1D, PoissonProblem, assemble_poisson_rhs, poisson_factors
from .solve import EigKronSolver, SolveOptions
from .spectral import closed_form_laplacian_eig

__all__ = ["median_time", "poisson_solve_seconds", "fit_slope"]


def median_time(fn, repeat: int = 5) -> float:
    """Median wall time of ``repeat`` calls after one untimed warm-up."""
    if repeat < 1:
        raise ValueError("repeat must be at least 1")
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _bench_problem(dim: int, n: int) -> PoissonProblem:
    grid = Grid1D(n)
    return PoissonProblem((grid,) * dim, f=lambda *xs: np.sin(np.pi * sum(xs)))


def poisson_solve_seconds(dim: int, n: int, repeat: int = 5) -> float:
    """Median time of one ``dim``-D Poisson solve on an ``n``-point grid per axis."""
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    problem = _bench_problem(dim, n)
    eig = closed_form_laplacian_eig(n)
    solver = EigKronSolver([eig] * dim, poisson_factors(problem),
                           SolveOptions(compute_residual=False))
    y = assemble_poisson_rhs(problem)
    return median_time(lambda: solver.solve(y), repeat)


def fit_slope(ns: Sequence[int], seconds: Sequence[float]) -> float:
    """Least-squares slope of ``log t`` against ``log N``."""
    if len(ns) < 2:
        raise ValueError("a slope needs at least two sizes")
    return float(np.polyfit(np.log(ns), np.log(seconds), 1)[0])
