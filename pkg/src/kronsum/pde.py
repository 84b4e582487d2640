"""Finite-difference front-end: Poisson (2D/3D) and steady convection-diffusion.

Unknowns live on the interior nodes of a uniform grid with Dirichlet data on
the boundary.  Axis ``x`` is mode 1 (fastest index), ``y`` mode 2, ``z``
mode 3.

Poisson uses the unscaled stencil ``tridiag(-1, 2, -1)`` per axis, so the
right-hand side carries ``-h^2 f`` plus the boundary values adjacent to each
node, and the discrete operator is positive definite.

Convection-diffusion factors are ``(nu/h^2) tridiag(-1, 2, -1) + (c/4h) B``
with the Fromm band ``B = (1, 3, -5, 1)`` on sub, main, first and second
super-diagonal.  That band is upwind-biased when grid index increases
*against* the flow, so each axis is numbered in the flow-aligned direction
before assembly and the solution is flipped back afterwards.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, UndefinedMetricError
from .solve import (
    EigKronSolver,
    SchurKronSolver,
    SolveOptions,
    SolveReport,
    _decompose_all,
    _relative_residual,
)
from .spectral import EigenDecomposition, closed_form_laplacian_eig, complex_schur
from .tensor import DTYPE

__all__ = [
    "Grid1D",
    "PoissonProblem",
    "ConvDiffProblem",
    "laplacian_1d",
    "assemble_poisson_rhs",
    "poisson_factors",
    "solve_poisson",
    "solve_poisson_2d",
    "solve_poisson_3d",
    "fromm_factor",
    "assemble_convdiff",
    "solve_convdiff_2d",
    "relative_error",
    "sine_poisson_2d",
    "sine_poisson_3d",
    "constant_source_poisson",
]


@dataclass(frozen=True)
class Grid1D:
    """``N`` interior nodes ``a + i h`` (``i = 1..N``) with ``h = (b - a)/(N + 1)``."""

    N: int
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise DimensionError("a grid needs at least one interior node")
        if not self.b > self.a:
            raise ValueError("grid interval must satisfy b > a")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.N + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(1, self.N + 1)


Field = Callable[..., np.ndarray]


@dataclass(frozen=True)
class PoissonProblem:
    """``u_xx + u_yy (+ u_zz) = f`` with ``u = g`` on the boundary.

    ``f`` is a vectorised callable of the coordinates or an array already
    sampled on the interior nodes.  ``g=None`` means homogeneous data.
    """

    grids: tuple[Grid1D, ...]
    f: Field | np.ndarray
    g: Field | None = None
    exact: Field | None = None

    def __post_init__(self):
        object.__setattr__(self, "grids", tuple(self.grids))
        if len(self.grids) not in (2, 3):
            raise DimensionError("Poisson problems are 2-D or 3-D")
        if not callable(self.f):
            shape = np.shape(self.f)
            if shape != self.shape:
                raise DimensionError(f"sampled f has shape {shape}, expected {self.shape}")

    @property
    def dims(self) -> int:
        return len(self.grids)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(g.N for g in self.grids)

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*(g.nodes for g in self.grids), indexing="ij")


def _sample(fn, coords, shape) -> np.ndarray:
    return np.broadcast_to(np.asarray(fn(*coords)), shape)


def laplacian_1d(n: int) -> np.ndarray:
    """Unscaled second-difference matrix ``tridiag(-1, 2, -1)`` of order ``n``."""
    if n < 1:
        raise DimensionError("Laplacian order must be at least 1")
    return (2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)).astype(DTYPE)


def _axis_scales(grids: Sequence[Grid1D]) -> list[float]:
    # every axis stencil is expressed in units of the first axis spacing
    href = grids[0].h
    return [(href / g.h) ** 2 for g in grids]


def assemble_poisson_rhs(problem: PoissonProblem) -> np.ndarray:
    """Right-hand side matching the factors ``s_m * laplacian_1d(N_m)``.

    ``s_m = (h_1/h_m)^2`` is 1 on uniform grids, which gives
    ``Y = -h^2 f + (sum of adjacent boundary values)``.
    """
    grids = problem.grids
    shape = problem.shape
    mesh = problem.mesh()
    h2 = grids[0].h ** 2
    if callable(problem.f):
        f = _sample(problem.f, mesh, shape)
    else:
        f = np.asarray(problem.f)
    y = (-h2 * f).astype(DTYPE)
    if problem.g is None:
        return y
    for m, (grid, s) in enumerate(zip(grids, _axis_scales(grids))):
        for end, idx in ((grid.a, 0), (grid.b, grid.N - 1)):
            coords = [c.take([idx], axis=m) for c in mesh]
            coords[m] = np.full_like(coords[m], end)
            face = _sample(problem.g, coords, coords[m].shape)
            sl = [slice(None)] * len(grids)
            sl[m] = slice(idx, idx + 1)
            y[tuple(sl)] += s * face
    return y


def _attach_errors(report: SolveReport, u: np.ndarray, exact: np.ndarray | None) -> SolveReport:
    if exact is None:
        return report
    return replace(
        report,
        max_error=float(np.max(np.abs(u - exact))),
        eps_error=relative_error(u, exact),
    )


def _real_if_real(x: np.ndarray, reference: np.ndarray) -> np.ndarray:
    return x.real.copy() if not np.any(np.imag(reference)) else x


def poisson_factors(problem: PoissonProblem) -> list[np.ndarray]:
    """Factors ``s_m * laplacian_1d(N_m)`` whose Kronecker sum is the discrete operator."""
    return [s * laplacian_1d(g.N) for g, s in zip(problem.grids, _axis_scales(problem.grids))]


def solve_poisson(problem: PoissonProblem, opts: SolveOptions | None = None):
    """Fast diagonalisation solve with the closed-form sine eigenbasis.

    Returns ``(u, report)`` where ``u`` has shape ``problem.shape``.  When
    ``problem.exact`` is set the report carries ``max_error`` and
    ``eps_error``.
    """
    grids = problem.grids
    eigs = []
    cache: dict[int, EigenDecomposition] = {}
    for grid, s in zip(grids, _axis_scales(grids)):
        if grid.N not in cache:
            cache[grid.N] = closed_form_laplacian_eig(grid.N)
        base = cache[grid.N]
        eigs.append(base if s == 1.0 else EigenDecomposition(base.U, s * base.eigvals))
    factors = poisson_factors(problem)
    y = assemble_poisson_rhs(problem)
    x, report = EigKronSolver(eigs, factors, opts).solve(y)
    u = _real_if_real(x, y)
    exact = _sample(problem.exact, problem.mesh(), problem.shape) if problem.exact else None
    return u, _attach_errors(report, u, exact)


def solve_poisson_2d(problem: PoissonProblem, opts: SolveOptions | None = None):
    if problem.dims != 2:
        raise DimensionError("expected a 2-D Poisson problem")
    return solve_poisson(problem, opts)


def solve_poisson_3d(problem: PoissonProblem, opts: SolveOptions | None = None):
    if problem.dims != 3:
        raise DimensionError("expected a 3-D Poisson problem")
    return solve_poisson(problem, opts)


def sine_poisson_2d(n: int) -> PoissonProblem:
    """``u = sin(10 pi x) sin(10 pi y)`` on ``[-1, 1]^2`` with zero boundary data."""
    k = 10 * math.pi
    grid = Grid1D(n, -1.0, 1.0)
    return PoissonProblem(
        (grid, grid),
        f=lambda x, y: -2 * k**2 * np.sin(k * x) * np.sin(k * y),
        exact=lambda x, y: np.sin(k * x) * np.sin(k * y),
    )


def sine_poisson_3d(n: int) -> PoissonProblem:
    """``u = sin(pi x) sin(pi y) sin(pi z)`` on the unit cube."""
    p = math.pi
    grid = Grid1D(n)
    return PoissonProblem(
        (grid, grid, grid),
        f=lambda x, y, z: -3 * p**2 * np.sin(p * x) * np.sin(p * y) * np.sin(p * z),
        exact=lambda x, y, z: np.sin(p * x) * np.sin(p * y) * np.sin(p * z),
    )


def constant_source_poisson(n: int, dims: int = 2, value: float = -8.0) -> PoissonProblem:
    """Constant source on the unit square/cube, zero boundary data, no exact solution."""
    grid = Grid1D(n)
    return PoissonProblem((grid,) * dims, f=lambda *xs: np.full(np.shape(xs[0]), value))


def fromm_factor(n: int, nu: float, c: float, h: float) -> np.ndarray:
    """``(nu/h^2) tridiag(-1, 2, -1) + (c/(4h)) B`` with the Fromm band.

    ``B`` has 1 on the subdiagonal, 3 on the diagonal, -5 on the first and 1
    on the second superdiagonal.  Boundary rows are left as truncated bands.
    """
    if n < 3:
        raise DimensionError("the Fromm band needs at least 3 unknowns per axis")
    if not nu > 0:
        raise ValueError("diffusion coefficient must be positive")
    band = 3.0 * np.eye(n) - 5.0 * np.eye(n, k=1) + np.eye(n, k=2) + np.eye(n, k=-1)
    return (nu / h**2 * laplacian_1d(n) + c / (4.0 * h) * band).astype(DTYPE)


@dataclass(frozen=True)
class ConvDiffProblem:
    """``-nu lap(u) + c1 u_x + c2 u_y = f`` on ``[a, b]^2``, zero boundary data."""

    N: int
    nu: float
    c1: float
    c2: float
    f: Field
    exact: Field | None = None
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("diffusion coefficient must be positive")
        if self.N < 3:
            raise DimensionError("convection-diffusion grids need N >= 3")

    @property
    def grid(self) -> Grid1D:
        return Grid1D(self.N, self.a, self.b)

    @classmethod
    def manufactured(cls, n: int, nu: float = 1.0, c: Sequence[float] = (1.0, 1.0)):
        """Source chosen so that ``u = 16 (x - x^2)(y - y^2)`` on the unit square."""
        c1, c2 = (float(v) for v in c)

        def exact(x, y):
            return 16.0 * (x - x * x) * (y - y * y)

        def source(x, y):
            px, py = x - x * x, y - y * y
            return (32.0 * nu * (px + py)
                    + 16.0 * c1 * (1.0 - 2.0 * x) * py
                    + 16.0 * c2 * px * (1.0 - 2.0 * y))

        return cls(n, nu, c1, c2, source, exact)


def _flow_nodes(grid: Grid1D, c: float) -> np.ndarray:
    nodes = grid.nodes
    return nodes[::-1].copy() if c >= 0 else nodes


def assemble_convdiff(problem: ConvDiffProblem):
    """Factors ``[A_x, A_y]`` and right-hand side in flow-aligned numbering."""
    grid = problem.grid
    xs = _flow_nodes(grid, problem.c1)
    ys = _flow_nodes(grid, problem.c2)
    a_x = fromm_factor(problem.N, problem.nu, abs(problem.c1), grid.h)
    a_y = fromm_factor(problem.N, problem.nu, abs(problem.c2), grid.h)
    mesh = np.meshgrid(xs, ys, indexing="ij")
    y = _sample(problem.f, mesh, (problem.N, problem.N)).astype(DTYPE)
    return [a_x, a_y], y, mesh


def _unflip(u: np.ndarray, problem: ConvDiffProblem) -> np.ndarray:
    if problem.c1 >= 0:
        u = u[::-1, :]
    if problem.c2 >= 0:
        u = u[:, ::-1]
    return np.ascontiguousarray(u)


def solve_convdiff_2d(problem: ConvDiffProblem, opts: SolveOptions | None = None,
                      trace_terms: int | None = None, method: str = "auto"):
    """Schur + alternating-series solve of the convection-diffusion system.

    With ``trace_terms`` the series is run for exactly that many terms and
    ``report.eps_trace[L-1]`` is the relative error of the length-``L``
    partial sum (requires ``problem.exact``).  The returned field is on the
    natural (increasing-coordinate) node order.
    """
    factors, y, mesh = assemble_convdiff(problem)
    schurs = _decompose_all(factors, complex_schur, method)
    solver = SchurKronSolver(schurs, factors, opts)
    exact = _sample(problem.exact, mesh, y.shape) if problem.exact else None
    if trace_terms is None:
        x, report = solver.solve(y)
    else:
        if exact is None:
            raise ValueError("an error trace needs an exact solution")
        t0 = time.perf_counter()
        trace, norms, x = [], [], None
        for x, knorm in solver.partial_solutions(y, trace_terms):
            trace.append(relative_error(x.real, exact))
            norms.append(knorm)
        report = SolveReport(
            terms_used=len(norms),
            term_norms=norms,
            residual=_relative_residual(factors, x, y),
            elapsed=time.perf_counter() - t0,
            conditioning=solver.conditioning,
            eps_trace=trace,
        )
    u = x.real.copy()
    report = _attach_errors(report, u, exact)
    return _unflip(u, problem), report


def relative_error(u_num, u_exact) -> float:
    """``||u_exact - u_num||_2 / ||u_exact||_2`` over all grid values."""
    u_num = np.asarray(u_num)
    u_exact = np.asarray(u_exact)
    if u_num.shape != u_exact.shape:
        raise DimensionError(f"shape mismatch {u_num.shape} vs {u_exact.shape}")
    ref = np.linalg.norm(u_exact)
    if ref == 0:
        raise UndefinedMetricError("relative error is undefined for a zero reference")
    return float(np.linalg.norm(u_exact - u_num) / ref)
