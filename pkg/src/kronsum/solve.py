"""Direct solvers for linear systems whose matrix is a Kronecker sum.

For factors ``A1, A2 (, A3)`` in mode order the system is

    (A3 (+) A2 (+) A1) vec(X) = vec(Y),   i.e.   sum_m X x_m A_m = Y.

Normal (Hermitian) factors: with ``A_m = U_m diag(l_m) U_m*``,

    X = (C o (Y x_1 U1* x_2 U2* x_3 U3*)) x_1 U1 x_2 U2 x_3 U3,
    C[i, j, k] = 1 / (l1[i] + l2[j] + l3[k]).

General factors: with Schur forms ``A_m = U_m T_m U_m*`` and ``S_m`` the
strictly upper part of ``T_m``,

    K_0     = C o (Y x_1 U1* x_2 U2* x_3 U3*)
    K_{j+1} = C o (K_j x_1 S1 + K_j x_2 S2 + K_j x_3 S3)
    X       = (sum_j (-1)^j K_j) x_1 U1 x_2 U2 x_3 U3

Every ``S_m`` application moves support to strictly smaller indices along
one mode, so ``K_j`` vanishes identically once ``j > sum_m (n_m - 1)``.
The series therefore has at most ``sum_m n_m - (#factors - 1)`` nonzero
terms; that count is the default cap.
"""
from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionError, PreconditionError, SingularityError
from .spectral import (
    EigenDecomposition,
    SchurDecomposition,
    complex_schur,
    hermitian_eig,
)
from .tensor import DTYPE, apply_kron_sum, as_matrix, multi_mode_product

__all__ = [
    "SolveOptions",
    "SolveReport",
    "Solvability",
    "solvability_check",
    "build_cauchy",
    "nilpotency_bound",
    "neumann_terms",
    "EigKronSolver",
    "SchurKronSolver",
    "solve_normal_2d",
    "solve_normal_3d",
    "solve_general_2d",
    "solve_general_3d",
]

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SolveOptions:
    """Tolerances for a Kronecker-sum solve.

    ``max_terms=None`` means the nilpotency bound of the problem at hand.
    """

    truncation_tol: float = 1e-14
    max_terms: int | None = None
    singularity_tol: float = 1e3 * EPS
    # residual costs one extra operator application; benchmarks switch it off
    compute_residual: bool = True

    def __post_init__(self):
        if not (self.truncation_tol > 0 and self.singularity_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_terms is not None and self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


@dataclass
class SolveReport:
    terms_used: int
    term_norms: list[float]
    residual: float
    elapsed: float
    # largest |C| entry, a cheap conditioning indicator
    conditioning: float = float("nan")
    converged: bool = True
    max_error: float | None = None
    eps_error: float | None = None
    eps_trace: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class Solvability:
    ok: bool
    witness: tuple[int, ...] | None
    min_abs_sum: float
    scale: float

    def __bool__(self):
        return self.ok


def _eig_sum_grid(eigs: Sequence) -> np.ndarray:
    vals = [np.asarray(v, dtype=DTYPE).ravel() for v in eigs]
    if len(vals) not in (2, 3):
        raise DimensionError(f"need 2 or 3 eigenvalue lists, got {len(vals)}")
    grid = np.zeros(tuple(v.size for v in vals), dtype=DTYPE)
    for m, v in enumerate(vals):
        shape = [1] * len(vals)
        shape[m] = v.size
        grid = grid + v.reshape(shape)
    return grid


def solvability_check(eigs: Sequence, singularity_tol: float = 1e3 * EPS) -> Solvability:
    """Test whether any eigenvalue sum (one per factor) is numerically zero.

    A sum counts as zero when ``|sum| <= singularity_tol * scale`` with
    ``scale`` the largest eigenvalue magnitude over all factors.  The witness
    is the zero-based index tuple of the smallest sum.
    """
    return _solvability(_eig_sum_grid(eigs), eigs, singularity_tol)


def _solvability(grid, eigs, singularity_tol):
    scale = max(float(np.max(np.abs(np.asarray(v)), initial=0.0)) for v in eigs)
    mags = np.abs(grid)
    flat = int(np.argmin(mags))
    smallest = float(mags.flat[flat])
    if smallest <= singularity_tol * scale or smallest == 0.0:
        witness = tuple(int(i) for i in np.unravel_index(flat, grid.shape))
        return Solvability(False, witness, smallest, scale)
    return Solvability(True, None, smallest, scale)


def build_cauchy(eigs: Sequence, opts: SolveOptions | None = None) -> np.ndarray:
    """Reciprocal eigenvalue-sum array ``C[i, j(, k)] = 1 / (l1[i] + l2[j] (+ l3[k]))``."""
    opts = opts or SolveOptions()
    grid = _eig_sum_grid(eigs)
    status = _solvability(grid, eigs, opts.singularity_tol)
    if not status.ok:
        raise SingularityError(
            f"eigenvalue sum at index {status.witness} is {status.min_abs_sum:.3e}"
            f" (scale {status.scale:.3e}); the Kronecker sum is singular",
            status.witness,
            status.min_abs_sum,
        )
    return 1.0 / grid


def nilpotency_bound(dims: Sequence[int]) -> int:
    """Number of possibly-nonzero series terms, ``sum(n_m - 1) + 1``."""
    return sum(int(n) - 1 for n in dims) + 1


def neumann_terms(cauchy: np.ndarray, k0: np.ndarray, strict: Sequence) -> Iterator[np.ndarray]:
    """Yield ``K_0, K_1, ...`` forever; ``K_j`` is zero past the nilpotency bound."""
    k = k0
    while True:
        yield k
        acc = np.zeros_like(k)
        for m, s in enumerate(strict, start=1):
            # only nonzero strict parts contribute
            if s is not None:
                acc += multi_mode_product(k, [None] * (m - 1) + [s])
        k = cauchy * acc


def _relative_residual(factors, x, y, enabled: bool = True) -> float:
    if not enabled:
        return float("nan")
    ynorm = np.linalg.norm(y)
    r = np.linalg.norm(apply_kron_sum(factors, x) - y)
    return float(r / ynorm) if ynorm > 0 else float(r)


def _check_rhs(y, dims) -> np.ndarray:
    y = np.asarray(y, dtype=DTYPE)
    if y.shape != tuple(dims):
        raise DimensionError(f"right-hand side has shape {y.shape}, expected {tuple(dims)}")
    if not np.all(np.isfinite(y)):
        raise PreconditionError("right-hand side contains NaN or Inf entries")
    return y


class _KronSolverBase:
    def __init__(self, decomps, factors=None, opts: SolveOptions | None = None):
        if len(decomps) not in (2, 3):
            raise DimensionError("Kronecker-sum solvers take 2 or 3 factors")
        self.decomps = tuple(decomps)
        self.opts = opts or SolveOptions()
        self.dims = tuple(d.n for d in self.decomps)
        if factors is None:
            factors = [d.reconstruct() for d in self.decomps]
        self.factors = tuple(np.asarray(f, dtype=DTYPE) for f in factors)
        for f, n in zip(self.factors, self.dims):
            if f.shape != (n, n):
                raise DimensionError("factor and decomposition orders disagree")
        self.cauchy = build_cauchy([d.eigvals for d in self.decomps], self.opts)
        self.cauchy.flags.writeable = False
        self.conditioning = float(np.max(np.abs(self.cauchy)))

    def _to_eigenbasis(self, y):
        return multi_mode_product(y, [d.U for d in self.decomps], conj_transpose=True)

    def _from_eigenbasis(self, z):
        return multi_mode_product(z, [d.U for d in self.decomps])


class EigKronSolver(_KronSolverBase):
    """Reusable solver for Kronecker sums of Hermitian (normal) factors."""

    def __init__(self, eigs: Sequence[EigenDecomposition], factors=None,
                 opts: SolveOptions | None = None):
        super().__init__(eigs, factors, opts)

    def solve(self, y):
        t0 = time.perf_counter()
        y = _check_rhs(y, self.dims)
        k0 = self.cauchy * self._to_eigenbasis(y)
        x = self._from_eigenbasis(k0)
        elapsed = time.perf_counter() - t0
        report = SolveReport(
            terms_used=1,
            term_norms=[float(np.linalg.norm(k0))],
            residual=_relative_residual(self.factors, x, y, self.opts.compute_residual),
            elapsed=elapsed,
            conditioning=self.conditioning,
        )
        return x, report


class SchurKronSolver(_KronSolverBase):
    """Reusable solver for Kronecker sums of arbitrary square factors."""

    def __init__(self, schurs: Sequence[SchurDecomposition], factors=None,
                 opts: SolveOptions | None = None):
        super().__init__(schurs, factors, opts)
        strict = []
        for d in self.decomps:
            s = d.strict
            strict.append(s if np.any(s) else None)
        self.strict = tuple(strict)
        # triangular parts all zero: only K_0 can be nonzero
        self.bound = 1 if all(s is None for s in strict) else nilpotency_bound(self.dims)

    def _k0(self, y):
        return self.cauchy * self._to_eigenbasis(y)

    def solve(self, y):
        t0 = time.perf_counter()
        y = _check_rhs(y, self.dims)
        max_terms = self.opts.max_terms or self.bound
        k0 = self._k0(y)
        k0_norm = float(np.linalg.norm(k0))
        total = np.zeros_like(k0)
        norms: list[float] = []
        converged = False
        for j, k in enumerate(neumann_terms(self.cauchy, k0, self.strict)):
            norm = float(np.linalg.norm(k))
            total += k if j % 2 == 0 else -k
            norms.append(norm)
            if norm <= self.opts.truncation_tol * k0_norm or j + 1 >= self.bound:
                converged = True
                break
            if j + 1 >= max_terms:
                break
        x = self._from_eigenbasis(total)
        elapsed = time.perf_counter() - t0
        if not converged:
            warnings.warn(
                f"Neumann series stopped at the {max_terms}-term cap with last term "
                f"norm {norms[-1]:.3e} above tolerance",
                RuntimeWarning,
                stacklevel=2,
            )
        report = SolveReport(
            terms_used=len(norms),
            term_norms=norms,
            residual=_relative_residual(self.factors, x, y, self.opts.compute_residual),
            elapsed=elapsed,
            conditioning=self.conditioning,
            converged=converged,
        )
        return x, report

    def partial_solutions(self, y, n_terms: int) -> Iterator[tuple[np.ndarray, float]]:
        """Yield ``(X_L, ||K_{L-1}||)`` for series lengths ``L = 1 .. n_terms``.

        No truncation is applied, so the caller sees every prefix of the series.
        """
        y = _check_rhs(y, self.dims)
        k0 = self._k0(y)
        total = np.zeros_like(k0)
        terms = neumann_terms(self.cauchy, k0, self.strict)
        for j, k in zip(range(n_terms), terms):
            total += k if j % 2 == 0 else -k
            yield self._from_eigenbasis(total), float(np.linalg.norm(k))


def _factor_list(factors, ndim):
    mats = [as_matrix(a, f"A{m}", square=True) for m, a in enumerate(factors, start=1)]
    if len(mats) != ndim:
        raise DimensionError(f"expected {ndim} factors, got {len(mats)}")
    return mats


def _decompose_all(mats, decompose, method):
    """Decompose each factor once; identical factors share one decomposition."""
    out = []
    for i, a in enumerate(mats):
        for j in range(i):
            if mats[j].shape == a.shape and np.array_equal(mats[j], a):
                out.append(out[j])
                break
        else:
            out.append(decompose(a, method=method))
    return out


def _solve_normal(factors, y, opts, method, ndim):
    mats = _factor_list(factors, ndim)
    try:
        eigs = _decompose_all(mats, hermitian_eig, method)
    except PreconditionError as exc:
        raise PreconditionError(
            f"{exc}; call solve_general_{ndim}d for non-normal factors"
        ) from None
    solver = EigKronSolver(eigs, mats, opts)
    return solver.solve(y)


def _solve_general(factors, y, opts, method, ndim):
    mats = _factor_list(factors, ndim)
    schurs = _decompose_all(mats, complex_schur, method)
    solver = SchurKronSolver(schurs, mats, opts)
    return solver.solve(y)


def solve_normal_2d(a1, a2, y, opts: SolveOptions | None = None, method: str = "auto"):
    """Solve ``(A2 (+) A1) vec(X) = vec(Y)``, i.e. ``A1 X + X A2^T = Y``, for Hermitian factors.

    Returns ``(X, SolveReport)``.  Raises :class:`PreconditionError` when a
    factor is not Hermitian and :class:`SingularityError` when some
    ``l1[i] + l2[j]`` vanishes.
    """
    return _solve_normal([a1, a2], y, opts, method, 2)


def solve_normal_3d(a1, a2, a3, y, opts: SolveOptions | None = None, method: str = "auto"):
    """Tensor analogue of :func:`solve_normal_2d` for ``(A3 (+) A2 (+) A1)``."""
    return _solve_normal([a1, a2, a3], y, opts, method, 3)


def solve_general_2d(a1, a2, y, opts: SolveOptions | None = None, method: str = "auto"):
    """Solve ``A1 X + X A2^T = Y`` for arbitrary square factors via Schur forms.

    The recursion is ``K_{j+1} = C o (S1 K_j + K_j S2^T)``.
    """
    return _solve_general([a1, a2], y, opts, method, 2)


def solve_general_3d(a1, a2, a3, y, opts: SolveOptions | None = None, method: str = "auto"):
    return _solve_general([a1, a2, a3], y, opts, method, 3)

