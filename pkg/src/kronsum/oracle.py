"""Brute-force reference solutions.

The Kronecker-sum matrix is materialised in full and solved with a
partially pivoted LU written here, so no code path is shared with the
structured solvers beyond :func:`kronsum.tensor.vec`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, DimensionError, SingularMatrixError
from .tensor import DTYPE, as_matrix, kronecker_sum, unvec, vec

__all__ = ["DenseLU", "lu_factor", "lu_solve", "oracle_solve_kron", "MAX_ORACLE_ORDER"]

EPS = np.finfo(float).eps
MAX_ORACLE_ORDER = 4096


@dataclass(frozen=True)
class DenseLU:
    """Packed factors of ``P A = L U``.

    ``lu`` holds ``U`` on and above the diagonal and the multipliers of unit
    lower-triangular ``L`` below it; ``perm[i]`` is the original row now in
    position ``i``.
    """

    lu: np.ndarray
    perm: np.ndarray
    growth: float

    @property
    def L(self) -> np.ndarray:
        n = self.lu.shape[0]
        return np.tril(self.lu, k=-1) + np.eye(n)

    @property
    def U(self) -> np.ndarray:
        return np.triu(self.lu)


def lu_factor(a) -> DenseLU:
    """Gaussian elimination with partial (row) pivoting."""
    a = as_matrix(a, "A", square=True)
    n = a.shape[0]
    lu = a.copy()
    perm = np.arange(n)
    scale = np.linalg.norm(a) if n else 0.0
    amax = np.max(np.abs(a)) if n else 0.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= 1e3 * EPS * scale:
            raise SingularMatrixError(
                f"pivot {k} is {abs(lu[p, k]):.3e}, zero to working precision"
            )
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    growth = float(np.max(np.abs(np.triu(lu))) / amax) if n else 1.0
    return DenseLU(lu, perm, growth)


def lu_solve(fac: DenseLU, y) -> np.ndarray:
    """Forward then back substitution for one or several right-hand sides."""
    y = np.asarray(y, dtype=DTYPE)
    n = fac.lu.shape[0]
    if y.shape[0] != n:
        raise DimensionError(f"right-hand side has {y.shape[0]} rows, expected {n}")
    x = y[fac.perm].copy()
    lu = fac.lu
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x


def oracle_solve_kron(factors: Sequence, y) -> np.ndarray:
    """Solve ``sum_m X x_m factors[m-1] = Y`` through the explicit big matrix.

    ``factors`` are in mode order, so the materialised matrix is
    ``kronecker_sum(*reversed(factors))``.
    """
    mats = [as_matrix(f, f"A{m}", square=True) for m, f in enumerate(factors, start=1)]
    dims = tuple(m.shape[0] for m in mats)
    y = np.asarray(y, dtype=DTYPE)
    if y.shape != dims:
        raise DimensionError(f"right-hand side has shape {y.shape}, expected {dims}")
    order = int(np.prod(dims))
    if order > MAX_ORACLE_ORDER:
        raise CapacityError(
            f"dense oracle limited to order {MAX_ORACLE_ORDER}, requested {order}"
        )
    big = kronecker_sum(*reversed(mats))
    return unvec(lu_solve(lu_factor(big), vec(y)), dims)
