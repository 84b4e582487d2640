"""Dense matrix/tensor helpers and the multilinear products used by the solvers.

Matrices and third-order tensors are plain :class:`numpy.ndarray` objects of
dtype ``complex128``.  The only index convention anywhere in the package is
column-major ("first index fastest"): element ``(i, j, k)`` of an
``n1 x n2 x n3`` tensor sits at position ``i + j*n1 + k*n1*n2`` of its
vectorisation (zero-based).  :func:`vec` and :func:`unvec` are the single
implementation of that map.

In a Kronecker-sum system ``(A3 (+) A2 (+) A1) x = y`` the factor ``A_m``
has order ``n_m`` and acts on mode ``m`` of the tensor, so the leftmost
summand pairs with the slowest index.  Factor lists are always given in
mode order ``[A1, A2]`` or ``[A1, A2, A3]``.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DimensionError, PreconditionError

__all__ = [
    "as_matrix",
    "as_tensor",
    "vec",
    "vec_matrix",
    "vec_tensor",
    "unvec",
    "unvec_matrix",
    "unvec_tensor",
    "kronecker_product",
    "kronecker_sum2",
    "kronecker_sum3",
    "kronecker_sum",
    "hadamard",
    "outer_product",
    "mode_product",
    "multi_mode_product",
    "apply_kron_sum",
]

DTYPE = np.complex128


def _check_finite(a: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(a)):
        raise PreconditionError(f"{name} contains NaN or Inf entries")


def as_matrix(a, name: str = "matrix", square: bool = False) -> np.ndarray:
    """Promote ``a`` to a finite complex 2-D array."""
    m = np.asarray(a, dtype=DTYPE)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    _check_finite(m, name)
    return m


def as_tensor(a, name: str = "tensor") -> np.ndarray:
    """Promote ``a`` to a finite complex 3-D array."""
    t = np.asarray(a, dtype=DTYPE)
    if t.ndim != 3:
        raise DimensionError(f"{name} must be 3-D, got shape {t.shape}")
    _check_finite(t, name)
    return t


def vec(a) -> np.ndarray:
    """Column-major vectorisation of a matrix or tensor of any order."""
    return np.asarray(a).reshape(-1, order="F")


def vec_matrix(m) -> np.ndarray:
    """Stack the columns of ``m`` into one vector."""
    m = np.asarray(m)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {m.shape}")
    return vec(m)


def vec_tensor(t) -> np.ndarray:
    t = np.asarray(t)
    if t.ndim != 3:
        raise DimensionError(f"expected a 3-D tensor, got shape {t.shape}")
    return vec(t)


def unvec(v, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`vec` for the given shape."""
    v = np.asarray(v)
    dims = tuple(int(d) for d in dims)
    if v.ndim != 1 or v.size != int(np.prod(dims)):
        raise DimensionError(
            f"cannot reshape vector of shape {v.shape} into {dims}"
        )
    return v.reshape(dims, order="F")


def unvec_matrix(v, rows: int, cols: int) -> np.ndarray:
    return unvec(v, (rows, cols))


def unvec_tensor(v, dims: Sequence[int]) -> np.ndarray:
    if len(dims) != 3:
        raise DimensionError(f"tensor dims must have length 3, got {dims}")
    return unvec(v, dims)


def kronecker_product(a, b) -> np.ndarray:
    """Block matrix whose ``(i, j)`` block is ``a[i, j] * b``."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    (ra, ca), (rb, cb) = a.shape, b.shape
    # broadcasting keeps each entry a single multiplication (no BLAS rounding)
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def kronecker_sum(*mats) -> np.ndarray:
    """``M1 (+) M2 (+) ... (+) Mk`` for square operands.

    Term ``p`` is ``I (x) ... (x) Mp (x) ... (x) I``; the first operand varies
    slowest.  Only used by tests and the dense oracle.
    """
    if not mats:
        raise DimensionError("kronecker_sum needs at least one operand")
    mats = [as_matrix(m, f"operand {i}", square=True) for i, m in enumerate(mats)]
    orders = [m.shape[0] for m in mats]
    total = int(np.prod(orders))
    out = np.zeros((total, total), dtype=DTYPE)
    for p, m in enumerate(mats):
        left = np.eye(int(np.prod(orders[:p])), dtype=DTYPE)
        right = np.eye(int(np.prod(orders[p + 1:])), dtype=DTYPE)
        out += kronecker_product(kronecker_product(left, m), right)
    return out


def kronecker_sum2(a, b) -> np.ndarray:
    """``a (x) I + I (x) b``."""
    return kronecker_sum(a, b)


def kronecker_sum3(a, b, c) -> np.ndarray:
    """``a (x) I (x) I + I (x) b (x) I + I (x) I (x) c``."""
    return kronecker_sum(a, b, c)


def hadamard(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return a * b


def outer_product(u, v) -> np.ndarray:
    """Matrix with entries ``u[i] * v[j]``."""
    u = np.asarray(u, dtype=DTYPE).ravel()
    v = np.asarray(v, dtype=DTYPE).ravel()
    # operand order matches kronecker_product(v, u) so vec(u o v) == v kron u bitwise
    return v[None, :] * u[:, None]


def mode_product(t, v, mode: int) -> np.ndarray:
    """n-mode product ``t x_mode v`` for ``mode`` in 1, 2 (, 3).

    Works on matrices (``mode`` 1 is ``v @ t``, mode 2 is ``t @ v.T``) and on
    third-order tensors.  The contracted dimension of ``t`` is replaced by
    ``v.shape[0]``.
    """
    t = np.asarray(t)
    v = np.asarray(v)
    if v.ndim != 2:
        raise DimensionError(f"mode matrix must be 2-D, got shape {v.shape}")
    if t.ndim not in (2, 3) or mode not in range(1, t.ndim + 1):
        raise DimensionError(f"invalid mode {mode} for array of shape {t.shape}")
    axis = mode - 1
    if v.shape[1] != t.shape[axis]:
        raise DimensionError(
            f"mode-{mode} product needs {t.shape[axis]} columns, got {v.shape[1]}"
        )
    # each branch is a single (batched) GEMM with no transposed copies
    t = np.ascontiguousarray(t)
    if axis == 0:
        return (v @ t.reshape(t.shape[0], -1)).reshape((v.shape[0],) + t.shape[1:])
    if axis == t.ndim - 1:
        return (t.reshape(-1, t.shape[-1]) @ v.T).reshape(t.shape[:-1] + (v.shape[0],))
    return np.matmul(v, t)


def multi_mode_product(t, mats: Sequence, conj_transpose: bool = False) -> np.ndarray:
    """``t x_1 mats[0] x_2 mats[1] ...``; ``None`` entries are skipped.

    With ``conj_transpose`` each matrix is replaced by its conjugate transpose.
    """
    out = np.asarray(t)
    for m, v in enumerate(mats, start=1):
        if v is None:
            continue
        v = np.asarray(v)
        out = mode_product(out, v.conj().T if conj_transpose else v, m)
    return out


def apply_kron_sum(factors: Sequence, x) -> np.ndarray:
    """Evaluate ``sum_m x x_m factors[m-1]`` without forming the big matrix.

    Equals ``unvec(kronecker_sum(*reversed(factors)) @ vec(x))``.
    """
    x = np.asarray(x)
    if len(factors) != x.ndim or x.ndim not in (2, 3):
        raise DimensionError(
            f"{len(factors)} factors cannot act on an array of shape {x.shape}"
        )
    out = np.zeros(x.shape, dtype=np.result_type(x, DTYPE))
    for m, a in enumerate(factors, start=1):
        a = np.asarray(a)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] != x.shape[m - 1]:
            raise DimensionError(
                f"factor {m} has shape {a.shape}, expected square of order "
                f"{x.shape[m - 1]}"
            )
        out += mode_product(x, a, m)
    return out
