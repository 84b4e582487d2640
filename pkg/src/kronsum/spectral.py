"""Eigen- and Schur decompositions consumed by the Kronecker-sum solvers.

Two native routines live here:

* :func:`hermitian_eig` -- Householder reduction to real symmetric
  tridiagonal form followed by implicit QL with Wilkinson shifts.
* :func:`complex_schur` -- Householder reduction to upper Hessenberg form
  followed by single-shift complex QR (Givens bulge chasing).

Both loops run in Python over numpy row/column updates, which is fine for
the factor orders met in verification work.  For large orders ``method=
"auto"`` hands off to LAPACK through scipy; either way the result is checked
against the same residual contract in the test-suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DimensionError, PreconditionError
from .tensor import DTYPE, as_matrix

__all__ = [
    "EigenDecomposition",
    "SchurDecomposition",
    "hermitian_eig",
    "complex_schur",
    "closed_form_laplacian_eig",
    "NATIVE_MAX_ORDER",
]

EPS = np.finfo(float).eps
HERMITIAN_TOL = 1e-12
# above this order "auto" uses LAPACK (zheevd / zgees)
NATIVE_MAX_ORDER = 128


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class EigenDecomposition:
    """``A = U diag(eigvals) U*`` with unitary ``U`` and real eigenvalues."""

    U: np.ndarray
    eigvals: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "U", _frozen(np.asarray(self.U, dtype=DTYPE)))
        object.__setattr__(self, "eigvals", _frozen(np.asarray(self.eigvals, dtype=float)))

    @property
    def n(self) -> int:
        return self.U.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.eigvals) @ self.U.conj().T

    def residuals(self, a) -> dict:
        a = np.asarray(a, dtype=DTYPE)
        n = self.n
        return {
            "orthogonality": np.linalg.norm(self.U.conj().T @ self.U - np.eye(n)),
            "reconstruction": np.linalg.norm(a - self.reconstruct()),
        }


@dataclass(frozen=True)
class SchurDecomposition:
    """``A = U T U*`` with unitary ``U`` and upper-triangular ``T``."""

    U: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "U", _frozen(np.asarray(self.U, dtype=DTYPE)))
        object.__setattr__(self, "T", _frozen(np.triu(np.asarray(self.T, dtype=DTYPE))))

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def eigvals(self) -> np.ndarray:
        """Diagonal of ``T``."""
        return np.diag(self.T).copy()

    @property
    def strict(self) -> np.ndarray:
        """``T`` with its diagonal set to exact zero."""
        return np.triu(self.T, k=1)

    def reconstruct(self) -> np.ndarray:
        return self.U @ self.T @ self.U.conj().T

    def residuals(self, a) -> dict:
        a = np.asarray(a, dtype=DTYPE)
        n = self.n
        return {
            "orthogonality": np.linalg.norm(self.U.conj().T @ self.U - np.eye(n)),
            "reconstruction": np.linalg.norm(a - self.reconstruct()),
            "lower": float(np.max(np.abs(np.tril(self.T, k=-1)), initial=0.0)),
        }


def _use_native(method: str, n: int) -> bool:
    if method == "native":
        return True
    if method == "lapack":
        return False
    if method == "auto":
        return n <= NATIVE_MAX_ORDER
    raise ValueError(f"unknown method {method!r}; expected auto, native or lapack")


def _householder(x: np.ndarray):
    """Reflector ``v`` (unit norm) with ``(I - 2 v v*) x = alpha e1``.

    Returns ``(v, alpha)``; ``v`` is None when ``x`` is already a multiple of e1.
    """
    sigma = np.linalg.norm(x[1:])
    if sigma == 0.0:
        return None, x[0]
    x0 = x[0]
    norm = math.hypot(abs(x0), sigma)
    phase = x0 / abs(x0) if x0 != 0 else 1.0
    alpha = -phase * norm
    v = x.copy()
    v[0] -= alpha
    v /= np.linalg.norm(v)
    return v, alpha


def _hessenberg(a: np.ndarray):
    """Unitary reduction ``a = Q H Q*`` to upper Hessenberg ``H``."""
    n = a.shape[0]
    h = a.copy()
    q = np.eye(n, dtype=DTYPE)
    for k in range(n - 2):
        v, alpha = _householder(h[k + 1:, k])
        if v is None:
            continue
        vh = v.conj()
        h[k + 1:, k:] -= 2.0 * np.outer(v, vh @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, vh)
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, vh)
        h[k + 1, k] = alpha
        h[k + 2:, k] = 0.0
    return h, q


def _tridiagonalize(a: np.ndarray):
    """Reduce Hermitian ``a`` to real tridiagonal ``(d, e)`` with ``a = Q T Q*``."""
    h, q = _hessenberg(a)
    n = a.shape[0]
    d = h.diagonal().real.copy()
    sub = h.diagonal(-1).copy()
    # rotate the complex subdiagonal onto the positive real axis
    phases = np.ones(n, dtype=DTYPE)
    for k in range(n - 1):
        mag = abs(sub[k])
        if mag > 0:
            phases[k + 1] = phases[k] * sub[k] / mag
        else:
            phases[k + 1] = phases[k]
    q = q * phases
    return d, np.abs(sub), q


def _tql(d: np.ndarray, e: np.ndarray, z: np.ndarray):
    """Implicit QL on the symmetric tridiagonal ``(d, e)``; rotations go into ``z``."""
    n = d.size
    d = d.copy()
    e = np.append(e, 0.0)
    budget = 30 * n
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            budget -= 1
            if budget < 0:
                raise ConvergenceError(
                    f"implicit QL did not converge; stuck at subdiagonal {l}", index=l
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                z[:, i] = c * zi - s * z[:, i + 1]
                z[:, i + 1] = s * zi + c * z[:, i + 1]
                i -= 1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return d


def hermitian_eig(a, method: str = "auto") -> EigenDecomposition:
    """Eigendecomposition of a Hermitian (or real symmetric) matrix.

    Parameters
    ----------
    a : (n, n) array_like
        Must satisfy ``||a - a*||_F <= 1e-12 ||a||_F``.
    method : {"auto", "native", "lapack"}
        ``native`` is Householder tridiagonalisation plus implicit QL.

    Returns
    -------
    EigenDecomposition
        Eigenvalues ascending; columns of ``U`` are the eigenvectors.
    """
    a = as_matrix(a, "A", square=True)
    n = a.shape[0]
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) > HERMITIAN_TOL * scale:
        raise PreconditionError(
            "matrix is not Hermitian to 1e-12 relative; use the general (Schur) path"
        )
    a = 0.5 * (a + a.conj().T)
    if _use_native(method, n):
        d, e, q = _tridiagonalize(a)
        z = np.eye(n)
        lam = _tql(d, e, z)
        u = q @ z
    else:
        lam, u = scipy.linalg.eigh(a)
    order = np.argsort(lam, kind="stable")
    return EigenDecomposition(u[:, order], lam[order])


def _givens(f: complex, g: complex):
    """``(c, s, r)`` with ``[[c, s], [-conj(s), c]] @ [f, g] = [r, 0]``, ``c`` real."""
    if g == 0:
        return 1.0, 0.0, f
    if f == 0:
        return 0.0, np.conj(g) / abs(g), abs(g)
    af, ag = abs(f), abs(g)
    nrm = math.hypot(af, ag)
    phase = f / af
    return af / nrm, phase * np.conj(g) / nrm, phase * nrm


def _qr_schur(h: np.ndarray, z: np.ndarray):
    """Single-shift complex QR on upper Hessenberg ``h`` (in place), rotations into ``z``."""
    n = h.shape[0]
    hi = n - 1
    its = 0
    budget = 30 * n
    # fallback scale when both local diagonal entries are zero
    floor = EPS * float(np.linalg.norm(h))
    while hi > 0:
        l = hi
        while l > 0:
            tiny = EPS * (abs(h[l - 1, l - 1]) + abs(h[l, l])) or floor
            if abs(h[l, l - 1]) <= tiny:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            hi -= 1
            its = 0
            continue
        budget -= 1
        its += 1
        if budget < 0:
            raise ConvergenceError(
                f"QR iteration did not converge; stuck at subdiagonal {hi}", index=hi
            )
        if its % 10 == 0:
            # exceptional shift breaks cycles
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            a, b = h[hi - 1, hi - 1], h[hi - 1, hi]
            c, d = h[hi, hi - 1], h[hi, hi]
            tr_half = 0.5 * (a - d)
            disc = np.sqrt(tr_half * tr_half + b * c)
            r1 = d - tr_half + disc
            r2 = d - tr_half - disc
            mu = r1 if abs(r1 - d) < abs(r2 - d) else r2
        f, g = h[l, l] - mu, h[l + 1, l]
        for k in range(l, hi):
            if k > l:
                f, g = h[k, k - 1], h[k + 1, k - 1]
            c, s, r = _givens(f, g)
            rot = np.array([[c, s], [-np.conj(s), c]])
            rot_h = rot.conj().T
            j0 = k - 1 if k > l else k
            h[k:k + 2, j0:] = rot @ h[k:k + 2, j0:]
            if k > l:
                h[k, k - 1] = r
                h[k + 1, k - 1] = 0.0
            i1 = min(k + 3, hi + 1)
            h[:i1, k:k + 2] = h[:i1, k:k + 2] @ rot_h
            z[:, k:k + 2] = z[:, k:k + 2] @ rot_h
    return h, z


def complex_schur(a, method: str = "auto") -> SchurDecomposition:
    """Complex Schur form ``a = U T U*``.

    The diagonal of ``T`` comes out in whatever order QR deflation produces;
    no reordering is attempted.  Real input is promoted to complex so ``T``
    is genuinely triangular.
    """
    a = as_matrix(a, "A", square=True)
    n = a.shape[0]
    if n == 1:
        return SchurDecomposition(np.eye(1), a)
    if np.all(np.tril(a, k=-1) == 0):
        return SchurDecomposition(np.eye(n), a)
    if _use_native(method, n):
        h, q = _hessenberg(a)
        t, u = _qr_schur(h, q)
    else:
        t, u = scipy.linalg.schur(a, output="complex")
    return SchurDecomposition(u, np.triu(t))


def closed_form_laplacian_eig(n: int) -> EigenDecomposition:
    """Exact eigenpairs of ``tridiag(-1, 2, -1)`` of order ``n``.

    ``eigvals[i] = 4 sin^2((i+1) pi / (2(n+1)))`` and column ``i`` of ``U`` is
    the discrete sine mode, evaluated on the outer-product index grid.
    """
    if n < 1:
        raise DimensionError("Laplacian order must be at least 1")
    idx = np.arange(1, n + 1)
    lam = 4.0 * np.sin(np.pi / (2 * (n + 1)) * idx) ** 2
    u = math.sqrt(2.0 / (n + 1)) * np.sin(np.pi / (n + 1) * np.outer(idx, idx))
    return EigenDecomposition(u, lam)
