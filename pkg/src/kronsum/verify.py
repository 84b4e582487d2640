"""Randomised invariant suites backing ``kronsum verify`` and the acceptance tests.

Every suite draws from its own generator seeded by ``(seed, suite id)``, so a
suite's outcome does not depend on which other suites ran first.  A suite
returns a :class:`SuiteResult` with the number of passing instances and the
worst observed error.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SingularityError
from .oracle import oracle_solve_kron
from .solve import (
    SchurKronSolver,
    SolveOptions,
    build_cauchy,
    neumann_terms,
    nilpotency_bound,
    solvability_check,
    solve_general_2d,
    solve_general_3d,
    solve_normal_2d,
    solve_normal_3d,
)
from .spectral import complex_schur
from .tensor import (
    apply_kron_sum,
    hadamard,
    kronecker_product,
    kronecker_sum,
    mode_product,
    multi_mode_product,
    outer_product,
    vec,
)

__all__ = [
    "SuiteResult",
    "SUITES",
    "random_complex",
    "random_hermitian",
    "oracle_equivalence",
    "run_all",
]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: int
    total: int
    worst: float
    tol: float
    seconds: float

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total

    def line(self) -> str:
        flag = "PASS" if self.ok else "FAIL"
        return (f"{flag} {self.name}: {self.passed}/{self.total} "
                f"(worst {self.worst:.3e}, tol {self.tol:.0e}, {self.seconds:.2f} s)")


def random_complex(rng: np.random.Generator, *shape) -> np.ndarray:
    """Entries from the unit complex Gaussian (E|z|^2 = 1)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    g = random_complex(rng, n, n)
    return 0.5 * (g + g.conj().T)


def _rel(a, b) -> float:
    nb = np.linalg.norm(b)
    d = np.linalg.norm(np.asarray(a) - np.asarray(b))
    return float(d / nb) if nb > 0 else float(d)


def _run(name: str, tol: float, cases, check: Callable) -> SuiteResult:
    t0 = time.perf_counter()
    passed = total = 0
    worst = 0.0
    for case in cases:
        err = float(check(case))
        total += 1
        worst = max(worst, err)
        if err <= tol:
            passed += 1
    return SuiteResult(name, passed, total, worst, tol, time.perf_counter() - t0)


_FAMILIES = {
    "2d-normal": (2, solve_normal_2d, True),
    "3d-normal": (3, solve_normal_3d, True),
    "2d-general": (2, solve_general_2d, False),
    "3d-general": (3, solve_general_3d, False),
}


def oracle_equivalence(seed: int, family: str, count: int = 200, tol: float = 1e-9) -> SuiteResult:
    """Structured solve vs dense LU on random instances with orders 2 to 5.

    The recorded error of an instance is the larger of the relative solution
    error and the relative residual.
    """
    ndim, solver, hermitian = _FAMILIES[family]
    rng = np.random.default_rng([seed, 1, list(_FAMILIES).index(family)])

    def cases():
        for _ in range(count):
            dims = tuple(int(n) for n in rng.integers(2, 6, size=ndim))
            make = random_hermitian if hermitian else (lambda r, n: random_complex(r, n, n))
            factors = [make(rng, n) + 3 * np.eye(n) for n in dims]
            yield factors, random_complex(rng, *dims)

    def check(case):
        factors, y = case
        x, rep = solver(*factors, y)
        return max(_rel(x, oracle_solve_kron(factors, y)), rep.residual)

    return _run(f"oracle equivalence [{family}]", tol, cases(), check)


def vec_triple_product(seed: int, count: int = 50) -> SuiteResult:
    """``vec(A B C) = (C^T kron A) vec(B)``."""
    rng = np.random.default_rng([seed, 2])
    cases = ((random_complex(rng, 4, 3), random_complex(rng, 3, 2), random_complex(rng, 2, 5))
             for _ in range(count))

    def check(c):
        a, b, cc = c
        return _rel(kronecker_product(cc.T, a) @ vec(b), vec(a @ b @ cc))

    return _run("vec of triple product", 1e-12, cases, check)


def vec_hadamard(seed: int, count: int = 50) -> SuiteResult:
    rng = np.random.default_rng([seed, 3])

    def cases():
        for _ in range(count):
            shape = tuple(int(n) for n in rng.integers(1, 6, size=int(rng.integers(2, 4))))
            yield random_complex(rng, *shape), random_complex(rng, *shape)

    def check(c):
        a, b = c
        return float(np.max(np.abs(vec(hadamard(a, b)) - hadamard(vec(a), vec(b)))))

    return _run("vec of Hadamard product", 0.0, cases(), check)


def vec_outer(seed: int, count: int = 50) -> SuiteResult:
    """``vec(u o v) = v kron u`` with no rounding difference."""
    rng = np.random.default_rng([seed, 4])
    cases = ((random_complex(rng, int(rng.integers(1, 7))), random_complex(rng, int(rng.integers(1, 7))))
             for _ in range(count))

    def check(c):
        u, v = c
        kron = kronecker_product(v.reshape(-1, 1), u.reshape(-1, 1)).ravel()
        return float(np.max(np.abs(vec(outer_product(u, v)) - kron)))

    return _run("vec of outer product", 0.0, cases, check)


def vec_mode_products(seed: int, count: int = 50) -> SuiteResult:
    """``vec(T x1 A x2 B x3 C) = (C kron B kron A) vec(T)`` for dims up to 4."""
    rng = np.random.default_rng([seed, 5])

    def cases():
        for _ in range(count):
            n = rng.integers(1, 5, size=3)
            r = rng.integers(1, 5, size=3)
            t = random_complex(rng, *n)
            mats = [random_complex(rng, int(r[m]), int(n[m])) for m in range(3)]
            yield t, mats

    def check(c):
        t, (a, b, cc) = c
        big = kronecker_product(kronecker_product(cc, b), a)
        return _rel(vec(multi_mode_product(t, [a, b, cc])), big @ vec(t))

    return _run("vec of mode products", 1e-12, cases(), check)


def mode_products_commute(seed: int, count: int = 50) -> SuiteResult:
    rng = np.random.default_rng([seed, 6])

    def cases():
        for _ in range(count):
            n = [int(v) for v in rng.integers(1, 5, size=3)]
            p, q = sorted(rng.choice(3, size=2, replace=False) + 1)
            yield (random_complex(rng, *n), random_complex(rng, n[p - 1], n[p - 1]),
                   random_complex(rng, n[q - 1], n[q - 1]), int(p), int(q))

    def check(c):
        t, a, b, p, q = c
        lhs = mode_product(mode_product(t, a, p), b, q)
        rhs = mode_product(mode_product(t, b, q), a, p)
        return _rel(lhs, rhs)

    return _run("mode products commute", 1e-14, cases(), check)


def kron_sum_action(seed: int, count: int = 50) -> SuiteResult:
    """``apply_kron_sum`` matches the materialised Kronecker sum (tensor form)."""
    rng = np.random.default_rng([seed, 7])

    def cases():
        for _ in range(count):
            dims = [int(n) for n in rng.integers(1, 5, size=int(rng.integers(2, 4)))]
            yield [random_complex(rng, n, n) for n in dims], random_complex(rng, *dims)

    def check(c):
        factors, x = c
        dense = kronecker_sum(*reversed(factors)) @ vec(x)
        return _rel(vec(apply_kron_sum(factors, x)), dense)

    return _run("Kronecker-sum action", 1e-12, cases(), check)


def sylvester_form(seed: int, count: int = 50) -> SuiteResult:
    """``X A^T + B X = unvec((A (+) B) vec X)``."""
    rng = np.random.default_rng([seed, 8])

    def cases():
        for _ in range(count):
            na, nb = (int(v) for v in rng.integers(1, 6, size=2))
            yield random_complex(rng, na, na), random_complex(rng, nb, nb), random_complex(rng, nb, na)

    def check(c):
        a, b, x = c
        direct = x @ a.T + b @ x
        return _rel(vec(direct), kronecker_sum(a, b) @ vec(x))

    return _run("Sylvester matrix form", 1e-12, cases(), check)


def diagonal_inverse(seed: int, count: int = 50) -> SuiteResult:
    """``(L3 (+) L2 (+) L1) diag(vec C) = I`` for positive diagonals."""
    rng = np.random.default_rng([seed, 9])

    def cases():
        for _ in range(count):
            dims = rng.integers(1, 5, size=3)
            yield [rng.uniform(0.1, 5.0, size=int(n)) for n in dims]

    def check(lams):
        c = build_cauchy(lams)
        big = kronecker_sum(*[np.diag(v) for v in reversed(lams)])
        prod = big @ np.diag(vec(c))
        return float(np.max(np.abs(prod - np.eye(prod.shape[0]))))

    return _run("diagonal Kronecker-sum inverse", 1e-13, cases(), check)


def _triangular(rng, n, shift=3.0):
    t = np.triu(random_complex(rng, n, n))
    return t + shift * np.eye(n)


def neumann_inverse(seed: int, count: int = 50) -> SuiteResult:
    """Alternating series on triangular factors equals the dense inverse."""
    rng = np.random.default_rng([seed, 10])

    def cases():
        for _ in range(count):
            dims = [int(n) for n in rng.integers(1, 5, size=int(rng.integers(2, 4)))]
            yield [_triangular(rng, n) for n in dims], random_complex(rng, *dims)

    def check(c):
        factors, y = c
        solver = SchurKronSolver([complex_schur(f) for f in factors], factors)
        x, _ = solver.solve(y)
        dense = np.linalg.solve(kronecker_sum(*reversed(factors)), vec(y))
        return _rel(vec(x), dense)

    return _run("triangular Neumann inverse", 1e-10, cases(), check)


def nilpotency(seed: int, per_shape: int = 3, extra: int = 3) -> SuiteResult:
    """Series terms past ``sum(n_i - 1)`` vanish, and solves never pass the cap.

    Every shape with orders 1 to 4 (2 and 3 factors) is tried.  The error of
    an instance is ``max_{j >= bound} ||K_j|| / ||K_0||``, set to infinity if
    the solver used more terms than the bound.
    """
    rng = np.random.default_rng([seed, 11])
    shapes = [s for k in (2, 3) for s in itertools.product(range(1, 5), repeat=k)]

    def cases():
        for dims in shapes:
            for _ in range(per_shape):
                yield [_triangular(rng, n) for n in dims], random_complex(rng, *dims)

    def check(c):
        factors, y = c
        solver = SchurKronSolver([complex_schur(f) for f in factors], factors,
                                 SolveOptions(truncation_tol=1e-300))
        bound = nilpotency_bound(solver.dims)
        _, rep = solver.solve(y)
        if rep.terms_used > bound:
            return float("inf")
        k0 = solver._k0(y)
        k0n = np.linalg.norm(k0)
        terms = neumann_terms(solver.cauchy, k0, solver.strict)
        tail = [np.linalg.norm(k) for j, k in zip(range(bound + extra), terms) if j >= bound]
        return float(max(tail) / k0n) if k0n > 0 else 0.0

    return _run("Neumann series nilpotency", 1e-13, cases(), check)


def singularity_planting(seed: int, count: int = 100) -> SuiteResult:
    """Plant one zero eigenvalue sum; both the check and the solver must flag it.

    Factors are upper triangular with the planted spectrum on the diagonal so
    the Schur form keeps eigenvalue positions and the witness is comparable.
    Error is 0 for a correct raise and 1 otherwise.
    """
    rng = np.random.default_rng([seed, 12])

    def cases():
        for i in range(count):
            ndim = 2 + i % 2
            dims = [int(n) for n in rng.integers(2, 6, size=ndim)]
            # spectra well away from cancelling except at the planted spot
            lams = [random_complex(rng, n) + 4.0 for n in dims[1:]]
            witness = tuple(int(rng.integers(0, n)) for n in dims)
            first = random_complex(rng, dims[0]) + 4.0
            first[witness[0]] = -sum(lam[w] for lam, w in zip(lams, witness[1:]))
            lams.insert(0, first)
            factors = [np.diag(lam) + np.triu(random_complex(rng, len(lam), len(lam)), 1)
                       for lam in lams]
            yield lams, factors, random_complex(rng, *dims), witness

    def check(c):
        lams, factors, y, witness = c
        status = solvability_check(lams)
        if status.ok or status.witness != witness:
            return 1.0
        solve = solve_general_2d if len(factors) == 2 else solve_general_3d
        try:
            solve(*factors, y)
        except SingularityError as exc:
            return 0.0 if exc.witness == witness else 1.0
        return 1.0

    return _run("planted singular spectra", 0.0, cases(), check)


SUITES: dict[str, Callable[[int], SuiteResult]] = {
    **{f"oracle-{fam}": (lambda s, fam=fam: oracle_equivalence(s, fam)) for fam in _FAMILIES},
    "vec-triple": vec_triple_product,
    "vec-hadamard": vec_hadamard,
    "vec-outer": vec_outer,
    "vec-mode-products": vec_mode_products,
    "mode-commute": mode_products_commute,
    "kron-sum-action": kron_sum_action,
    "sylvester-form": sylvester_form,
    "diagonal-inverse": diagonal_inverse,
    "neumann-inverse": neumann_inverse,
    "nilpotency": nilpotency,
    "singularity": singularity_planting,
}


def run_all(seed: int = 0, names=None) -> list[SuiteResult]:
    names = list(SUITES) if names is None else list(names)
    return [SUITES[n](seed) for n in names]
