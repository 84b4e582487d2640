import numpy as np
import pytest

from kronsum import DimensionError, UndefinedMetricError
from kronsum.oracle import oracle_solve_kron
from kronsum.pde import (
    ConvDiffProblem,
    Grid1D,
    PoissonProblem,
    assemble_convdiff,
    assemble_poisson_rhs,
    constant_source_poisson,
    fromm_factor,
    laplacian_1d,
    poisson_factors,
    relative_error,
    solve_convdiff_2d,
    solve_poisson,
    solve_poisson_2d,
    solve_poisson_3d,
)
from kronsum.tensor import kronecker_sum


# --- grids and 1-D operators ---

def test_grid_nodes_interior():
    g = Grid1D(3, -1.0, 1.0)
    assert g.h == pytest.approx(0.5)
    np.testing.assert_allclose(g.nodes, [-0.5, 0.0, 0.5])
    with pytest.raises(DimensionError):
        Grid1D(0)


def test_laplacian_examples():
    np.testing.assert_array_equal(laplacian_1d(1), [[2]])
    np.testing.assert_array_equal(laplacian_1d(3), [[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
    a = laplacian_1d(6)
    np.testing.assert_array_equal(a, a.T)
    with pytest.raises(DimensionError):
        laplacian_1d(0)


def five_point_matrix(n):
    """Negative 5-point Laplacian (times h^2) assembled node by node, x index fastest."""
    m = np.zeros((n * n, n * n))
    for j in range(n):
        for i in range(n):
            p = i + j * n
            m[p, p] = 4
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                ii, jj = i + di, j + dj
                if 0 <= ii < n and 0 <= jj < n:
                    m[p, ii + jj * n] = -1
    return m


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_kronecker_structure_of_stencil(n):
    a = laplacian_1d(n)
    np.testing.assert_array_equal(kronecker_sum(a, a).real, five_point_matrix(n))


# --- Poisson right-hand side ---

def test_single_node_constant_source():
    problem = constant_source_poisson(1)
    y = assemble_poisson_rhs(problem)
    np.testing.assert_allclose(y, [[2.0]], atol=1e-15)
    u, rep = solve_poisson_2d(problem)
    assert u[0, 0] == pytest.approx(0.5, abs=1e-15)
    assert rep.max_error is None


def test_homogeneous_problem_is_zero():
    grid = Grid1D(5)
    problem = PoissonProblem((grid, grid), f=lambda x, y: 0 * x, g=lambda x, y: 0 * x)
    assert not np.any(assemble_poisson_rhs(problem))
    u, _ = solve_poisson_2d(problem)
    assert not np.any(u)


def test_boundary_data_on_one_edge():
    grid = Grid1D(2)
    problem = PoissonProblem((grid, grid), f=lambda x, y: 0 * x,
                             g=lambda x, y: np.where(np.isclose(y, 0.0), 1.0, 0.0))
    y = assemble_poisson_rhs(problem).real
    # nodes next to the y = 0 edge are [:, 0]
    np.testing.assert_array_equal(y, [[1, 0], [1, 0]])


def test_quadratic_solution_reproduced_with_boundary_data():
    # the 5-point stencil is exact on quadratics
    exact = lambda x, y: x**2 + 2 * y**2 - x * y
    grid = Grid1D(9, -0.5, 1.5)
    problem = PoissonProblem((grid, grid), f=lambda x, y: 6 + 0 * x, g=exact, exact=exact)
    _, rep = solve_poisson_2d(problem)
    assert rep.max_error <= 1e-12


def test_quadratic_solution_unequal_spacing():
    exact = lambda x, y, z: x**2 - y**2 + 3 * z**2 + x
    grids = (Grid1D(5), Grid1D(8, 0, 2), Grid1D(3, -1, 0))
    problem = PoissonProblem(grids, f=lambda x, y, z: 6 + 0 * x, g=exact, exact=exact)
    u, rep = solve_poisson_3d(problem)
    assert u.shape == (5, 8, 3)
    assert rep.max_error <= 1e-12
    assert rep.residual <= 1e-12


def test_poisson_3d_random_source_against_oracle():
    rng = np.random.default_rng(0)
    grid = Grid1D(4)
    f = rng.standard_normal((4, 4, 4))
    problem = PoissonProblem((grid,) * 3, f=f)
    u, rep = solve_poisson_3d(problem)
    ref = oracle_solve_kron(poisson_factors(problem), assemble_poisson_rhs(problem)).real
    assert relative_error(u, ref) <= 1e-10
    assert rep.residual <= 1e-9


def test_poisson_dimension_guards():
    grid = Grid1D(3)
    with pytest.raises(DimensionError):
        solve_poisson_2d(PoissonProblem((grid,) * 3, f=np.zeros((3, 3, 3))))
    with pytest.raises(DimensionError):
        solve_poisson_3d(PoissonProblem((grid,) * 2, f=np.zeros((3, 3))))


def test_poisson_source_shape_check():
    grid = Grid1D(3)
    with pytest.raises(DimensionError):
        PoissonProblem((grid, grid), f=np.zeros((3, 4)))


# --- Fromm factor ---

def test_fromm_without_convection_is_scaled_laplacian():
    h = 0.2
    np.testing.assert_allclose(fromm_factor(4, 0.3, 0.0, h), 0.3 / h**2 * laplacian_1d(4), rtol=1e-15)


def test_fromm_band_pattern():
    h = 0.25
    a = fromm_factor(3, 1e-300, 4 * h, h)
    np.testing.assert_allclose(a.real, [[3, -5, 1], [1, 3, -5], [0, 1, 3]], atol=1e-12)


def test_fromm_corner_entry():
    assert fromm_factor(3, 1.0, 1.0, 0.25)[0, 0] == pytest.approx(35.0, abs=1e-13)


def test_fromm_preconditions():
    with pytest.raises(DimensionError):
        fromm_factor(2, 1.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        fromm_factor(4, 0.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        ConvDiffProblem.manufactured(8, nu=-1.0)


# --- convection-diffusion ---

def test_convdiff_without_convection_matches_poisson():
    n = 63
    cd = ConvDiffProblem.manufactured(n, nu=1.0, c=(0.0, 0.0))
    u_cd, _ = solve_convdiff_2d(cd)
    grid = Grid1D(n)
    # -lap(u) = f  is  u_xx + u_yy = -f
    poisson = PoissonProblem((grid, grid), f=lambda x, y: -cd.f(x, y))
    u_p, _ = solve_poisson(poisson)
    assert relative_error(u_cd, u_p) <= 1e-10


@pytest.mark.parametrize("c", [(1.0, 1.0), (-2.0, 0.5), (0.0, -1.0)])
def test_convdiff_small_grid_against_oracle(c):
    problem = ConvDiffProblem.manufactured(4, nu=1.0, c=c)
    u, rep = solve_convdiff_2d(problem, method="native")
    factors, y, _ = assemble_convdiff(problem)
    ref = oracle_solve_kron(factors, y).real
    if c[0] >= 0:
        ref = ref[::-1]
    if c[1] >= 0:
        ref = ref[:, ::-1]
    assert relative_error(u, ref) <= 1e-9
    assert rep.residual <= 1e-9


def test_convdiff_field_in_natural_order():
    problem = ConvDiffProblem.manufactured(31, nu=1.0, c=(3.0, -2.0))
    u, rep = solve_convdiff_2d(problem)
    x = problem.grid.nodes
    exact = problem.exact(x[:, None], x[None, :])
    assert relative_error(u, exact) == pytest.approx(rep.eps_error, rel=1e-12)
    assert rep.eps_error < 5e-3


def test_convdiff_second_order():
    errs = [solve_convdiff_2d(ConvDiffProblem.manufactured(n))[1].eps_error for n in (15, 31, 63)]
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 3.5) & (ratios < 4.5))


def test_convdiff_trace_non_increasing():
    _, rep = solve_convdiff_2d(ConvDiffProblem.manufactured(63), trace_terms=15)
    tr = np.array(rep.eps_trace)
    assert len(tr) == 15 and rep.terms_used == 15
    assert np.all(np.diff(tr) <= 1e-12)
    assert tr[-1] == pytest.approx(rep.eps_error, rel=1e-10)


def test_convdiff_trace_needs_exact():
    problem = ConvDiffProblem(8, 1.0, 1.0, 1.0, f=lambda x, y: 1 + 0 * x)
    u, rep = solve_convdiff_2d(problem)
    assert rep.eps_error is None and u.shape == (8, 8)
    with pytest.raises(ValueError):
        solve_convdiff_2d(problem, trace_terms=5)


# --- error metric ---

def test_relative_error_examples():
    u = np.random.default_rng(1).standard_normal((5, 5))
    assert relative_error(u, u) == 0.0
    assert relative_error(1.1 * u, u) == pytest.approx(0.1, abs=1e-15)
    assert relative_error(np.zeros_like(u), u) == 1.0


def test_relative_error_guards():
    with pytest.raises(UndefinedMetricError):
        relative_error(np.ones(3), np.zeros(3))
    with pytest.raises(DimensionError):
        relative_error(np.ones(3), np.ones(4))
