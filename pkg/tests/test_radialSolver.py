from conetorsion.coneCalculus import cone_indices
from conetorsion.heatKernels import solver_order
from conetorsion.radialSolver import BOUNDARIES, GalerkinSolver, RadialSolver,\
    bessel_heat, graded_grid, outer_radius
from conetorsion.status import NumericalError
import math
import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.special import iv


@pytest.fixture(scope="module")
def free_solver():
    return RadialSolver("none", t_max=1.0)


def test_graded_grid():
    nodes = graded_grid(0.05, 1.2, 2.0)
    assert nodes[0] == 0.0
    assert nodes[-1] == pytest.approx(2.0)
    assert np.all(np.diff(nodes) > 0)
    # uniform outside the core
    outer = np.diff(nodes[nodes >= 0.5 - 1e-12])
    np.testing.assert_allclose(outer, 0.05, rtol=1e-9)
    # graded towards the tip
    inner = np.diff(nodes[nodes <= 0.5 + 1e-12])
    assert inner[1] < inner[-1]


@pytest.mark.parametrize("h, ratio, r_end", [(0.0, 1.1, 1.0), (0.01, 1.0, 1.0),
                                             (0.1, 1.1, 1.0)])
def test_graded_grid_invalid(h, ratio, r_end):
    with pytest.raises(ValueError):
        graded_grid(h, ratio, r_end)


def test_outer_radius():
    assert outer_radius(1.0, 1e-14) == pytest.approx(1 + math.sqrt(4 * math.log(1e14)))
    assert outer_radius(0.1) < outer_radius(1.0)


@pytest.mark.parametrize("nu", [0.0, 1.0, 2.5])
def test_bessel_heat_matches_direct_form(nu):
    t = 0.3
    r1, r2 = 0.4, 0.9
    direct = math.exp(-(r1 ** 2 + r2 ** 2) / (4 * t)) * iv(nu, r1 * r2 / (2 * t)) / (2 * t)
    assert bessel_heat(nu, t, r1, r2) == pytest.approx(direct, rel=1e-12)


def test_bessel_heat_large_argument_is_finite():
    value = bessel_heat(3.0, 1e-4, 0.8, 0.8)
    assert np.isfinite(value)
    assert value > 0


@pytest.mark.parametrize("nu", [0.0, 1.0, 3.0])
def test_solver_matches_bessel(free_solver, nu):
    t = 0.2
    r1, r2 = 0.5, 0.7
    value = free_solver.canonical_kernel(nu, t, [r1], [r2])[0, 0]
    assert value == pytest.approx(float(bessel_heat(nu, t, r1, r2)), rel=1e-2)


def test_mode_kernel_weighting(free_solver):
    indices = cone_indices(3, 0, 3)
    t = 0.2
    canonical = free_solver.canonical_kernel(float(indices.nu), t, [0.5], [0.7])[0, 0]
    assert free_solver.mode_kernel(indices, t, 0.5, 0.7) == \
        pytest.approx((0.35 ** -1) * canonical)


@pytest.mark.parametrize("mode, boundary, t, r1, r2", [((1, 0, 1), "none", 0.2, 0.5, 0.7),
                                                       ((1, 0, 0), "relative", 0.1, 0.5, 0.75),
                                                       ((3, 0, 3), "absolute", 0.1, 0.5, 0.75)])
def test_solver_order(mode, boundary, t, r1, r2):
    coarse, fine, ratio = solver_order(cone_indices(*mode), t, r1, r2, boundary=boundary)
    assert fine < coarse
    assert ratio >= 3.0


def test_relative_boundary_vanishes():
    solver = RadialSolver("relative")
    assert solver.canonical_kernel(1.0, 0.1, [1.0], [0.5])[0, 0] == 0.0


def test_absolute_boundary_conserves_mass():
    solver = RadialSolver("absolute", h=0.01)
    nodes = solver.nodes
    values = solver.canonical_kernel(0.0, 0.5, nodes[1:], [0.5])[:, 0]
    # trapezoidal mass of the Neumann kernel with respect to r dr
    mass = trapezoid(values * nodes[1:], nodes[1:])
    assert mass == pytest.approx(1.0, rel=2e-2)


def test_solver_parameters():
    solver = RadialSolver("absolute", dt=0.01, h=0.02, ratio=1.1)
    parameters = solver.parameters
    assert parameters["boundary"] == "absolute"
    assert parameters["dt"] == 0.01
    assert parameters["r_end"] == pytest.approx(1.0)
    assert parameters["nodes"] == len(solver.nodes)
    assert set(BOUNDARIES) == {"none", "absolute", "relative"}


def test_solver_invalid_arguments(free_solver):
    with pytest.raises(ValueError):
        RadialSolver("dirichlet")
    with pytest.raises(ValueError):
        RadialSolver("none", startup_steps=3)
    with pytest.raises(ValueError):
        RadialSolver("none", dt=-1.0)
    with pytest.raises(ValueError):
        free_solver.canonical_kernel(1.0, 0.0, [0.5], [0.5])
    with pytest.raises(ValueError):
        free_solver.canonical_kernel(-1.0, 0.1, [0.5], [0.5])
    with pytest.raises(ValueError):
        free_solver.canonical_kernel(1.0, 0.1, [100.0], [0.5])


@pytest.mark.parametrize("nu", [0.0, 1.0, 2.5, 12.0])
@pytest.mark.parametrize("t", [0.02, 0.3, 1.0])
def test_galerkin_matches_bessel(nu, t):
    solver = GalerkinSolver("none")
    r1 = np.array([0.3, 0.6, 1.0])
    r2 = np.array([0.45, 0.9])
    expected = bessel_heat(nu, t, r1[:, None], r2[None, :])
    np.testing.assert_allclose(solver.canonical_kernel(nu, t, r1, r2), expected,
                               rtol=1e-9, atol=1e-13)


def test_galerkin_relative_boundary_vanishes():
    solver = GalerkinSolver("relative")
    assert solver.canonical_kernel(1.0, 0.1, [1.0], [0.5])[0, 0] == 0.0
    assert solver.radius(0.1) == 1.0


@pytest.mark.parametrize("t", [0.05, 0.5])
def test_galerkin_absolute_boundary_conserves_mass(t):
    solver = GalerkinSolver("absolute")
    nodes, weights = np.polynomial.legendre.leggauss(400)
    radii = 0.5 * (nodes + 1)
    values = solver.canonical_kernel(0.0, t, radii, [0.5])[:, 0]
    assert np.sum(values * radii * 0.5 * weights) == pytest.approx(1.0, rel=1e-9)


def test_galerkin_robin_matches_stepping():
    indices = cone_indices(3, 0, 3)
    spectral = GalerkinSolver("absolute").mode_kernel(indices, 0.1, 0.5, 0.75)
    stepping = RadialSolver("absolute", t_max=1.0).mode_kernel(indices, 0.1, 0.5, 0.75)
    assert stepping == pytest.approx(spectral, rel=1e-2)


def test_galerkin_radius_and_degree():
    solver = GalerkinSolver("none", margin=1e-14)
    assert solver.radius(1.0) == pytest.approx(outer_radius(1.0, 1e-14))
    assert solver.degree(0.0, 0.01) > solver.degree(0.0, 1.0)
    assert solver.degree(20.0, 0.1) > solver.degree(0.0, 0.1)
    assert solver.parameters["scheme"] == "galerkin"
    with pytest.raises(NumericalError):
        solver.degree(0.0, 1e-9)


def test_galerkin_invalid_arguments():
    with pytest.raises(ValueError):
        GalerkinSolver("dirichlet")
    with pytest.raises(ValueError):
        GalerkinSolver("none", margin=2.0)
    solver = GalerkinSolver("absolute")
    with pytest.raises(ValueError):
        solver.canonical_kernel(1.0, 0.0, [0.5], [0.5])
    with pytest.raises(ValueError):
        solver.canonical_kernel(-1.0, 0.1, [0.5], [0.5])
    with pytest.raises(ValueError):
        solver.canonical_kernel(1.0, 0.1, [1.5], [0.5])
