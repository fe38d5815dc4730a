from conetorsion.coneCalculus import ConePoint, cone_indices
from conetorsion.heatKernels import METHODS, HeatGrid, bessel_mode_kernel,\
    cone_mode_sum_kernel, decay_envelope, duhamel_compare, heat_trace, make_solver,\
    mode_heat_radial, orbifold_image_kernel, sample_pairs, semigroup_defect
from conetorsion.linkSpectrum import circle_quotient_spectrum
from conetorsion.radialSolver import GalerkinSolver, RadialSolver
import math
import numpy as np
import pytest


def _gaussian(t, x1, x2):
    return math.exp(-x1.distance(x2) ** 2 / (4 * t)) / (4 * math.pi * t)


def _bump(r, center=0.6, width=0.3):
    u = (np.asarray(r) - center) / width
    inside = np.abs(u) < 1
    values = np.zeros_like(u)
    values[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return values


@pytest.fixture(scope="module")
def free_galerkin():
    return GalerkinSolver("none")


@pytest.mark.parametrize("method, rel", [("bessel", 1e-8), ("solver", 1e-7)])
@pytest.mark.parametrize("t", [0.05, 0.2, 1.0])
def test_mode_sum_on_plane_is_gaussian(t, method, rel):
    x1 = ConePoint(0.4, 0.3)
    x2 = ConePoint(0.9, 2.0)
    assert cone_mode_sum_kernel(1, t, x1, x2, method) == \
        pytest.approx(_gaussian(t, x1, x2), rel=rel)


def test_image_sum_on_plane_is_gaussian():
    x1 = ConePoint(0.4, 0.3)
    x2 = ConePoint(0.9, 2.0)
    assert orbifold_image_kernel(1, 0.2, x1, x2) == pytest.approx(_gaussian(0.2, x1, x2))


@pytest.mark.parametrize("r, t", [(0.5, 0.1), (0.8, 0.5)])
def test_z2_diagonal(r, t):
    x = ConePoint(r, 0.7)
    expected = (1 + math.exp(-r * r / t)) / (4 * math.pi * t)
    assert orbifold_image_kernel(2, t, x, x) == pytest.approx(expected, rel=1e-12)
    assert cone_mode_sum_kernel(2, t, x, x) == pytest.approx(expected, rel=1e-7)
    assert cone_mode_sum_kernel(2, t, x, x, "bessel") == pytest.approx(expected, rel=1e-8)


def test_duhamel(group_order, acceptance):
    n_pairs = 20 if acceptance else 5
    pairs = sample_pairs(group_order, n_pairs, seed=0)
    grid = duhamel_compare(group_order, [0.05, 0.2, 1.0], pairs)
    assert grid.values_c.shape == (3, n_pairs)
    assert grid.sup_rel_discrepancy < 1e-4
    assert grid.solver["method"] == "solver"
    assert grid.solver["scheme"] == "galerkin"


@pytest.mark.slow
@pytest.mark.parametrize("k", [2, 3, 6])
def test_duhamel_seed_7(k):
    grid = duhamel_compare(k, [0.05, 0.2, 1.0], sample_pairs(k, 20, seed=7), method="solver")
    assert grid.sup_rel_discrepancy < 1e-4


def test_duhamel_bessel_oracle():
    pairs = sample_pairs(3, 4, seed=3)
    grid = duhamel_compare(3, [0.1, 0.5], pairs, method="bessel")
    assert grid.sup_rel_discrepancy < 1e-6
    assert grid.solver["method"] == "bessel"


def test_duhamel_stepping_method():
    pairs = sample_pairs(3, 2, seed=1)
    solver = RadialSolver("none", t_max=1.0)
    grid = duhamel_compare(3, [0.2], pairs, method="stepping", solver=solver)
    assert grid.sup_rel_discrepancy < 1e-2
    assert grid.solver["boundary"] == "none"
    assert grid.solver["dt"] == solver.parameters["dt"]


def test_duhamel_rejects_points_near_tip():
    pairs = [(ConePoint(0.1, 0.0), ConePoint(0.5, 0.0))]
    with pytest.raises(ValueError):
        duhamel_compare(2, [0.1], pairs)


@pytest.mark.parametrize("nu", [0, 2, 6, 24])
def test_galerkin_mode_kernel_matches_bessel(free_galerkin, nu):
    indices = cone_indices(1, 0, nu * nu)
    for t in (0.05, 0.2, 1.0):
        closed = float(bessel_mode_kernel(indices, t, 0.5, 0.9))
        assert mode_heat_radial(indices, t, 0.5, 0.9, solver=free_galerkin) == \
            pytest.approx(closed, rel=1e-9, abs=1e-12)


def test_mode_kernel_methods_agree():
    indices = cone_indices(1, 0, 4)
    solver = RadialSolver("none", t_max=1.0)
    closed = float(bessel_mode_kernel(indices, 0.2, 0.5, 0.7))
    assert mode_heat_radial(indices, 0.2, 0.5, 0.7, solver=solver) == \
        pytest.approx(closed, rel=1e-2)
    assert mode_heat_radial(indices, 0.2, 0.5, 0.7) == pytest.approx(closed, rel=1e-9)
    with pytest.raises(ValueError):
        mode_heat_radial(indices, 0.2, 0.5, 0.7, boundary="relative", solver=solver)


def test_mode_kernel_off_diagonal_decay(free_galerkin):
    indices = cone_indices(1, 0, 4)
    values = [mode_heat_radial(indices, t, 0.4, 0.8, solver=free_galerkin)
              for t in (0.01, 0.005, 0.0025)]
    assert values[0] > values[1] > values[2] > 0
    assert values[2] < 1e-4


def test_mode_kernel_delta_initial_condition(free_galerkin):
    nodes, weights = np.polynomial.legendre.leggauss(200)
    radii = 0.6 + 0.3 * nodes
    weights = 0.3 * weights
    # -f'' - f'/r of the bump at its center
    generator = 2 * math.exp(-1.0) / 0.09
    errors = []
    for t in (1e-3, 5e-4):
        kernel = free_galerkin.canonical_kernel(0.0, t, [0.6], radii)[0]
        smoothed = float(np.sum(kernel * _bump(radii) * radii * weights))
        errors.append(smoothed - math.exp(-1.0))
    assert errors[0] == pytest.approx(-1e-3 * generator, rel=0.1)
    assert errors[0] / errors[1] == pytest.approx(2.0, rel=0.1)


@pytest.mark.parametrize("boundary", ["none", "absolute", "relative"])
def test_mode_kernel_symmetry(boundary):
    indices = cone_indices(3, 0, 3)
    for solver, rel in ((GalerkinSolver(boundary), 1e-10),
                        (RadialSolver(boundary, t_max=1.0), 1e-8)):
        forward = mode_heat_radial(indices, 0.1, 0.45, 0.8, boundary, solver)
        backward = mode_heat_radial(indices, 0.1, 0.8, 0.45, boundary, solver)
        assert forward > 0
        assert forward == pytest.approx(backward, rel=rel)


def test_kernels_are_positive(group_order, free_galerkin):
    pairs = sample_pairs(group_order, 4, seed=5)
    for t in (0.05, 0.5):
        for x1, x2 in pairs:
            assert orbifold_image_kernel(group_order, t, x1, x2) > 0
            assert cone_mode_sum_kernel(group_order, t, x1, x2, "solver", free_galerkin) > 0


def test_mode_sum_invalid_arguments():
    x = ConePoint(0.5)
    with pytest.raises(ValueError):
        cone_mode_sum_kernel(2, 0.1, x, x, method="fourier")
    with pytest.raises(ValueError):
        cone_mode_sum_kernel(2, 0.0, x, x)
    with pytest.raises(ValueError):
        make_solver("fourier")
    assert set(METHODS) == {"bessel", "solver", "stepping"}
    assert make_solver("bessel") is None
    assert isinstance(make_solver("stepping", dt=0.01), RadialSolver)


def test_heat_trace_circle():
    spectrum = circle_quotient_spectrum(1, 400.0)
    assert heat_trace(spectrum, 1.0, include_harmonic=True) == pytest.approx(1.77264, abs=1e-5)
    assert heat_trace(spectrum, 1.0) == pytest.approx(0.77264, abs=1e-5)


def test_heat_trace_inputs():
    times = np.array([0.5, 1.0])
    traces = heat_trace(([1.0, 4.0], [2, 2]), times)
    np.testing.assert_allclose(traces, 2 * np.exp(-times) + 2 * np.exp(-4 * times))
    assert heat_trace([0.0, 2.0], 1.0) == pytest.approx(math.exp(-2.0))
    assert heat_trace([], 1.0) == 0.0
    with pytest.raises(ValueError):
        heat_trace([1.0], -1.0)


def test_semigroup(group_order):
    x = ConePoint(0.5, 0.2)
    y = ConePoint(0.8, 0.6)
    assert semigroup_defect(group_order, 0.1, 0.2, x, y) < 1e-6


_DECAY_PAIRS = [(ConePoint(0.3, 0.0), ConePoint(0.9, 1.2)),
                (ConePoint(0.5, 0.4), ConePoint(1.0, 1.5)),
                (ConePoint(0.3, 1.0), ConePoint(0.8, 0.0))]


def test_decay_envelope():
    k = 2
    times = np.linspace(0.02, 1.0, 50)

    def kernel(t, x1, x2):
        return orbifold_image_kernel(k, t, x1, x2)

    result = decay_envelope(kernel, _DECAY_PAIRS, times, k=k)
    assert result["violations"] == 0
    assert result["max_ratio"] <= result["A"]
    with pytest.raises(ValueError):
        decay_envelope(kernel, _DECAY_PAIRS, times, k=k, c=10.0)


def test_decay_envelope_mode_sum(free_galerkin):
    k = 2
    times = np.linspace(0.02, 1.0, 50)

    def kernel(t, x1, x2):
        return cone_mode_sum_kernel(k, t, x1, x2, "solver", free_galerkin)

    result = decay_envelope(kernel, _DECAY_PAIRS, times, k=k)
    assert result["violations"] == 0
    assert result["max_ratio"] <= result["A"]


def test_heat_grid_json():
    pairs = sample_pairs(2, 3, seed=4)
    grid = duhamel_compare(2, [0.1, 0.5], pairs)
    restored = HeatGrid.from_json(grid.to_json())
    assert restored.pairs == grid.pairs
    np.testing.assert_array_equal(restored.values_c, grid.values_c)
    assert restored.sup_rel_discrepancy == grid.sup_rel_discrepancy
    assert restored.solver == grid.solver
    assert len(grid.plot_rows()) == 6


def test_heat_grid_shape_mismatch():
    with pytest.raises(ValueError):
        HeatGrid(2, [0.1], [], np.zeros((1, 1)), np.zeros((1, 1)))


def test_sample_pairs():
    pairs = sample_pairs(3, 10, seed=2)
    assert pairs == sample_pairs(3, 10, seed=2)
    for x1, x2 in pairs:
        assert 0.3 <= x1.r <= 1.0
        assert 0.0 <= x2.theta < 2 * math.pi / 3
