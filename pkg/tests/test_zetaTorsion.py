from conetorsion.linkSpectrum import circle_quotient_spectrum
from conetorsion.status import UnsupportedContinuationError, ZetaPoleError
from conetorsion.zetaTorsion import CONVENTIONS, TorsionReport, TraceExpansion,\
    ZetaSeries, circle_torsion, default_window, degree_discrepancy,\
    fit_trace_expansion, fit_trace_samples, neumann_cone_modes, residue_check,\
    residue_t_grid, richardson, sobolev_check, spectral_zeta, spindle_residue_check,\
    spindle_torsion, torsion, torsion_compare, torsion_weight, zeta_prime_at_zero
import json
import math
import numpy as np
import pytest


@pytest.fixture(scope="module")
def circle_mellin():
    spectrum = circle_quotient_spectrum(1, 4e5)
    return ZetaSeries.from_spectrum(spectrum, 0, "mellin")


def test_lattice_value():
    series = ZetaSeries.lattice(1.0, 2)
    assert spectral_zeta(series, 2).real == pytest.approx(2 * math.pi ** 4 / 90, rel=1e-12)
    assert spectral_zeta(series, 2).real == pytest.approx(2.16465, abs=1e-5)
    assert spectral_zeta(series, 0).real == pytest.approx(-1.0, abs=1e-12)


def test_direct_sum():
    assert spectral_zeta(ZetaSeries([4.0]), 1).real == pytest.approx(0.25)
    series = ZetaSeries.from_spectrum(circle_quotient_spectrum(1, 1e6), 0)
    assert spectral_zeta(series, 2).real == pytest.approx(2.16465, abs=1e-5)


def test_lattice_zeta_prime():
    assert zeta_prime_at_zero(ZetaSeries.lattice(1.0, 2)) == \
        pytest.approx(-2 * math.log(2 * math.pi), abs=1e-12)
    assert zeta_prime_at_zero(ZetaSeries.lattice(1.0, 2)) == pytest.approx(-3.67576, abs=1e-5)
    assert zeta_prime_at_zero(ZetaSeries.lattice(4.0, 2)) == \
        pytest.approx(-2 * math.log(math.pi), abs=1e-12)


@pytest.mark.parametrize("factor", [0.5, 3.0, 25.0])
def test_scaling_law(factor):
    series = ZetaSeries.lattice(1.0, 2)
    zeta_zero = spectral_zeta(series, 0).real
    shift = zeta_prime_at_zero(series.scaled(factor)) - zeta_prime_at_zero(series)
    assert shift == pytest.approx(-math.log(factor) * zeta_zero, abs=1e-10)


def test_lattice_pole():
    with pytest.raises(ZetaPoleError) as err:
        spectral_zeta(ZetaSeries.lattice(4.0, 2), 0.5)
    assert err.value.residue == pytest.approx(0.5)


def test_mellin_matches_closed_form(circle_mellin):
    assert spectral_zeta(circle_mellin, 0).real == pytest.approx(-1.0, abs=1e-6)
    assert zeta_prime_at_zero(circle_mellin) == pytest.approx(-3.67576, abs=1e-5)
    assert zeta_prime_at_zero(circle_mellin) == \
        pytest.approx(-2 * math.log(2 * math.pi), abs=1e-6)


def test_mellin_general_argument(circle_mellin):
    assert spectral_zeta(circle_mellin, 2).real == pytest.approx(2 * math.pi ** 4 / 90,
                                                                 abs=1e-6)


def test_mellin_z2():
    series = ZetaSeries.from_spectrum(circle_quotient_spectrum(2, 2e6), 0, "mellin")
    assert zeta_prime_at_zero(series) == pytest.approx(-2 * math.log(math.pi), abs=1e-6)


def test_mellin_expansion_of_circle(circle_mellin):
    expansion = circle_mellin.expansion
    assert expansion.coefficient(-0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-6)
    assert expansion.coefficient(0.0) == pytest.approx(-1.0, abs=1e-6)
    assert expansion.log_coefficient == 0.0


def test_mellin_pole_from_expansion():
    expansion = TraceExpansion((-0.5, 0.0), (1.0, -1.0), window=(1e-4, 0.1))
    series = ZetaSeries([1.0], strategy="mellin", expansion=expansion)
    with pytest.raises(ZetaPoleError) as err:
        spectral_zeta(series, 0.5)
    assert err.value.residue == pytest.approx(1 / math.sqrt(math.pi))


def test_log_term_is_a_pole_at_zero():
    expansion = TraceExpansion((-0.5, 0.0), (1.0, -1.0), log_coefficient=0.3,
                               window=(1e-4, 0.1))
    series = ZetaSeries([1.0], strategy="mellin", expansion=expansion)
    with pytest.raises(ZetaPoleError):
        spectral_zeta(series, 0)
    with pytest.raises(ZetaPoleError):
        zeta_prime_at_zero(series)


def test_unsupported_continuation():
    with pytest.raises(UnsupportedContinuationError):
        spectral_zeta(ZetaSeries([1.0, 4.0]), 0)
    with pytest.raises(UnsupportedContinuationError):
        spectral_zeta(ZetaSeries([1.0], strategy="mellin"), 0)
    with pytest.raises(UnsupportedContinuationError):
        zeta_prime_at_zero(ZetaSeries([1.0, 4.0]))


def test_zeta_series_construction():
    series = ZetaSeries([4.0, 0.0, 1.0], [1, 1, 2])
    assert list(series.values) == [1.0, 4.0]
    assert list(series.multiplicities) == [2.0, 1.0]
    assert series.lowest() == 1.0
    assert zeta_prime_at_zero(ZetaSeries([])) == 0.0
    with pytest.raises(ValueError):
        ZetaSeries([-1.0])
    with pytest.raises(ValueError):
        ZetaSeries([1.0], [1, 2])
    with pytest.raises(ValueError):
        ZetaSeries(strategy="lattice")
    with pytest.raises(ValueError):
        ZetaSeries([1.0], strategy="hurwitz")
    with pytest.raises(ValueError):
        ZetaSeries.from_spectrum(circle_quotient_spectrum(1, 10), 0, "lattice")


def test_default_window_needs_cutoff():
    with pytest.raises(ValueError):
        default_window(ZetaSeries([1.0, 4.0], cutoff=10.0))
    t_lo, t_hi = default_window(ZetaSeries([1.0], cutoff=1e6))
    assert t_hi == pytest.approx(0.1)
    assert t_lo == pytest.approx(1e-4)


def test_fit_trace_samples_with_log():
    t = np.geomspace(1e-3, 0.1, 60)
    y = 3 / t + 2 / np.sqrt(t) - 1 + 0.5 * np.log(t)
    expansion = fit_trace_samples(t, y, 2, with_log=True)
    assert expansion.log_coefficient == pytest.approx(0.5, abs=1e-6)
    assert expansion.coefficient(-1.0) == pytest.approx(3.0, rel=1e-6)
    assert expansion.coefficient(0.0) == pytest.approx(-1.0, abs=1e-5)
    np.testing.assert_allclose(expansion.evaluate(t), y, rtol=1e-9)


def test_fit_trace_expansion_callable():
    def trace(t):
        return math.sqrt(math.pi) / np.sqrt(t) - 1

    expansion = fit_trace_expansion(trace, dimension=1, window=(1e-4, 0.1), n_terms=3)
    assert expansion.coefficient(-0.5) == pytest.approx(math.sqrt(math.pi))
    with pytest.raises(ValueError):
        fit_trace_expansion(trace)


def test_trace_expansion_scaled():
    expansion = TraceExpansion((-0.5, 0.0), (2.0, -1.0), window=(1e-3, 0.1))
    scaled = expansion.scaled(4.0)
    assert scaled.coefficient(-0.5) == pytest.approx(1.0)
    assert scaled.window == pytest.approx((2.5e-4, 0.025))


@pytest.mark.parametrize("length", [2 * math.pi, math.pi, 2 * math.pi / 5])
@pytest.mark.parametrize("method", ["closed", "mellin"])
def test_circle_torsion(length, method):
    report = circle_torsion(length, method)
    assert report.log_tc == pytest.approx(-math.log(length), abs=1e-6)
    assert report.t_c == pytest.approx(1 / length, rel=1e-5)
    assert report.convention == "dar_eq_a8"
    assert report.provenance["method"] == method


def test_circle_torsion_invalid():
    with pytest.raises(ValueError):
        circle_torsion(0.0)
    with pytest.raises(ValueError):
        circle_torsion(1.0, "heat")


def test_torsion_weights():
    assert [torsion_weight(i) for i in range(4)] == [0, 1, -2, 3]
    assert set(CONVENTIONS) == {"dar_eq_a8"}


def test_single_degree_one_series():
    series = ZetaSeries.lattice(1.0, 2)
    report = torsion({1: series})
    assert report.log_tc == pytest.approx(0.5 * zeta_prime_at_zero(series))
    assert report.t_c == pytest.approx(math.exp(0.5 * report.weighted_zeta_prime))


def test_poincare_pairing_cancels():
    report = torsion({0: ZetaSeries.lattice(1.0, 2), 1: ZetaSeries.lattice(1.0, 4),
                      2: ZetaSeries.lattice(1.0, 2)})
    assert report.weighted_zeta_prime == pytest.approx(0.0, abs=1e-12)
    assert report.t_c == pytest.approx(1.0)


def test_torsion_invalid_arguments():
    with pytest.raises(ValueError):
        torsion({0: ZetaSeries.lattice(1.0, 2)}, convention="ray_singer")
    with pytest.raises(ValueError):
        torsion({0: ZetaSeries.lattice(1.0, 2, dimension=1),
                 1: ZetaSeries.lattice(1.0, 2, dimension=2)})


def test_torsion_report_json():
    report = torsion({1: ZetaSeries.lattice(1.0, 2), 2: None})
    data = json.loads(report.to_json())
    assert data["convention"] == "dar_eq_a8"
    assert data["zeta_prime"] == {"1": pytest.approx(-2 * math.log(2 * math.pi))}
    assert data["log_to"] is None
    assert report.t_o is None


def test_circle_has_no_log_term(circle_mellin):
    t_grid = residue_t_grid(4e5)
    result = residue_check({1: circle_mellin.trace}, t_grid, dimension=1)
    assert abs(result.b) < 1e-6
    assert result.passed
    assert set(result.to_dict()) == {"b", "band", "passed", "condition", "tolerance"}


def test_residue_t_grid():
    grid = residue_t_grid(1e6)
    assert grid[0] == pytest.approx(1e-4)
    assert grid[-1] == pytest.approx(0.1)
    assert residue_t_grid(4e3)[0] == pytest.approx(1e-2)
    with pytest.raises(ValueError):
        residue_t_grid(100.0)


def test_spindle_weighted_residue_cancels():
    assert spindle_residue_check(2).passed


def test_single_degree_residue_does_not_cancel():
    result = spindle_residue_check(2, control=True)
    assert not result.passed


def test_richardson():
    assert richardson([1.5, 1.25, 1.125]) == pytest.approx(1.0)
    assert richardson([2.0, 1.0]) == 1.0
    assert richardson([1.0, 2.0, 1.5]) == 1.5


def test_spindle_torsion_weighted_combination():
    report, harmonic = spindle_torsion(2, 20000.0)
    assert harmonic == [1, 0, 1]
    assert report.zeta_prime[1] == pytest.approx(2 * report.zeta_prime[0], abs=1e-6)
    assert abs(report.log_tc) < 1e-6


def test_degree_discrepancy():
    report = TorsionReport("dar_eq_a8", {0: 1.0, 1: 2.0}, 0.0,
                           zeta_prime_o={0: 1.5, 1: 2.0})
    assert degree_discrepancy(report) == 0.5
    with pytest.raises(ValueError):
        degree_discrepancy(TorsionReport("dar_eq_a8", {0: 1.0}, 0.0))


@pytest.mark.slow
@pytest.mark.parametrize("k", [2, 3])
def test_torsion_compare(k):
    report = torsion_compare(k)
    assert report.discrepancy < 1e-4
    assert degree_discrepancy(report) < 1e-4
    assert len(report.levels) == 3


def test_torsion_compare_invalid_order():
    with pytest.raises(ValueError):
        torsion_compare(0)


def test_neumann_cone_modes_orthonormal():
    # Gauss-Legendre on [0, 1] with the area weight r
    nodes, weights = np.polynomial.legendre.leggauss(200)
    radii = 0.5 * (nodes + 1)
    eigenvalues, values, densities = neumann_cone_modes(2, 100.0, radii)
    assert eigenvalues[0] == 0.0
    assert np.all(eigenvalues <= 100.0)
    gram = (values[:4] * 0.5 * weights * radii) @ values[:4].T
    # constant and two order 0 modes over the angle pi, one cos(2 theta) mode
    np.testing.assert_allclose(gram[:3, :3] * math.pi, np.eye(3), atol=1e-10)
    assert gram[3, 3] * math.pi / 2 == pytest.approx(1.0, rel=1e-10)
    np.testing.assert_allclose(densities, values ** 2, rtol=1e-12, atol=1e-15)


def test_sobolev_constant_converges(group_order):
    result = sobolev_check(group_order, power=1.0, samples=100, seed=5)
    assert result.converges
    assert 1.0 <= result.growth < 1.01
    assert result.constants[0] >= math.sqrt(group_order / math.pi)
    assert result.violations == 0
    assert 0 < result.worst_ratio <= 1.0


def test_sobolev_constant_diverges_at_critical_power():
    critical = sobolev_check(6, power=0.5, samples=20)
    above = sobolev_check(6, power=1.0, samples=20)
    assert not critical.converges
    assert critical.growth > 1.02
    assert critical.growth - 1 > 10 * (above.growth - 1)
    assert critical.violations == 0


def test_sobolev_result_json():
    result = sobolev_check(3, cutoffs=[50.0, 100.0], n_radii=50, samples=10)
    data = json.loads(json.dumps(result.to_dict()))
    assert data["cutoffs"] == [50.0, 100.0]
    assert len(data["constants"]) == 2


def test_sobolev_invalid_arguments():
    with pytest.raises(ValueError):
        sobolev_check(0)
    with pytest.raises(ValueError):
        sobolev_check(2, power=0.0)
    with pytest.raises(ValueError):
        sobolev_check(2, cutoffs=[400.0, 100.0])
