from conetorsion.linkSpectrum import LinkSpectrum
from conetorsion.spindle import ROUTES, SpindleSpectrum, bessel_zeros,\
    integer_bessel_zeros, separated_model_spectrum, spindle_spectra
import math
import numpy as np
import pytest
from scipy.special import jn_zeros, jnp_zeros


def test_bessel_zeros_integer_orders():
    zeros = bessel_zeros([0, 1, 4], 20.0)
    for order, found in zip([0, 1, 4], zeros):
        expected = jn_zeros(order, 10)
        np.testing.assert_allclose(found, expected[expected <= 20.0], rtol=1e-12)


def test_bessel_zeros_derivative():
    (found,) = bessel_zeros([2], 15.0, derivative=True)
    expected = jnp_zeros(2, 10)
    np.testing.assert_allclose(found, expected[expected <= 15.0], rtol=1e-12)


def test_bessel_zeros_half_integer_order():
    (found,) = bessel_zeros([0.5], 10.0)
    np.testing.assert_allclose(found, [math.pi, 2 * math.pi, 3 * math.pi], rtol=1e-12)


def test_bessel_zeros_order_above_range():
    zeros = bessel_zeros([30.0], 10.0)
    assert len(zeros[0]) == 0
    with pytest.raises(ValueError):
        bessel_zeros([-1.0], 10.0)


def test_integer_bessel_zeros():
    zeros = integer_bessel_zeros(3, 40.0)
    assert zeros[-1] <= 40.0
    np.testing.assert_allclose(zeros, jn_zeros(3, len(zeros)))
    assert len(integer_bessel_zeros(50, 40.0)) == 0


def test_routes_agree(group_order):
    conical = spindle_spectra(group_order, 400.0, "conical")
    orbifold = spindle_spectra(group_order, 400.0, "orbifold")
    for degree in (0, 1, 2):
        values_c, mults_c = conical.eigenvalues(degree)
        values_o, mults_o = orbifold.eigenvalues(degree)
        np.testing.assert_allclose(values_c, values_o, rtol=1e-10)
        np.testing.assert_array_equal(mults_c, mults_o)


def test_spindle_structure():
    spectrum = spindle_spectra(2, 200.0)
    assert [spectrum.harmonic_dimension(i) for i in (0, 1, 2)] == [1, 0, 1]
    functions = spectrum.counting_function(200.0, 0) - 1
    one_forms = spectrum.counting_function(200.0, 1)
    assert one_forms == 2 * functions
    assert spectrum.m == 2
    assert set(ROUTES) == {"conical", "orbifold"}


def test_disk_spectrum():
    # Z_1: Dirichlet and Neumann eigenvalues of the unit disk
    values, mults = spindle_spectra(1, 30.0).eigenvalues(0)
    assert values[0] == pytest.approx(jnp_zeros(1, 1)[0] ** 2)
    assert mults[0] == 2
    assert np.any(np.isclose(values, jn_zeros(0, 1)[0] ** 2))


@pytest.mark.parametrize("k, cutoff, route", [(0, 10.0, "conical"), (2, 0.0, "conical"),
                                              (2, 10.0, "lattice")])
def test_spindle_invalid(k, cutoff, route):
    with pytest.raises(ValueError):
        spindle_spectra(k, cutoff, route)


def test_separated_model_degree_zero():
    model = separated_model_spectrum(3, 0, 300.0)
    spindle = spindle_spectra(3, 300.0)
    values_m, mults_m = model.eigenvalues(0, include_harmonic=True)
    values_s, mults_s = spindle.eigenvalues(0, include_harmonic=True)
    np.testing.assert_allclose(values_m, values_s, rtol=1e-10)
    np.testing.assert_array_equal(mults_m, mults_s)


def test_separated_model_degree_one():
    model = separated_model_spectrum(2, 1, 100.0)
    assert model.harmonic_dimension(1) == 0
    assert len(model.nonzero(1)) > 0
    with pytest.raises(ValueError):
        separated_model_spectrum(2, 3)


def test_spindle_spectrum_container():
    conical = spindle_spectra(3, 100.0, "conical")
    orbifold = spindle_spectra(3, 100.0, "orbifold")
    assert isinstance(conical, SpindleSpectrum)
    assert isinstance(conical, LinkSpectrum)
    assert (conical.route, orbifold.route) == ("conical", "orbifold")
    np.testing.assert_allclose(conical.eigenvalues(0)[0], orbifold.eigenvalues(0)[0], rtol=1e-10)
    assert repr(conical).startswith("SpindleSpectrum(k=3, cutoff=100, conical")
    assert separated_model_spectrum(3, 0, 100.0).route == "conical"
    with pytest.raises(ValueError):
        SpindleSpectrum(3, 100.0, [], route="disk")
