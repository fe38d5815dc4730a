"""Spectra of the flat spindle, the double of the cone C_(0,1](S^1/Z_k).

Eigenfunctions of the double are even or odd under the reflection across the
gluing circle, so the function spectrum is the union of the Neumann and the
Dirichlet spectrum of the cone sector. Both consist of squared Bessel zeros
of the orders of the invariant Fourier modes.

Two independent routes compute the same spectrum:

* ``"conical"`` takes the Bessel orders from the cone indices of the link
  modes and finds the zeros of J_nu and J_nu' by bracketing and bisection,
* ``"orbifold"`` takes the integer order zeros of the full disk for every
  Fourier order and keeps the orders divisible by k (the Z_k invariant
  modes).

Attributes:
    ROUTES (dict): dict which maps spectrum routes as strs to ints
"""

import logging
import math

import numpy as np
from scipy.special import jn_zeros, jnp_zeros, jv, jvp

from conetorsion.coneCalculus import cone_indices
from conetorsion.linkSpectrum import LinkSpectrum, ModeFamily

logger = logging.getLogger(__name__)

ROUTES = {"conical": 0, "orbifold": 1}

_BRACKET_STEP = 0.5
_BISECTION_STEPS = 60


def bessel_zeros(orders, x_max, derivative=False):
    """Positive zeros of J_nu (or J_nu') up to x_max for real orders.

    The zeros are bracketed by sign changes on a grid of spacing 0.5 starting
    at the order (no zero lies below it) and refined by bisection, all orders
    at once.

    Args:
        orders (array_like): orders nu >= 0
        x_max (float): largest zero to return
        derivative (bool): zeros of J_nu' instead of J_nu (x = 0 excluded)

    Returns:
        list: arrays of zeros, one per order.
    """
    function = jvp if derivative else jv
    orders = np.asarray(orders, dtype=float)
    if np.any(orders < 0):
        raise ValueError("Invalid Bessel order in %s" % orders)

    lower, upper, owner = [], [], []
    for index, nu in enumerate(orders):
        start = max(nu, 1e-3)
        if start >= x_max:
            continue
        grid = np.append(np.arange(start, x_max, _BRACKET_STEP), x_max)
        signs = np.signbit(function(nu, grid))
        change = np.nonzero(signs[1:] != signs[:-1])[0]
        lower.append(grid[change])
        upper.append(grid[change + 1])
        owner.append(np.full(len(change), index))

    zeros = [np.empty(0) for _ in orders]
    if not lower:
        return zeros
    lower = np.concatenate(lower)
    upper = np.concatenate(upper)
    owner = np.concatenate(owner)
    nu = orders[owner]
    lower_sign = np.signbit(function(nu, lower))
    for _ in range(_BISECTION_STEPS):
        middle = 0.5 * (lower + upper)
        same = np.signbit(function(nu, middle)) == lower_sign
        lower = np.where(same, middle, lower)
        upper = np.where(same, upper, middle)
    roots = 0.5 * (lower + upper)
    for index in range(len(orders)):
        zeros[index] = np.sort(roots[owner == index])
    return zeros


def integer_bessel_zeros(n, x_max, derivative=False):
    """Positive zeros of J_n (or J_n') up to x_max for an integer order.

    Args:
        n (int): order
        x_max (float): largest zero to return
        derivative (bool): zeros of J_n' instead of J_n

    Returns:
        ndarray: zeros in ascending order.
    """
    if n >= x_max:
        return np.empty(0)
    count = int((x_max - n) / math.pi) + 3
    while True:
        zeros = (jnp_zeros if derivative else jn_zeros)(n, count)
        if zeros[-1] > x_max:
            return zeros[zeros <= x_max]
        count *= 2


def _families(degree, kind, orders, x_max, multiplicities, zeros_of):
    modes = []
    for nu, mult in zip(orders, multiplicities):
        for derivative in (False, True):
            for zero in zeros_of(nu, x_max, derivative):
                modes.append(ModeFamily(degree, kind, float(zero) ** 2, int(mult)))
    return modes


def _conical_zeros(orders):
    """Zero finder over real cone orders, evaluated once for all orders."""
    cache = {}

    def zeros_of(nu, x_max, derivative):
        key = (x_max, derivative)
        if key not in cache:
            cache[key] = dict(zip(orders, bessel_zeros(orders, x_max, derivative)))
        return cache[key][nu]
    return zeros_of


def _function_modes(k, cutoff, route):
    """Nonzero function eigenvalues of the spindle as (eigenvalue, mult) families."""
    x_max = math.sqrt(cutoff)
    if route == "conical":
        n_max = int(x_max // k) + 1
        orders = [float(cone_indices(1, 0, (k * n) ** 2).nu) for n in range(n_max + 1)]
        mults = [1] + [2] * n_max
        return _families(0, "coexact", orders, x_max, mults, _conical_zeros(orders))

    modes = []
    for n in range(int(x_max) + 1):
        if n % k:
            continue
        mult = 1 if n == 0 else 2
        for derivative in (False, True):
            for zero in integer_bessel_zeros(n, x_max, derivative):
                modes.append(ModeFamily(0, "coexact", float(zero) ** 2, mult))
    return modes


class SpindleSpectrum(LinkSpectrum):
    """Form spectrum of the closed two dimensional spindle.

    Same table as :py:class:`conetorsion.linkSpectrum.LinkSpectrum`, with
    ``m`` the dimension of the spindle itself rather than of a link. The
    invariant Fourier modes have orders nu = kn, integers, so the conical
    and orbifold routes produce the same families up to rounding of the
    Bessel zeros.

    Args:
        group_order (int): order k of the cone angle 2 pi / k
        cutoff (float): largest eigenvalue
        modes (iterable): :py:class:`ModeFamily` instances
        route (str): key of :py:data:`ROUTES` the spectrum was computed by
    """

    __slots__ = ("_route",)

    def __init__(self, group_order, cutoff, modes, route="conical"):
        if route not in ROUTES:
            raise ValueError("Unknown spectrum route: %s" % route)
        super().__init__(2, group_order, cutoff, modes)
        self._route = route

    @property
    def route(self):
        """str: Route the spectrum was computed by."""
        return self._route

    def __repr__(self):
        return "SpindleSpectrum(k=%d, cutoff=%g, %s, %d families)" % (
            self.group_order, self.cutoff, self._route, len(self))


def spindle_spectra(k, cutoff, route="conical"):
    """Form spectra of the flat spindle in degrees 0, 1 and 2.

    Degree 2 repeats degree 0 through the Hodge star, degree 1 carries the
    degree 0 eigenvalues twice (exact and coexact). Harmonic forms live in
    degrees 0 and 2.

    Args:
        k (int): group order
        cutoff (float): largest eigenvalue
        route (str): key of :py:data:`ROUTES`

    Returns:
        SpindleSpectrum: spectrum of the two dimensional spindle.
    """
    if int(k) != k or k < 1:
        raise ValueError("Invalid group order: %s" % k)
    if cutoff <= 0:
        raise ValueError("Invalid cutoff: %s" % cutoff)
    if route not in ROUTES:
        raise ValueError("Unknown spectrum route: %s" % route)

    functions = _function_modes(int(k), cutoff, route)
    modes = [ModeFamily(0, "harmonic", 0, 1), ModeFamily(2, "harmonic", 0, 1)]
    for mode in functions:
        modes.append(mode)
        modes.append(ModeFamily(1, "exact", mode.eigenvalue, mode.multiplicity))
        modes.append(ModeFamily(1, "coexact", mode.eigenvalue, mode.multiplicity))
        modes.append(ModeFamily(2, "exact", mode.eigenvalue, mode.multiplicity))
    logger.debug("spindle k=%d %s route: %d function families below %g",
                 k, route, len(functions), cutoff)
    return SpindleSpectrum(k, cutoff, modes, route)


def separated_model_spectrum(k, degree=1, cutoff=1000.0):
    """Spindle spectrum of the separated radial operator without cross terms.

    Each link mode of eigenvalue (kn)^2 contributes the tangential family
    with the cone index of degree i and, for i >= 1, the normal family of
    the operator -f'' - c f'/r + c f/r^2 + mu f/r^2, c = 3 - 2i. Every family
    enters with Neumann and Dirichlet zeros as on the spindle.

    Args:
        k (int): group order
        degree (int): form degree 0, 1 or 2
        cutoff (float): largest eigenvalue

    Returns:
        SpindleSpectrum: the families of the given degree.
    """
    if degree not in (0, 1, 2):
        raise ValueError("Invalid spindle degree: %s" % degree)
    x_max = math.sqrt(cutoff)
    n_max = int(x_max // k) + 1
    orders = {}
    for n in range(n_max + 1):
        mu = (k * n) ** 2
        mult = 1 if n == 0 else 2
        if degree < 2:
            nu = float(cone_indices(1, degree, mu).nu)
            orders[nu] = orders.get(nu, 0) + mult
        if degree > 0:
            c = 3 - 2 * degree
            nu = math.sqrt(mu + c + ((1 - c) / 2.0) ** 2)
            orders[nu] = orders.get(nu, 0) + mult

    values = sorted(orders)
    modes = _families(degree, "coexact", values, x_max, [orders[nu] for nu in values],
                      _conical_zeros(values))
    if degree != 1:
        modes.append(ModeFamily(degree, "harmonic", 0, 1))
    return SpindleSpectrum(k, cutoff, modes)
