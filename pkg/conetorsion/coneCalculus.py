"""Cone indices and the separated action of the cone Laplacian.

On the cone :math:`C_{(0,1]}(N)` with metric :math:`dr^2 + r^2 g^{TN}` an
i-form separates as :math:`\\beta = g(r)\\phi + f(r)\\,dr\\wedge\\psi` with
link eigenforms :math:`\\phi` (degree i) and :math:`\\psi` (degree i-1). For
a link eigenvalue :math:`\\mu` the homogeneous radial solutions are
:math:`r^{a_\\pm}` with

.. math::

    \\alpha = \\frac{1 + 2i - m}{2},\\quad \\nu = \\sqrt{\\mu + \\alpha^2},
    \\quad a_\\pm = \\alpha \\pm \\nu.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

logger = logging.getLogger(__name__)


def _exact_sqrt(value):
    """Square root of a nonnegative Fraction if it is rational, else None."""
    num_root = math.isqrt(value.numerator)
    den_root = math.isqrt(value.denominator)
    if num_root * num_root == value.numerator and den_root * den_root == value.denominator:
        return Fraction(num_root, den_root)
    return None


@dataclass(frozen=True)
class ConeIndices:
    """Indices attached to one link mode.

    Exact inputs give :py:class:`fractions.Fraction` fields, otherwise
    ``nu``, ``a_plus`` and ``a_minus`` are floats.

    Attributes:
        m (int): link dimension
        degree (int): form degree i
        mu (Fraction or float): link eigenvalue
        alpha (Fraction): (1 + 2i - m) / 2
        nu (Fraction or float): sqrt(mu + alpha^2)
        a_plus (Fraction or float): alpha + nu
        a_minus (Fraction or float): alpha - nu
    """

    m: int
    degree: int
    mu: object
    alpha: Fraction
    nu: object
    a_plus: object
    a_minus: object

    @property
    def is_exact(self):
        """bool: True if all indices are rational."""
        return isinstance(self.nu, Fraction)

    @property
    def is_degenerate(self):
        """bool: True for nu = 0, where the second solution is r^alpha log r."""
        return self.nu == 0

    @property
    def weight_exponent(self):
        """int: exponent m - 2i of the radial measure r^(m-2i) dr."""
        return self.m - 2 * self.degree


def cone_indices(m, i, mu):
    """Compute the cone indices of a link mode.

    Args:
        m (int): link dimension
        i (int): form degree, 0 <= i <= m
        mu (int, Fraction or float): link eigenvalue, mu >= 0

    Returns:
        ConeIndices: the four indices, exact where the inputs allow it.
    """
    if i < 0 or i > m:
        raise ValueError("Invalid form degree %s for m=%s" % (i, m))
    if mu < 0:
        raise ValueError("Invalid link eigenvalue: %s" % mu)

    alpha = Fraction(1 + 2 * i - m, 2)
    exact_mu = Fraction(mu)
    nu = _exact_sqrt(exact_mu + alpha * alpha)
    if nu is not None:
        return ConeIndices(m, i, exact_mu, alpha, nu, alpha + nu, alpha - nu)

    nu = math.sqrt(float(mu) + float(alpha) ** 2)
    return ConeIndices(m, i, float(mu), alpha, nu,
                       float(alpha) + nu, float(alpha) - nu)


def characteristic(indices, power):
    """Coefficient of r^(p-2) in the tangential operator applied to r^p.

    Args:
        indices (ConeIndices): mode indices
        power: exponent p

    Returns:
        -p(p-1) - (m-2i) p + mu, exact for exact arguments.
    """
    c = indices.weight_exponent
    return -power * (power - 1) - c * power + indices.mu


def apply_tangential(indices, power, r, log=False):
    """Apply the tangential radial operator analytically.

    The operator is :math:`-u'' - (m-2i)u'/r + \\mu u/r^2`, applied to
    :math:`u = r^p` or :math:`u = r^p \\log r`.

    Args:
        indices (ConeIndices): mode indices
        power: exponent p
        r (array_like): radii
        log (bool): apply to r^p log r instead of r^p

    Returns:
        tuple: (value, scale) arrays; scale is the largest single term.
    """
    r = np.asarray(r, dtype=float)
    c = indices.weight_exponent
    p = float(power)
    mu = float(indices.mu)
    coefficient = float(characteristic(indices, power))
    base = r ** (p - 2)
    if not log:
        terms = (abs(p * (p - 1)), abs(c * p), abs(mu))
        return coefficient * base, max(terms) * base
    log_r = np.log(r)
    # derivative of log r contributes the -(2p - 1) - c term
    constant = float(-(2 * power - 1) - c)
    value = base * (coefficient * log_r + constant)
    scale = base * (max(abs(p * (p - 1)), abs(c * p), abs(mu)) * np.abs(log_r)
                    + abs(2 * p - 1) + abs(c))
    return value, scale


def tangential_operator(indices):
    """Bind :py:func:`apply_tangential` to one mode.

    Args:
        indices (ConeIndices): mode indices

    Returns:
        callable: ``operator(power, r, log=False) -> (value, scale)``.
    """
    def operator(power, r, log=False):
        return apply_tangential(indices, power, r, log)
    return operator


def radial_harmonic_check(indices, r):
    """Residual of the homogeneous radial solutions.

    For exact indices the residual is exactly zero. For irrational indices
    the residual is measured relative to the largest operator term.

    Args:
        indices (ConeIndices): mode indices
        r (array_like): radii in (0, 1]

    Returns:
        float: max residual over r and over both solutions.
    """
    r = np.asarray(r, dtype=float)
    if indices.is_degenerate:
        candidates = [(indices.alpha, False), (indices.alpha, True)]
    else:
        candidates = [(indices.a_plus, False), (indices.a_minus, False)]

    residual = 0.0
    for power, log in candidates:
        value, scale = apply_tangential(indices, power, r, log)
        if indices.is_exact:
            residual = max(residual, float(np.max(np.abs(value))))
        else:
            residual = max(residual, float(np.max(np.abs(value) / scale)))
    logger.debug("radial residual %.3g for m=%d i=%d mu=%s",
                 residual, indices.m, indices.degree, indices.mu)
    return residual


@dataclass(frozen=True)
class SeparatedForm:
    """Radial coefficients of a separated i-form g(r) phi + f(r) dr ^ psi.

    Attributes:
        r (ndarray): strictly increasing radii in (0, 1]
        g (ndarray): coefficient of the tangential eigenform phi
        f (ndarray): coefficient of dr ^ psi
        degree (int): form degree i
        mu_phi (float): link eigenvalue of phi
        mu_psi (float): link eigenvalue of psi
        components (dict): tagged extra components (cross terms of a result)
    """

    r: np.ndarray
    g: np.ndarray
    f: np.ndarray
    degree: int
    mu_phi: float = 0.0
    mu_psi: float = 0.0
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 1 or len(r) < 4:
            raise ValueError("Radial grid needs at least 4 points for the stencils")
        if np.any(np.diff(r) <= 0) or r[0] <= 0 or r[-1] > 1:
            raise ValueError("Radial grid must be strictly increasing in (0, 1]")
        if np.shape(self.g) != r.shape or np.shape(self.f) != r.shape:
            raise ValueError("Coefficient arrays must match the radial grid")


def _fd_weights(x0, xs, order):
    """Finite difference weights for the derivative of given order at x0."""
    offsets = np.asarray(xs, dtype=float) - x0
    n = len(offsets)
    vandermonde = np.array([offsets ** p / math.factorial(p) for p in range(n)])
    rhs = np.zeros(n)
    rhs[order] = 1.0
    return np.linalg.solve(vandermonde, rhs)


def _derivatives(r, y):
    """First and second derivatives on a (possibly nonuniform) grid."""
    n = len(r)
    first = np.empty(n)
    second = np.empty(n)
    for j in range(n):
        if j == 0:
            s1, s2 = slice(0, 3), slice(0, 4)
        elif j == n - 1:
            s1, s2 = slice(n - 3, n), slice(n - 4, n)
        else:
            s1 = s2 = slice(j - 1, j + 2)
        first[j] = _fd_weights(r[j], r[s1], 1) @ y[s1]
        second[j] = _fd_weights(r[j], r[s2], 2) @ y[s2]
    return first, second


def separated_laplacian(form, m):
    """Radial coefficients of the Hodge Laplacian of a separated form.

    Tangential part

    .. math:: -g'' - (m-2i) r^{-1} g' + \\mu_\\phi r^{-2} g

    and normal part

    .. math:: -f'' - (m-2i+2) r^{-1} f' + (m-2i+2) r^{-2} f + \\mu_\\psi r^{-2} f.

    The cross terms couple to the link codifferential of phi and to the link
    differential of psi. They are returned as the components
    ``cross_tangential`` (coefficient -2 r^-3 g of dr ^ delta phi) and
    ``cross_normal`` (coefficient -2 r^-1 f of d psi).

    Derivatives are second order central differences in the interior and
    second order one-sided differences at the ends.

    Args:
        form (SeparatedForm): input form
        m (int): link dimension

    Returns:
        SeparatedForm: the result with g, f the tangential and normal parts.
    """
    i = form.degree
    if i < 0 or i > m + 1:
        raise ValueError("Invalid form degree %s for m=%s" % (i, m))
    r = np.asarray(form.r, dtype=float)
    g = np.asarray(form.g, dtype=float)
    f = np.asarray(form.f, dtype=float)

    dg, d2g = _derivatives(r, g)
    df, d2f = _derivatives(r, f)

    tangential = -d2g - (m - 2 * i) * dg / r + form.mu_phi * g / r ** 2
    c = m - 2 * i + 2
    normal = -d2f - c * df / r + c * f / r ** 2 + form.mu_psi * f / r ** 2
    components = {
        "tangential": tangential,
        "normal": normal,
        "cross_tangential": -2 * g / r ** 3,
        "cross_normal": -2 * f / r,
    }
    return replace(form, g=tangential, f=normal, components=components)


def refinement_order(indices, n_coarse=40, r_min=0.2):
    """Observed convergence order of the discrete tangential residual.

    Applies :py:func:`separated_laplacian` to g = r^(a+) on a grid and on its
    refinement and compares the max residuals.

    Args:
        indices (ConeIndices): mode indices
        n_coarse (int): points of the coarse grid
        r_min (float): smallest radius of the grids

    Returns:
        tuple: (coarse residual, fine residual, observed order)
    """
    residuals = []
    for n in (n_coarse, 2 * n_coarse - 1):
        r = np.linspace(r_min, 1.0, n)
        g = r ** float(indices.a_plus)
        form = SeparatedForm(r, g, np.zeros_like(r), indices.degree,
                             mu_phi=float(indices.mu))
        result = separated_laplacian(form, indices.m)
        residuals.append(float(np.max(np.abs(result.g))))
    coarse, fine = residuals
    if fine == 0.0:
        return coarse, fine, math.inf
    return coarse, fine, math.log2(coarse / fine)


@dataclass(frozen=True)
class ConePoint:
    """A point (r, theta) of the flat cone over S^1/Z_k.

    Attributes:
        r (float): distance to the tip, r > 0
        theta (float): link coordinate, an angle
    """

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("Invalid cone radius: %s" % self.r)

    def cartesian(self):
        """Get the lift to the plane as (x, y)."""
        return self.r * math.cos(self.theta), self.r * math.sin(self.theta)

    def angle_to(self, other, k=1):
        """Angular separation on the link circle of circumference 2 pi / k."""
        period = 2 * math.pi / k
        delta = (other.theta - self.theta) % period
        return min(delta, period - delta)

    def distance(self, other, k=1):
        """Distance on the flat cone C(S^1/Z_k), the closest image in the plane."""
        delta = self.angle_to(other, k)
        squared = self.r ** 2 + other.r ** 2 - 2 * self.r * other.r * math.cos(delta)
        return math.sqrt(max(squared, 0.0))
