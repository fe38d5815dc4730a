"""Radial Green kernels on the truncated cone C_(0,1](N).

For a coexact link mode with indices :math:`(\\alpha, \\nu, a_\\pm)` the model
kernel is

.. math::

    h(r_1, r_2) = \\frac{1}{2\\nu} r_<^{a_+} r_>^{a_-}

(:math:`-\\log r_>` for :math:`\\nu = 0`). The absolute and relative kernels
add smooth corrections so that the normal derivative, respectively the
value, vanishes at :math:`r = 1`. The kernels are Green functions of the
tangential radial operator with respect to the measure
:math:`r^{m-2i}dr`.

Attributes:
    FLAVORS (dict): dict which maps kernel flavors as strs to ints
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from conetorsion.coneCalculus import ConePoint, cone_indices, tangential_operator
from conetorsion.defaults import defaults
from conetorsion.linkSpectrum import circle_quotient_spectrum

logger = logging.getLogger(__name__)

FLAVORS = {"model": 0, "absolute": 1, "relative": 2}


def _check_radius(r):
    if not 0 < r <= 1:
        raise ValueError("Radius outside (0, 1]: %s" % r)


def _check_flavor(flavor):
    if flavor not in FLAVORS:
        raise ValueError("Unknown kernel flavor: %s" % flavor)


def harmonic_constant(m):
    """Constant of the absolute kernel of the constant link mode.

    Args:
        m (int): link dimension

    Returns:
        float: (1 + m)^2 / ((1 - m)(3 + m)).

    Raises:
        ArithmeticError: for m = 1, where the constant is singular (the
                         constant mode then has nu = 0 and uses the
                         logarithmic kernel instead)
    """
    if m == 1:
        raise ArithmeticError("Absolute constant-mode kernel is singular at m=1")
    return (1 + m) ** 2 / ((1 - m) * (3 + m))


class RadialKernel:
    """Model, absolute or relative radial Green kernel of one link mode.

    Args:
        indices (ConeIndices): mode indices
        flavor (str): key of :py:data:`FLAVORS`

    Attributes:
        FLAVORS (dict): dict which maps flavors as strs to ints
    """

    __slots__ = ("_indices", "_flavor", "_nu", "_a_plus", "_a_minus", "_case")

    FLAVORS = FLAVORS

    def __init__(self, indices, flavor="model"):
        _check_flavor(flavor)
        self._indices = indices
        self._flavor = flavor
        self._nu = float(indices.nu)
        self._a_plus = float(indices.a_plus)
        self._a_minus = float(indices.a_minus)
        # constant 0-form mode with nu > 0 needs the harmonic correction
        if self._nu == 0:
            self._case = "log"
        elif indices.mu == 0 and indices.degree == 0:
            self._case = "constant"
        else:
            self._case = "power"
        if flavor == "absolute" and self._case == "constant":
            harmonic_constant(indices.m)
        if flavor == "absolute" and self._case == "power" and self._a_plus == 0:
            raise ValueError("Absolute kernel undefined for a+ = 0 (mu=0, alpha=%s < 0)"
                             % indices.alpha)

    @property
    def indices(self):
        """ConeIndices: Indices of the mode."""
        return self._indices

    @property
    def flavor(self):
        """str: Kernel flavor."""
        return self._flavor

    @property
    def case(self):
        """str: ``"power"``, ``"constant"`` or ``"log"`` branch of the construction."""
        return self._case

    @property
    def source(self):
        """float: Constant value of the radial operator applied away from the
        diagonal (nonzero where the harmonic mode is split off)."""
        if self._flavor == "absolute" and self._case in ("constant", "log"):
            return -(1.0 + self._indices.m)
        return 0.0

    def __call__(self, r1, r2):
        """Evaluate the kernel.

        Args:
            r1 (float): first radius in (0, 1]
            r2 (float): second radius in (0, 1]

        Returns:
            float: kernel value, symmetric in the arguments.
        """
        _check_radius(r1)
        _check_radius(r2)
        r_small, r_large = (r1, r2) if r1 <= r2 else (r2, r1)
        return self._model(r_small, r_large) + self._correction(r_small, r_large)

    def _model(self, r_small, r_large):
        if self._case == "log":
            return -math.log(r_large)
        alpha = float(self._indices.alpha)
        return (r_small / r_large) ** self._nu * (r_small * r_large) ** alpha / (2 * self._nu)

    def _correction(self, r1, r2):
        if self._flavor == "model":
            return 0.0
        if self._flavor == "relative":
            if self._case == "log":
                return 0.0
            return -(r1 * r2) ** self._a_plus / (2 * self._nu)
        if self._case == "power":
            coefficient = self._a_minus / (2 * self._nu * self._a_plus)
            return -coefficient * (r1 * r2) ** self._a_plus
        squares = 0.5 * (r1 ** 2 + r2 ** 2)
        if self._case == "constant":
            return squares + harmonic_constant(self._indices.m)
        return squares - 0.75

    def derivative(self, r1, r2, wrt=1, below=None):
        """Analytic partial derivative of the kernel.

        Args:
            r1 (float): first radius
            r2 (float): second radius
            wrt (int): 1 or 2, the variable to differentiate in
            below (bool): branch r1 <= r2 if True, r1 >= r2 if False; chosen
                          from the arguments if None (needed on the diagonal)

        Returns:
            float: the one-sided derivative on the chosen branch.
        """
        if wrt not in (1, 2):
            raise ValueError("Invalid derivative variable: %s" % wrt)
        if below is None:
            below = r1 <= r2
        if wrt == 2:
            return self.derivative(r2, r1, wrt=1, below=not below)

        nu, a_p, a_m = self._nu, self._a_plus, self._a_minus
        if self._case == "log":
            model = 0.0 if below else -1.0 / r1
        elif below:
            model = a_p * r1 ** (a_p - 1) * r2 ** a_m / (2 * nu)
        else:
            model = a_m * r1 ** (a_m - 1) * r2 ** a_p / (2 * nu)

        if self._flavor == "model":
            correction = 0.0
        elif self._flavor == "relative":
            correction = 0.0 if self._case == "log" else \
                -a_p * r1 ** (a_p - 1) * r2 ** a_p / (2 * nu)
        elif self._case == "power":
            correction = -a_m / (2 * nu) * r1 ** (a_p - 1) * r2 ** a_p
        else:
            correction = r1
        return model + correction

    def apply_operator(self, r1, r2):
        """Tangential radial operator applied to the kernel in r1, r1 != r2.

        Args:
            r1 (array_like): radii, all on one side of r2
            r2 (float): fixed second radius

        Returns:
            tuple: (value, scale) arrays, see
            :py:func:`conetorsion.coneCalculus.apply_tangential`.
        """
        r1 = np.asarray(r1, dtype=float)
        indices = self._indices
        operator = tangential_operator(indices)
        terms = []
        below = r1 <= r2
        if self._case == "log":
            # -log r1 above the diagonal, constant below
            terms.append((np.where(below, 0.0, -1.0), 0, True))
        else:
            terms.append((np.where(below, r2 ** self._a_minus, 0.0) / (2 * self._nu),
                          indices.a_plus, False))
            terms.append((np.where(below, 0.0, r2 ** self._a_plus) / (2 * self._nu),
                          indices.a_minus, False))

        if self._flavor == "relative" and self._case != "log":
            terms.append((-r2 ** self._a_plus / (2 * self._nu), indices.a_plus, False))
        elif self._flavor == "absolute" and self._case == "power":
            coefficient = self._a_minus / (2 * self._nu * self._a_plus)
            terms.append((-coefficient * r2 ** self._a_plus, indices.a_plus, False))
        elif self._flavor == "absolute":
            terms.append((0.5, 2, False))

        value = np.zeros_like(r1)
        scale = np.zeros_like(r1)
        for coefficient, power, log in terms:
            term_value, term_scale = operator(power, r1, log)
            value = value + coefficient * term_value
            scale = scale + np.abs(coefficient) * term_scale
        return value, scale

    def __repr__(self):
        return "RadialKernel(m=%d, i=%d, mu=%s, %s)" % (
            self._indices.m, self._indices.degree, self._indices.mu, self._flavor)


def model_h(indices, r1, r2):
    """Model cone Green kernel of a link mode.

    Args:
        indices (ConeIndices): mode indices
        r1 (float): radius in (0, 1]
        r2 (float): radius in (0, 1]

    Returns:
        float: h(r1, r2).
    """
    return RadialKernel(indices, "model")(r1, r2)


def absolute_h(indices, r1, r2):
    """Green kernel with absolute boundary condition at r = 1.

    Raises:
        ArithmeticError: for the constant mode at m = 1
    """
    return RadialKernel(indices, "absolute")(r1, r2)


def relative_h(indices, r1, r2):
    """Green kernel with relative boundary condition at r = 1."""
    return RadialKernel(indices, "relative")(r1, r2)


def jump_condition_check(indices, flavor, r):
    """Residual of the derivative jump across the diagonal.

    The jump of d/dr1 h(r1, r) at r1 = r must be -r^(2i - m).

    Args:
        indices (ConeIndices): mode indices
        flavor (str): kernel flavor
        r (float): interior radius, 0 < r < 1

    Returns:
        float: |jump + r^(2i - m)|.
    """
    if not 0 < r < 1:
        raise ValueError("Jump condition needs an interior radius, got %s" % r)
    kernel = RadialKernel(indices, flavor)
    jump = kernel.derivative(r, r, wrt=1, below=False) - \
        kernel.derivative(r, r, wrt=1, below=True)
    return abs(jump + r ** (2 * indices.degree - indices.m))


def boundary_residuals(indices, flavor, n=100):
    """Largest violation of the boundary condition at r2 = 1.

    Absolute kernels are checked for a vanishing normal derivative, relative
    kernels for a vanishing value, over n radii r1 in (0, 1).

    Args:
        indices (ConeIndices): mode indices
        flavor (str): ``"absolute"`` or ``"relative"``
        n (int): number of radii

    Returns:
        float: max residual.
    """
    kernel = RadialKernel(indices, flavor)
    radii = np.linspace(0.0, 1.0, n + 2)[1:-1]
    if flavor == "absolute":
        values = [kernel.derivative(r1, 1.0, wrt=2) for r1 in radii]
    elif flavor == "relative":
        values = [kernel(r1, 1.0) for r1 in radii]
    else:
        raise ValueError("Boundary check needs absolute or relative, got %s" % flavor)
    return float(np.max(np.abs(values)))


def ode_residual(indices, flavor, n=100):
    """Residual of the radial equation away from the diagonal.

    The kernel is annihilated by the tangential operator in r1 except for the
    constant source term of the split off harmonic mode.

    Returns:
        float: max |L h - source| over n radii on both sides of r2 = 1/2,
        relative to the operator terms for irrational indices.
    """
    kernel = RadialKernel(indices, flavor)
    r2 = 0.5
    radii = np.linspace(0.0, 1.0, n + 2)[1:-1]
    radii = radii[np.abs(radii - r2) > 1e-12]
    value, scale = kernel.apply_operator(radii, r2)
    residual = np.abs(value - kernel.source)
    if not indices.is_exact:
        residual = residual / np.maximum(scale, 1.0)
    return float(np.max(residual))


def symmetry_residual(indices, flavor, n=100):
    """Largest |h(r1, r2) - h(r2, r1)| over an n x n grid."""
    kernel = RadialKernel(indices, flavor)
    radii = np.linspace(0.0, 1.0, n + 1)[1:]
    worst = 0.0
    for r1 in radii:
        for r2 in radii:
            worst = max(worst, abs(kernel(r1, r2) - kernel(r2, r1)))
    return worst


@dataclass(frozen=True)
class GreenEvaluation:
    """Truncated mode sum of the coexact Green operator at a point pair.

    Attributes:
        degree (int): form degree
        flavor (str): kernel flavor
        cutoff (float): truncation Lambda of the link eigenvalues
        x1 (ConePoint): first point
        x2 (ConePoint): second point
        value (float): partial sum
        tail_bound (float): bound on the omitted modes (inf if no closed bound)
        n_modes (int): number of link eigenvalues summed
    """

    degree: int
    flavor: str
    cutoff: float
    x1: ConePoint
    x2: ConePoint
    value: float
    tail_bound: float
    n_modes: int

    def row(self):
        """CSV row (flavor, r1, theta1, r2, theta2, value, tail_bound)."""
        return (self.flavor, self.x1.r, self.x1.theta, self.x2.r, self.x2.theta,
                self.value, self.tail_bound)


def default_truncation(k, x1, x2):
    """Link eigenvalue cutoff where the omitted modes fall below the target.

    Off the diagonal ratio the modes decay like (r_small / r_large)^sqrt(cutoff);
    at equal radii the oscillating tail is bounded by summation by parts,
    which needs distinct angles. Capped at the configured number of modes.
    """
    target = defaults["green"]["truncation_target"]
    max_modes = defaults["green"]["max_modes"]
    ratio = min(x1.r, x2.r) / max(x1.r, x2.r)
    spread = abs(math.sin(k * (x2.theta - x1.theta) / 2))
    n_modes = max_modes
    if ratio < 1:
        frequency = math.log(target) / math.log(ratio)
        n_modes = min(n_modes, int(math.ceil(frequency / k)) + 1)
    if spread > 0:
        n_modes = min(n_modes, int(math.ceil(1.0 / (math.pi * spread * target))))
    return float((k * n_modes) ** 2)


def _tail_bound(k, flavor, ratio, spread, n_max):
    """Bound on the coexact modes n > n_max of the m = 1 function sum.

    The terms are cos(k n dtheta) c_n with c_n <= ratio^(kn) / (2 pi n)
    decreasing, so the tail is at most the geometric sum or, by summation by
    parts, c_(n_max+1) / |sin(k dtheta / 2)|.
    """
    factor = 1.0 if flavor == "model" else 2.0
    decay = ratio ** k
    leading = factor * decay ** (n_max + 1) / (2 * math.pi * (n_max + 1))
    bounds = [math.inf]
    if decay < 1:
        bounds.append(leading / (1 - decay))
    if spread > 0:
        bounds.append(leading / spread)
    return min(bounds)


def _mode_values(m, i, mu, flavor, r1, r2):
    """Vectorized kernel values for link eigenvalues with nu > 0, a+ != 0."""
    alpha = (1 + 2 * i - m) / 2.0
    nu = np.sqrt(mu + alpha ** 2)
    a_p = alpha + nu
    a_m = alpha - nu
    r_small, r_large = min(r1, r2), max(r1, r2)
    # r_small^a+ r_large^a- without the 0 * inf of large nu
    values = (r_small / r_large) ** nu * (r_small * r_large) ** alpha / (2 * nu)
    if flavor == "relative":
        values = values - (r1 * r2) ** a_p / (2 * nu)
    elif flavor == "absolute":
        values = values - a_m / (2 * nu * a_p) * (r1 * r2) ** a_p
    return values


def coexact_green_eval(spectrum, i, flavor, x1, x2, cutoff=None):
    """Mode sum of the Green operator of coclosed i-forms, m = 1.

    The link eigenforms are the real Fourier modes on the circle of
    circumference 2 pi / k, orthonormal, so a family of eigenvalue (kn)^2
    pairs as (k / pi) cos(kn dtheta) and the constant mode as k / (2 pi).
    Modes are summed in ascending eigenvalue order with compensated
    summation.

    Args:
        spectrum (LinkSpectrum): circle quotient spectrum (fixes k)
        i (int): form degree, 0 or 1
        flavor (str): kernel flavor
        x1 (ConePoint): first point
        x2 (ConePoint): second point, x2 != x1
        cutoff (float): truncation Lambda, see :py:func:`default_truncation`

    Returns:
        GreenEvaluation: the partial sum and its tail bound.
    """
    _check_flavor(flavor)
    if spectrum.m != 1:
        raise ValueError("Pointwise Green evaluation needs m=1, got m=%d" % spectrum.m)
    if i not in (0, 1):
        raise ValueError("Invalid form degree %s for m=1" % i)
    _check_radius(x1.r)
    _check_radius(x2.r)
    k = spectrum.group_order
    if x1.r == x2.r and x1.angle_to(x2, k) == 0:
        raise ValueError("Coincident points: %s" % (x1,))
    if cutoff is None:
        cutoff = default_truncation(k, x1, x2)
    delta = x2.theta - x1.theta

    terms = []
    # coclosed link forms: harmonic modes in both degrees, coexact in degree 0
    harmonic = RadialKernel(cone_indices(1, i, 0), flavor)
    terms.append(k / (2 * math.pi) * harmonic(x1.r, x2.r))
    n_modes = 1
    if i == 0:
        n_max = int(math.floor(math.sqrt(cutoff) / k))
        if n_max > 0:
            n = np.arange(1, n_max + 1, dtype=float)
            mu = (k * n) ** 2
            values = _mode_values(1, 0, mu, flavor, x1.r, x2.r)
            terms.extend(k / math.pi * np.cos(k * n * delta) * values)
            n_modes += n_max
    else:
        n_max = 0
    value = math.fsum(terms)

    ratio = min(x1.r, x2.r) / max(x1.r, x2.r)
    if i == 1:
        tail = 0.0
    else:
        tail = _tail_bound(k, flavor, ratio, abs(math.sin(k * delta / 2)), n_max)
    logger.debug("green sum k=%d flavor=%s modes=%d tail=%.3g", k, flavor, n_modes, tail)
    return GreenEvaluation(i, flavor, float(cutoff), x1, x2, value, tail, n_modes)


def green_closed_form(k, flavor, x1, x2):
    """Resummed Green function of functions on the flat cone C(S^1/Z_k).

    The coexact mode sum is a logarithmic series, so the m = 1, i = 0 Green
    operator has the closed form

    .. math::

        -\\frac{k}{2\\pi}\\log r_> - \\frac{1}{2\\pi}\\log|1 - (r_</r_>)^k
        e^{ik\\Delta\\theta}| \\pm \\frac{1}{2\\pi}\\log|1 - (r_1 r_2)^k
        e^{ik\\Delta\\theta}|

    plus the zero-mode correction of the chosen flavor.

    Args:
        k (int): group order
        flavor (str): kernel flavor
        x1 (ConePoint): first point
        x2 (ConePoint): second point

    Returns:
        float: the Green function value.
    """
    _check_flavor(flavor)
    _check_radius(x1.r)
    _check_radius(x2.r)
    r_small, r_large = min(x1.r, x2.r), max(x1.r, x2.r)
    phase = complex(math.cos(k * (x2.theta - x1.theta)), math.sin(k * (x2.theta - x1.theta)))
    model = -math.log(abs(1 - (r_small / r_large) ** k * phase)) / (2 * math.pi)
    image = -math.log(abs(1 - (x1.r * x2.r) ** k * phase)) / (2 * math.pi)
    zero_mode = k / (2 * math.pi) * RadialKernel(cone_indices(1, 0, 0), flavor)(x1.r, x2.r)
    if flavor == "absolute":
        return zero_mode + model + image
    if flavor == "relative":
        return zero_mode + model - image
    return zero_mode + model


def green_operator_m1(spectrum, flavor, x1, x2, degree=0):
    """Full Green operator of the flat cone C_(0,1](S^1/Z_k) in degree 0 or 2.

    Functions are spanned by the coexact and harmonic link modes, so the full
    operator in degree 0 is the coexact one. In degree 2 the Hodge star turns
    absolute into relative conditions and the coefficient of the area form
    has the Green function of the dual flavor.

    Args:
        spectrum (LinkSpectrum): circle quotient spectrum (fixes k)
        flavor (str): ``"absolute"`` or ``"relative"``
        x1 (ConePoint): first point
        x2 (ConePoint): second point
        degree (int): 0 or 2

    Returns:
        float: kernel of the Green operator on the scalar coefficient.
    """
    k = spectrum.group_order
    if flavor not in ("absolute", "relative"):
        raise ValueError("Full Green operator needs a boundary flavor, got %s" % flavor)
    if degree == 0:
        return green_closed_form(k, flavor, x1, x2)
    if degree == 2:
        dual = "relative" if flavor == "absolute" else "absolute"
        return green_closed_form(k, dual, x1, x2)
    raise NotImplementedError("Pointwise Green operator of 1-forms is an integral "
                              "composition, only degrees 0 and 2 are provided")


def green_bound_check(spectrum, i, flavor, pairs, closed_form=True, envelope="log"):
    """Empirical constant of a Green bound for m = 1.

    The ``"log"`` envelope is the logarithmic bound near the diagonal. The
    ``"ratio"`` envelope bounds the coexact part, the value with the harmonic
    zero mode removed, by C r_small / r_large on pairs with radius ratio at
    most 1/2.

    Args:
        spectrum (LinkSpectrum): circle quotient spectrum
        i (int): form degree
        flavor (str): kernel flavor
        pairs (iterable): (ConePoint, ConePoint) pairs
        closed_form (bool): use the resummed Green function (degree 0 only)
        envelope (str): ``"log"`` or ``"ratio"``

    Returns:
        float: max |G(x1, x2)| / (1 + |log dist(x1, x2)|), or
        max |G - G_0| / (r_small / r_large) for the ratio envelope.

    Raises:
        ValueError: for an unknown envelope or a ratio pair above 1/2
    """
    if envelope not in ("log", "ratio"):
        raise ValueError("Unknown bound envelope: %s" % envelope)
    k = spectrum.group_order
    harmonic = RadialKernel(cone_indices(1, i, 0), flavor)
    worst = 0.0
    for x1, x2 in pairs:
        if closed_form and i == 0:
            value = green_closed_form(k, flavor, x1, x2)
        else:
            value = coexact_green_eval(spectrum, i, flavor, x1, x2).value
        if envelope == "log":
            dist = x1.distance(x2, k)
            worst = max(worst, abs(value) / (1 + abs(math.log(dist))))
            continue
        ratio = min(x1.r, x2.r) / max(x1.r, x2.r)
        if ratio > 0.5:
            raise ValueError("Ratio envelope needs r_small / r_large <= 1/2, got %s" % ratio)
        coexact = value - k / (2 * math.pi) * harmonic(x1.r, x2.r)
        worst = max(worst, abs(coexact) / ratio)
    return worst


def sample_bound_pairs(k, n_pairs, seed, dist_range=None):
    """Random point pairs on C_(0,1](S^1/Z_k) with log-uniform distances.

    Args:
        k (int): group order
        n_pairs (int): number of pairs
        seed (int): seed of the generator
        dist_range (tuple): (min, max) distance

    Returns:
        list: (ConePoint, ConePoint) pairs.
    """
    if dist_range is None:
        dist_range = defaults["green"]["bound_dist_range"]
    low, high = dist_range
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < n_pairs:
        r1 = math.sqrt(rng.uniform(0.0025, 1.0))
        theta1 = rng.uniform(0.0, 2 * math.pi / k)
        dist = math.exp(rng.uniform(math.log(low), math.log(high)))
        direction = rng.uniform(0.0, 2 * math.pi)
        x = r1 * math.cos(theta1) + dist * math.cos(direction)
        y = r1 * math.sin(theta1) + dist * math.sin(direction)
        r2 = math.hypot(x, y)
        if not 0.05 <= r2 <= 1.0:
            continue
        x1 = ConePoint(r1, theta1)
        x2 = ConePoint(r2, math.atan2(y, x) % (2 * math.pi / k))
        if not low <= x1.distance(x2, k) <= high:
            continue
        pairs.append((x1, x2))
    return pairs


def fit_and_validate_bound(k, flavor, n_pairs=None, seed=0, margin=1.25):
    """Fit the bound constant on half the samples and validate on the rest.

    Args:
        k (int): group order
        flavor (str): kernel flavor
        n_pairs (int): total number of sampled pairs
        seed (int): seed of the generator
        margin (float): factor applied to the fitted constant

    Returns:
        dict: fitted constant, validation maximum and number of violations.
    """
    if n_pairs is None:
        n_pairs = defaults["green"]["bound_pairs"]
    spectrum = circle_quotient_spectrum(k, 1.0 if k == 1 else float(k * k))
    pairs = sample_bound_pairs(k, n_pairs, seed)
    fit, check = pairs[:n_pairs // 2], pairs[n_pairs // 2:]
    constant = margin * green_bound_check(spectrum, 0, flavor, fit)
    violations = 0
    worst = 0.0
    for x1, x2 in check:
        dist = x1.distance(x2, k)
        value = abs(green_closed_form(k, flavor, x1, x2))
        bound = constant * (1 + abs(math.log(dist)))
        worst = max(worst, value / (1 + abs(math.log(dist))))
        if value > bound:
            violations += 1
    logger.info("green bound k=%d %s: C=%.4g, validation max %.4g, %d violations",
                k, flavor, constant, worst, violations)
    return {"constant": constant, "validation_max": worst, "violations": violations,
            "pairs": n_pairs}


def kernel_rows(spectrum, i, flavor, pairs, cutoff=None):
    """Evaluate the coexact Green operator at point pairs for a CSV dump.

    Args:
        spectrum (LinkSpectrum): circle quotient spectrum
        i (int): form degree
        flavor (str): kernel flavor
        pairs (iterable): (ConePoint, ConePoint) pairs
        cutoff (float): truncation, chosen per pair if None

    Returns:
        list: rows (flavor, r1, theta1, r2, theta2, value, tail_bound).
    """
    return [coexact_green_eval(spectrum, i, flavor, x1, x2, cutoff).row()
            for x1, x2 in pairs]
