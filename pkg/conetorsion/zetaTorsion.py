"""Spectral zeta functions, their derivative at zero and analytic torsion.

For positive eigenvalues :math:`\\lambda` with multiplicities the spectral zeta
function is :math:`\\zeta(s) = \\sum \\lambda^{-s}`. Besides the direct sum
two continuations are provided:

* lattice spectra :math:`c n^2` with weight :math:`w` use
  :math:`w c^{-s} \\zeta_R(2s)`,
* all other spectra use the split Mellin transform of the heat trace with a
  small-t expansion fitted by least squares.

The torsion combines the degrees as
:math:`\\zeta = \\sum_i (-1)^{i+1} i \\zeta_i` and
:math:`\\log T = \\zeta'(0) / 2` (convention ``dar_eq_a8``).

Attributes:
    STRATEGIES (dict): dict which maps continuation strategies as strs to ints
    CONVENTIONS (dict): dict which maps torsion conventions as strs to ints
"""

import concurrent.futures as futures
import json
import logging
import math
from dataclasses import dataclass, field, replace

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import exp1, jv

from conetorsion.defaults import defaults, thread_count
from conetorsion.heatKernels import heat_trace
from conetorsion.linkSpectrum import circle_spectrum
from conetorsion.spindle import integer_bessel_zeros, separated_model_spectrum,\
    spindle_spectra
from conetorsion.status import (UnsupportedContinuationError, ZetaPoleError,
                                check_status)

logger = logging.getLogger(__name__)

STRATEGIES = {"direct": 0, "lattice": 1, "mellin": 2}

CONVENTIONS = {"dar_eq_a8": 0}

_POLE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TraceExpansion:
    """Small-t expansion sum c_p t^p + b log t of a heat trace.

    Attributes:
        exponents (tuple): powers p
        coefficients (tuple): coefficients c_p
        log_coefficient (float): coefficient b of log t
        window (tuple): (t_lo, t_hi) of the fit, t_hi is the Mellin split
        condition (float): condition number of the scaled design matrix
        log_error (float): standard error of b
    """

    exponents: tuple
    coefficients: tuple
    log_coefficient: float = 0.0
    window: tuple = (0.0, 1.0)
    condition: float = 1.0
    log_error: float = 0.0

    def evaluate(self, t):
        """Evaluate the expansion at times t."""
        t = np.asarray(t, dtype=float)
        value = np.zeros_like(t)
        for p, c in zip(self.exponents, self.coefficients):
            value = value + c * t ** p
        if self.log_coefficient:
            value = value + self.log_coefficient * np.log(t)
        return value

    def coefficient(self, power):
        """Coefficient of t^power, 0 if the power is not in the basis."""
        for p, c in zip(self.exponents, self.coefficients):
            if abs(p - power) < _POLE_TOLERANCE:
                return c
        return 0.0

    def scaled(self, factor):
        """Expansion of the trace t -> trace(factor t)."""
        coefficients = [c * factor ** p for p, c in zip(self.exponents, self.coefficients)]
        if self.log_coefficient:
            for j, p in enumerate(self.exponents):
                if abs(p) < _POLE_TOLERANCE:
                    coefficients[j] += self.log_coefficient * math.log(factor)
        window = (self.window[0] / factor, self.window[1] / factor)
        return replace(self, coefficients=tuple(coefficients), window=window)


class ZetaSeries:
    """Positive spectrum with a continuation strategy.

    Harmonic (zero) eigenvalues are dropped at construction.

    Args:
        values (array_like): eigenvalues
        multiplicities (array_like): multiplicities, 1 if None
        strategy (str): key of :py:data:`STRATEGIES`
        lattice (tuple): (scale c, weight w) of a lattice spectrum
        expansion (TraceExpansion): fitted small-t expansion
        dimension (int): dimension of the underlying manifold
        cutoff (float): eigenvalue cutoff of the truncated spectrum
        provenance (str): description of the source

    Attributes:
        STRATEGIES (dict): dict which maps strategies as strs to ints
    """

    __slots__ = ("_values", "_multiplicities", "_strategy", "_lattice", "_expansion",
                 "_dimension", "_cutoff", "_provenance")

    STRATEGIES = STRATEGIES

    def __init__(self, values=(), multiplicities=None, strategy="direct", lattice=None,
                 expansion=None, dimension=1, cutoff=None, provenance=""):
        if strategy not in STRATEGIES:
            raise ValueError("Unknown continuation strategy: %s" % strategy)
        values = np.asarray(values, dtype=float)
        if multiplicities is None:
            multiplicities = np.ones_like(values)
        multiplicities = np.asarray(multiplicities, dtype=float)
        if values.shape != multiplicities.shape:
            raise ValueError("Eigenvalues and multiplicities differ in length")
        if np.any(values < -defaults["harmonic_tolerance"]):
            raise ValueError("Negative eigenvalue in zeta series")
        keep = values > defaults["harmonic_tolerance"]
        order = np.argsort(values[keep])
        self._values = values[keep][order]
        self._multiplicities = multiplicities[keep][order]
        if strategy == "lattice":
            if lattice is None:
                raise ValueError("Lattice strategy needs (scale, weight)")
            scale, weight = lattice
            if scale <= 0:
                raise ValueError("Invalid lattice scale: %s" % scale)
            lattice = (float(scale), float(weight))
        self._strategy = strategy
        self._lattice = lattice
        self._expansion = expansion
        self._dimension = int(dimension)
        if cutoff is None:
            cutoff = float(self._values[-1]) if self._values.size else math.inf
        self._cutoff = float(cutoff)
        self._provenance = provenance

    @classmethod
    def from_spectrum(cls, spectrum, degree, strategy="direct"):
        """Build the series of one degree of a spectrum.

        Args:
            spectrum (LinkSpectrum): source spectrum, its m is the dimension
            degree (int): form degree
            strategy (str): ``"direct"`` or ``"mellin"`` (fits the expansion)

        Returns:
            ZetaSeries: the nonzero eigenvalues of the degree.
        """
        values, mults = spectrum.eigenvalues(degree)
        series = cls(values, mults, "direct", dimension=spectrum.m,
                     cutoff=spectrum.cutoff, provenance="%r degree %d" % (spectrum, degree))
        if strategy == "mellin":
            series = series.with_expansion(fit_trace_expansion(series))
        elif strategy != "direct":
            raise ValueError("Spectra support direct or mellin, got %s" % strategy)
        return series

    @classmethod
    def lattice(cls, scale, weight, dimension=1):
        """Lattice series with eigenvalues scale * n^2 of multiplicity weight."""
        return cls(strategy="lattice", lattice=(scale, weight), dimension=dimension,
                   provenance="lattice c=%g w=%g" % (scale, weight))

    @property
    def values(self):
        """ndarray: Positive eigenvalues in ascending order."""
        return self._values

    @property
    def multiplicities(self):
        """ndarray: Multiplicities."""
        return self._multiplicities

    @property
    def strategy(self):
        """str: Continuation strategy."""
        return self._strategy

    @property
    def lattice_parameters(self):
        """tuple: (scale, weight) of a lattice series."""
        return self._lattice

    @property
    def expansion(self):
        """TraceExpansion: Fitted small-t expansion or None."""
        return self._expansion

    @property
    def dimension(self):
        """int: Dimension of the manifold."""
        return self._dimension

    @property
    def cutoff(self):
        """float: Eigenvalue cutoff."""
        return self._cutoff

    @property
    def provenance(self):
        """str: Source description."""
        return self._provenance

    @property
    def is_empty(self):
        """bool: True if the series has no eigenvalues."""
        return self._strategy != "lattice" and self._values.size == 0

    def lowest(self):
        """Smallest eigenvalue."""
        if self._strategy == "lattice":
            return self._lattice[0]
        if self._values.size == 0:
            raise ValueError("Empty zeta series")
        return float(self._values[0])

    def trace(self, t):
        """Heat trace of the series at times t."""
        if self._strategy == "lattice":
            scale, weight = self._lattice
            t_min = float(np.min(t))
            n_max = int(math.sqrt(40.0 / (scale * t_min))) + 1
            n = np.arange(1, n_max + 1, dtype=float)
            return heat_trace((scale * n ** 2, np.full(n_max, weight)), t)
        return heat_trace((self._values, self._multiplicities), t)

    def with_expansion(self, expansion):
        """Copy of the series continued by a trace expansion."""
        return ZetaSeries(self._values, self._multiplicities, "mellin",
                          expansion=expansion, dimension=self._dimension,
                          cutoff=self._cutoff, provenance=self._provenance)

    def scaled(self, factor):
        """Series with every eigenvalue multiplied by factor."""
        if factor <= 0:
            raise ValueError("Invalid scale factor: %s" % factor)
        lattice = None
        if self._lattice is not None:
            lattice = (self._lattice[0] * factor, self._lattice[1])
        expansion = self._expansion.scaled(factor) if self._expansion else None
        return ZetaSeries(self._values * factor, self._multiplicities, self._strategy,
                          lattice, expansion, self._dimension, self._cutoff * factor,
                          self._provenance)

    def __repr__(self):
        if self._strategy == "lattice":
            return "ZetaSeries(lattice c=%g, w=%g)" % self._lattice
        return "ZetaSeries(%s, %d eigenvalues, dimension %d)" % (
            self._strategy, self._values.size, self._dimension)


def default_window(series):
    """Fit window (t_lo, t_hi) where the truncated trace is reliable.

    t_hi scales with the lowest eigenvalue, t_lo is bounded below by the
    cutoff through cutoff * t_lo >= trace_cutoff_factor.
    """
    config = defaults["zeta"]
    t_hi = min(config["fit_t_max"], config["fit_t_max"] / series.lowest())
    t_lo = max(t_hi * 10 ** -config["fit_decades"],
               config["trace_cutoff_factor"] / series.cutoff)
    if t_lo >= 0.5 * t_hi:
        raise ValueError("Cutoff %g too small for a trace fit below t=%g"
                         % (series.cutoff, t_hi))
    return t_lo, t_hi


def _design(t, split, exponents, with_log):
    columns = [(t / split) ** p for p in exponents]
    if with_log:
        columns.append(np.log(t / split))
    return np.column_stack(columns)


def _fit(t, y, split, exponents, with_log):
    """Least squares fit; returns coefficients, leave-one-out error and diagnostics."""
    design = _design(t, split, exponents, with_log)
    pinv = np.linalg.pinv(design)
    coefficients = pinv @ y
    residual = y - design @ coefficients
    hat = np.sum(design * pinv.T, axis=1)
    loo = float(np.mean((residual / np.maximum(1.0 - hat, 1e-12)) ** 2))
    condition = float(np.linalg.cond(design))
    dof = max(len(t) - design.shape[1], 1)
    covariance = float(residual @ residual) / dof * (pinv @ pinv.T)
    return coefficients, loo, condition, covariance


def fit_trace_samples(t, y, dimension, n_terms=None, with_log=False):
    """Fit a small-t expansion to sampled trace values.

    The basis is t^(-d/2 + j/2) for j < n_terms, plus log t if requested.
    Without n_terms the basis size is chosen by leave-one-out cross
    validation.

    Args:
        t (array_like): increasing times
        y (array_like): trace values
        dimension (int): dimension d of the manifold
        n_terms (int): number of power terms
        with_log (bool): include the log t term

    Returns:
        TraceExpansion: fitted expansion.

    Raises:
        NumericalError: if the design matrix is singular
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    config = defaults["zeta"]
    split = float(t[-1])
    min_terms = dimension + 1
    if n_terms is None:
        candidates = [n for n in range(min_terms, config["max_terms"] + 1)
                      if len(t) > n + 3]
    else:
        candidates = [max(n_terms, min_terms)]
    if not candidates:
        raise ValueError("Too few sample times for a trace fit: %d" % len(t))

    best = None
    for n in candidates:
        exponents = [-dimension / 2.0 + j / 2.0 for j in range(n)]
        result = _fit(t, y, split, exponents, with_log)
        if best is None or result[1] < best[1][1]:
            best = (exponents, result)
    exponents, (coefficients, loo, condition, covariance) = best

    diagnostics = {"condition": condition, "terms": len(exponents), "loo": loo}
    if condition > config["condition_limit"]:
        check_status("singular", "trace fit condition number %.3g" % condition, diagnostics)
    elif condition > config["condition_warning"]:
        check_status("ill conditioned", "trace fit condition number %.3g" % condition)

    powers = [float(c) * split ** -p for p, c in zip(exponents, coefficients)]
    log_coefficient = float(coefficients[-1]) if with_log else 0.0
    log_error = math.sqrt(max(covariance[-1, -1], 0.0)) if with_log else 0.0
    if with_log:
        # b log(t / split) = b log t - b log split
        powers[exponents.index(0.0)] -= log_coefficient * math.log(split)
    logger.debug("trace fit on [%g, %g]: %d terms, condition %.3g",
                 t[0], t[-1], len(exponents), condition)
    return TraceExpansion(tuple(exponents), tuple(powers), log_coefficient,
                          (float(t[0]), split), condition, log_error)


def fit_trace_expansion(source, dimension=None, window=None, n_terms=None,
                        with_log=False, points=None):
    """Fit the small-t expansion of a heat trace on a geometric t-grid.

    Args:
        source: :py:class:`ZetaSeries` or a callable trace(t)
        dimension (int): manifold dimension, taken from a series if None
        window (tuple): (t_lo, t_hi), see :py:func:`default_window`
        n_terms (int): number of power terms, cross validated if None
        with_log (bool): include a log t term
        points (int): number of sample times

    Returns:
        TraceExpansion: fitted expansion.
    """
    if points is None:
        points = defaults["zeta"]["fit_points"]
    if isinstance(source, ZetaSeries):
        trace = source.trace
        if dimension is None:
            dimension = source.dimension
        if window is None:
            window = default_window(source)
    else:
        trace = source
        if dimension is None or window is None:
            raise ValueError("A trace callable needs a dimension and a window")
    t = np.geomspace(window[0], window[1], points)
    return fit_trace_samples(t, trace(t), dimension, n_terms, with_log)


def _is_nonpositive_integer(s):
    return s.imag == 0 and s.real <= 0 and float(s.real).is_integer()


def _remainder(series, expansion):
    def remainder(t):
        return float(series.trace(t) - expansion.evaluate(t))
    return remainder


def spectral_zeta(series, s):
    """Evaluate the spectral zeta function.

    Args:
        series (ZetaSeries): spectrum and continuation
        s (complex): argument

    Returns:
        complex: zeta(s).

    Raises:
        ZetaPoleError: at a pole
        UnsupportedContinuationError: if s lies outside the half plane of
                                      convergence and no continuation exists
    """
    s = complex(s)
    if series.strategy == "lattice":
        scale, weight = series.lattice_parameters
        if s == 0.5:
            raise ZetaPoleError(s, weight / (2 * math.sqrt(scale)))
        return complex(weight * mpmath.power(scale, -s) * mpmath.zeta(2 * s))

    if series.strategy == "direct":
        if s.real <= series.dimension / 2.0:
            raise UnsupportedContinuationError(
                "Direct sum diverges at s=%s without a fitted expansion" % s)
        return complex(np.sum(series.multiplicities * series.values ** -s))

    expansion = series.expansion
    if expansion is None:
        raise UnsupportedContinuationError("Mellin continuation without an expansion")
    b = expansion.log_coefficient
    if s == 0 and b:
        raise ZetaPoleError(0, -b)
    poles = [(p, c) for p, c in zip(expansion.exponents, expansion.coefficients)
             if abs(s + p) < _POLE_TOLERANCE and c]
    if _is_nonpositive_integer(s):
        n = int(-s.real)
        return complex(sum(c * (-1) ** n * math.factorial(n) for _, c in poles))
    if poles:
        raise ZetaPoleError(s, float(poles[0][1] * mpmath.rgamma(s).real))

    t_lo, split = expansion.window
    remainder = _remainder(series, expansion)
    total = mpmath.quad(lambda u: mpmath.exp(s * u) * remainder(math.exp(float(u))),
                        [math.log(t_lo), math.log(split)])
    for p, c in zip(expansion.exponents, expansion.coefficients):
        total += c * mpmath.power(split, s + p) / (s + p)
    if b:
        total += b * mpmath.power(split, s) * (math.log(split) / s - 1 / s ** 2)
    for value, mult in zip(series.values, series.multiplicities):
        if value * split > 700:
            break
        total += mult * mpmath.power(value, -s) * mpmath.gammainc(s, value * split)
    return complex(mpmath.rgamma(s) * total)


def zeta_prime_at_zero(series):
    """Derivative of the continued zeta function at s = 0.

    Args:
        series (ZetaSeries): spectrum with lattice or Mellin continuation

    Returns:
        float: zeta'(0).

    Raises:
        ZetaPoleError: if the expansion carries a log t term
        UnsupportedContinuationError: for a direct series
    """
    if series.is_empty:
        return 0.0
    if series.strategy == "lattice":
        scale, weight = series.lattice_parameters
        return weight * (0.5 * math.log(scale) - math.log(2 * math.pi))
    if series.strategy == "direct" or series.expansion is None:
        raise UnsupportedContinuationError("zeta'(0) needs a continuation")

    expansion = series.expansion
    if expansion.log_coefficient:
        raise ZetaPoleError(0, -expansion.log_coefficient)
    t_lo, split = expansion.window
    remainder = _remainder(series, expansion)
    integral, _ = integrate.quad(lambda u: remainder(math.exp(u)),
                                 math.log(t_lo), math.log(split), limit=200)
    value = integral
    for p, c in zip(expansion.exponents, expansion.coefficients):
        if abs(p) < _POLE_TOLERANCE:
            value += c * (np.euler_gamma + math.log(split))
        else:
            value += c * split ** p / p
    value += math.fsum(series.multiplicities * exp1(series.values * split))
    return float(value)


@dataclass
class TorsionReport:
    """Zeta derivatives and torsion of one geometry or of a comparison.

    Attributes:
        convention (str): key of :py:data:`CONVENTIONS`
        zeta_prime (dict): zeta_i'(0) by degree (conical route)
        weighted_zeta_prime (float): zeta'(0) of the weighted combination
        residue (float): residue of the weighted combination at s = 0
        log_tc (float): log of the conical torsion
        log_to (float): log of the orbifold torsion, None for one geometry
        discrepancy (float): |log T_c - log T_o|
        zeta_prime_o (dict): zeta_i'(0) by degree of the orbifold route
        levels (list): per cutoff level values before extrapolation
        provenance (dict): source of each spectrum
    """

    convention: str
    zeta_prime: dict
    weighted_zeta_prime: float
    residue: float = 0.0
    log_tc: float = 0.0
    log_to: float = None
    discrepancy: float = None
    zeta_prime_o: dict = None
    levels: list = None
    provenance: dict = field(default_factory=dict)

    @property
    def t_c(self):
        """float: Conical torsion exp(log_tc)."""
        return math.exp(self.log_tc)

    @property
    def t_o(self):
        """float: Orbifold torsion exp(log_to), None for one geometry."""
        return None if self.log_to is None else math.exp(self.log_to)

    def to_dict(self):
        data = {
            "convention": self.convention,
            "zeta_prime": {str(i): v for i, v in sorted(self.zeta_prime.items())},
            "weighted_zeta_prime": self.weighted_zeta_prime,
            "residue": self.residue,
            "log_tc": self.log_tc,
            "t_c": self.t_c,
            "log_to": self.log_to,
            "t_o": self.t_o,
            "discrepancy": self.discrepancy,
            "provenance": self.provenance,
        }
        if self.zeta_prime_o is not None:
            data["zeta_prime_o"] = {str(i): v for i, v in sorted(self.zeta_prime_o.items())}
        if self.levels is not None:
            data["levels"] = self.levels
        return data

    def to_json(self):
        """Serialize with sorted keys."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def torsion_weight(degree):
    """Weight (-1)^(i+1) i of degree i."""
    return (-1) ** (degree + 1) * degree


def torsion(series_by_degree, convention="dar_eq_a8"):
    """Analytic torsion from per-degree zeta series.

    Args:
        series_by_degree (dict): :py:class:`ZetaSeries` by degree, missing or
                                 None degrees count as empty
        convention (str): key of :py:data:`CONVENTIONS`

    Returns:
        TorsionReport: per-degree derivatives and log T = zeta'(0) / 2.

    Raises:
        ValueError: for an unknown convention or series of different
                    dimensions
    """
    if convention not in CONVENTIONS:
        raise ValueError("Unknown torsion convention: %s" % convention)
    series_by_degree = {i: s for i, s in series_by_degree.items() if s is not None}
    dimensions = {s.dimension for s in series_by_degree.values()}
    if len(dimensions) > 1:
        raise ValueError("Inconsistent dimensions across degrees: %s" % sorted(dimensions))
    for degree in series_by_degree:
        if degree < 0:
            raise ValueError("Invalid degree: %s" % degree)

    degrees = sorted(series_by_degree)
    with futures.ThreadPoolExecutor(max_workers=thread_count()) as executor:
        values = list(executor.map(lambda i: zeta_prime_at_zero(series_by_degree[i]),
                                   degrees))
    zeta_prime = dict(zip(degrees, values))
    weighted = math.fsum(torsion_weight(i) * zeta_prime[i] for i in degrees)
    residue = 0.0
    for i in degrees:
        expansion = series_by_degree[i].expansion
        if expansion is not None:
            residue -= torsion_weight(i) * expansion.log_coefficient
    provenance = {str(i): series_by_degree[i].provenance for i in degrees}
    return TorsionReport(convention, zeta_prime, weighted, residue,
                         log_tc=0.5 * weighted, provenance=provenance)


def circle_torsion(length, method="closed"):
    """Torsion of the circle of circumference L with the trivial line bundle.

    Args:
        length (float): circumference L > 0
        method (str): ``"closed"`` (lattice form) or ``"mellin"``

    Returns:
        TorsionReport: log T = -log L.
    """
    if length <= 0:
        raise ValueError("Invalid circumference: %s" % length)
    scale = (2 * math.pi / length) ** 2
    if method == "closed":
        series = {0: ZetaSeries.lattice(scale, 2), 1: ZetaSeries.lattice(scale, 2)}
    elif method == "mellin":
        config = defaults["zeta"]
        t_hi = min(config["fit_t_max"], config["fit_t_max"] / scale)
        cutoff = config["trace_cutoff_factor"] / (t_hi * 10 ** -config["fit_decades"])
        spectrum = circle_spectrum(length, cutoff)
        series = {i: ZetaSeries.from_spectrum(spectrum, i, "mellin") for i in (0, 1)}
    else:
        raise ValueError("Unknown circle torsion method: %s" % method)
    report = torsion(series)
    report.provenance["method"] = method
    return report


@dataclass(frozen=True)
class ResidueResult:
    """Fitted log t coefficient of a weighted trace combination.

    Attributes:
        b (float): log t coefficient
        band (float): half width of the two sigma confidence band
        passed (bool): True if |b| is below the tolerance
        condition (float): condition number of the fit
        tolerance (float): the tolerance
    """

    b: float
    band: float
    passed: bool
    condition: float
    tolerance: float

    def to_dict(self):
        return {"b": self.b, "band": self.band, "passed": self.passed,
                "condition": self.condition, "tolerance": self.tolerance}


def residue_check(traces_by_degree, t_grid, weights=None, dimension=2, n_terms=None,
                  tolerance=None):
    """Fit the log t coefficient of sum (-1)^i i Tr_i(t).

    Args:
        traces_by_degree (dict): trace samples (arrays) or callables by degree
        t_grid (array_like): increasing sample times
        weights (dict): weights by degree, (-1)^i i if None
        dimension (int): manifold dimension for the fit basis
        n_terms (int): number of power terms, cross validated if None
        tolerance (float): pass threshold for |b|

    Returns:
        ResidueResult: fitted coefficient and band.
    """
    if tolerance is None:
        tolerance = defaults["residue"]["tolerance"]
    t_grid = np.asarray(t_grid, dtype=float)
    combined = np.zeros_like(t_grid)
    for degree, trace in sorted(traces_by_degree.items()):
        weight = (-1) ** degree * degree if weights is None else weights[degree]
        samples = trace(t_grid) if callable(trace) else np.asarray(trace, dtype=float)
        combined = combined + weight * samples
    expansion = fit_trace_samples(t_grid, combined, dimension, n_terms, with_log=True)
    b = expansion.log_coefficient
    result = ResidueResult(b, 2 * expansion.log_error, abs(b) < tolerance,
                           expansion.condition, tolerance)
    logger.info("residue fit: b=%.3g +- %.2g (condition %.3g)", b, result.band,
                result.condition)
    return result


def residue_t_grid(cutoff, t_range=None, points=None):
    """Geometric t-grid for residue fits, limited below by the cutoff."""
    config = defaults["residue"]
    t_min, t_max = t_range if t_range is not None else (config["t_min"], config["t_max"])
    if points is None:
        points = config["points"]
    t_min = max(t_min, defaults["zeta"]["trace_cutoff_factor"] / cutoff)
    if t_min >= t_max:
        raise ValueError("Cutoff %g too small for residue fits below t=%g" % (cutoff, t_max))
    return np.geomspace(t_min, t_max, points)


def spindle_residue_check(k, cutoff=None, control=False, t_range=None):
    """Residue check on the flat spindle.

    Args:
        k (int): group order
        cutoff (float): eigenvalue cutoff of the spectra
        control (bool): fit the single degree 1 trace of the separated model
                        instead of the weighted combination
        t_range (tuple): (t_min, t_max) of the fit

    Returns:
        ResidueResult: fitted log t coefficient.
    """
    if cutoff is None:
        cutoff = defaults["residue"]["cutoff"]
    t_grid = residue_t_grid(cutoff, t_range)
    if control:
        spectrum = separated_model_spectrum(k, 1, cutoff)
        traces = {1: heat_trace(spectrum, t_grid, degree=1)}
        return residue_check(traces, t_grid, weights={1: 1})
    spectrum = spindle_spectra(k, cutoff)
    traces = {i: heat_trace(spectrum, t_grid, degree=i) for i in range(3)}
    return residue_check(traces, t_grid)


def richardson(values):
    """Extrapolate a geometrically converging sequence from its last three terms."""
    values = [float(v) for v in values]
    if len(values) < 3:
        return values[-1]
    x1, x2, x3 = values[-3:]
    d1, d2 = x2 - x1, x3 - x2
    if d1 == d2 or d1 * d2 <= 0 or abs(d2) >= abs(d1):
        return x3
    return x3 - d2 * d2 / (d2 - d1)


def spindle_torsion(k, cutoff, route="conical"):
    """Torsion of the flat spindle from one spectrum route.

    Returns:
        tuple: (TorsionReport, harmonic dimensions by degree).
    """
    spectrum = spindle_spectra(k, cutoff, route)
    series = {i: ZetaSeries.from_spectrum(spectrum, i, "mellin") for i in range(3)}
    harmonic = [spectrum.harmonic_dimension(i) for i in range(3)]
    return torsion(series), harmonic


def torsion_compare(k, cutoff=None, levels=None):
    """Compare the conical and the orbifold torsion of the flat spindle.

    Both routes are evaluated at the cutoffs cutoff / 2^j and extrapolated.

    Args:
        k (int): group order
        cutoff (float): largest eigenvalue cutoff
        levels (int): number of cutoff levels

    Returns:
        TorsionReport: both torsions and their discrepancy.

    Raises:
        NumericalError: if the routes disagree on the harmonic dimensions
    """
    if int(k) != k or k < 1:
        raise ValueError("Invalid group order: %s" % k)
    config = defaults["torsion"]
    if cutoff is None:
        cutoff = config["cutoff"]
    if levels is None:
        levels = config["levels"]
    cutoffs = [cutoff / 2 ** j for j in reversed(range(levels))]

    rows = []
    for level_cutoff in cutoffs:
        conical, harmonic_c = spindle_torsion(k, level_cutoff, "conical")
        orbifold, harmonic_o = spindle_torsion(k, level_cutoff, "orbifold")
        if harmonic_c != harmonic_o:
            check_status("inconsistent", "harmonic dimensions %s (conical) and %s "
                         "(orbifold) differ" % (harmonic_c, harmonic_o),
                         {"k": k, "cutoff": level_cutoff})
        rows.append({"cutoff": level_cutoff, "log_tc": conical.log_tc,
                     "log_to": orbifold.log_tc, "zeta_prime_c": conical.zeta_prime,
                     "zeta_prime_o": orbifold.zeta_prime, "residue": conical.residue})

    log_tc = richardson([row["log_tc"] for row in rows])
    log_to = richardson([row["log_to"] for row in rows])
    zeta_c = {i: richardson([row["zeta_prime_c"][i] for row in rows]) for i in range(3)}
    zeta_o = {i: richardson([row["zeta_prime_o"][i] for row in rows]) for i in range(3)}
    weighted = math.fsum(torsion_weight(i) * zeta_c[i] for i in range(3))
    levels_out = [{"cutoff": row["cutoff"], "log_tc": row["log_tc"], "log_to": row["log_to"]}
                  for row in rows]
    report = TorsionReport("dar_eq_a8", zeta_c, weighted, rows[-1]["residue"],
                           log_tc=log_tc, log_to=log_to, discrepancy=abs(log_tc - log_to),
                           zeta_prime_o=zeta_o, levels=levels_out,
                           provenance={"conical": "spindle k=%d Bessel zeros of cone orders" % k,
                                       "orbifold": "spindle k=%d Z_%d invariant disk modes"
                                                   % (k, k)})
    logger.info("torsion compare k=%d: log Tc=%.3g log To=%.3g discrepancy %.3g",
                k, log_tc, log_to, report.discrepancy)
    return report


def degree_discrepancy(report):
    """Largest |zeta_i'(0) conical - zeta_i'(0) orbifold| of a comparison."""
    if report.zeta_prime_o is None:
        raise ValueError("Report carries a single geometry")
    return max(abs(report.zeta_prime[i] - report.zeta_prime_o[i]) for i in report.zeta_prime)


@dataclass(frozen=True)
class SobolevResult:
    """Spectral constant of the sup norm estimate on C_(0,1](S^1/Z_k).

    For functions with absolute (Neumann) boundary values,
    sup |f| <= C (||f|| + ||Delta^n f||) with
    C^2 = sup_x sum_j phi_j(x)^2 / (1 + lambda_j^(2n)). The sum is finite
    exactly for n > (m + 1) / 4 = 1/2.

    Attributes:
        k (int): group order
        power (float): power n of the Laplacian
        cutoffs (tuple): eigenvalue cutoffs of the truncated sums
        constants (tuple): C per cutoff
        worst_ratio (float): largest sup |f| / (||f|| + ||Delta^n f||) / C over
                             random expansions at the last cutoff
        violations (int): random expansions with ratio above one
        converges (bool): True for n > 1/2
    """

    k: int
    power: float
    cutoffs: tuple
    constants: tuple
    worst_ratio: float
    violations: int
    converges: bool

    @property
    def growth(self):
        """float: Ratio of the last to the first constant."""
        return self.constants[-1] / self.constants[0]

    def to_dict(self):
        return {"k": self.k, "power": self.power, "cutoffs": list(self.cutoffs),
                "constants": list(self.constants), "worst_ratio": self.worst_ratio,
                "violations": self.violations, "converges": self.converges}


def neumann_cone_modes(k, cutoff, radii):
    """Neumann eigenfunctions of the sector of angle 2 pi / k at theta = 0.

    Args:
        k (int): group order
        cutoff (float): largest eigenvalue
        radii (array_like): radii in (0, 1]

    Returns:
        tuple: (eigenvalues, values, densities); values[j] is the normalized
        cosine eigenfunction on the radii and densities[j] the sum of the
        squares over the cosine and sine partners.
    """
    radii = np.asarray(radii, dtype=float)
    x_max = math.sqrt(cutoff)
    eigenvalues = [0.0]
    values = [np.full(len(radii), math.sqrt(k / math.pi))]
    densities = [np.full(len(radii), k / math.pi)]
    for n in range(int(x_max // k) + 1):
        nu = k * n
        angular = k / (2 * math.pi) if n == 0 else k / math.pi
        for zero in integer_bessel_zeros(nu, x_max, derivative=True):
            norm = 0.5 * (1 - (nu / zero) ** 2) * jv(nu, zero) ** 2
            radial = jv(nu, zero * radii) ** 2 / norm
            eigenvalues.append(float(zero) ** 2)
            values.append(np.sqrt(angular * radial) * np.sign(jv(nu, zero * radii)))
            densities.append(angular * radial)
    return np.array(eigenvalues), np.array(values), np.array(densities)


def sobolev_check(k, power=1.0, cutoffs=None, n_radii=None, samples=None, seed=0):
    """Numerical Sobolev estimate on the truncated flat cone.

    The constant is evaluated at increasing cutoffs and tested against
    random Neumann expansions f = sum c_j phi_j at theta = 0, for which
    ||f||^2 + ||Delta^n f||^2 = sum c_j^2 (1 + lambda_j^(2n)).

    Args:
        k (int): group order
        power (float): power n of the Laplacian, n > 0
        cutoffs (list): increasing eigenvalue cutoffs
        n_radii (int): number of radii in (0, 1]
        samples (int): number of random expansions
        seed (int): seed of the generator

    Returns:
        SobolevResult: constants and the random expansion check.
    """
    config = defaults["sobolev"]
    if cutoffs is None:
        cutoffs = config["cutoffs"]
    if n_radii is None:
        n_radii = config["radii"]
    if samples is None:
        samples = config["samples"]
    if int(k) != k or k < 1:
        raise ValueError("Invalid group order: %s" % k)
    if power <= 0:
        raise ValueError("Invalid Laplacian power: %s" % power)
    if len(cutoffs) == 0 or list(cutoffs) != sorted(cutoffs):
        raise ValueError("Cutoffs must be increasing, got %s" % (cutoffs,))

    radii = np.linspace(0.0, 1.0, n_radii + 1)[1:]
    eigenvalues, values, densities = neumann_cone_modes(int(k), cutoffs[-1], radii)
    weights = 1.0 + eigenvalues ** (2 * power)
    constants = []
    for cutoff in cutoffs:
        kept = eigenvalues <= cutoff
        constants.append(math.sqrt(np.max(np.sum(densities[kept] / weights[kept, None],
                                                 axis=0))))

    rng = np.random.default_rng(seed)
    coefficients = rng.standard_normal((samples, len(eigenvalues))) / np.sqrt(weights)
    sup = np.max(np.abs(coefficients @ values), axis=1)
    norms = np.sqrt(np.sum(coefficients ** 2, axis=1)) + \
        np.sqrt(np.sum(coefficients ** 2 * eigenvalues ** (2 * power), axis=1))
    ratios = sup / norms / constants[-1]
    violations = int(np.sum(ratios > 1 + 1e-12))
    result = SobolevResult(int(k), float(power), tuple(float(c) for c in cutoffs),
                           tuple(constants), float(np.max(ratios)), violations,
                           power > 0.5)
    logger.info("sobolev k=%d n=%g: C=%s, worst ratio %.3g, %d violations",
                k, power, ["%.4g" % c for c in constants], result.worst_ratio, violations)
    return result
