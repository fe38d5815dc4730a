"""Spectral data of the Hodge Laplacian on the link of a cone.

The link is a sphere quotient :math:`N = S^m/G`. Circle quotients
:math:`S^1/\\mathbb{Z}_k` are handled exactly, round spheres through the
representation theoretic dimension count and everything else through
spectrum files.

Spectrum file format (UTF-8)::

    # comment
    m=1 k=2 cutoff=100
    0 harmonic 0 1
    0 coexact 4 2

Attributes:
    KINDS (dict): dict which maps mode kinds as strs to their sort order
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from conetorsion.defaults import defaults
from conetorsion.status import SpectrumParseError, SpectrumValidationError

logger = logging.getLogger(__name__)

KINDS = {"coexact": 0, "exact": 1, "harmonic": 2}


@dataclass(frozen=True)
class ModeFamily:
    """One eigenvalue of the link Laplacian in a fixed degree and kind.

    Attributes:
        degree (int): form degree i
        kind (str): one of the keys of :py:data:`KINDS`
        eigenvalue (float): eigenvalue mu >= 0
        multiplicity (int): dimension of the eigenspace
    """

    degree: int
    kind: str
    eigenvalue: float
    multiplicity: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("Unknown mode kind: %s" % self.kind)

    @property
    def sort_key(self):
        return self.degree, self.eigenvalue, KINDS[self.kind]


class LinkSpectrum:
    """Immutable table of mode families of the link Laplacian.

    Families that agree in degree, kind and eigenvalue (up to the aggregation
    tolerance) are merged by adding their multiplicities.

    Args:
        m (int): link dimension
        group_order (int): order k of the group G (1 for the full sphere)
        cutoff (float): all modes with eigenvalue <= cutoff are present
        modes (iterable): :py:class:`ModeFamily` instances
    """

    __slots__ = ("_m", "_group_order", "_cutoff", "_modes")

    def __init__(self, m, group_order, cutoff, modes):
        self._m = int(m)
        self._group_order = int(group_order)
        self._cutoff = float(cutoff)
        self._modes = _aggregate(modes)

    @property
    def m(self):
        """int: Link dimension."""
        return self._m

    @property
    def group_order(self):
        """int: Order of the group the sphere is divided by."""
        return self._group_order

    @property
    def cutoff(self):
        """float: Eigenvalue cutoff."""
        return self._cutoff

    @property
    def modes(self):
        """tuple: Mode families sorted by degree and eigenvalue."""
        return self._modes

    def families(self, degree=None, kind=None):
        """Get the mode families of a degree and/or kind.

        Args:
            degree (int): form degree, all degrees if None
            kind (str): mode kind, all kinds if None

        Returns:
            list: matching :py:class:`ModeFamily` instances.
        """
        return [mode for mode in self._modes
                if (degree is None or mode.degree == degree)
                and (kind is None or mode.kind == kind)]

    def eigenvalues(self, degree, include_harmonic=False):
        """Get eigenvalues and multiplicities of one degree as arrays.

        Args:
            degree (int): form degree
            include_harmonic (bool): keep the zero modes

        Returns:
            tuple: (eigenvalues, multiplicities) as numpy arrays.
        """
        selected = [mode for mode in self.families(degree)
                    if include_harmonic or mode.kind != "harmonic"]
        values = np.array([float(mode.eigenvalue) for mode in selected])
        mults = np.array([mode.multiplicity for mode in selected], dtype=float)
        return values, mults

    def nonzero(self, degree):
        """Get the non-harmonic families of a degree."""
        return [mode for mode in self.families(degree) if mode.kind != "harmonic"]

    def harmonic_dimension(self, degree):
        """Get the dimension of the harmonic forms of a degree."""
        return sum(mode.multiplicity for mode in self.families(degree, "harmonic"))

    def counting_function(self, lam, degree=0):
        """Number of eigenvalues <= lam counted with multiplicity."""
        return sum(mode.multiplicity for mode in self.families(degree)
                   if mode.eigenvalue <= lam)

    def scaled(self, factor):
        """Return the spectrum with every eigenvalue multiplied by factor."""
        if factor <= 0:
            raise ValueError("Invalid scale factor: %g" % factor)
        return LinkSpectrum(
            self._m, self._group_order, self._cutoff * factor,
            [ModeFamily(mode.degree, mode.kind, mode.eigenvalue * factor,
                        mode.multiplicity) for mode in self._modes])

    def __iter__(self):
        return iter(self._modes)

    def __len__(self):
        return len(self._modes)

    def __eq__(self, other):
        if not isinstance(other, LinkSpectrum):
            return NotImplemented
        return (self._m == other.m and self._group_order == other.group_order
                and self._cutoff == other.cutoff and self._modes == other.modes)

    def __repr__(self):
        return "LinkSpectrum(m=%d, k=%d, cutoff=%g, %d families)" % (
            self._m, self._group_order, self._cutoff, len(self._modes))


def _aggregate(modes):
    """Sort mode families and merge equal ones."""
    tolerance = defaults["aggregation_tolerance"]
    merged = []
    for mode in sorted(modes, key=lambda mode: mode.sort_key):
        if merged:
            last = merged[-1]
            if (last.degree == mode.degree and last.kind == mode.kind
                    and abs(last.eigenvalue - mode.eigenvalue) < tolerance):
                merged[-1] = ModeFamily(last.degree, last.kind, last.eigenvalue,
                                        last.multiplicity + mode.multiplicity)
                continue
        merged.append(mode)
    return tuple(merged)


def circle_quotient_spectrum(k, cutoff):
    """Spectrum of the circle quotient S^1/Z_k.

    The quotient is a circle of circumference 2 pi / k with invariant Fourier
    modes exp(i k n theta).

    Args:
        k (int): order of the cyclic group
        cutoff (float): largest eigenvalue to include

    Returns:
        LinkSpectrum: degree 0 and degree 1 families.
    """
    if int(k) != k or k < 1:
        raise ValueError("Invalid group order: %s" % k)
    if cutoff <= 0:
        raise ValueError("Invalid cutoff: %s" % cutoff)
    k = int(k)

    modes = [ModeFamily(0, "harmonic", 0, 1), ModeFamily(1, "harmonic", 0, 1)]
    n = 1
    while (k * n) ** 2 <= cutoff:
        modes.append(ModeFamily(0, "coexact", (k * n) ** 2, 2))
        # d maps the coexact 0-forms onto the exact 1-forms
        modes.append(ModeFamily(1, "exact", (k * n) ** 2, 2))
        n += 1
    return LinkSpectrum(1, k, cutoff, modes)


def circle_spectrum(length, cutoff):
    """Spectrum of a circle of arbitrary circumference.

    Args:
        length (float): circumference L
        cutoff (float): largest eigenvalue to include

    Returns:
        LinkSpectrum: eigenvalues (2 pi n / L)^2 in degrees 0 and 1.
    """
    if length <= 0:
        raise ValueError("Invalid circumference: %s" % length)
    if cutoff <= 0:
        raise ValueError("Invalid cutoff: %s" % cutoff)

    modes = [ModeFamily(0, "harmonic", 0.0, 1), ModeFamily(1, "harmonic", 0.0, 1)]
    frequency = 2 * math.pi / length
    n = 1
    while (frequency * n) ** 2 <= cutoff:
        modes.append(ModeFamily(0, "coexact", (frequency * n) ** 2, 2))
        modes.append(ModeFamily(1, "exact", (frequency * n) ** 2, 2))
        n += 1
    return LinkSpectrum(1, 1, cutoff, modes)


def so_dimension(n, weight):
    """Dimension of an irreducible representation of SO(n).

    Weyl's dimension formula for the root systems B_r (n = 2r + 1) and
    D_r (n = 2r), evaluated in exact rational arithmetic.

    Args:
        n (int): n >= 3
        weight (sequence): dominant highest weight, padded with zeros

    Returns:
        int: dimension of the representation.
    """
    r = n // 2
    if n < 3:
        raise ValueError("Invalid orthogonal group size: %d" % n)
    lam = [Fraction(value) for value in weight] + [Fraction(0)] * (r - len(weight))
    if len(lam) > r:
        raise ValueError("Weight too long for SO(%d): %s" % (n, weight))

    if n % 2:
        rho = [Fraction(2 * (r - a) - 1, 2) for a in range(r)]
    else:
        rho = [Fraction(r - a - 1) for a in range(r)]
    shifted = [lam[a] + rho[a] for a in range(r)]

    dim = Fraction(1)
    for a in range(r):
        for b in range(a + 1, r):
            dim *= (shifted[a] ** 2 - shifted[b] ** 2) / (rho[a] ** 2 - rho[b] ** 2)
    if n % 2:
        for a in range(r):
            dim *= shifted[a] / rho[a]

    if dim.denominator != 1:
        raise ArithmeticError("Non-integral dimension %s" % dim)
    return int(dim)


def coexact_multiplicity(m, i, j):
    """Multiplicity of the j-th coexact i-form eigenvalue on round S^m.

    Args:
        m (int): sphere dimension
        i (int): form degree, 0 <= i < m
        j (int): j >= 1

    Returns:
        int: multiplicity.
    """
    if m == 1:
        return 2
    # Hodge duality identifies coexact i-forms with coexact (m-1-i)-forms
    p = min(i, m - 1 - i)
    n = m + 1
    dim = so_dimension(n, [j] + [1] * p)
    # (j, 1, ..., 1, +-1) are two inequivalent weights
    if n % 2 == 0 and p + 1 == n // 2:
        dim *= 2
    return dim


def sphere_coexact_spectrum(m, i, cutoff):
    """Coexact i-form spectrum of the round sphere S^m.

    Eigenvalues are (j + i)(j + m - 1 - i) for j >= 1; there are no coexact
    m-forms.

    Args:
        m (int): sphere dimension, m >= 1
        i (int): form degree, 0 <= i <= m
        cutoff (float): largest eigenvalue to include

    Returns:
        LinkSpectrum: the coexact families of degree i.
    """
    if m < 1:
        raise ValueError("Invalid sphere dimension: %s" % m)
    if i < 0 or i > m:
        raise ValueError("Invalid form degree %s for m=%d" % (i, m))
    if cutoff <= 0:
        raise ValueError("Invalid cutoff: %s" % cutoff)

    modes = []
    if i < m:
        j = 1
        while (j + i) * (j + m - 1 - i) <= cutoff:
            modes.append(ModeFamily(i, "coexact", (j + i) * (j + m - 1 - i),
                                    coexact_multiplicity(m, i, j)))
            j += 1
    return LinkSpectrum(m, 1, cutoff, modes)


def sphere_spectrum(m, cutoff):
    """Complete form spectrum of the round sphere S^m in all degrees.

    Args:
        m (int): sphere dimension
        cutoff (float): largest eigenvalue to include

    Returns:
        LinkSpectrum: coexact, exact and harmonic families.
    """
    modes = [ModeFamily(0, "harmonic", 0, 1), ModeFamily(m, "harmonic", 0, 1)]
    for i in range(m):
        for mode in sphere_coexact_spectrum(m, i, cutoff):
            modes.append(mode)
            modes.append(ModeFamily(i + 1, "exact", mode.eigenvalue, mode.multiplicity))
    return LinkSpectrum(m, 1, cutoff, modes)


def validate_spectrum(spectrum):
    """Check the invariants of a link spectrum.

    Args:
        spectrum (LinkSpectrum): spectrum to check

    Returns:
        list: human readable violations, empty if all invariants hold.
    """
    tolerance = defaults["harmonic_tolerance"]
    m = spectrum.m
    violations = []
    seen = set()
    for mode in spectrum.modes:
        label = "degree %d %s mu=%g" % (mode.degree, mode.kind, mode.eigenvalue)
        if not math.isfinite(mode.eigenvalue):
            violations.append("%s: non-finite eigenvalue" % label)
            continue
        key = (mode.degree, mode.kind, round(mode.eigenvalue / tolerance))
        if key in seen:
            violations.append("%s: duplicate family" % label)
        seen.add(key)
        if mode.degree < 0 or mode.degree > m:
            violations.append("%s: degree outside [0, %d]" % (label, m))
        if mode.eigenvalue < 0:
            violations.append("%s: negative eigenvalue" % label)
        if int(mode.multiplicity) != mode.multiplicity or mode.multiplicity < 1:
            violations.append("%s: invalid multiplicity %s" % (label, mode.multiplicity))
        if (mode.kind == "harmonic") != (abs(mode.eigenvalue) < tolerance):
            violations.append("%s: harmonic iff zero eigenvalue" % label)
        if mode.kind == "coexact" and 0 <= mode.degree <= m:
            bound = (m - mode.degree) * (mode.degree + 1)
            if mode.eigenvalue < bound - tolerance:
                violations.append("%s: below lower bound %d" % (label, bound))

    for mode in spectrum.families(0, "harmonic"):
        if mode.multiplicity != 1:
            violations.append("degree 0 harmonic multiplicity %d, link not connected"
                              % mode.multiplicity)
    return violations


def weyl_count_deviation(spectrum, degree=0):
    """Largest deviation of the counting function from the circle Weyl law.

    Evaluated just below and at every eigenvalue up to the cutoff, where the
    step function attains its extremes.

    Args:
        spectrum (LinkSpectrum): spectrum with m = 1
        degree (int): form degree

    Returns:
        float: max |N(lam) - (2/k) sqrt(lam)|.
    """
    if spectrum.m != 1:
        raise ValueError("Weyl law check requires m=1, got m=%d" % spectrum.m)
    k = spectrum.group_order
    deviation = 0.0
    count = 0
    for mode in spectrum.families(degree):
        lam = float(mode.eigenvalue)
        deviation = max(deviation, abs(count - 2.0 / k * math.sqrt(lam)))
        count += mode.multiplicity
        deviation = max(deviation, abs(count - 2.0 / k * math.sqrt(lam)))
    deviation = max(deviation,
                    abs(count - 2.0 / k * math.sqrt(spectrum.cutoff)))
    return deviation


def _format_number(value):
    if isinstance(value, (int, np.integer)) or float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def write_spectrum(spectrum, path):
    """Write a spectrum in the text format read by :py:func:`load_spectrum`.

    Args:
        spectrum (LinkSpectrum): spectrum to write
        path (str): output file path
    """
    with open(path, 'w', encoding='utf-8') as spec_file:
        spec_file.write("# conetorsion link spectrum\n")
        spec_file.write("m=%d k=%d cutoff=%s\n" % (
            spectrum.m, spectrum.group_order, _format_number(spectrum.cutoff)))
        for mode in spectrum.modes:
            spec_file.write("%d %s %s %d\n" % (
                mode.degree, mode.kind, _format_number(mode.eigenvalue),
                mode.multiplicity))


def _parse_header(line_no, line):
    fields = {}
    for token in line.split():
        key, sep, value = token.partition('=')
        if not sep:
            raise SpectrumParseError(line_no, "expected key=value, got %r" % token)
        fields[key] = value
    try:
        return int(fields["m"]), int(fields["k"]), float(fields["cutoff"])
    except KeyError as missing:
        raise SpectrumParseError(line_no, "missing header field %s" % missing)
    except ValueError as err:
        raise SpectrumParseError(line_no, str(err))


def _parse_number(value):
    number = float(value)
    if number.is_integer() and '.' not in value and 'e' not in value.lower():
        return int(value)
    return number


def load_spectrum(path):
    """Read a spectrum file.

    Args:
        path (str): file path

    Returns:
        LinkSpectrum: parsed, sorted and aggregated spectrum.

    Raises:
        SpectrumParseError: if a line is malformed
        SpectrumValidationError: if the spectrum violates an invariant
    """
    header = None
    modes = []
    with open(path, 'r', encoding='utf-8') as spec_file:
        for line_no, raw_line in enumerate(spec_file, start=1):
            line = raw_line.split('#', 1)[0].strip()
            if not line:
                continue
            if header is None:
                header = _parse_header(line_no, line)
                continue
            tokens = line.split()
            if len(tokens) != 4:
                raise SpectrumParseError(
                    line_no, "expected 4 fields, got %d" % len(tokens))
            try:
                degree = int(tokens[0])
                eigenvalue = _parse_number(tokens[2])
                multiplicity = int(tokens[3])
            except ValueError as err:
                raise SpectrumParseError(line_no, str(err))
            if tokens[1] not in KINDS:
                raise SpectrumParseError(line_no, "unknown kind %r" % tokens[1])
            modes.append(ModeFamily(degree, tokens[1], eigenvalue, multiplicity))

    if header is None:
        raise SpectrumParseError(1, "missing header line")
    m, k, cutoff = header
    spectrum = LinkSpectrum(m, k, cutoff, modes)
    violations = validate_spectrum(spectrum)
    if violations:
        raise SpectrumValidationError(violations)
    logger.debug("loaded %r from %s", spectrum, path)
    return spectrum
