"""Betti number bookkeeping of the cone and orbifold cohomology comparison.

The glued space is X = A u B with A the cone caps and B the smooth part,
glued along collars A n B. The Mayer-Vietoris sequence

.. math::

    \\cdots \\to H^i(X) \\to H^i(A) \\oplus H^i(B) \\xrightarrow{r_i}
    H^i(A \\cap B) \\to H^{i+1}(X) \\to \\cdots

gives :math:`b_i(X) = \\dim\\ker r_i + \\dim\\operatorname{coker} r_{i-1}`.
Only ranks are tracked, never the maps themselves.

Attributes:
    LABELS (dict): dict which maps cohomology theories as strs to ints
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from conetorsion.spindle import spindle_spectra
from conetorsion.status import InconsistentRanksError

logger = logging.getLogger(__name__)

LABELS = {"link": 0, "l2": 1, "orbifold": 2, "singular": 3}


@dataclass(frozen=True)
class BettiVector:
    """Dimensions of the cohomology groups in degrees 0..n.

    Attributes:
        dims (tuple): nonnegative ints indexed by degree
        label (str): key of :py:data:`LABELS`
    """

    dims: tuple
    label: str = "singular"

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if any(d < 0 for d in dims):
            raise ValueError("Negative Betti number in %s" % (dims,))
        if self.label not in LABELS:
            raise ValueError("Unknown cohomology label: %s" % self.label)
        object.__setattr__(self, "dims", dims)

    @property
    def top_degree(self):
        """int: Largest degree n."""
        return len(self.dims) - 1

    @property
    def euler_characteristic(self):
        """int: Alternating sum of the Betti numbers."""
        return sum((-1) ** i * d for i, d in enumerate(self.dims))

    @property
    def is_palindromic(self):
        """bool: True if b_i = b_(n-i) for every i."""
        return self.dims == self.dims[::-1]

    def padded(self, length):
        """Copy extended by zeros to the given number of degrees."""
        if length < len(self.dims):
            raise ValueError("Cannot shorten %s to %d degrees" % (self.dims, length))
        return BettiVector(self.dims + (0,) * (length - len(self.dims)), self.label)

    def __getitem__(self, degree):
        return self.dims[degree] if 0 <= degree < len(self.dims) else 0

    def __len__(self):
        return len(self.dims)

    def __add__(self, other):
        length = max(len(self), len(other))
        return BettiVector(tuple(self[i] + other[i] for i in range(length)), self.label)

    def to_dict(self):
        return {"dims": list(self.dims), "label": self.label}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data["dims"]), data.get("label", "singular"))


def direct_sum(vectors, label=None):
    """Betti vector of a disjoint union."""
    vectors = list(vectors)
    if not vectors:
        return BettiVector((), label or "singular")
    total = vectors[0]
    for vector in vectors[1:]:
        total = total + vector
    return BettiVector(total.dims, label or total.label)


def _rank(value):
    """Rank given as an int or as a restriction matrix."""
    if isinstance(value, (int, np.integer)):
        return int(value)
    matrix = np.atleast_2d(np.asarray(value, dtype=float))
    if matrix.size == 0:
        return 0
    return int(np.linalg.matrix_rank(matrix))


@dataclass
class GluingData:
    """Pieces of a decomposition X = A u B and the known restriction ranks.

    Attributes:
        piece_a (BettiVector): cohomology of A (the cone caps)
        piece_b (BettiVector): cohomology of B (the smooth part)
        overlap (BettiVector): cohomology of A n B (the collars)
        ranks (dict): rank of r_i by degree i, as ints or matrices
    """

    piece_a: BettiVector
    piece_b: BettiVector
    overlap: BettiVector
    ranks: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.overlap) > max(len(self.piece_a), len(self.piece_b)):
            raise ValueError("Overlap has more degrees than the pieces")

    @property
    def length(self):
        """int: Number of degrees of X."""
        return max(len(self.piece_a), len(self.piece_b))

    def to_dict(self):
        ranks = {str(i): _rank(value) for i, value in sorted(self.ranks.items())}
        return {"piece_a": self.piece_a.to_dict(), "piece_b": self.piece_b.to_dict(),
                "overlap": self.overlap.to_dict(), "ranks": ranks}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(BettiVector.from_dict(data["piece_a"]),
                   BettiVector.from_dict(data["piece_b"]),
                   BettiVector.from_dict(data["overlap"]),
                   {int(i): int(r) for i, r in data.get("ranks", {}).items()})


@dataclass(frozen=True)
class Indeterminate:
    """Mayer-Vietoris result that needs more restriction ranks.

    Attributes:
        missing_ranks (tuple): degrees i whose rank of r_i is needed
        degrees (tuple): Betti degrees of X that stay undetermined
    """

    missing_ranks: tuple
    degrees: tuple

    def to_dict(self):
        return {"indeterminate": True, "missing_ranks": list(self.missing_ranks),
                "degrees": list(self.degrees)}


def cone_l2_cohomology(link, m):
    """L2 cohomology of the cone over a link of dimension m.

    The link cohomology survives in degrees i <= m/2, all higher degrees of
    the (m+1)-dimensional cone vanish.

    Args:
        link (BettiVector): cohomology of the link in degrees 0..m
        m (int): link dimension

    Returns:
        BettiVector: degrees 0..m+1 with label ``"l2"``.
    """
    if len(link) != m + 1:
        raise ValueError("Link vector %s does not have degrees 0..%d" % (link.dims, m))
    if m % 2 == 0 and link[m // 2]:
        raise ValueError("Middle degree cohomology of the link must vanish")
    dims = tuple(link[i] if 2 * i <= m else 0 for i in range(m + 2))
    return BettiVector(dims, "l2")


def quotient_invariant_cohomology(m, rank=1):
    """Invariant cohomology of S^m under a group acting trivially on the fibers.

    Args:
        m (int): sphere dimension
        rank (int): rank of the flat bundle, only 1 is supported

    Returns:
        BettiVector: (1, 0, ..., 0, 1) with label ``"link"``.
    """
    if rank != 1:
        raise NotImplementedError("Flat bundles of rank %s are not supported" % rank)
    if m < 1:
        raise ValueError("Invalid sphere dimension: %s" % m)
    return BettiVector((1,) + (0,) * (m - 1) + (1,), "link")


def _term(i):
    return "H^%d(A)+H^%d(B)->H^%d(AnB)" % (i, i, i)


def mayer_vietoris_betti(data):
    """Solve the rank bookkeeping of the Mayer-Vietoris sequence.

    A rank is forced if the source or the target of r_i vanishes, and in the
    top degree where r_n must be onto. All other ranks must be supplied.

    Args:
        data (GluingData): pieces, overlap and known ranks

    Returns:
        BettiVector or Indeterminate: the Betti numbers of X, or the degrees
        that need more ranks.

    Raises:
        InconsistentRanksError: if a rank violates exactness or the Euler
                                characteristic identity fails
    """
    n = data.length
    source = [data.piece_a[i] + data.piece_b[i] for i in range(n)]
    target = [data.overlap[i] for i in range(n)]

    ranks = {}
    for i in range(n):
        bound = min(source[i], target[i])
        supplied = data.ranks.get(i)
        if supplied is not None:
            rank = _rank(supplied)
            if rank < 0 or rank > bound:
                raise InconsistentRanksError(
                    _term(i), "rank %d outside [0, %d]" % (rank, bound))
            ranks[i] = rank
        elif bound == 0:
            ranks[i] = 0
        elif i == n - 1:
            ranks[i] = target[i]
        if i == n - 1 and ranks.get(i, target[i]) != target[i]:
            raise InconsistentRanksError(
                _term(i), "top restriction must be onto a space of dimension %d" % target[i])

    missing = tuple(i for i in range(n) if i not in ranks)
    if missing:
        degrees = sorted({d for i in missing for d in (i, i + 1) if d < n})
        logger.info("mayer vietoris: ranks of r_%s needed", list(missing))
        return Indeterminate(missing, tuple(degrees))

    dims = []
    for i in range(n):
        kernel = source[i] - ranks[i]
        cokernel = target[i - 1] - ranks[i - 1] if i > 0 else 0
        dims.append(kernel + cokernel)
    result = BettiVector(tuple(dims), "singular")

    expected = (data.piece_a.euler_characteristic + data.piece_b.euler_characteristic
                - data.overlap.euler_characteristic)
    if result.euler_characteristic != expected:
        raise InconsistentRanksError(
            "euler", "chi(X)=%d but chi(A)+chi(B)-chi(AnB)=%d"
            % (result.euler_characteristic, expected))
    logger.debug("mayer vietoris: %s", result.dims)
    return result


def spindle_gluing_data(k, cone_rule=None):
    """Decomposition of the flat spindle into two cone caps and a cylinder.

    The caps are cones over S^1/Z_k, each collar is a circle. The restriction
    matrices send each cap class to its own collar and the cylinder classes
    to both collars.

    Args:
        k (int): group order
        cone_rule (callable): replaces :py:func:`cone_l2_cohomology`

    Returns:
        GluingData: pieces, overlap and restriction matrices.
    """
    if int(k) != k or k < 1:
        raise ValueError("Invalid group order: %s" % k)
    rule = cone_rule or cone_l2_cohomology
    link = quotient_invariant_cohomology(1)
    cap = rule(link, 1)
    caps = direct_sum([cap, cap], "l2")
    cylinder = BettiVector((1, 1, 0), "singular")
    collars = BettiVector((2, 2, 0), "singular")

    # r_0: (cap 1, cap 2, cylinder) -> (collar 1, collar 2)
    columns = [[1, 0]] * cap[0] + [[0, 1]] * cap[0] + [[1, 1]]
    restriction_0 = np.array(columns, dtype=float).T
    restriction_1 = np.ones((2, cap[1] * 2 + 1))
    return GluingData(caps, cylinder, collars, {0: restriction_0, 1: restriction_1})


@dataclass(frozen=True)
class HarmonicCheck:
    """Harmonic dimensions of the spindle from both routes.

    Attributes:
        k (int): group order
        degrees (tuple): compared degrees
        conical (dict): dimensions from the cone rule and Mayer-Vietoris
        orbifold (dict): dimensions of the invariant harmonic forms
        spectral (dict): zero modes of the computed spindle spectrum
    """

    k: int
    degrees: tuple
    conical: dict
    orbifold: dict
    spectral: dict

    @property
    def passed_by_degree(self):
        """dict: True per degree if all routes agree."""
        return {i: self.conical.get(i) == self.orbifold[i] == self.spectral[i]
                for i in self.degrees}

    @property
    def passed(self):
        """bool: True if every degree agrees."""
        return all(self.passed_by_degree.values())

    @property
    def failures(self):
        """list: Degrees where the routes differ."""
        return [i for i, ok in self.passed_by_degree.items() if not ok]

    def to_dict(self):
        return {"k": self.k, "degrees": list(self.degrees),
                "conical": {str(i): v for i, v in self.conical.items()},
                "orbifold": {str(i): v for i, v in self.orbifold.items()},
                "spectral": {str(i): v for i, v in self.spectral.items()},
                "passed": self.passed}


def harmonic_dim_check(k, degrees=(0, 1, 2), cone_rule=None):
    """Compare the harmonic dimensions of the flat spindle.

    Args:
        k (int): group order
        degrees (iterable): degrees to compare
        cone_rule (callable): replaces :py:func:`cone_l2_cohomology`

    Returns:
        HarmonicCheck: dimensions per route and the verdict per degree.
    """
    degrees = tuple(degrees)
    if any(i < 0 or i > 2 for i in degrees):
        raise ValueError("Spindle degrees lie in 0..2, got %s" % (degrees,))
    conical = mayer_vietoris_betti(spindle_gluing_data(k, cone_rule))
    if isinstance(conical, Indeterminate):
        conical_dims = {}
    else:
        conical_dims = {i: conical[i] for i in degrees}
    orbifold = quotient_invariant_cohomology(2)
    # below the first Bessel zero only the harmonic families are present
    spectrum = spindle_spectra(k, 1.0, "orbifold")
    check = HarmonicCheck(int(k), degrees, conical_dims,
                          {i: orbifold[i] for i in degrees},
                          {i: spectrum.harmonic_dimension(i) for i in degrees})
    logger.info("harmonic dimensions k=%d: %s", k, "PASS" if check.passed else
                "FAIL at %s" % check.failures)
    return check
