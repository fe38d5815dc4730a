"""Conical and orbifold heat kernels on the flat model cone R^2/Z_k.

The conical kernel :math:`K_c` is assembled from the radial heat kernels of
the invariant Fourier modes of the link circle. The mode kernels come from
the spectral radial solver (``"solver"``), the time stepping radial solver
(``"stepping"``) or, as an oracle, from their Bessel form (``"bessel"``).
The orbifold kernel :math:`K_o` is the image sum over the rotation group.
Both are compared on grids of times and point pairs bounded away from the
tip.
"""

import concurrent.futures as futures
import json
import logging
import math

import numpy as np

from conetorsion.coneCalculus import ConePoint, cone_indices
from conetorsion.defaults import defaults, thread_count
from conetorsion.linkSpectrum import LinkSpectrum
from conetorsion.radialSolver import GalerkinSolver, RadialSolver, bessel_heat
from conetorsion.status import check_status

logger = logging.getLogger(__name__)

METHODS = {"bessel": 0, "solver": 1, "stepping": 2}

_MAX_MODES = 100000


def _check_time(t):
    if not t > 0:
        raise ValueError("Invalid time: %s" % t)


def bessel_mode_kernel(indices, t, r1, r2):
    """Closed form heat kernel of a cone mode on the infinite cone.

    Args:
        indices (ConeIndices): mode indices
        t (float): time > 0
        r1 (array_like): radii > 0
        r2 (array_like): radii > 0

    Returns:
        ndarray: (r1 r2)^alpha (2t)^-1 exp(-(r1 - r2)^2 / 4t) ive(nu, r1 r2 / 2t)
        with respect to r^(m-2i) dr.
    """
    _check_time(t)
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    alpha = float(indices.alpha)
    return (r1 * r2) ** alpha * bessel_heat(float(indices.nu), t, r1, r2)


def make_solver(method, boundary="none", t_max=1.0, **parameters):
    """Radial solver for a mode kernel method.

    Args:
        method (str): key of :py:data:`METHODS`
        boundary (str): boundary type
        t_max (float): largest time of a ``"stepping"`` solver
        **parameters: dt, h and ratio of a ``"stepping"`` solver

    Returns:
        GalerkinSolver, RadialSolver or None for ``"bessel"``.
    """
    if method not in METHODS:
        raise ValueError("Unknown kernel method: %s" % method)
    if method == "solver":
        return GalerkinSolver(boundary)
    if method == "stepping":
        return RadialSolver(boundary, t_max=t_max, **parameters)
    return None


def mode_heat_radial(indices, t, r1, r2, boundary="none", solver=None):
    """Heat kernel of a cone mode from a radial solver.

    Examples:
        The off-diagonal kernel decays as t -> 0 and the kernel applied to
        a smooth compactly supported f tends to f(r1).

    Args:
        indices (ConeIndices): mode indices
        t (float): time > 0
        r1 (float): radius
        r2 (float): radius
        boundary (str): ``"none"``, ``"absolute"`` or ``"relative"``
        solver: reused :py:class:`GalerkinSolver` or :py:class:`RadialSolver`,
                a Galerkin solver if None

    Returns:
        float: kernel value with respect to r^(m-2i) dr.

    Raises:
        NumericalError: if the solve fails
    """
    _check_time(t)
    if solver is None:
        solver = GalerkinSolver(boundary)
    elif solver.boundary != boundary:
        raise ValueError("Solver boundary %s does not match %s" % (solver.boundary, boundary))
    return solver.mode_kernel(indices, t, r1, r2)


def cone_mode_sum_kernel(k, t, x1, x2, method="solver", solver=None, tail=None):
    """Heat kernel of functions on the flat cone C(S^1/Z_k) as a mode sum.

    The invariant Fourier modes n = 0, 1, ... enter with Bessel index kn and
    angular factor (k / 2 pi) w_n cos(kn dtheta), w_0 = 1 and w_n = 2.

    Args:
        k (int): group order
        t (float): time > 0
        x1 (ConePoint): first point
        x2 (ConePoint): second point
        method (str): ``"solver"``, ``"stepping"`` or ``"bessel"``
        solver: radial solver of the method, see :py:func:`make_solver`
        tail (float): relative size of the last summed mode

    Returns:
        float: K_c(t, x1, x2).
    """
    _check_time(t)
    if method not in METHODS:
        raise ValueError("Unknown kernel method: %s" % method)
    if tail is None:
        tail = defaults["heat"]["mode_tail"]
    if solver is None:
        solver = make_solver(method, t_max=max(1.0, t))

    delta = x2.theta - x1.theta
    z = x1.r * x2.r / (2 * t)
    terms = []
    for n in range(_MAX_MODES):
        weight = 1.0 if n == 0 else 2.0
        indices = cone_indices(1, 0, (k * n) ** 2)
        if method == "bessel":
            radial = float(bessel_mode_kernel(indices, t, x1.r, x2.r))
        else:
            radial = mode_heat_radial(indices, t, x1.r, x2.r, "none", solver)
        bound = weight * k / (2 * math.pi) * abs(radial)
        terms.append(weight * k / (2 * math.pi) * radial * math.cos(k * n * delta))
        if k * n > z and bound <= tail * abs(math.fsum(terms)):
            break
    else:
        check_status("not converged", "mode sum did not reach the tail %g" % tail,
                     {"k": k, "t": t, "modes": _MAX_MODES})
    logger.debug("mode sum k=%d t=%g: %d modes", k, t, len(terms))
    return math.fsum(terms)


def orbifold_image_kernel(k, t, x1, x2):
    """Heat kernel of R^2/Z_k as an image sum over the rotations.

    Args:
        k (int): group order
        t (float): time > 0
        x1 (ConePoint): first point
        x2 (ConePoint): second point

    Returns:
        float: (4 pi t)^-1 sum_g exp(-|g x1 - x2|^2 / 4t).
    """
    _check_time(t)
    angles = x1.theta + 2 * math.pi * np.arange(k) / k
    squared = x1.r ** 2 + x2.r ** 2 - 2 * x1.r * x2.r * np.cos(angles - x2.theta)
    return math.fsum(np.exp(-np.maximum(squared, 0.0) / (4 * t))) / (4 * math.pi * t)


class HeatGrid:
    """Conical and orbifold kernel values on a grid of times and point pairs.

    Args:
        k (int): group order
        times (list): times t > 0
        pairs (list): (ConePoint, ConePoint) pairs
        values_c (array_like): mode sum values, shape (times, pairs)
        values_o (array_like): image sum values, shape (times, pairs)
        solver (dict): method and solver parameters
    """

    __slots__ = ("_k", "_times", "_pairs", "_values_c", "_values_o", "_solver")

    def __init__(self, k, times, pairs, values_c, values_o, solver=None):
        self._k = int(k)
        self._times = [float(t) for t in times]
        self._pairs = list(pairs)
        self._values_c = np.asarray(values_c, dtype=float)
        self._values_o = np.asarray(values_o, dtype=float)
        self._solver = dict(solver or {})
        shape = (len(self._times), len(self._pairs))
        if self._values_c.shape != shape or self._values_o.shape != shape:
            raise ValueError("Kernel values must have shape %s" % (shape,))

    @property
    def k(self):
        """int: Group order."""
        return self._k

    @property
    def times(self):
        """list: Times of the grid rows."""
        return self._times

    @property
    def pairs(self):
        """list: Point pairs of the grid columns."""
        return self._pairs

    @property
    def values_c(self):
        """ndarray: Conical kernel values."""
        return self._values_c

    @property
    def values_o(self):
        """ndarray: Orbifold kernel values."""
        return self._values_o

    @property
    def solver(self):
        """dict: Method and solver parameters."""
        return self._solver

    @property
    def sup_rel_discrepancy(self):
        """float: max |K_c - K_o| / |K_o| over the grid."""
        if self._values_o.size == 0:
            return 0.0
        return float(np.max(np.abs(self._values_c - self._values_o)
                            / np.abs(self._values_o)))

    def to_dict(self):
        return {
            "k": self._k,
            "times": self._times,
            "pairs": [[x1.r, x1.theta, x2.r, x2.theta] for x1, x2 in self._pairs],
            "values_c": self._values_c.tolist(),
            "values_o": self._values_o.tolist(),
            "sup_rel_discrepancy": self.sup_rel_discrepancy,
            "solver": self._solver,
        }

    def to_json(self):
        """Serialize with sorted keys."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text):
        """Restore a grid written by :py:meth:`to_json`."""
        data = json.loads(text)
        pairs = [(ConePoint(r1, theta1), ConePoint(r2, theta2))
                 for r1, theta1, r2, theta2 in data["pairs"]]
        return cls(data["k"], data["times"], pairs, data["values_c"],
                   data["values_o"], data.get("solver"))

    def plot_rows(self):
        """Rows (t, dist, K_c, K_o) for plotting."""
        rows = []
        for a, t in enumerate(self._times):
            for b, (x1, x2) in enumerate(self._pairs):
                rows.append((t, x1.distance(x2, self._k),
                             float(self._values_c[a, b]), float(self._values_o[a, b])))
        return rows

    def __repr__(self):
        return "HeatGrid(k=%d, %d times, %d pairs)" % (
            self._k, len(self._times), len(self._pairs))


def sample_pairs(k, n, seed, r_range=None):
    """Random point pairs on the flat cone C(S^1/Z_k).

    Args:
        k (int): group order
        n (int): number of pairs
        seed (int): seed of the generator
        r_range (tuple): (min, max) radius

    Returns:
        list: (ConePoint, ConePoint) pairs.
    """
    if r_range is None:
        r_range = (defaults["heat"]["r_min"], 1.0)
    rng = np.random.default_rng(seed)
    radii = rng.uniform(r_range[0], r_range[1], size=(n, 2))
    angles = rng.uniform(0.0, 2 * math.pi / k, size=(n, 2))
    return [(ConePoint(float(radii[j, 0]), float(angles[j, 0])),
             ConePoint(float(radii[j, 1]), float(angles[j, 1]))) for j in range(n)]


def duhamel_compare(k, times, pairs, method="solver", solver=None, r_min=None):
    """Compare the mode sum kernel with the image sum kernel.

    Args:
        k (int): group order
        times (list): times t > 0
        pairs (list): (ConePoint, ConePoint) pairs with r >= r_min
        method (str): mode kernel method, see :py:func:`cone_mode_sum_kernel`
        solver: radial solver of the method, see :py:func:`make_solver`
        r_min (float): smallest admissible radius

    Returns:
        HeatGrid: values of both kernels.
    """
    if r_min is None:
        r_min = defaults["heat"]["r_min"]
    for x1, x2 in pairs:
        if min(x1.r, x2.r) < r_min:
            raise ValueError("Pair radius below r_min=%g: %s, %s" % (r_min, x1, x2))
    for t in times:
        _check_time(t)
    if solver is None:
        solver = make_solver(method, t_max=max([1.0] + list(times)))

    jobs = [(t, x1, x2) for t in times for x1, x2 in pairs]

    def evaluate(job):
        t, x1, x2 = job
        return (cone_mode_sum_kernel(k, t, x1, x2, method, solver),
                orbifold_image_kernel(k, t, x1, x2))

    with futures.ThreadPoolExecutor(max_workers=thread_count()) as executor:
        results = list(executor.map(evaluate, jobs))

    shape = (len(times), len(pairs))
    values_c = np.array([value for value, _ in results]).reshape(shape)
    values_o = np.array([value for _, value in results]).reshape(shape)
    parameters = {"method": method, "truncation": defaults["heat"]["mode_tail"]}
    if solver is not None:
        parameters.update(solver.parameters)
    grid = HeatGrid(k, times, pairs, values_c, values_o, parameters)
    logger.info("duhamel k=%d: sup relative discrepancy %.3g", k, grid.sup_rel_discrepancy)
    return grid


def heat_trace(spectrum, t, degree=0, include_harmonic=False):
    """Heat trace sum mult exp(-lambda t) of the nonzero modes.

    Args:
        spectrum: :py:class:`LinkSpectrum`, a (values, multiplicities) tuple
                  or a list of eigenvalues
        t (float or array_like): times
        degree (int): form degree of a :py:class:`LinkSpectrum`
        include_harmonic (bool): keep the zero modes

    Returns:
        float or ndarray: trace at each time.
    """
    if isinstance(spectrum, LinkSpectrum):
        values, mults = spectrum.eigenvalues(degree, include_harmonic)
    elif isinstance(spectrum, tuple):
        values, mults = (np.asarray(part, dtype=float) for part in spectrum)
    else:
        values = np.asarray(spectrum, dtype=float)
        mults = np.ones_like(values)
    if not include_harmonic:
        keep = values > defaults["harmonic_tolerance"]
        values, mults = values[keep], mults[keep]

    times = np.asarray(t, dtype=float)
    if np.any(times <= 0):
        raise ValueError("Invalid time: %s" % t)
    if values.size == 0:
        return 0.0 if times.ndim == 0 else np.zeros_like(times)
    order = np.argsort(values)[::-1]
    traces = np.exp(-np.multiply.outer(np.atleast_1d(times), values[order])) @ mults[order]
    return float(traces[0]) if times.ndim == 0 else traces


def semigroup_defect(k, s, t, x, y, kernel=None, panels=None, n_theta=512):
    """Relative defect of the semigroup identity on the flat cone.

    Integrates K(s, x, z) K(t, z, y) over z in R^2/Z_k with composite
    Gauss-Legendre quadrature in r and the trapezoidal rule in theta.

    Args:
        k (int): group order
        s (float): first time
        t (float): second time
        x (ConePoint): first point
        y (ConePoint): second point
        kernel (callable): kernel(k, t, x, z), the image sum if None
        panels (int): number of radial panels
        n_theta (int): angular nodes

    Returns:
        float: |integral - K(s + t, x, y)| / K(s + t, x, y).
    """
    _check_time(s)
    _check_time(t)
    if kernel is None:
        kernel = orbifold_image_kernel
    width = math.sqrt(4 * max(s, t) * math.log(1e16))
    r_max = max(x.r, y.r) + width
    if panels is None:
        panels = int(math.ceil(r_max / (0.5 * math.sqrt(min(s, t))))) + 1
    nodes, weights = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(0.0, r_max, panels + 1)
    radii = (0.5 * (edges[1:, None] - edges[:-1, None]) * (nodes[None, :] + 1)
             + edges[:-1, None]).ravel()
    radial_weights = (0.5 * (edges[1:, None] - edges[:-1, None]) * weights[None, :]).ravel()
    angles = 2 * math.pi / k * np.arange(n_theta) / n_theta
    angle_weight = 2 * math.pi / k / n_theta

    if kernel is orbifold_image_kernel:
        # vectorized image sum over the whole quadrature grid
        rr, aa = np.meshgrid(radii, angles, indexing="ij")
        images = 2 * math.pi * np.arange(k) / k

        def image_sum(time, point):
            squared = (rr[..., None] ** 2 + point.r ** 2 - 2 * rr[..., None] * point.r
                       * np.cos(aa[..., None] + images - point.theta))
            return np.exp(-np.maximum(squared, 0.0) / (4 * time)).sum(axis=-1) \
                / (4 * math.pi * time)

        product = image_sum(s, x) * image_sum(t, y)
    else:
        product = np.array([[kernel(k, s, x, ConePoint(r, a)) * kernel(k, t, ConePoint(r, a), y)
                             for a in angles] for r in radii])
    integral = float(np.sum(product * (radial_weights * radii)[:, None]) * angle_weight)
    expected = kernel(k, s + t, x, y)
    return abs(integral - expected) / expected


def decay_envelope(kernel, pairs, times, k=1, c=None, margin=None):
    """Fit the off-diagonal decay bound K <= A exp(-c^2 / 5t).

    A is fitted on every other time and validated on all of them.

    Args:
        kernel (callable): kernel(t, x1, x2)
        pairs (list): (ConePoint, ConePoint) pairs with distance >= c
        times (array_like): times in (0, 1]
        k (int): group order for distances
        c (float): distance threshold, the smallest pair distance if None
        margin (float): factor applied to the fitted constant

    Returns:
        dict: fitted ``A``, ``c``, maximal ratio and number of violations.
    """
    if margin is None:
        margin = defaults["heat"]["decay_margin"]
    distances = [x1.distance(x2, k) for x1, x2 in pairs]
    if c is None:
        c = min(distances)
    if min(distances) < c:
        raise ValueError("Pair closer than the decay distance %g" % c)
    times = np.sort(np.asarray(times, dtype=float))

    def log_ratio(t, x1, x2):
        value = kernel(t, x1, x2)
        if value <= 0:
            return -math.inf
        return math.log(value) + c * c / (5 * t)

    ratios = np.array([[log_ratio(t, x1, x2) for x1, x2 in pairs] for t in times])
    fitted = float(np.max(ratios[::2]))
    amplitude = margin * math.exp(fitted) if fitted > -math.inf else 0.0
    worst = float(np.max(ratios))
    violations = int(np.sum(ratios > math.log(amplitude))) if amplitude > 0 else 0
    return {"A": amplitude, "c": c, "max_ratio": math.exp(worst) if worst > -math.inf else 0.0,
            "violations": violations}


def solver_order(indices, t, r1, r2, dt=None, h=None, boundary="none"):
    """Error reduction of the time stepping solver under halving dt and h.

    The reference is the Bessel form on the infinite cone and the Galerkin
    solver for the ``"absolute"`` and ``"relative"`` boundaries.

    Args:
        indices (ConeIndices): mode indices
        t (float): time
        r1 (float): radius
        r2 (float): radius
        dt (float): coarse time step
        h (float): coarse grid spacing
        boundary (str): boundary type

    Returns:
        tuple: (coarse error, fine error, ratio).
    """
    if dt is None:
        dt = defaults["heat"]["dt"]
    if h is None:
        h = defaults["heat"]["h"]
    if boundary == "none":
        exact = float(bessel_mode_kernel(indices, t, r1, r2))
    else:
        exact = GalerkinSolver(boundary).mode_kernel(indices, t, r1, r2)
    errors = []
    for scale in (1.0, 0.5):
        solver = RadialSolver(boundary, dt=dt * scale, h=h * scale, t_max=max(1.0, t))
        errors.append(abs(solver.mode_kernel(indices, t, r1, r2) - exact))
    coarse, fine = errors
    ratio = math.inf if fine == 0 else coarse / fine
    logger.info("solver order nu=%s t=%g (%s): errors %.3g, %.3g, ratio %.2f",
                indices.nu, t, boundary, coarse, fine, ratio)
    return coarse, fine, ratio
