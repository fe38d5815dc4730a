"""Radial heat solvers for one cone mode.

The weighted radial operator of a mode with indices :math:`(\\alpha, \\nu)` is
conjugated by :math:`r^{\\alpha}` to the Bessel operator

.. math::

    -G'' - r^{-1} G' + \\nu^2 r^{-2} G

with respect to :math:`r\\,dr`. :py:class:`RadialSolver` discretizes this
canonical problem with finite volumes on a graded grid (geometric spacings
towards the tip, uniform spacing outside), steps it with Crank-Nicolson after
backward Euler start-up half steps and reuses the sparse LU factorization of
the step matrix for every step. It is second order in dt and h.

:py:class:`GalerkinSolver` solves the same problem with a spectral Galerkin
discretization in :math:`s = (r/R)^2` and exact propagation in time. Its
kernels are accurate to about 1e-10 of their size, which the angular mode
sums of the cone kernels need.

Attributes:
    BOUNDARIES (dict): dict which maps boundary types as strs to ints
"""

import logging
import math

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, eigh
from scipy.sparse.linalg import splu
from scipy.special import ive, roots_jacobi

from conetorsion.defaults import defaults
from conetorsion.status import check_status

logger = logging.getLogger(__name__)

BOUNDARIES = {"none": 0, "absolute": 1, "relative": 2}


def graded_grid(h, ratio, r_end):
    """Radial nodes from 0 to r_end.

    Uniform spacing h on [10 h, r_end]; below 10 h the nodes are geometric,
    10 h ratio^-j, so the spacings shrink by ``ratio`` per cell towards
    r = 0 down to a smallest node of h / 100. The grid scales with h.

    Args:
        h (float): outer spacing
        ratio (float): geometric ratio > 1
        r_end (float): last node

    Returns:
        ndarray: strictly increasing nodes starting at 0.
    """
    if h <= 0 or ratio <= 1:
        raise ValueError("Invalid grid parameters h=%s, ratio=%s" % (h, ratio))
    r_core = 10 * h
    if r_end <= 2 * r_core:
        raise ValueError("Grid spacing %g too coarse for r_end=%g" % (h, r_end))

    inner = []
    r = r_core / ratio
    while r > 0.01 * h:
        inner.append(r)
        r /= ratio
    n_outer = max(1, int(round((r_end - r_core) / h)))
    outer = np.linspace(r_core, r_end, n_outer + 1)
    return np.concatenate(([0.0], inner[::-1], outer))


def outer_radius(t_max, margin=None):
    """Truncation radius with exp(-(R - 1)^2 / 4 t_max) < margin."""
    if margin is None:
        margin = defaults["heat"]["r_out_margin"]
    return 1.0 + math.sqrt(4.0 * t_max * math.log(1.0 / margin))


def bessel_heat(nu, t, r1, r2):
    """Heat kernel of the canonical Bessel operator on the half line.

    Args:
        nu (float): Bessel index >= 0
        t (float): time > 0
        r1 (array_like): radii
        r2 (array_like): radii

    Returns:
        ndarray: (2t)^-1 exp(-(r1^2 + r2^2) / 4t) I_nu(r1 r2 / 2t) with respect
        to r dr.
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    return np.exp(-(r1 - r2) ** 2 / (4 * t)) * ive(nu, r1 * r2 / (2 * t)) / (2 * t)


class RadialSolver:
    """Crank-Nicolson solver for the canonical radial heat equation.

    Args:
        boundary (str): key of :py:data:`BOUNDARIES`; ``"none"`` is the
                        infinite cone truncated at R_out with a Dirichlet
                        condition, ``"absolute"`` and ``"relative"`` put the
                        boundary at r = 1
        dt (float): time step
        h (float): outer grid spacing
        ratio (float): geometric grading ratio
        t_max (float): largest time, fixes R_out for ``"none"``
        startup_steps (int): even number of backward Euler half steps

    Attributes:
        BOUNDARIES (dict): dict which maps boundary types as strs to ints
    """

    __slots__ = ("_boundary", "_dt", "_h", "_ratio", "_t_max", "_startup_steps",
                 "_nodes", "_faces", "_cache")

    BOUNDARIES = BOUNDARIES

    def __init__(self, boundary="none", dt=None, h=None, ratio=None, t_max=1.0,
                 startup_steps=None):
        if boundary not in BOUNDARIES:
            raise ValueError("Unknown boundary type: %s" % boundary)
        config = defaults["heat"]
        self._boundary = boundary
        self._dt = float(config["dt"] if dt is None else dt)
        self._h = float(config["h"] if h is None else h)
        self._ratio = float(config["grid_ratio"] if ratio is None else ratio)
        self._t_max = float(t_max)
        self._startup_steps = int(config["startup_steps"] if startup_steps is None
                                  else startup_steps)
        if self._dt <= 0:
            raise ValueError("Invalid time step: %s" % self._dt)
        if self._startup_steps < 0 or self._startup_steps % 2:
            raise ValueError("Start-up half steps must be even: %s" % self._startup_steps)

        r_end = 1.0 if boundary != "none" else outer_radius(self._t_max)
        self._nodes = graded_grid(self._h, self._ratio, r_end)
        self._faces = 0.5 * (self._nodes[1:] + self._nodes[:-1])
        self._cache = {}
        logger.debug("radial grid: %d nodes up to %g (%s)", len(self._nodes), r_end, boundary)

    @property
    def boundary(self):
        """str: Boundary type."""
        return self._boundary

    @property
    def nodes(self):
        """ndarray: Grid nodes."""
        return self._nodes

    @property
    def parameters(self):
        """dict: Solver parameters for reports."""
        return {"boundary": self._boundary, "dt": self._dt, "h": self._h,
                "ratio": self._ratio, "nodes": len(self._nodes),
                "r_end": float(self._nodes[-1]), "startup_steps": self._startup_steps}

    def _unknowns(self, nu):
        first = 0 if nu == 0 else 1
        last = len(self._nodes) if self._boundary == "absolute" else len(self._nodes) - 1
        return first, last

    def _operator(self, nu, robin):
        """Mass vector and stiffness matrix over the unknown nodes."""
        key = (nu, robin)
        if key in self._cache:
            return self._cache[key]
        nodes, faces = self._nodes, self._faces
        n = len(nodes)
        left = np.concatenate(([0.0], faces))
        right = np.concatenate((faces, [nodes[-1]]))
        volume = 0.5 * (right ** 2 - left ** 2)
        conductance = faces / np.diff(nodes)

        diagonal = np.zeros(n)
        diagonal[:-1] += conductance
        diagonal[1:] += conductance
        if nu != 0:
            potential = np.zeros(n)
            potential[1:] = nu * nu * np.log(right[1:] / left[1:])
            diagonal += potential
        if self._boundary == "absolute":
            diagonal[-1] += robin

        first, last = self._unknowns(nu)
        stiffness = sp.diags(
            (-conductance[first:last - 1], diagonal[first:last], -conductance[first:last - 1]),
            (-1, 0, 1), format="csc")
        self._cache[key] = (volume[first:last], stiffness)
        return self._cache[key]

    def _interpolation(self, radii, first, last):
        """Linear interpolation weights from the unknown nodes to radii."""
        radii = np.atleast_1d(np.asarray(radii, dtype=float))
        nodes = self._nodes
        if np.any(radii <= 0) or np.any(radii > nodes[-1]):
            raise ValueError("Radius outside the solver grid (0, %g]" % nodes[-1])
        upper = np.clip(np.searchsorted(nodes, radii), 1, len(nodes) - 1)
        lower = upper - 1
        weight = (nodes[upper] - radii) / (nodes[upper] - nodes[lower])
        matrix = np.zeros((len(radii), last - first))
        for row, (a, b, w) in enumerate(zip(lower, upper, weight)):
            if first <= a < last:
                matrix[row, a - first] += w
            if first <= b < last:
                matrix[row, b - first] += 1.0 - w
        return matrix

    def canonical_kernel(self, nu, t, r1, r2, robin=0.0):
        """Heat kernel of the canonical problem with respect to r dr.

        Args:
            nu (float): Bessel index >= 0
            t (float): time > 0
            r1 (array_like): evaluation radii
            r2 (array_like): source radii
            robin (float): coefficient kappa of G'(1) = -kappa G(1)
                           (``"absolute"`` only)

        Returns:
            ndarray: kernel values of shape (len(r1), len(r2)).

        Raises:
            NumericalError: if the factorization is singular or the solution
                            is not finite
        """
        if t <= 0:
            raise ValueError("Invalid time: %s" % t)
        if nu < 0:
            raise ValueError("Invalid Bessel index: %s" % nu)
        volume, stiffness = self._operator(float(nu), float(robin))
        first, last = self._unknowns(nu)
        source = self._interpolation(r2, first, last).T / volume[:, None]
        target = self._interpolation(r1, first, last)

        half_steps = self._startup_steps
        n_steps = max(int(math.ceil(t / self._dt - 1e-9)), half_steps // 2)
        if n_steps == 0:
            n_steps = 1
        tau = t / n_steps
        mass = sp.diags(volume, format="csc")
        # a backward Euler half step shares the Crank-Nicolson matrix
        try:
            lu = splu((mass + 0.5 * tau * stiffness).tocsc())
        except RuntimeError as err:
            check_status("singular", "step matrix factorization failed: %s" % err,
                         {"nu": nu, "tau": tau})

        u = source
        for _ in range(half_steps):
            u = lu.solve(volume[:, None] * u)
        explicit = mass - 0.5 * tau * stiffness
        for _ in range(n_steps - half_steps // 2):
            u = lu.solve(explicit @ u)

        if not np.all(np.isfinite(u)):
            check_status("not converged", "radial solve produced non-finite values",
                         {"nu": nu, "t": t, "tau": tau, "nodes": len(self._nodes)})
        return target @ u

    def mode_kernel(self, indices, t, r1, r2):
        """Heat kernel of a cone mode with respect to r^(m-2i) dr.

        Args:
            indices (ConeIndices): mode indices
            t (float): time > 0
            r1 (float): radius
            r2 (float): radius

        Returns:
            float: (r1 r2)^alpha times the canonical kernel.
        """
        alpha = float(indices.alpha)
        robin = alpha if self._boundary == "absolute" else 0.0
        value = self.canonical_kernel(float(indices.nu), t, [r1], [r2], robin)[0, 0]
        return (r1 * r2) ** alpha * value

    def __repr__(self):
        return "RadialSolver(%s, dt=%g, h=%g, %d nodes)" % (
            self._boundary, self._dt, self._h, len(self._nodes))


def _barycentric_weights(nodes):
    """Barycentric weights of Lagrange interpolation, scaled to max 1."""
    difference = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(difference, 1.0)
    logs = -np.sum(np.log(np.abs(difference)), axis=1)
    signs = np.prod(np.sign(difference), axis=1)
    return signs * np.exp(logs - np.max(logs))


def _lagrange(nodes, weights, points):
    """Lagrange basis values and derivatives at points.

    Derivatives are only valid at points that are not nodes.

    Returns:
        tuple: (values, derivatives) of shape (len(points), len(nodes)).
    """
    difference = np.asarray(points, dtype=float)[:, None] - nodes[None, :]
    exact = difference == 0
    difference[exact] = 1.0
    inverse = 1.0 / difference
    terms = weights * inverse
    values = terms / np.sum(terms, axis=1, keepdims=True)
    derivatives = values * (np.sum(inverse, axis=1, keepdims=True) - inverse)
    hits = np.any(exact, axis=1)
    values[hits] = exact[hits]
    derivatives[hits] = np.nan
    return values, derivatives


class GalerkinSolver:
    """Spectral Galerkin solver for the canonical radial heat equation.

    With :math:`G = r^{\\nu} H` and :math:`s = (r/R)^2` the canonical operator
    becomes

    .. math::

        -\\frac{4}{R^2} s^{-\\nu} \\left(s^{\\nu+1} H'\\right)'

    on :math:`L^2([0, 1], s^{\\nu} ds)`, which is discretized by polynomials of
    degree n in s. Nodal bases at Gauss-Jacobi (Dirichlet at R) or
    Gauss-Radau-Jacobi (Robin at R = 1) points make the mass matrix diagonal
    and exact. The kernel is propagated exactly in the eigenbasis of the
    stiffness matrix. The truncation radius of ``"none"`` is chosen per time
    so that exp(-(R - 1)^2 / 4t) < margin; the degree resolves all modes with
    lambda t below ``decay_exponent``.

    Args:
        boundary (str): key of :py:data:`BOUNDARIES`
        margin (float): truncation margin of the outer radius
        extra_degree (int): degree added to the resolution estimate
    """

    __slots__ = ("_boundary", "_margin", "_extra_degree", "_cache")

    BOUNDARIES = BOUNDARIES

    def __init__(self, boundary="none", margin=None, extra_degree=None):
        if boundary not in BOUNDARIES:
            raise ValueError("Unknown boundary type: %s" % boundary)
        config = defaults["heat"]
        self._boundary = boundary
        self._margin = float(config["r_out_margin"] if margin is None else margin)
        self._extra_degree = int(config["galerkin_extra_degree"] if extra_degree is None
                                 else extra_degree)
        if not 0 < self._margin < 1:
            raise ValueError("Invalid truncation margin: %s" % self._margin)
        if self._extra_degree < 0:
            raise ValueError("Invalid extra degree: %s" % self._extra_degree)
        self._cache = {}

    @property
    def boundary(self):
        """str: Boundary type."""
        return self._boundary

    @property
    def parameters(self):
        """dict: Solver parameters for reports."""
        return {"boundary": self._boundary, "scheme": "galerkin",
                "margin": self._margin, "extra_degree": self._extra_degree,
                "decay_exponent": defaults["heat"]["decay_exponent"]}

    def radius(self, t):
        """Radius of the outer boundary for time t."""
        if self._boundary != "none":
            return 1.0
        return outer_radius(t, self._margin)

    def degree(self, nu, t):
        """Polynomial degree in s that resolves time t.

        Returns:
            int: degree n.

        Raises:
            NumericalError: if n exceeds ``galerkin_max_degree``
        """
        frequency = self.radius(t) * math.sqrt(defaults["heat"]["decay_exponent"] / t)
        n = int(math.ceil(0.6 * frequency + 0.5 * nu)) + self._extra_degree
        if n > defaults["heat"]["galerkin_max_degree"]:
            check_status("not converged", "Galerkin degree %d too large" % n,
                         {"nu": nu, "t": t, "frequency": frequency})
        return n

    def _basis(self, nu, radius, n, robin):
        key = (nu, radius, n, robin)
        if key in self._cache:
            return self._cache[key]
        dirichlet = self._boundary != "absolute"
        if dirichlet:
            x, w = roots_jacobi(n, 2.0, nu)
            nodes = 0.5 * (1.0 + x)
            mass = w * 2.0 ** -(nu + 3)
        else:
            x, w = roots_jacobi(n, 1.0, nu)
            interior = w / (1.0 - x) * 2.0 ** -(nu + 1)
            nodes = np.concatenate((0.5 * (1.0 + x), [1.0]))
            mass = np.concatenate((interior, [1.0 / (nu + 1) - np.sum(interior)]))
        weights = _barycentric_weights(nodes)
        scale = 1.0 / np.sqrt(mass)

        y, u = roots_jacobi(n + 1, 0.0, nu + 1)
        sigma = 0.5 * (1.0 + y)
        values, derivatives = _lagrange(nodes, weights, sigma)
        if dirichlet:
            slopes = (-values + (1.0 - sigma)[:, None] * derivatives) * scale
        else:
            slopes = derivatives * scale
        stiffness = 4.0 / radius ** 2 * slopes.T @ ((u * 2.0 ** -(nu + 2))[:, None] * slopes)
        if not dirichlet:
            stiffness[-1, -1] += 2.0 * (robin + nu) * scale[-1] ** 2
        try:
            eigenvalues, vectors = eigh(0.5 * (stiffness + stiffness.T))
        except LinAlgError as err:
            check_status("not converged", "Galerkin eigensolve failed: %s" % err,
                         {"nu": nu, "degree": n})
        basis = (nodes, weights, scale, dirichlet, eigenvalues, vectors)
        self._cache[key] = basis
        logger.debug("Galerkin basis nu=%g R=%g: degree %d, lowest eigenvalue %.6g",
                     nu, radius, n, eigenvalues[0])
        return basis

    def _modes(self, basis, s):
        nodes, weights, scale, dirichlet, _, vectors = basis
        values, _ = _lagrange(nodes, weights, s)
        if dirichlet:
            values = (1.0 - s)[:, None] * values
        return (values * scale) @ vectors

    def canonical_kernel(self, nu, t, r1, r2, robin=0.0):
        """Heat kernel of the canonical problem with respect to r dr.

        Args:
            nu (float): Bessel index >= 0
            t (float): time > 0
            r1 (array_like): evaluation radii
            r2 (array_like): source radii
            robin (float): coefficient kappa of G'(1) = -kappa G(1)
                           (``"absolute"`` only)

        Returns:
            ndarray: kernel values of shape (len(r1), len(r2)).

        Raises:
            NumericalError: if the eigensolve fails or the kernel is not finite
        """
        if t <= 0:
            raise ValueError("Invalid time: %s" % t)
        if nu < 0:
            raise ValueError("Invalid Bessel index: %s" % nu)
        nu = float(nu)
        radius = self.radius(t)
        r1 = np.atleast_1d(np.asarray(r1, dtype=float))
        r2 = np.atleast_1d(np.asarray(r2, dtype=float))
        if np.any(r1 <= 0) or np.any(r2 <= 0) or max(r1.max(), r2.max()) > radius:
            raise ValueError("Radius outside the solver domain (0, %g]" % radius)

        basis = self._basis(nu, radius, self.degree(nu, t), float(robin))
        s1 = (r1 / radius) ** 2
        s2 = (r2 / radius) ** 2
        decay = np.exp(-basis[4] * t)
        kernel = (self._modes(basis, s1) * decay) @ self._modes(basis, s2).T
        kernel *= 2.0 / radius ** 2 * np.outer(s1 ** (0.5 * nu), s2 ** (0.5 * nu))
        if not np.all(np.isfinite(kernel)):
            check_status("not converged", "Galerkin kernel is not finite",
                         {"nu": nu, "t": t, "radius": radius})
        return kernel

    def mode_kernel(self, indices, t, r1, r2):
        """Heat kernel of a cone mode with respect to r^(m-2i) dr.

        Args:
            indices (ConeIndices): mode indices
            t (float): time > 0
            r1 (float): radius
            r2 (float): radius

        Returns:
            float: (r1 r2)^alpha times the canonical kernel.
        """
        alpha = float(indices.alpha)
        robin = alpha if self._boundary == "absolute" else 0.0
        value = self.canonical_kernel(float(indices.nu), t, [r1], [r2], robin)[0, 0]
        return (r1 * r2) ** alpha * value

    def __repr__(self):
        return "GalerkinSolver(%s, %d bases)" % (self._boundary, len(self._cache))
