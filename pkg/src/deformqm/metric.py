"""Deformation context, metric weight, arctan coordinate and quadrature grids.

The deformed position space is the open interval ``(-1/tau, 1/tau)`` with
metric weight ``w(x) = 1 / (1 - tau x + tau^2 x^2)``. The substitution
``du = w(x) dx`` maps it onto an interval of length ``pi / (tau sqrt 3)``
on which the weight disappears; the canonical grid is uniform in ``u``.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq

from . import io
from .errors import DomainError, GridMismatchError, NormalizationError

SQRT3 = math.sqrt(3.0)

# rounding slack when checking closed-domain membership
_EDGE_RTOL = 1e-13

UNIFORM_IN_U = "uniform-in-u"
GAUSS_IN_X = "gauss-in-x"
SCHEMES = (UNIFORM_IN_U, GAUSS_IN_X)


@dataclass(frozen=True)
class DeformationContext:
    """Physical constants shared by every object in the package.

    Parameters
    ----------
    tau : float
        Deformation parameter, strictly between 0 and 1.
    hbar, mass : float
        Positive unit scales; default 1.
    """

    tau: float
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("tau", "hbar", "mass"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau!r}")
        if self.hbar <= 0.0 or self.mass <= 0.0:
            raise ValueError("hbar and mass must be positive")

    @property
    def ell_max(self):
        """Maximal length ``1/tau``; half-width of the position domain."""
        return 1.0 / self.tau

    @property
    def delta_p_min(self):
        return self.hbar * self.tau

    @property
    def u_min(self):
        return -math.pi / (3.0 * SQRT3 * self.tau)

    @property
    def u_max(self):
        return 2.0 * math.pi / (3.0 * SQRT3 * self.tau)

    @property
    def u_span(self):
        """Weighted measure of the whole domain, ``pi / (tau sqrt 3)``."""
        return math.pi / (SQRT3 * self.tau)

    @property
    def weight_bounds(self):
        return (1.0 / 3.0, 4.0 / 3.0)


def _check_positions(ctx, x):
    x = np.asarray(x, dtype=np.float64)
    lim = ctx.ell_max * (1.0 + _EDGE_RTOL)
    if not np.all(np.isfinite(x)) or np.any(np.abs(x) > lim):
        raise DomainError(f"positions must satisfy |x| <= 1/tau = {ctx.ell_max:g}")
    return x


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def deformation_factor(ctx, x):
    """``1 - tau x + tau^2 x^2``, the reciprocal of :func:`weight`."""
    x = _check_positions(ctx, x)
    t = ctx.tau
    return _scalar_or_array(1.0 - t * x + t * t * x * x, x)


def weight(ctx, x):
    """Metric weight ``1 / (1 - tau x + tau^2 x^2)``, in ``[1/3, 4/3]`` on the domain."""
    x = _check_positions(ctx, x)
    t = ctx.tau
    return _scalar_or_array(1.0 / (1.0 - t * x + t * t * x * x), x)


def u_map(ctx, x):
    """Arctan coordinate ``u(x)`` with ``du/dx = w(x)`` and ``u(0) = 0``."""
    x = _check_positions(ctx, x)
    t = ctx.tau
    # arctan((2tx - 1)/sqrt3) + pi/6 folded into one arctan: exact at x = 0
    # and free of cancellation as tau x -> 0
    u = (2.0 / (t * SQRT3)) * np.arctan(SQRT3 * t * x / (2.0 - t * x))
    return _scalar_or_array(u, x)


def u_inverse(ctx, u):
    """Inverse of :func:`u_map`: ``x = (1 + sqrt3 tan(sqrt3 tau u / 2 - pi/6)) / (2 tau)``.

    Evaluated in the equivalent form ``2 T / (tau (sqrt3 + T))`` with
    ``T = tan(sqrt3 tau u / 2)``, which is exact at ``u = 0``.
    """
    u = np.asarray(u, dtype=np.float64)
    slack = _EDGE_RTOL * ctx.u_span
    if (not np.all(np.isfinite(u)) or np.any(u < ctx.u_min - slack)
            or np.any(u > ctx.u_max + slack)):
        raise DomainError(f"u must lie in [{ctx.u_min:g}, {ctx.u_max:g}]")
    t = ctx.tau
    T = np.tan(0.5 * SQRT3 * t * u)
    x = 2.0 * T / (t * (SQRT3 + T))
    return _scalar_or_array(x, u)


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature nodes inside the deformed domain.

    ``quad_weights`` integrate in ``x`` (plain measure ``dx``); the metric
    measure used by the pseudo-inner product is ``quad_weights * w(nodes)``.
    A grid built with a ``window`` covers only part of the domain; functions
    sampled on it are taken to vanish outside the window.
    """

    context: DeformationContext
    nodes: np.ndarray
    quad_weights: np.ndarray
    scheme: str = UNIFORM_IN_U
    window: tuple | None = None
    u: np.ndarray = field(init=False, repr=False)
    metric_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=np.float64)
        q = np.array(self.quad_weights, dtype=np.float64)
        if nodes.ndim != 1 or nodes.shape != q.shape:
            raise ValueError("nodes and quad_weights must be 1-D arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if np.any(np.abs(nodes) >= self.context.ell_max):
            raise DomainError("grid nodes must lie strictly inside (-1/tau, 1/tau)")
        if np.any(q <= 0) or not np.all(np.isfinite(q)):
            raise ValueError("quadrature weights must be positive and finite")
        u = u_map(self.context, nodes)
        mw = q * weight(self.context, nodes)
        for arr in (nodes, q, u, mw):
            arr.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "quad_weights", q)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "metric_weights", mw)

    @property
    def n(self):
        return self.nodes.size

    @property
    def u_bounds(self):
        """End points of the ``u`` interval this grid integrates over."""
        if self.window is None:
            return (self.context.u_min, self.context.u_max)
        return (u_map(self.context, self.window[0]), u_map(self.context, self.window[1]))

    @property
    def u_extent(self):
        lo, hi = self.u_bounds
        return hi - lo

    def measure(self):
        """Weighted measure of the grid's region, ``sum_i q_i w(x_i)``."""
        return float(np.sum(self.metric_weights))

    def matches(self, other):
        return self is other or (
            self.context == other.context
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.quad_weights, other.quad_weights)
        )


def make_grid(ctx, n, scheme=UNIFORM_IN_U, window=None):
    """Build a quadrature grid.

    Parameters
    ----------
    ctx : DeformationContext
    n : int
        Node count, at least 8.
    scheme : {"uniform-in-u", "gauss-in-x"}
        ``uniform-in-u`` is the midpoint rule in the arctan coordinate, so the
        pseudo-inner product becomes an unweighted sum. ``gauss-in-x`` uses
        Gauss-Legendre nodes in ``x``.
    window : (float, float), optional
        Sub-interval ``(x_lo, x_hi)`` of the closed domain to cover instead of
        the full domain. Needed to resolve packets much narrower than ``1/tau``.

    Returns
    -------
    Grid
    """
    if int(n) != n or n < 8:
        raise ValueError(f"node count must be an integer >= 8, got {n!r}")
    n = int(n)
    if scheme not in SCHEMES:
        raise ValueError(f"unknown grid scheme {scheme!r}; expected one of {SCHEMES}")
    if window is not None:
        lo, hi = (float(v) for v in window)
        _check_positions(ctx, [lo, hi])
        if not lo < hi:
            raise ValueError("window must satisfy x_lo < x_hi")
        window = (lo, hi)
        x_lo, x_hi = lo, hi
    else:
        x_lo, x_hi = -ctx.ell_max, ctx.ell_max

    if scheme == UNIFORM_IN_U:
        u_lo, u_hi = u_map(ctx, x_lo), u_map(ctx, x_hi)
        h = (u_hi - u_lo) / n
        u = u_lo + (np.arange(n) + 0.5) * h
        x = u_inverse(ctx, u)
        q = h / weight(ctx, x)
    else:
        t, wt = np.polynomial.legendre.leggauss(n)
        half = 0.5 * (x_hi - x_lo)
        x = x_lo + half * (t + 1.0)
        q = half * wt
    return Grid(ctx, x, q, scheme, window)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex samples of a state on a grid."""

    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.complex128)
        if s.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("wavefunction samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, grid, func):
        """Sample ``func(x)`` at the grid nodes."""
        return cls(grid, func(grid.nodes))

    def __add__(self, other):
        _same_grid(self, other)
        return WaveFunction(self.grid, self.samples + other.samples)

    def __sub__(self, other):
        _same_grid(self, other)
        return WaveFunction(self.grid, self.samples - other.samples)

    def __mul__(self, scalar):
        return WaveFunction(self.grid, scalar * self.samples)

    __rmul__ = __mul__

    def pseudo_norm(self):
        return pseudo_norm(self)

    def normalized(self):
        return WaveFunction(self.grid, self.samples / pseudo_norm(self))


def _same_grid(a, b):
    if not a.grid.matches(b.grid):
        raise GridMismatchError("wavefunctions live on different grids")


def pseudo_inner(psi, phi):
    """Pseudo-inner product: integral of ``conj(psi) * phi * w(x)`` over ``x``."""
    _same_grid(psi, phi)
    return complex(np.sum(psi.grid.metric_weights * np.conj(psi.samples) * phi.samples))


def plain_inner(psi, phi):
    """Undeformed inner product: integral of ``conj(psi) * phi`` over ``x``."""
    _same_grid(psi, phi)
    return complex(np.sum(psi.grid.quad_weights * np.conj(psi.samples) * phi.samples))


def pseudo_norm(phi):
    return math.sqrt(max(pseudo_inner(phi, phi).real, 0.0))


def _require_normalized(phi, atol=1e-8):
    nrm2 = pseudo_inner(phi, phi).real
    if abs(nrm2 - 1.0) > atol:
        raise NormalizationError(f"state has pseudo-norm^2 {nrm2:.3e}, expected 1")


def expectation(op, phi):
    """``<phi| op phi>`` under the pseudo-inner product; ``phi`` must be normalized."""
    if not op.grid.matches(phi.grid):
        raise GridMismatchError("operator and state live on different grids")
    _require_normalized(phi)
    return pseudo_inner(phi, op.apply(phi))


def uncertainty(op, phi):
    """Spread ``sqrt(<op^2> - <op>^2)`` of a pseudo-Hermitian operator in ``phi``."""
    mean = expectation(op, phi)
    second = pseudo_inner(phi, op.apply(op.apply(phi)))
    var = second.real - mean.real ** 2
    return math.sqrt(max(var, 0.0))


def gaussian_packet(grid, center, width, kick=0.0):
    """Normalized Gaussian bump in the ``u`` coordinate.

    ``center`` and ``width`` are in ``u`` units; ``kick`` multiplies by
    ``exp(i kick (u - center))``.
    """
    du = grid.u - center
    samples = np.exp(-0.5 * (du / width) ** 2 + 1j * kick * du)
    return WaveFunction(grid, samples).normalized()


def random_packet(grid, rng, centered=False, width_range=(0.03, 0.05), max_kick=3.0):
    """Random smooth normalized state: a kicked Gaussian bump in ``u``.

    Widths are drawn as fractions of the grid's ``u`` extent and the centre is
    kept nine widths clear of the ends. With ``centered=True`` the centre is
    tuned so that ``<X> = 0`` to rounding, and the width is capped so that
    this centre keeps the same clearance.
    """
    lo, hi = grid.u_bounds
    span = hi - lo
    width = rng.uniform(*width_range) * span
    cycles = rng.uniform(-max_kick, max_kick)
    if not centered:
        a, b = lo + 9.0 * width, hi - 9.0 * width
        return gaussian_packet(grid, rng.uniform(a, b), width, cycles / width)

    if not lo < 0.0 < hi:
        raise DomainError("a centred packet needs x = 0 inside the grid")
    # the <X> = 0 centre sits near u = 0, a third of the way along the full domain
    width = min(width, 0.95 * min(-lo, hi) / 9.0)
    a, b = lo + 9.0 * width, hi - 9.0 * width
    x = grid.nodes

    def mean_x(c):
        dens = grid.metric_weights * np.exp(-(((grid.u - c) / width) ** 2))
        return float(np.sum(dens * x) / np.sum(dens))

    center = brentq(mean_x, a, b, xtol=1e-14 * span, rtol=1e-15)
    return gaussian_packet(grid, center, width, cycles / width)


CSV_COLUMNS = ("x", "u", "w", "re", "im")


def wavefunction_to_csv(phi, stream):
    """Write ``phi`` as CSV with columns ``x, u, w, re, im``."""
    g = phi.grid
    rows = zip(g.nodes, g.u, weight(g.context, g.nodes), phi.samples.real, phi.samples.imag)
    io.write_csv(stream, CSV_COLUMNS, rows)


def wavefunction_from_csv(stream, ctx):
    """Read a wavefunction CSV and rebuild the grid it was sampled on.

    Only grids produced by :func:`make_grid` can be recovered: uniform-in-u
    (full or windowed) and full-domain gauss-in-x.
    """
    header, data = io.read_csv(stream)
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"expected columns {CSV_COLUMNS}, got {tuple(header)}")
    data = np.asarray(data, dtype=np.float64)
    x, u, w = data[:, 0], data[:, 1], data[:, 2]
    n = x.size
    if not np.allclose(w, weight(ctx, x), rtol=1e-12, atol=0):
        raise ValueError("weight column is inconsistent with the given tau")
    grid = _recover_grid(ctx, x, u, n)
    return WaveFunction(grid, data[:, 3] + 1j * data[:, 4])


def _recover_grid(ctx, x, u, n):
    candidates = []
    du = np.diff(u)
    h = du.mean() if n > 1 else 0.0
    if n > 1 and np.max(np.abs(du - h)) <= 1e-9 * abs(h):
        u_lo, u_hi = u[0] - 0.5 * h, u[-1] + 0.5 * h
        full = (abs(u_lo - ctx.u_min) <= 1e-9 * ctx.u_span
                and abs(u_hi - ctx.u_max) <= 1e-9 * ctx.u_span)
        if full:
            candidates.append((UNIFORM_IN_U, None))
        else:
            window = (u_inverse(ctx, u_lo), u_inverse(ctx, u_hi))
            # windows given with few digits come back exactly after snapping
            snapped = tuple(float(f"{v:.12g}") for v in window)
            candidates += [(UNIFORM_IN_U, snapped), (UNIFORM_IN_U, window)]
    candidates.append((GAUSS_IN_X, None))
    best, best_err = None, math.inf
    for scheme, window in candidates:
        try:
            grid = make_grid(ctx, n, scheme, window)
        except (ValueError, DomainError):
            continue
        err = np.max(np.abs(grid.nodes - x))
        if err < best_err:
            best, best_err = grid, err
    if best is None or best_err > 1e-10 * ctx.ell_max:
        raise ValueError("could not match the CSV nodes to a known grid scheme")
    return best
