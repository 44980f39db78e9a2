"""Deformed Fourier transform pair and momentum-space operator actions.

Forward::

    F[psi](xi) = A * integral dx w(x) psi(x) exp(-i xi u(x) / hbar)

Inverse::

    psi(x) = 1 / (hbar sqrt(4 pi tau sqrt3)) * integral dxi F(xi) exp(+i xi u(x) / hbar)

With ``du = w dx`` the forward transform is an ordinary Fourier integral
over the finite ``u`` interval, evaluated here by direct summation at each
momentum node (no FFT). The position operator in momentum space is applied
by conjugation: inverse transform, multiply by ``x(u)``, transform back.
Nothing is expanded as a series in ``d/dxi``.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from .eigenstates import normalization_constant
from .errors import TruncationWarning
from .kernels import derivative_matrix, direct_fourier_sum
from .metric import SQRT3, WaveFunction, pseudo_inner
from .operators import momentum_op

# fraction of the momentum range, at each end, treated as the tail
_TAIL_BAND = 0.05
TAIL_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class MomentumFunction:
    """Samples of a deformed transform on increasing momentum nodes."""

    context: object
    xi_nodes: np.ndarray
    samples: np.ndarray

    def __post_init__(self):
        xi = np.array(self.xi_nodes, dtype=np.float64)
        s = np.array(self.samples, dtype=np.complex128)
        if xi.ndim != 1 or s.shape != xi.shape:
            raise ValueError("xi_nodes and samples must be 1-D and of equal length")
        if np.any(np.diff(xi) <= 0):
            raise ValueError("xi_nodes must be strictly increasing")
        if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(s))):
            raise ValueError("momentum samples must be finite")
        xi.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "xi_nodes", xi)
        object.__setattr__(self, "samples", s)

    def with_samples(self, samples):
        return MomentumFunction(self.context, self.xi_nodes, samples)

    def __add__(self, other):
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other):
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, scalar):
        return self.with_samples(scalar * self.samples)

    __rmul__ = __mul__


def default_xi_nodes(grid, xi_max=None, oversample=8):
    """Uniform momentum nodes symmetric about zero.

    The spacing is at most ``pi hbar / (u_extent * oversample)``, i.e.
    ``oversample`` times finer than the conjugate resolution of the grid's
    ``u`` interval. ``xi_max`` defaults to ``40 tau hbar sqrt3``.
    """
    ctx = grid.context
    if xi_max is None:
        xi_max = 40.0 * ctx.tau * ctx.hbar * SQRT3
    step = math.pi * ctx.hbar / (grid.u_extent * oversample)
    k = int(math.ceil(xi_max / step))
    return np.linspace(-xi_max, xi_max, 2 * k + 1)


def auto_xi_nodes(psi, oversample=8, max_doublings=8):
    """Default nodes, widened by doubling until the tail mass is below 1e-8."""
    grid = psi.grid
    xi_max = 40.0 * grid.context.tau * grid.context.hbar * SQRT3
    for _ in range(max_doublings):
        xi = default_xi_nodes(grid, xi_max, oversample)
        if tail_fraction(_transform(psi, xi)) <= TAIL_TOLERANCE:
            break
        xi_max *= 2.0
    return xi


def trapezoid_weights(nodes):
    nodes = np.asarray(nodes, dtype=np.float64)
    h = np.diff(nodes)
    w = np.zeros_like(nodes)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def tail_fraction(psi_t):
    """Share of ``integral |F|^2`` carried by the outer 5 % of the momentum range."""
    xi = psi_t.xi_nodes
    dens = trapezoid_weights(xi) * np.abs(psi_t.samples) ** 2
    total = dens.sum()
    if total == 0:
        return 0.0
    lo, hi = xi[0], xi[-1]
    band = _TAIL_BAND * (hi - lo)
    outer = (xi <= lo + band) | (xi >= hi - band)
    return float(dens[outer].sum() / total)


def _warn_tail(psi_t, where):
    frac = tail_fraction(psi_t)
    if frac > TAIL_TOLERANCE:
        warnings.warn(f"{where}: {frac:.2e} of the momentum mass lies at the range edge; "
                      "results are truncation-limited", TruncationWarning, stacklevel=3)
    return frac


def _transform(psi, xi):
    grid = psi.grid
    ctx = grid.context
    a = normalization_constant(ctx)
    vals = direct_fourier_sum(grid.u, grid.metric_weights * psi.samples, xi / ctx.hbar, -1)
    return MomentumFunction(ctx, xi, a * vals)


def forward_ft(psi, xi_nodes=None):
    """Deformed transform of ``psi`` at ``xi_nodes``.

    Without explicit nodes the range starts at ``+-40 tau hbar sqrt3`` and
    is doubled until the packet's tail mass is below 1e-8
    (see :func:`auto_xi_nodes`).
    """
    if xi_nodes is None:
        xi_nodes = auto_xi_nodes(psi)
    return _transform(psi, np.asarray(xi_nodes, dtype=np.float64))


def inverse_ft(psi_t, grid, check_tail=True):
    """Inverse deformed transform evaluated at the nodes of ``grid``.

    The momentum integral uses the trapezoid rule on ``psi_t.xi_nodes``.
    A :class:`TruncationWarning` is issued when the sampled range cuts off
    more than 1e-8 of the momentum mass.
    """
    ctx = psi_t.context
    if ctx != grid.context:
        raise ValueError("momentum function and grid use different deformation contexts")
    if check_tail:
        _warn_tail(psi_t, "inverse_ft")
    pref = 1.0 / (ctx.hbar * math.sqrt(4.0 * math.pi * ctx.tau * SQRT3))
    c = trapezoid_weights(psi_t.xi_nodes)
    vals = direct_fourier_sum(psi_t.xi_nodes / ctx.hbar, c * psi_t.samples, grid.u, +1)
    return WaveFunction(grid, pref * vals)


def parseval_defect(psi, xi_nodes=None):
    """Relative mismatch of ``1/(2 hbar tau sqrt3) int |F|^2 dxi`` and ``||psi||^2``."""
    ctx = psi.grid.context
    psi_t = forward_ft(psi, xi_nodes)
    _warn_tail(psi_t, "parseval_defect")
    lhs = np.sum(trapezoid_weights(psi_t.xi_nodes) * np.abs(psi_t.samples) ** 2)
    lhs /= 2.0 * ctx.hbar * ctx.tau * SQRT3
    rhs = pseudo_inner(psi, psi).real
    return float(abs(lhs - rhs) / rhs)


def round_trip_error(psi, xi_nodes=None):
    """Max-norm relative error of ``inverse_ft(forward_ft(psi))``."""
    back = inverse_ft(forward_ft(psi, xi_nodes), psi.grid)
    return float(np.max(np.abs(back.samples - psi.samples)) / np.max(np.abs(psi.samples)))


@dataclass(frozen=True)
class DerivativeReport:
    """Residuals of the two derivative identities (relative, max-norm, interior)."""

    xi_residual: float
    x_residual: float

    def passed(self, tol=1e-6):
        return self.xi_residual < tol and self.x_residual < tol


def _rel(a, b):
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), np.finfo(float).tiny)
    return float(np.max(np.abs(a - b)) / scale)


def derivative_identities_check(psi, xi_nodes=None, order=8, collar=2):
    """Check ``d/dxi F[psi] = F[-i u psi / hbar]`` and ``-i hbar D_x F^-1[G] = F^-1[xi G]``.

    The first side of each identity is a finite difference (in ``xi`` on the
    momentum nodes, in ``u`` on the grid); the second is a transform of a
    multiplied input.
    """
    grid = psi.grid
    ctx = grid.context
    psi_t = forward_ft(psi, xi_nodes)
    xi = psi_t.xi_nodes

    dF = derivative_matrix(xi, order) @ psi_t.samples
    moved = WaveFunction(grid, (-1j / ctx.hbar) * grid.u * psi.samples)
    rhs_xi = forward_ft(moved, xi).samples
    half = order // 2
    xi_res = _rel(dF[half:-half], rhs_xi[half:-half])

    rebuilt = inverse_ft(psi_t, grid)
    lhs_x = momentum_op(grid, order=order).apply(rebuilt).samples
    rhs_x = inverse_ft(momentum_in_momentum_rep(psi_t), grid).samples
    sl = slice(collar, grid.n - collar)
    x_res = _rel(lhs_x[sl], rhs_x[sl])
    return DerivativeReport(xi_res, x_res)


def position_symbol(ctx, u):
    """Multiplier of the position operator in the ``u`` picture.

    ``(2/tau) tan(t) / (sqrt3 + tan(t))`` with ``t = sqrt3 tau u / 2``: the
    tan-of-derivative expression with ``i (tau hbar sqrt3 / 2) d/dxi``
    replaced by its eigenvalue ``tau sqrt3 u / 2`` on the transform kernel.
    """
    t = np.tan(0.5 * SQRT3 * ctx.tau * np.asarray(u, dtype=np.float64))
    return (2.0 / ctx.tau) * t / (SQRT3 + t)


def position_in_momentum_rep(psi_t, grid):
    """Apply ``X`` to a momentum function by conjugation through the transform pair."""
    ctx = psi_t.context
    inner = inverse_ft(psi_t, grid)
    moved = WaveFunction(grid, position_symbol(ctx, grid.u) * inner.samples)
    return forward_ft(moved, psi_t.xi_nodes)


def momentum_in_momentum_rep(psi_t):
    """``P`` is diagonal in momentum space: multiplication by ``xi``."""
    return psi_t.with_samples(psi_t.xi_nodes * psi_t.samples)


def unitary_scale(ctx):
    """Factor ``A sqrt(2 pi hbar)`` relating ``F`` to a unitary-normalized transform."""
    return normalization_constant(ctx) * math.sqrt(2.0 * math.pi * ctx.hbar)


def ordinary_ft(psi, xi_nodes):
    """Undeformed unitary transform ``(2 pi hbar)^-1/2 int psi(x) exp(-i xi x / hbar) dx``."""
    grid = psi.grid
    hbar = grid.context.hbar
    xi = np.asarray(xi_nodes, dtype=np.float64)
    vals = direct_fourier_sum(grid.nodes, grid.quad_weights * psi.samples, xi / hbar, -1)
    return MomentumFunction(grid.context, xi, vals / math.sqrt(2.0 * math.pi * hbar))


def ordinary_inverse_ft(psi_t, grid):
    hbar = grid.context.hbar
    c = trapezoid_weights(psi_t.xi_nodes)
    vals = direct_fourier_sum(psi_t.xi_nodes / hbar, c * psi_t.samples, grid.nodes, +1)
    return WaveFunction(grid, vals / math.sqrt(2.0 * math.pi * hbar))
