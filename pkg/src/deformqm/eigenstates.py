"""Momentum eigenfunctions of the deformed derivative and their overlaps.

``-i hbar D_x phi = xi phi`` with ``D_x = (1 - tau x + tau^2 x^2) d/dx`` is
solved by a pure phase in the arctan coordinate,
``phi_xi(x) = A exp(i xi u(x) / hbar)``. Their pseudo-overlap is a
finite-interval Fourier integral over the asymmetric ``u`` interval
``[-pi/(3 sqrt3 tau), 2 pi/(3 sqrt3 tau)]``.

Three routes to the overlap are kept side by side:

* :func:`overlap_quadrature`: brute-force Gauss-Legendre quadrature in ``x``
  of the weighted integrand (the oracle);
* :func:`overlap_closed_form`: the antiderivative in ``u``, a phase-shifted
  sinc with zeros at multiples of ``2 sqrt3 tau hbar``;
* :func:`overlap_paper_formula`: the real sinc with zeros at multiples of
  ``sqrt3 tau hbar``, kept verbatim for comparison. It agrees with the other
  two only in the coincidence and far-separated limits.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import roots_legendre

from .metric import SQRT3, WaveFunction, u_map, weight

PAPER_STATED = "paper-stated"


@dataclass(frozen=True)
class EigenstateSpec:
    context: object
    xi: float

    def __post_init__(self):
        if not math.isfinite(self.xi):
            raise ValueError("eigenvalue xi must be finite")


def normalization_constant(ctx):
    """``A = sqrt(tau sqrt3 / pi)``, one over the root of the weighted domain measure."""
    return math.sqrt(ctx.tau * SQRT3 / math.pi)


def phi_xi(spec, x):
    """Closed-form eigenfunction ``A exp(i xi u(x) / hbar)``."""
    ctx = spec.context
    phase = spec.xi * np.asarray(u_map(ctx, x)) / ctx.hbar
    val = normalization_constant(ctx) * np.exp(1j * phase)
    return complex(val) if np.ndim(x) == 0 else val


def phi_xi_wave(spec, grid):
    return WaveFunction(grid, phi_xi(spec, grid.nodes))


def _legendre_count(ctx, delta):
    # enough nodes to resolve the oscillation over the whole domain
    cycles = abs(delta) * ctx.u_span / (2.0 * math.pi * ctx.hbar)
    return int(128 + 8 * math.ceil(cycles))


def overlap_quadrature(ctx, xi_bra, xi_ket, n_nodes=None):
    """``<phi_xi_bra | phi_xi_ket>`` by Gauss-Legendre quadrature in ``x``.

    Integrates ``A^2 w(x) exp(i (xi_ket - xi_bra) u(x) / hbar)`` over
    ``(-1/tau, 1/tau)`` with no use of the ``u`` substitution beyond
    evaluating the phase.
    """
    delta = xi_ket - xi_bra
    n = n_nodes or _legendre_count(ctx, delta)
    t, wt = roots_legendre(n)
    x = ctx.ell_max * t
    integrand = weight(ctx, x) * np.exp(1j * delta * u_map(ctx, x) / ctx.hbar)
    a2 = normalization_constant(ctx) ** 2
    return complex(a2 * ctx.ell_max * np.sum(wt * integrand))


def overlap_closed_form(ctx, xi_bra, xi_ket):
    """Antiderivative of the overlap integrand in the ``u`` coordinate."""
    delta = xi_ket - xi_bra
    if delta == 0:
        return 1.0 + 0.0j
    s = ctx.tau * ctx.hbar * SQRT3
    # (2s / (pi d)) sin(pi d / 2s), written as a normalized sinc to stay finite for tiny d
    amp = np.sinc(delta / (2.0 * s))
    return complex(amp * np.exp(1j * math.pi * delta / (6.0 * s)))


def overlap_paper_formula(ctx, xi_bra, xi_ket):
    """Printed overlap ``(s / (pi d)) sin(pi d / s)`` with ``s = tau hbar sqrt3``.

    Returned as-is for comparison; see the module docstring.
    """
    delta = xi_ket - xi_bra
    if delta == 0:
        return 1.0
    s = ctx.tau * ctx.hbar * SQRT3
    return float(np.sinc(delta / s))


def overlap_report(ctx, deltas):
    """Rows comparing the quadrature oracle with the printed formula.

    Each row is ``(delta, re(oracle), im(oracle), paper_formula, abs_difference)``.
    """
    rows = []
    for d in deltas:
        oracle = overlap_quadrature(ctx, 0.0, float(d))
        paper = overlap_paper_formula(ctx, 0.0, float(d))
        rows.append((float(d), oracle.real, oracle.imag, paper, abs(oracle - paper)))
    return rows
