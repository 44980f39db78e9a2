"""Grid representations of the deformed position, momentum and Hamiltonian.

Momentum is ``P = -i hbar (1 - tau x + tau^2 x^2) d/dx``, which is exactly
``-i hbar d/du`` in the arctan coordinate. On a uniform-in-u grid the
derivative is therefore a constant-coefficient stencil; identities between
operators are checked on smooth test functions at interior nodes only.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import io
from .kernels import derivative_matrix, fd_weights
from .metric import (
    WaveFunction,
    deformation_factor,
    gaussian_packet,
    weight,
)
from .errors import GridMismatchError

ONE_SIDED = "one-sided"
DIRICHLET = "dirichlet"

# eigenvector-matrix condition number above which evolve() falls back to expm
_EIG_COND_MAX = 1e6


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense complex matrix acting on samples over ``grid``."""

    grid: object
    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128)
        n = self.grid.n
        if a.shape != (n, n):
            raise ValueError(f"operator must be {n}x{n}, got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    def apply(self, phi):
        if not self.grid.matches(phi.grid):
            raise GridMismatchError("operator and state live on different grids")
        return WaveFunction(phi.grid, self.entries @ phi.samples)

    def _check(self, other):
        if not self.grid.matches(other.grid):
            raise GridMismatchError("operators live on different grids")

    def __matmul__(self, other):
        if isinstance(other, WaveFunction):
            return self.apply(other)
        self._check(other)
        return OperatorMatrix(self.grid, self.entries @ other.entries,
                              f"{self.label}{other.label}")

    def __add__(self, other):
        self._check(other)
        return OperatorMatrix(self.grid, self.entries + other.entries)

    def __sub__(self, other):
        self._check(other)
        return OperatorMatrix(self.grid, self.entries - other.entries)

    def __mul__(self, scalar):
        return OperatorMatrix(self.grid, scalar * self.entries, self.label)

    __rmul__ = __mul__

    def __neg__(self):
        return OperatorMatrix(self.grid, -self.entries, self.label)

    def to_csv(self, stream):
        """Dump nonzero entries as ``row, col, re, im``."""
        rows, cols = np.nonzero(self.entries)
        vals = self.entries[rows, cols]
        io.write_csv(stream, ("row", "col", "re", "im"),
                     zip(rows, cols, vals.real, vals.imag))


def multiplication_op(grid, values, label=""):
    return OperatorMatrix(grid, np.diag(np.asarray(values, dtype=np.complex128)), label)


def identity_op(grid):
    return OperatorMatrix(grid, np.eye(grid.n), "I")


def position_op(grid):
    """Multiplication by ``x``."""
    return multiplication_op(grid, grid.nodes, "X")


def _dirichlet_matrix(coords, order):
    h = np.diff(coords)
    step = h.mean()
    if np.max(np.abs(h - step)) > 1e-10 * step:
        raise ValueError("dirichlet closure needs nodes uniform in the chosen coordinate")
    half = order // 2
    offsets = np.arange(-half, half + 1)
    w = fd_weights(0.0, offsets * step, 1)[:, 1]
    # exact antisymmetry; rounding in the recursion can break it at 1e-16
    w = 0.5 * (w - w[::-1])
    n = coords.size
    D = np.zeros((n, n))
    for k, off in enumerate(offsets):
        if off != 0:
            D += np.diag(np.full(n - abs(off), w[k]), off)
    return D


def momentum_op(grid, order=8, boundary=ONE_SIDED, coordinate="u"):
    """Deformed momentum ``-i hbar (1 - tau x + tau^2 x^2) d/dx`` on ``grid``.

    Parameters
    ----------
    grid : Grid
    order : int
        Even finite-difference order; the stencil spans ``order + 1`` nodes.
    boundary : {"one-sided", "dirichlet"}
        ``one-sided`` shifts the stencil inward near the ends. ``dirichlet``
        treats samples beyond the ends as zero, giving an exactly
        antisymmetric derivative on a uniform-in-u grid; use it for spectra
        and time evolution.
    coordinate : {"u", "x"}
        Differentiate in the arctan coordinate (``-i hbar d/du``) or in ``x``
        followed by multiplication with ``1 - tau x + tau^2 x^2``.
    """
    if order < 2 or order % 2:
        raise ValueError("stencil order must be a positive even integer")
    if grid.n < order + 1:
        raise ValueError(f"grid of {grid.n} nodes is too small for an order-{order} stencil")
    if boundary not in (ONE_SIDED, DIRICHLET):
        raise ValueError(f"unknown boundary closure {boundary!r}")
    if coordinate == "u":
        coords, factor = grid.u, None
    elif coordinate == "x":
        coords, factor = grid.nodes, deformation_factor(grid.context, grid.nodes)
    else:
        raise ValueError(f"coordinate must be 'u' or 'x', got {coordinate!r}")
    if boundary == ONE_SIDED:
        D = derivative_matrix(coords, order)
    else:
        D = _dirichlet_matrix(coords, order)
    if factor is not None:
        D = factor[:, None] * D
    return OperatorMatrix(grid, -1j * grid.context.hbar * D, "P")


def metric_op(grid):
    """Metric ``S+ = (1 - tau X + tau^2 X^2)^(-1)``: diagonal ``w(x_i)``."""
    w = weight(grid.context, grid.nodes)
    assert np.all(w > 0), "metric must be positive"
    return multiplication_op(grid, w, "S+")


def adjoint_plain(op):
    """Adjoint under the undeformed quadrature inner product, ``Q^-1 A^H Q``."""
    q = op.grid.quad_weights
    return OperatorMatrix(op.grid, (op.entries.conj().T * q[None, :]) / q[:, None],
                          op.label + "^+")


def adjoint_pseudo(op):
    """Adjoint under the pseudo-inner product, ``S+^-1 adjoint_plain(A) S+``."""
    g = op.grid.metric_weights
    return OperatorMatrix(op.grid, (op.entries.conj().T * g[None, :]) / g[:, None],
                          op.label + "^#")


def box_potential(depth, half_width):
    """Square well: 0 for ``|x| < half_width``, ``depth`` outside."""

    def potential(x):
        return np.where(np.abs(x) < half_width, 0.0, depth)

    return potential


def hamiltonian(grid, potential=None, order=8, boundary=ONE_SIDED):
    """``H = P P / (2m) + V(x)`` with the kinetic term in ``[f d/dx]^2`` order.

    ``potential`` may be a callable of ``x`` or an array of node values.
    """
    P = momentum_op(grid, order=order, boundary=boundary)
    kinetic = (P @ P).entries / (2.0 * grid.context.mass)
    if potential is None:
        v = np.zeros(grid.n)
    elif callable(potential):
        v = np.asarray(potential(grid.nodes), dtype=np.float64)
    else:
        v = np.asarray(potential, dtype=np.float64)
    if v.shape != (grid.n,) or not np.all(np.isfinite(v)):
        raise ValueError("potential must give a finite value at every node")
    return OperatorMatrix(grid, kinetic + np.diag(v), "H")


class Propagator:
    """``exp(-i t H / hbar)`` for many times from one decomposition.

    Matrices that are Hermitian as arrays go through ``eigh``. Otherwise the
    eigenvector basis is used when its condition number is below 1e6, and
    scaling-and-squaring ``expm`` is used when it is not.
    """

    def __init__(self, H):
        self.H = H
        self.hbar = H.grid.context.hbar
        a = H.entries
        scale = max(np.max(np.abs(a)), 1.0)
        self.method = "expm"
        if np.max(np.abs(a - a.conj().T)) <= 1e-13 * scale:
            vals, vecs = np.linalg.eigh(0.5 * (a + a.conj().T))
            self.vals, self.vecs, self.vecs_inv = vals, vecs, vecs.conj().T
            self.method = "eigh"
        else:
            vals, vecs = np.linalg.eig(a)
            if np.linalg.cond(vecs) < _EIG_COND_MAX:
                self.vals, self.vecs = vals, vecs
                self.vecs_inv = np.linalg.inv(vecs)
                self.method = "eig"

    def matrix(self, t):
        if self.method == "expm":
            U = sla.expm((-1j * t / self.hbar) * self.H.entries)
        else:
            phases = np.exp((-1j * t / self.hbar) * self.vals)
            U = (self.vecs * phases[None, :]) @ self.vecs_inv
        if not np.all(np.isfinite(U)):
            raise RuntimeError(f"matrix exponential failed at t={t!r}")
        return U

    def evolve(self, phi0, t):
        if t == 0:
            return WaveFunction(phi0.grid, phi0.samples)
        if not self.H.grid.matches(phi0.grid):
            raise GridMismatchError("Hamiltonian and state live on different grids")
        return WaveFunction(phi0.grid, self.matrix(t) @ phi0.samples)


def evolve(H, phi0, t):
    """Evolve ``phi0`` to time ``t`` under ``H``."""
    if not np.isfinite(t):
        raise ValueError("evolution time must be finite")
    return Propagator(H).evolve(phi0, t)


def smooth_panel(grid):
    """Deterministic set of Gaussian bumps in ``u`` used as identity test functions."""
    lo, hi = grid.u_bounds
    span = hi - lo
    # (centre, width) as fractions of the u extent; ends stay >= 9.5 widths away
    specs = [(0.5, 0.05, 0.0), (0.44, 0.045, 2.0), (0.57, 0.045, -1.5),
             (0.4, 0.04, 1.0), (0.6, 0.04, 0.0)]
    return [gaussian_packet(grid, lo + c * span, s * span, k / (s * span))
            for c, s, k in specs]


def identity_residual(lhs, rhs, panel, collar=2):
    """Relative interior residual of ``lhs phi = rhs phi`` over a panel.

    For each test function the max-norm of the difference on nodes
    ``collar .. n - collar - 1`` is divided by the larger of the two sides'
    max-norms there. Returns the worst case.
    """
    worst = 0.0
    sl = slice(collar, lhs.grid.n - collar)
    for phi in panel:
        a = lhs.apply(phi).samples[sl]
        b = rhs.apply(phi).samples[sl]
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)), np.finfo(float).tiny)
        worst = max(worst, float(np.max(np.abs(a - b)) / scale))
    return worst


def commutator_defect(grid, reference="deformed", order=8, panel=None, collar=2):
    """Interior relative error of ``[X, P] phi`` against ``i hbar f(x) phi``.

    ``reference="undeformed"`` compares against ``i hbar phi`` instead.
    """
    X = position_op(grid)
    P = momentum_op(grid, order=order)
    hbar = grid.context.hbar
    if reference == "deformed":
        target = multiplication_op(grid, 1j * hbar * deformation_factor(grid.context, grid.nodes))
    elif reference == "undeformed":
        target = 1j * hbar * identity_op(grid)
    else:
        raise ValueError(f"unknown reference {reference!r}")
    if panel is None:
        panel = smooth_panel(grid)
    return identity_residual(X @ P - P @ X, target, panel, collar)
