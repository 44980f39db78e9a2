"""Free particle in a square box with the ``y`` direction deformed.

The ``x`` direction is the textbook box. In ``y`` the Schrodinger equation
``-(hbar^2/2m) [f(y) d/dy]^2 phi = E phi`` becomes ``-(hbar^2/2m) phi'' = E phi``
in ``u``, so Dirichlet conditions at ``y = 0`` and ``y = a`` give
``k_n = n pi / u(a)``. Two independent numerical routes check that:

* ``direct-y``: a staggered second-order discretization in ``y`` of the
  operator as written (first-order stencil, multiply by ``f``, again);
* ``u-chebyshev``: Chebyshev collocation of ``d^2/du^2`` on ``[0, U]`` where
  ``U`` is obtained by adaptive quadrature of the weight.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
import scipy.linalg as sla
from scipy.integrate import quad

from . import io
from .errors import DomainError
from .metric import SQRT3, weight

CLOSED_FORM = "closed-form"
ORACLE = "oracle"
DIRECT_Y = "direct-y"
U_CHEBYSHEV = "u-chebyshev"
CSV_COLUMNS = ("direction", "n", "k", "E", "method")


def _check_tau_a(ctx, a, allow_outside):
    if not (a > 0 and math.isfinite(a)):
        raise ValueError(f"box side must be positive and finite, got {a!r}")
    if ctx.tau * a > 1.0:
        msg = f"box side a={a} exceeds the maximal length 1/tau={ctx.ell_max:.6g}"
        if not allow_outside:
            raise DomainError(msg)
        warnings.warn(msg + "; the energy contraction bound no longer holds", stacklevel=3)


@dataclass(frozen=True)
class BoxSpec:
    """Square box of side ``a``; ``allow_outside`` permits ``tau a > 1`` with a warning."""

    context: object
    a: float
    n_max: int = 3
    allow_outside: bool = False

    def __post_init__(self):
        _check_tau_a(self.context, self.a, self.allow_outside)
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError("n_max must be a positive integer")


@dataclass(frozen=True)
class SpectrumRow:
    direction: str
    n: int
    k: float
    energy: float
    method: str


@dataclass(frozen=True)
class SpectrumTable:
    rows: tuple

    def __post_init__(self):
        rows = tuple(self.rows)
        groups = {}
        for r in rows:
            if not r.energy > 0:
                raise ValueError(f"non-positive energy in row {r}")
            groups.setdefault((r.direction, r.method), []).append(r)
        for key, grp in groups.items():
            grp = sorted(grp, key=lambda r: r.n)
            if any(b.energy <= a.energy for a, b in zip(grp, grp[1:])):
                raise ValueError(f"energies not increasing in n for {key}")
        object.__setattr__(self, "rows", rows)

    def __add__(self, other):
        return SpectrumTable(self.rows + other.rows)

    def __len__(self):
        return len(self.rows)

    def energies(self, direction=None, method=None):
        return np.array([r.energy for r in self.rows
                         if (direction is None or r.direction == direction)
                         and (method is None or r.method == method)])

    def to_csv(self, stream):
        io.write_csv(stream, CSV_COLUMNS,
                     ((r.direction, r.n, r.k, r.energy, r.method) for r in self.rows))

    def to_records(self):
        return [dict(zip(CSV_COLUMNS, (r.direction, r.n, r.k, r.energy, r.method)))
                for r in self.rows]


def _energy(ctx, k):
    return (ctx.hbar * k) ** 2 / (2.0 * ctx.mass)


def x_spectrum(box):
    """Undeformed box: ``k_n = n pi / a``."""
    ctx = box.context
    rows = []
    for n in range(1, box.n_max + 1):
        k = n * math.pi / box.a
        rows.append(SpectrumRow("x", n, k, _energy(ctx, k), CLOSED_FORM))
    return SpectrumTable(rows)


def y_bracket(ctx, a):
    """``arctan((2 tau a - 1)/sqrt3) + pi/6``, so that ``u(a) = 2 bracket / (tau sqrt3)``.

    Evaluated as the single arctan ``arctan(sqrt3 tau a / (2 - tau a))``,
    which avoids cancellation when ``tau a`` is small.
    """
    ta = ctx.tau * a
    return math.atan(SQRT3 * ta / (2.0 - ta))


def y_spectrum_closed_form(box):
    """``k_n = n pi tau sqrt3 / (2 bracket)`` and ``E_n = hbar^2 k_n^2 / 2m``."""
    ctx = box.context
    b = y_bracket(ctx, box.a)
    rows = []
    for n in range(1, box.n_max + 1):
        k = n * math.pi * ctx.tau * SQRT3 / (2.0 * b)
        rows.append(SpectrumRow("y", n, k, _energy(ctx, k), CLOSED_FORM))
    return SpectrumTable(rows)


def contraction_ratio(ctx, a, allow_outside=False):
    """``E_n^y / E_n^x = (3/4) (tau a / bracket)^2``.

    Lies in ``(0.65, 1)`` for ``0 < tau a <= 1`` and tends to one as
    ``tau a -> 0``; ``tau a > 1`` is rejected unless ``allow_outside``.
    """
    _check_tau_a(ctx, a, allow_outside)
    return 0.75 * (ctx.tau * a / y_bracket(ctx, a)) ** 2


def y_eigenfunction(box, n, y):
    """``sqrt(2/u(a)) sin(k_n u(y))``, normalized in the weighted inner product."""
    ctx = box.context
    y = np.asarray(y, dtype=np.float64)
    if np.any((y < 0) | (y > box.a)):
        raise DomainError("y must lie inside the box")
    b = y_bracket(ctx, box.a)
    ua = 2.0 * b / (ctx.tau * SQRT3)
    ty = ctx.tau * y
    uy = (2.0 / (ctx.tau * SQRT3)) * np.arctan(SQRT3 * ty / (2.0 - ty))
    return math.sqrt(2.0 / ua) * np.sin(n * math.pi * uy / ua)


def _direct_y_matrix(ctx, a, n_nodes):
    # interior nodes y_i = i h, midpoints y_{i+1/2}; zero Dirichlet values at 0 and a
    h = a / (n_nodes + 1)
    y = h * np.arange(1, n_nodes + 1)
    ymid = h * (np.arange(n_nodes + 1) + 0.5)
    f_node = 1.0 - ctx.tau * y + (ctx.tau * y) ** 2
    f_mid = 1.0 - ctx.tau * ymid + (ctx.tau * ymid) ** 2
    d_fwd = (np.eye(n_nodes + 1, n_nodes) - np.eye(n_nodes + 1, n_nodes, -1)) / h
    d_back = (np.eye(n_nodes, n_nodes + 1, 1) - np.eye(n_nodes, n_nodes + 1)) / h
    fd = f_node[:, None] * (d_back @ (f_mid[:, None] * d_fwd))
    return (-ctx.hbar ** 2 / (2.0 * ctx.mass)) * fd


def _chebyshev_d2(n, length):
    # Trefethen's collocation matrix on [0, length], Dirichlet rows removed
    t = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.r_[2.0, np.ones(n - 1), 2.0] * (-1.0) ** np.arange(n + 1)
    dt = t[:, None] - t[None, :]
    D = np.outer(c, 1.0 / c) / (dt + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return (D @ D)[1:-1, 1:-1] * (2.0 / length) ** 2


def u_image_length(ctx, a):
    """``u(a) = integral_0^a w(y) dy`` by adaptive quadrature."""
    val, _ = quad(lambda y: weight(ctx, y), 0.0, a, epsabs=1e-15, epsrel=1e-13, limit=200)
    return val


def y_spectrum_oracle(box, n_nodes=2000, method=DIRECT_Y, cheb_order=None):
    """Lowest ``n_max`` eigenvalues of a grid discretization of the ``y`` Hamiltonian.

    Parameters
    ----------
    box : BoxSpec
    n_nodes : int
        Interior nodes of the ``direct-y`` grid (at least 200).
    method : {"direct-y", "u-chebyshev"}
    cheb_order : int, optional
        Polynomial degree for ``u-chebyshev``, default ``max(48, 4 n_max)``.
        Low modes reach rounding level near 48 and slowly lose digits to
        the ``O(N^4)`` growth of the collocation matrix beyond that.

    The direct-y matrix is not symmetric; its eigenvalues are computed
    with a general solver and required to be real to 1e-8 relative.
    """
    ctx = box.context
    if method == DIRECT_Y:
        if n_nodes < 200:
            raise ValueError("direct-y oracle needs at least 200 nodes")
        H = _direct_y_matrix(ctx, box.a, n_nodes)
    elif method == U_CHEBYSHEV:
        if cheb_order is None:
            cheb_order = max(48, 4 * box.n_max)
        if cheb_order <= box.n_max + 8:
            raise ValueError("cheb_order too small for the requested modes")
        H = (-ctx.hbar ** 2 / (2.0 * ctx.mass)) * _chebyshev_d2(cheb_order, u_image_length(ctx, box.a))
    else:
        raise ValueError(f"unknown oracle method {method!r}")
    vals = sla.eigvals(H)
    order = np.argsort(vals.real)
    vals = vals[order][: box.n_max]
    if np.max(np.abs(vals.imag) / np.abs(vals.real)) > 1e-8:
        raise RuntimeError(f"{method} oracle produced complex eigenvalues {vals}")
    rows = []
    for n, e in enumerate(vals.real, start=1):
        k = math.sqrt(2.0 * ctx.mass * e) / ctx.hbar
        rows.append(SpectrumRow("y", n, k, float(e), ORACLE))
    return SpectrumTable(rows)


@dataclass(frozen=True)
class LevelRow:
    n_x: int
    n_y: int
    energy: float
    level: int
    degeneracy: int


def full_2d_table(box, rel_tol=1e-12):
    """All ``E_{n,m} = E_n^x + E_m^y`` sorted, grouped into levels.

    Energies within ``rel_tol`` of the first member of a level share it.
    """
    ex = x_spectrum(box).energies()
    ey = y_spectrum_closed_form(box).energies()
    pairs = sorted(((ex[i] + ey[j], i + 1, j + 1) for i in range(box.n_max)
                    for j in range(box.n_max)))
    levels = []
    for e, n, m in pairs:
        if levels and abs(e - levels[-1][0][0]) <= rel_tol * levels[-1][0][0]:
            levels[-1].append((e, n, m))
        else:
            levels.append([(e, n, m)])
    rows = []
    for lvl, members in enumerate(levels, start=1):
        for e, n, m in members:
            rows.append(LevelRow(n, m, float(e), lvl, len(members)))
    return rows


def write_2d_csv(rows, stream):
    io.write_csv(stream, ("n_x", "n_y", "E", "level", "degeneracy"),
                 ((r.n_x, r.n_y, r.energy, r.level, r.degeneracy) for r in rows))
