"""Pseudo-Hermiticity for finite matrices.

A matrix ``H`` is pseudo-Hermitian when some invertible Hermitian ``S``
satisfies ``S H = H^H S``. When ``H`` is diagonalizable with real spectrum
the positive-definite solutions form a cone spanned by the dyads
``(V^-H e_k)(V^-H e_k)^H``; :func:`solve_metric` returns the canonical
member ``(V V^H)^-1`` with unit-length eigenvector columns, scaled to unit
spectral norm.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import NotQuasiHermitianError

IMAG_TOL = 1e-10
COND_MAX = 1e8
_DEGENERATE_TOL = 1e-8


def _square(entries, what):
    a = np.array(entries, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"{what} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{what} has non-finite entries")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteHamiltonian:
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _square(self.entries, "Hamiltonian"))

    @property
    def dim(self):
        return self.entries.shape[0]

    def eigenvalues(self):
        return np.linalg.eigvals(self.entries)

    def is_hermitian(self, tol=1e-14):
        a = self.entries
        return np.max(np.abs(a - a.conj().T)) <= tol * max(np.max(np.abs(a)), 1.0)


@dataclass(frozen=True, eq=False)
class MetricMatrix:
    """Hermitian metric; ``positive`` asks for a positive-definiteness check."""

    entries: np.ndarray
    positive: bool = field(default=True)

    def __post_init__(self):
        a = _square(self.entries, "metric")
        scale = max(np.max(np.abs(a)), 1.0)
        if np.max(np.abs(a - a.conj().T)) > 1e-12 * scale:
            raise ValueError("metric must be Hermitian")
        if self.positive and np.min(np.linalg.eigvalsh(a)) <= 0:
            raise ValueError("metric flagged positive-definite has a non-positive eigenvalue")
        object.__setattr__(self, "entries", a)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)

    def hermiticity_defect(self):
        a = self.entries
        return float(np.max(np.abs(a - a.conj().T)))


def triangular_example(alpha, beta, gamma):
    """Upper-triangular ``[[alpha, beta], [0, gamma]]``; eigenvalues ``{alpha, gamma}``."""
    for v in (alpha, beta, gamma):
        if not np.isreal(v) or not np.isfinite(v):
            raise ValueError("alpha, beta, gamma must be finite reals")
    return FiniteHamiltonian([[alpha, beta], [0.0, gamma]])


def similarity_residual(S, H):
    """``max |S H - H^H S|``."""
    s = S.entries if isinstance(S, MetricMatrix) else np.asarray(S)
    h = H.entries
    return float(np.max(np.abs(s @ h - h.conj().T @ s)))


def _orthonormalize_degenerate(vals, V):
    # eigenvalues that agree to _DEGENERATE_TOL share one orthonormal basis
    scale = max(np.max(np.abs(vals)), 1.0)
    order = np.argsort(vals)
    V = V.copy()
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and vals[order[stop]] - vals[order[start]] <= _DEGENERATE_TOL * scale:
            stop += 1
        if stop - start > 1:
            idx = order[start:stop]
            q, _ = np.linalg.qr(V[:, idx])
            V[:, idx] = q
        start = stop
    return V


def solve_metric(H, imag_tol=IMAG_TOL, cond_max=COND_MAX):
    """Canonical positive-definite solution of ``S H = H^H S``.

    Parameters
    ----------
    H : FiniteHamiltonian
    imag_tol : float
        Largest eigenvalue imaginary part, relative to the spectral scale,
        still treated as real.
    cond_max : float
        Eigenvector matrices worse conditioned than this are treated as
        defective.

    Returns
    -------
    MetricMatrix
        Identity for Hermitian ``H``; otherwise ``(V V^H)^-1`` scaled to a
        largest eigenvalue of one.

    Raises
    ------
    NotQuasiHermitianError
        Complex spectrum, or ``H`` not numerically diagonalizable.
    """
    if H.is_hermitian():
        return MetricMatrix(np.eye(H.dim))
    vals, V = np.linalg.eig(H.entries)
    scale = max(np.max(np.abs(vals)), np.linalg.norm(H.entries, 2), np.finfo(float).tiny)
    if np.max(np.abs(vals.imag)) > imag_tol * scale:
        raise NotQuasiHermitianError(
            f"not quasi-Hermitian: spectrum {np.array2string(vals, precision=6)} is not real")
    vals = vals.real
    V = V / np.linalg.norm(V, axis=0)[None, :]
    # test before orthonormalizing: QR would hide a collapsed Jordan pair
    if np.linalg.cond(V) > cond_max:
        raise NotQuasiHermitianError("not quasi-Hermitian: H is defective (no eigenvector basis)")
    V = _orthonormalize_degenerate(vals, V)
    # S = V^-H V^-1, built from the inverse directly to avoid squaring cond(V)
    Vinv = np.linalg.inv(V)
    S = Vinv.conj().T @ Vinv
    S = 0.5 * (S + S.conj().T)
    S /= np.max(np.linalg.eigvalsh(S))
    return MetricMatrix(S)


def paper_printed_metric(alpha, beta, gamma, a=1.0, d=1.0):
    """The printed two-by-two metric with off-diagonals ``-+beta/(alpha - beta)``.

    It is not a solution of ``S H = H^H S`` in general; kept so its residual
    can be reported next to the derived one.
    """
    c = beta / (alpha - beta)
    return np.array([[a, -c], [c, d]], dtype=np.complex128)


def derived_metric(alpha, beta, gamma, a=1.0, d=1.0):
    """Hand solution ``[[a, a beta/(alpha - gamma)], [a beta/(alpha - gamma), d]]``."""
    c = a * beta / (alpha - gamma)
    return np.array([[a, c], [c, d]], dtype=np.complex128)


def pseudo_inner(S, psi, phi):
    s = S.entries if isinstance(S, MetricMatrix) else np.asarray(S)
    return complex(np.vdot(psi, s @ phi))


def propagate(H, vec, t, hbar=1.0):
    """``exp(-i t H / hbar) vec`` by scaling-and-squaring."""
    return sla.expm((-1j * t / hbar) * H.entries) @ np.asarray(vec, dtype=np.complex128)


@dataclass(frozen=True)
class ConservationReport:
    times: tuple
    values: tuple
    max_drift: float
    similarity_residual: float
    tolerance: float

    @property
    def passed(self):
        return self.max_drift < self.tolerance


def pseudo_expectation_conservation(H, S, psi0, phi0, times, hbar=1.0, tolerance=1e-10):
    """Largest change of ``<psi(t)|S phi(t)>`` from its initial value over ``times``.

    A metric that does not satisfy the similarity condition is accepted; the
    report then carries its residual and typically a large drift.
    """
    s = S.entries if isinstance(S, MetricMatrix) else np.asarray(S)
    if np.min(np.linalg.eigvalsh(0.5 * (s + s.conj().T))) <= 0:
        raise ValueError("metric must be positive-definite")
    start = pseudo_inner(s, psi0, phi0)
    values = []
    for t in times:
        values.append(pseudo_inner(s, propagate(H, psi0, t, hbar), propagate(H, phi0, t, hbar)))
    drift = max((abs(v - start) for v in values), default=0.0)
    return ConservationReport(tuple(float(t) for t in times), tuple(values), float(drift),
                              similarity_residual(s, H), tolerance)


def parse_matrix(data):
    """Matrix from nested lists; entries may be numbers or ``[re, im]`` pairs."""

    def entry(v):
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ValueError(f"complex entry must be [re, im], got {v!r}")
            return complex(float(v[0]), float(v[1]))
        return complex(v)

    rows = [[entry(v) for v in row] for row in data]
    return FiniteHamiltonian(rows)
