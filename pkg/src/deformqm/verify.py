"""Aggregate numerical self-checks.

Each check returns a :class:`CheckResult`; :func:`run_checks` runs the whole
suite for one ``(tau, n)`` setting. The report is what ``deformqm verify``
prints and its exit status is nonzero iff any check fails.
"""

from dataclasses import asdict, dataclass
import math
import warnings

import numpy as np

from . import box, fourier, matrix_pseudo
from .eigenstates import EigenstateSpec, normalization_constant, phi_xi_wave
from .errors import TruncationWarning
from .metric import (
    SQRT3,
    UNIFORM_IN_U,
    DeformationContext,
    deformation_factor,
    expectation,
    gaussian_packet,
    make_grid,
    pseudo_inner,
    random_packet,
    uncertainty,
)
from .operators import (
    DIRICHLET,
    Propagator,
    adjoint_plain,
    commutator_defect,
    hamiltonian,
    identity_op,
    identity_residual,
    metric_op,
    momentum_op,
    multiplication_op,
    position_op,
    smooth_panel,
)

TOLERANCES = {
    "commutator": 1e-6,
    "adjoint": 1e-6,
    "pseudo_similarity_X": 1e-6,
    "pseudo_similarity_P": 1e-6,
    "pseudo_similarity_H": 1e-6,
    "normalization": 1e-8,
    "eigenfunction": 1e-6,
    "parseval": 1e-6,
    "round_trip": 1e-6,
    "gup": 1e-6,
    "conservation_grid": 1e-10,
    "conservation_matrix": 1e-10,
    "spectrum_oracle_u": 1e-12,
    "spectrum_oracle_y": 1e-3,
}


@dataclass(frozen=True)
class CheckResult:
    check_name: str
    residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.residual) and self.residual < self.tolerance)

    def to_dict(self):
        d = asdict(self)
        d["pass"] = self.passed
        return d


def _result(name, residual):
    return CheckResult(name, float(residual), TOLERANCES[name])


def adjoint_defect(grid, order=8, panel=None, collar=2):
    """Interior residual of ``P^+ = P + i hbar tau (1 - 2 tau X)``."""
    ctx = grid.context
    P = momentum_op(grid, order=order)
    corr = multiplication_op(grid, 1j * ctx.hbar * ctx.tau * (1.0 - 2.0 * ctx.tau * grid.nodes))
    panel = smooth_panel(grid) if panel is None else panel
    return identity_residual(adjoint_plain(P), P + corr, panel, collar)


def pseudo_similarity_defects(grid, order=8, panel=None, collar=2):
    """Residuals of ``S+ A S+^-1 = A^+`` for ``A`` in ``X, P, H``."""
    S = metric_op(grid)
    S_inv = multiplication_op(grid, 1.0 / np.diag(S.entries).real)
    panel = smooth_panel(grid) if panel is None else panel
    ops = {"X": position_op(grid), "P": momentum_op(grid, order=order),
           "H": hamiltonian(grid, order=order)}
    return {k: identity_residual(S @ A @ S_inv, adjoint_plain(A), panel, collar)
            for k, A in ops.items()}


def normalization_defect(grid):
    ctx = grid.context
    exact = math.pi / (ctx.tau * SQRT3)
    measure = grid.measure()
    return max(abs(measure - exact) / exact,
               abs(normalization_constant(ctx) ** 2 * measure - 1.0))


def eigenfunction_defect(grid, order=8, collar=2, multiples=(0, 1, -1, 5, -5)):
    """Interior relative error of ``P phi_xi = xi phi_xi``."""
    ctx = grid.context
    P = momentum_op(grid, order=order)
    sl = slice(collar, grid.n - collar)
    worst = 0.0
    for m in multiples:
        xi = m * ctx.tau * ctx.hbar * SQRT3
        phi = phi_xi_wave(EigenstateSpec(ctx, xi), grid)
        lhs = P.apply(phi).samples[sl]
        rhs = xi * phi.samples[sl]
        # xi = 0: compare against the eigenfunction's own scale
        scale = max(np.max(np.abs(rhs)), np.max(np.abs(phi.samples)) * ctx.tau * ctx.hbar * SQRT3)
        worst = max(worst, float(np.max(np.abs(lhs - rhs)) / scale))
    return worst


def gup_margin(grid, states):
    """Worst relative shortfall of ``dX dP`` below ``(hbar/2) <1 - tau X + tau^2 X^2>``.

    Negative values mean the bound holds with room to spare. Momentum uses the
    antisymmetric closure, which is Hermitian for the pseudo-inner product.
    """
    ctx = grid.context
    X = position_op(grid)
    P = momentum_op(grid, boundary=DIRICHLET)
    f = multiplication_op(grid, deformation_factor(ctx, grid.nodes))
    worst = -math.inf
    for phi in states:
        bound = 0.5 * ctx.hbar * expectation(f, phi).real
        prod = uncertainty(X, phi) * uncertainty(P, phi)
        worst = max(worst, (bound - prod) / bound)
    return worst


def grid_conservation_drift(grid, times=(0.1, 1.0, 10.0), seed=1):
    """Drift of ``<psi(t)|phi(t)>`` under the antisymmetric-closure Hamiltonian."""
    rng = np.random.default_rng(seed)
    psi, phi = random_packet(grid, rng), random_packet(grid, rng)
    prop = Propagator(hamiltonian(grid, boundary=DIRICHLET))
    start = pseudo_inner(psi, phi)
    return max(abs(pseudo_inner(prop.evolve(psi, t), prop.evolve(phi, t)) - start) for t in times)


def matrix_conservation_drift(seed=2):
    H = matrix_pseudo.triangular_example(2.0, 1.0, 0.0)
    S = matrix_pseudo.solve_metric(H)
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    phi = rng.normal(size=2) + 1j * rng.normal(size=2)
    times = np.linspace(0.0, 10.0, 101)
    return matrix_pseudo.pseudo_expectation_conservation(H, S, psi, phi, times).max_drift


def spectrum_oracle_defects(ctx, a=None, n_max=5, n_nodes=2000):
    """Relative disagreement of both grid oracles with the closed form."""
    a = 1.0 / (2.0 * ctx.tau) if a is None else a
    spec = box.BoxSpec(ctx, a, n_max)
    exact = box.y_spectrum_closed_form(spec).energies()
    cheb = box.y_spectrum_oracle(spec, method=box.U_CHEBYSHEV).energies()
    direct = box.y_spectrum_oracle(spec, n_nodes=n_nodes).energies()
    return (float(np.max(np.abs(cheb - exact) / exact)),
            float(np.max(np.abs(direct - exact) / exact)))


def run_checks(tau=0.5, n_nodes=512, hbar=1.0, mass=1.0, oracle_nodes=2000, n_states=10, seed=0):
    """Run the full suite and return a list of :class:`CheckResult`."""
    ctx = DeformationContext(tau, hbar, mass)
    grid = make_grid(ctx, n_nodes, UNIFORM_IN_U)
    results = [_result("commutator", commutator_defect(grid)),
               _result("adjoint", adjoint_defect(grid))]
    for k, v in pseudo_similarity_defects(grid).items():
        results.append(_result(f"pseudo_similarity_{k}", v))
    results.append(_result("normalization", normalization_defect(grid)))
    results.append(_result("eigenfunction", eigenfunction_defect(grid)))

    lo, hi = grid.u_bounds
    packet = gaussian_packet(grid, 0.5 * (lo + hi), 0.06 * (hi - lo))
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        try:
            pars = fourier.parseval_defect(packet)
            rt = fourier.round_trip_error(packet)
        except TruncationWarning:
            pars = rt = math.inf
    results.append(_result("parseval", pars))
    results.append(_result("round_trip", rt))

    rng = np.random.default_rng(seed)
    states = [random_packet(grid, rng, centered=bool(i % 2)) for i in range(n_states)]
    results.append(_result("gup", max(gup_margin(grid, states), 0.0)))
    results.append(_result("conservation_grid", grid_conservation_drift(grid)))
    results.append(_result("conservation_matrix", matrix_conservation_drift()))
    cheb, direct = spectrum_oracle_defects(ctx, n_nodes=oracle_nodes)
    results.append(_result("spectrum_oracle_u", cheb))
    results.append(_result("spectrum_oracle_y", direct))
    return results


def report(results):
    return {"checks": [r.to_dict() for r in results],
            "pass": all(r.passed for r in results)}
