"""Numerical toolkit for quantum mechanics on a position-deformed Heisenberg algebra.

``[X, P] = i hbar (1 - tau X + tau^2 X^2)`` with ``0 < tau < 1``. Positions
live in ``(-1/tau, 1/tau)`` with inner-product weight
``w(x) = 1 / (1 - tau x + tau^2 x^2)``; the arctan coordinate ``u`` with
``du = w dx`` turns the deformed derivative into ``d/du``.
"""

from .errors import (
    DomainError,
    GridMismatchError,
    NormalizationError,
    NotQuasiHermitianError,
    TruncationWarning,
)
from .kernels import BACKEND
from .metric import (
    GAUSS_IN_X,
    UNIFORM_IN_U,
    DeformationContext,
    Grid,
    WaveFunction,
    deformation_factor,
    expectation,
    gaussian_packet,
    make_grid,
    plain_inner,
    pseudo_inner,
    pseudo_norm,
    random_packet,
    u_inverse,
    u_map,
    uncertainty,
    weight,
)
from .operators import (
    OperatorMatrix,
    adjoint_plain,
    adjoint_pseudo,
    commutator_defect,
    evolve,
    hamiltonian,
    metric_op,
    momentum_op,
    position_op,
)
from .eigenstates import (
    EigenstateSpec,
    normalization_constant,
    overlap_closed_form,
    overlap_paper_formula,
    overlap_quadrature,
    phi_xi,
)
from .fourier import (
    MomentumFunction,
    forward_ft,
    inverse_ft,
    parseval_defect,
    position_in_momentum_rep,
    momentum_in_momentum_rep,
)
from .matrix_pseudo import (
    FiniteHamiltonian,
    MetricMatrix,
    pseudo_expectation_conservation,
    solve_metric,
    triangular_example,
)
from .box import (
    BoxSpec,
    SpectrumTable,
    contraction_ratio,
    full_2d_table,
    x_spectrum,
    y_spectrum_closed_form,
    y_spectrum_oracle,
)

__version__ = "0.1.0"
