import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deformqm.eigenstates import (
    EigenstateSpec,
    normalization_constant,
    overlap_closed_form,
    overlap_paper_formula,
    overlap_quadrature,
    overlap_report,
    phi_xi,
    phi_xi_wave,
)
from deformqm.errors import DomainError
from deformqm.metric import SQRT3, DeformationContext, make_grid, pseudo_norm
from deformqm.operators import momentum_op


def test_normalization_constant_examples():
    # sqrt(0.1 sqrt3 / pi) = 0.23480394; an often-quoted 0.2348045 is off in the 7th digit
    assert normalization_constant(DeformationContext(0.1)) == pytest.approx(0.2348039, abs=5e-8)
    a = normalization_constant(DeformationContext(1 - 1e-12))
    assert a == pytest.approx(math.sqrt(SQRT3 / math.pi), rel=1e-9)
    # sqrt(sqrt3 / pi) = 0.7425152; an often-quoted 0.742480 is off in the 5th digit
    assert a == pytest.approx(0.742515, abs=5e-7)


@pytest.mark.parametrize("tau", [0.1, 0.5, 0.9])
def test_normalization_matches_quadrature(tau):
    ctx = DeformationContext(tau)
    g = make_grid(ctx, 512)
    assert normalization_constant(ctx) ** 2 * g.measure() == pytest.approx(1.0, abs=1e-12)


def test_phi_at_origin_and_modulus():
    ctx = DeformationContext(0.4)
    spec = EigenstateSpec(ctx, 3.7)
    assert phi_xi(spec, 0.0) == pytest.approx(normalization_constant(ctx), rel=1e-15)
    x = np.linspace(-2.5, 2.5, 101)
    np.testing.assert_allclose(np.abs(phi_xi(spec, x)), normalization_constant(ctx), rtol=1e-14)
    with pytest.raises(DomainError):
        phi_xi(spec, 3.0)
    with pytest.raises(ValueError):
        EigenstateSpec(ctx, float("inf"))


def test_phase_additivity():
    ctx = DeformationContext(0.6)
    x = np.linspace(-1.6, 1.6, 50)
    a = normalization_constant(ctx)
    lhs = phi_xi(EigenstateSpec(ctx, 1.3), x) * phi_xi(EigenstateSpec(ctx, -4.1), x) / a
    np.testing.assert_allclose(lhs, phi_xi(EigenstateSpec(ctx, 1.3 - 4.1), x), rtol=1e-13)


@pytest.mark.parametrize("tau", [0.1, 0.5, 0.9])
def test_eigenfunction_pseudo_norm(tau):
    g = make_grid(DeformationContext(tau), 512)
    assert pseudo_norm(phi_xi_wave(EigenstateSpec(g.context, 2.0 * tau), g)) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("mult", [0, 1, -1, 5, -5])
def test_grid_momentum_eigenvalue(grids, mult):
    g = grids(0.5)
    xi = mult * 0.5 * SQRT3
    phi = phi_xi_wave(EigenstateSpec(g.context, xi), g)
    res = momentum_op(g).apply(phi).samples - xi * phi.samples
    scale = max(abs(xi), 0.5 * SQRT3) * normalization_constant(g.context)
    assert np.max(np.abs(res[2:-2])) / scale < 1e-6


def test_overlap_coincidence_and_decay():
    ctx = DeformationContext(0.5)
    s = ctx.tau * ctx.hbar * SQRT3
    assert overlap_quadrature(ctx, 1.0, 1.0) == pytest.approx(1.0, abs=1e-13)
    assert overlap_closed_form(ctx, 1.0, 1.0) == 1.0
    assert abs(overlap_quadrature(ctx, 0.0, 100 * s)) < 0.02


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_overlap_zeros_of_derived_sinc(n):
    ctx = DeformationContext(0.3)
    s = ctx.tau * ctx.hbar * SQRT3
    assert abs(overlap_quadrature(ctx, 0.0, 2 * n * s)) < 1e-8


@given(tau=st.floats(0.05, 0.95), d=st.floats(-30, 30))
@settings(max_examples=40, deadline=None)
def test_closed_form_matches_quadrature(tau, d):
    ctx = DeformationContext(tau)
    d *= tau * SQRT3
    assert abs(overlap_quadrature(ctx, 0.0, d) - overlap_closed_form(ctx, 0.0, d)) < 1e-12


@given(xi=st.floats(-20, 20), d=st.floats(-10, 10))
@settings(max_examples=30, deadline=None)
def test_overlap_translation_invariant_and_bounded(xi, d):
    ctx = DeformationContext(0.5)
    a = overlap_quadrature(ctx, xi, xi + d)
    b = overlap_quadrature(ctx, 0.0, d)
    assert abs(a - b) < 1e-12
    assert abs(a) <= 1 + 1e-12
    if abs(d) > 1e-3:
        assert abs(a) < 1


def test_paper_formula_values_and_discrepancy():
    ctx = DeformationContext(0.5)
    s = ctx.tau * ctx.hbar * SQRT3
    assert overlap_paper_formula(ctx, 0.0, 0.0) == 1.0
    assert abs(overlap_paper_formula(ctx, 0.0, s)) < 1e-15
    rows = overlap_report(ctx, np.linspace(0, 10 * s, 41))
    # agree at coincidence, disagree in between
    assert rows[0][4] < 1e-12
    assert max(r[4] for r in rows) > 0.1
