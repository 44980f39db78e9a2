import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from deformqm.errors import DomainError, GridMismatchError, NormalizationError
from deformqm.eigenstates import normalization_constant
from deformqm.metric import (
    GAUSS_IN_X,
    SQRT3,
    UNIFORM_IN_U,
    DeformationContext,
    WaveFunction,
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
    wavefunction_from_csv,
    wavefunction_to_csv,
    weight,
)
from deformqm.operators import DIRICHLET, momentum_op, position_op

taus = st.floats(0.01, 0.99)


@pytest.mark.parametrize("tau", [0.0, 1.0, -0.2, 1.5, float("nan")])
def test_context_rejects_tau_outside_open_interval(tau):
    with pytest.raises(ValueError):
        DeformationContext(tau)


def test_context_rejects_nonpositive_units():
    with pytest.raises(ValueError):
        DeformationContext(0.5, hbar=0.0)
    with pytest.raises(ValueError):
        DeformationContext(0.5, mass=-1.0)


def test_context_derived_scales():
    ctx = DeformationContext(0.25, hbar=2.0)
    assert ctx.ell_max == 4.0
    assert ctx.delta_p_min == 0.5
    assert math.isclose(ctx.u_span, math.pi / (0.25 * SQRT3))


def test_weight_examples():
    ctx = DeformationContext(0.5)
    assert weight(ctx, 0.0) == 1.0
    assert math.isclose(weight(ctx, 1.0), 4 / 3, rel_tol=1e-15)
    assert math.isclose(weight(ctx, -2.0), 1 / 3, rel_tol=1e-15)


@given(tau=taus, s=st.floats(-1, 1))
def test_weight_bounds(tau, s):
    ctx = DeformationContext(tau)
    w = weight(ctx, s * ctx.ell_max)
    assert 1 / 3 - 1e-15 <= w <= 4 / 3 + 1e-15


def test_weight_domain_error():
    with pytest.raises(DomainError):
        weight(DeformationContext(0.5), 2.5)


def test_u_map_examples():
    ctx = DeformationContext(0.5)
    assert u_map(ctx, 0.0) == 0.0
    assert u_map(ctx, 1.0) == pytest.approx(1.209199576156145, rel=1e-12)
    # cross-check by integrating the weight
    assert u_map(ctx, 1.0) == pytest.approx(quad(lambda x: weight(ctx, x), 0, 1)[0], rel=1e-12)
    assert u_map(ctx, 2.0) - u_map(ctx, -2.0) == pytest.approx(math.pi / (0.5 * SQRT3), rel=1e-14)


@given(tau=taus, s=st.floats(-0.99, 0.99))
def test_u_map_jacobian(tau, s):
    ctx = DeformationContext(tau)
    x = s * ctx.ell_max
    h = 1e-4 * ctx.ell_max
    lhs = u_map(ctx, x + h) - u_map(ctx, x)
    # |w'| <= 3 tau w^2 <= 16 tau / 3 on the domain
    assert abs(lhs - weight(ctx, x) * h) < 3 * tau * h ** 2 + 1e-13


def test_u_inverse_round_trip():
    for tau in (0.05, 0.5, 0.95):
        ctx = DeformationContext(tau)
        u = np.linspace(ctx.u_min, ctx.u_max, 1002)[1:-1]
        assert np.max(np.abs(u_map(ctx, u_inverse(ctx, u)) - u)) < 1e-12
        assert u_inverse(ctx, 0.0) == pytest.approx(0.0, abs=1e-15)
        assert u_inverse(ctx, ctx.u_max) == pytest.approx(ctx.ell_max, rel=1e-13)
    with pytest.raises(DomainError):
        u_inverse(DeformationContext(0.5), 10.0)


@pytest.mark.parametrize("tau", [0.05, 0.1, 0.25, 0.5, 0.9])
def test_uniform_grid_measure(tau):
    g = make_grid(DeformationContext(tau), 101)
    assert abs(g.measure() - math.pi / (tau * SQRT3)) < 1e-8
    assert np.all(np.diff(g.nodes) > 0)
    assert np.all(np.abs(g.nodes) < g.context.ell_max)
    assert np.all(g.quad_weights > 0)


def test_gauss_grid_measure():
    ctx = DeformationContext(0.5)
    g = make_grid(ctx, 64, GAUSS_IN_X)
    assert abs(g.measure() - math.pi / (0.5 * SQRT3)) < 1e-10


def test_small_tau_grid_is_nearly_uniform_in_x():
    g = make_grid(DeformationContext(1e-4), 101)
    h = np.diff(g.nodes)
    # spacing scales as 1/w, which spans [1/3, 4/3]^-1 over the full domain...
    assert 3.5 < h.max() / h.min() <= 4.0
    # ...but is uniform near the origin
    w = make_grid(DeformationContext(1e-4), 101, window=(-1.0, 1.0))
    hw = np.diff(w.nodes)
    assert hw.max() / hw.min() - 1 < 1e-3


def test_make_grid_validation():
    ctx = DeformationContext(0.5)
    with pytest.raises(ValueError):
        make_grid(ctx, 7)
    with pytest.raises(ValueError):
        make_grid(ctx, 64, "chebyshev")


def test_constant_eigenfunction_normalized(grids):
    g = grids(0.3)
    a = normalization_constant(g.context)
    phi = WaveFunction(g, np.full(g.n, a))
    assert pseudo_inner(phi, phi).real == pytest.approx(1.0, abs=1e-12)


def test_inner_product_properties(grids, rng):
    g = grids(0.5)
    for _ in range(10):
        psi = WaveFunction(g, rng.normal(size=g.n) + 1j * rng.normal(size=g.n))
        phi = WaveFunction(g, rng.normal(size=g.n) + 1j * rng.normal(size=g.n))
        c = 0.3 - 1.7j
        assert pseudo_inner(psi, phi) == pytest.approx(np.conj(pseudo_inner(phi, psi)), rel=1e-13)
        assert pseudo_inner(psi, c * phi) == pytest.approx(c * pseudo_inner(psi, phi), rel=1e-13)
        assert pseudo_inner(psi, psi).real > 0
        assert abs(pseudo_inner(psi, psi).imag) < 1e-12 * pseudo_inner(psi, psi).real


def test_pseudo_and_plain_products_differ(grids, rng):
    g = grids(0.5)
    psi = random_packet(g, rng)
    assert abs(plain_inner(psi, psi).real - 1.0) > 1e-2


def test_grid_mismatch(grids):
    a = WaveFunction(grids(0.5), np.ones(512))
    b = WaveFunction(grids(0.5, 256), np.ones(256))
    with pytest.raises(GridMismatchError):
        pseudo_inner(a, b)


def test_wavefunction_validation(grids):
    g = grids(0.5)
    with pytest.raises(ValueError):
        WaveFunction(g, np.ones(10))
    bad = np.ones(g.n)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        WaveFunction(g, bad)


def test_expectation_requires_normalized(grids):
    g = grids(0.5)
    with pytest.raises(NormalizationError):
        expectation(position_op(g), WaveFunction(g, np.ones(g.n)))


def test_centered_packet_has_zero_mean(grids, rng):
    g = grids(0.5)
    phi = random_packet(g, rng, centered=True)
    assert abs(expectation(position_op(g), phi)) < 1e-12


def test_gup_on_random_states(grids, rng):
    tau = 0.5
    g = grids(tau)
    X, P = position_op(g), momentum_op(g, boundary=DIRICHLET)
    for i in range(40):
        phi = random_packet(g, rng, centered=bool(i % 2))
        mx = expectation(X, phi).real
        mx2 = expectation(X @ X, phi).real
        dx, dp = uncertainty(X, phi), uncertainty(P, phi)
        assert dx * dp >= 0.5 * (1 - tau * mx + tau ** 2 * mx2) * (1 - 1e-6)
        assert dx < 1 / tau
        if abs(mx) < 1e-3:
            assert dp >= tau * (1 - 1e-3)


def test_gaussian_packet_normalized(grids):
    g = grids(0.5)
    lo, hi = g.u_bounds
    assert pseudo_norm(gaussian_packet(g, 0.5 * (lo + hi), 0.05 * (hi - lo), 4.0)) == pytest.approx(1.0)


@pytest.mark.parametrize("scheme,window", [(UNIFORM_IN_U, None), (UNIFORM_IN_U, (-1.0, 1.5)),
                                           (GAUSS_IN_X, None)])
def test_csv_round_trip(scheme, window, rng):
    ctx = DeformationContext(0.4)
    g = make_grid(ctx, 64, scheme, window)
    phi = WaveFunction(g, rng.normal(size=64) + 1j * rng.normal(size=64))
    buf = io.StringIO()
    wavefunction_to_csv(phi, buf)
    assert buf.getvalue().splitlines()[0] == "x,u,w,re,im"
    back = wavefunction_from_csv(io.StringIO(buf.getvalue()), ctx)
    assert back.grid.matches(g)
    np.testing.assert_allclose(back.samples, phi.samples, rtol=1e-14)
