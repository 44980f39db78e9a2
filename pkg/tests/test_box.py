import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from deformqm.box import (
    CLOSED_FORM,
    DIRECT_Y,
    U_CHEBYSHEV,
    BoxSpec,
    SpectrumRow,
    SpectrumTable,
    contraction_ratio,
    full_2d_table,
    u_image_length,
    x_spectrum,
    y_bracket,
    y_eigenfunction,
    y_spectrum_closed_form,
    y_spectrum_oracle,
)
from deformqm.errors import DomainError
from deformqm.metric import DeformationContext, u_map


@pytest.fixture
def box05():
    return BoxSpec(DeformationContext(0.5), 1.0, 5)


def test_x_spectrum_examples():
    b = BoxSpec(DeformationContext(0.5), 1.0, 2)
    e = x_spectrum(b).energies()
    assert e[0] == pytest.approx(math.pi ** 2 / 2, rel=1e-15)
    assert e[0] == pytest.approx(4.934802, abs=5e-7)
    assert e[1] == pytest.approx(4 * e[0], rel=1e-15)
    e2 = x_spectrum(BoxSpec(DeformationContext(0.25), 2.0, 1)).energies()
    assert e2[0] == pytest.approx(e[0] / 4, rel=1e-15)


def test_y_closed_form_example(box05):
    rows = y_spectrum_closed_form(box05).rows
    assert rows[0].k == pytest.approx(1.5 * math.sqrt(3), rel=1e-15)
    assert rows[0].energy == pytest.approx(3.375, rel=1e-15)
    assert y_bracket(box05.context, 1.0) == pytest.approx(math.pi / 6, rel=1e-15)


def test_ratio_independent_of_n(box05):
    r = y_spectrum_closed_form(box05).energies() / x_spectrum(box05).energies()
    assert np.ptp(r) < 1e-15
    assert r[0] == pytest.approx(contraction_ratio(box05.context, 1.0), rel=1e-15)


def test_small_tau_limit():
    b = BoxSpec(DeformationContext(1e-5), 1.0, 5)
    ey, ex = y_spectrum_closed_form(b).energies(), x_spectrum(b).energies()
    assert np.max(np.abs(ey / ex - 1)) < 1e-3


@pytest.mark.parametrize("ta", [0.5, 1.0])
def test_contraction_ratio_values(ta):
    ctx = DeformationContext(0.5)
    assert abs(contraction_ratio(ctx, ta / 0.5) - 0.683918) < 1e-6


@given(ta=st.floats(1e-6, 1.0))
def test_contraction_ratio_range(ta):
    ctx = DeformationContext(0.5)
    r = contraction_ratio(ctx, ta / 0.5)
    assert 0.64 < r <= 1.0
    if ta < 1e-3:
        # leading behaviour 1 - tau a
        assert abs(r - (1 - ta)) < 2 * ta ** 2


def test_contraction_ratio_minimum_location():
    ctx = DeformationContext(0.5)
    ta = np.linspace(0.01, 1.0, 2000)
    r = np.array([contraction_ratio(ctx, t / 0.5) for t in ta])
    assert 0.72 < ta[np.argmin(r)] < 0.76
    assert r.min() == pytest.approx(0.6516, abs=1e-3)


def test_box_outside_domain():
    ctx = DeformationContext(0.5)
    with pytest.raises(DomainError):
        BoxSpec(ctx, 2.5)
    with pytest.raises(DomainError):
        contraction_ratio(ctx, 2.5)
    with pytest.warns(UserWarning):
        r = contraction_ratio(ctx, 2 * 1.8, allow_outside=True)
    assert r > 1.0  # the inequality fails well outside the domain


def test_box_validation():
    ctx = DeformationContext(0.5)
    with pytest.raises(ValueError):
        BoxSpec(ctx, -1.0)
    with pytest.raises(ValueError):
        BoxSpec(ctx, 1.0, 0)


def test_u_image_length_is_u_map(box05):
    assert u_image_length(box05.context, 1.0) == pytest.approx(u_map(box05.context, 1.0), rel=1e-14)


def test_chebyshev_oracle_exact(box05):
    exact = y_spectrum_closed_form(box05).energies()
    cheb = y_spectrum_oracle(box05, method=U_CHEBYSHEV).energies()
    assert np.max(np.abs(cheb - exact) / exact) < 1e-12


def test_direct_y_oracle(box05):
    exact = y_spectrum_closed_form(box05).energies()
    tab = y_spectrum_oracle(box05, n_nodes=2000, method=DIRECT_Y)
    assert np.max(np.abs(tab.energies() - exact) / exact) < 1e-3
    assert tab.energies()[0] == pytest.approx(3.375, rel=1e-3)


def test_direct_y_small_tau_matches_x():
    b = BoxSpec(DeformationContext(1e-5), 1.0, 5)
    ey = y_spectrum_oracle(b, n_nodes=600).energies()
    assert np.max(np.abs(ey / x_spectrum(b).energies() - 1)) < 1e-3


def test_oracle_validation(box05):
    with pytest.raises(ValueError):
        y_spectrum_oracle(box05, n_nodes=100)
    with pytest.raises(ValueError):
        y_spectrum_oracle(box05, method="shooting")


def test_eigenfunction_boundary_values(box05):
    for n in range(1, 6):
        v = y_eigenfunction(box05, n, np.array([0.0, 1.0]))
        assert np.all(np.abs(v) < 1e-12)


def test_eigenfunction_normalized(box05):
    from scipy.integrate import quad
    from deformqm.metric import weight
    ctx = box05.context
    val = quad(lambda y: weight(ctx, y) * y_eigenfunction(box05, 2, y) ** 2, 0, 1, limit=200)[0]
    assert val == pytest.approx(1.0, abs=1e-10)


def test_2d_table_degeneracy():
    near = full_2d_table(BoxSpec(DeformationContext(1e-5), 1.0, 2), rel_tol=1e-4)
    e = {(r.n_x, r.n_y): r for r in near}
    assert e[1, 2].level == e[2, 1].level and e[1, 2].degeneracy == 2
    deformed = full_2d_table(BoxSpec(DeformationContext(0.5), 1.0, 2))
    e = {(r.n_x, r.n_y): r for r in deformed}
    assert e[1, 2].energy != pytest.approx(e[2, 1].energy, rel=1e-6)
    assert all(r.degeneracy == 1 for r in deformed)
    ex1 = math.pi ** 2 / 2
    assert e[1, 1].energy == pytest.approx(ex1 * (1 + contraction_ratio(DeformationContext(0.5), 1.0)))
    energies = [r.energy for r in deformed]
    assert energies == sorted(energies)


def test_table_invariants_and_csv(box05):
    with pytest.raises(ValueError):
        SpectrumTable([SpectrumRow("x", 1, 1.0, -1.0, CLOSED_FORM)])
    with pytest.raises(ValueError):
        SpectrumTable([SpectrumRow("x", 1, 1.0, 2.0, CLOSED_FORM),
                       SpectrumRow("x", 2, 1.0, 1.0, CLOSED_FORM)])
    buf = io.StringIO()
    (x_spectrum(box05) + y_spectrum_closed_form(box05)).to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "direction,n,k,E,method"
    assert len(lines) == 11
