import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lagvac.errors import DomainError, InvalidConstitutiveLaw
from lagvac.thermo import (GammaLaw, SymState, TabulatedLaw, beta_of_gamma, c_inverse, h_of_v,
                           law_from_config, sym_fields)


def test_beta_of_gamma():
    assert beta_of_gamma(3.0) == 2.0
    assert beta_of_gamma(2.0) == 3.0
    with pytest.raises(InvalidConstitutiveLaw):
        beta_of_gamma(1.0)
    with pytest.raises(InvalidConstitutiveLaw):
        GammaLaw(0.5)


def test_fields_at_vacuum():
    c, v, p, eps = sym_fields(GammaLaw(3.0), 0.0)
    assert (c, p, eps) == (0.0, 0.0, 0.0)
    assert math.isinf(v) and v > 0


@pytest.mark.parametrize("h, expected", [(1.0, (1.0, 1.0, 1 / 3, 1 / 6)),
                                         (2.0, (4.0, 0.5, 8 / 3, 2 / 3))])
def test_fields_beta_two(h, expected):
    assert np.allclose(sym_fields(GammaLaw(3.0), h), expected, rtol=1e-15, atol=0)


def test_negative_h_rejected():
    with pytest.raises(DomainError):
        sym_fields(GammaLaw(3.0), -1e-3)
    with pytest.raises(DomainError):
        SymState(-1.0, 0.0)


def test_symstate_invariants():
    s = SymState(0.5, 1.0)
    assert s.invariants() == (0.5, 1.5)
    assert SymState(0.0, 2.0).is_vacuum


def test_h_of_v_and_c_inverse():
    law = GammaLaw(3.0)
    assert h_of_v(law, 1.0) == pytest.approx(1.0, rel=1e-14)
    assert h_of_v(law, 1e12) < 1e-11
    assert c_inverse(law, 4.0) == pytest.approx(2.0, rel=1e-14)
    assert c_inverse(law, 0.0) == 0.0
    with pytest.raises(DomainError):
        h_of_v(law, 0.0)
    with pytest.raises(DomainError):
        c_inverse(law, -1.0)


def test_h_of_v_matches_quadrature_of_C():
    # H(v) = int_v^inf sqrt(-P'), independently by scipy
    from scipy.integrate import quad
    law = GammaLaw(3.0)
    val = quad(lambda s: float(law.C(s)), 1.0, np.inf, epsabs=1e-13, epsrel=1e-13)[0]
    assert val == pytest.approx(h_of_v(law, 1.0), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 100.0), st.floats(1.2, 5.0))
def test_round_trip(v, gamma):
    law = GammaLaw(gamma)
    assert float(law.v(h_of_v(law, v))) == pytest.approx(v, rel=1e-10)


@pytest.mark.parametrize("gamma", [1.4, 5 / 3, 3.0])
def test_derivative_identities(gamma):
    law = GammaLaw(gamma)
    for h in np.geomspace(1e-3, 10.0, 20):
        d = 1e-5 * h
        dp = (law.p(h + d) - law.p(h - d)) / (2 * d)
        dv = (law.v(h + d) - law.v(h - d)) / (2 * d)
        de = (law.eps(h + d) - law.eps(h - d)) / (2 * d)
        c = law.c(h)
        assert dp == pytest.approx(c, rel=1e-6)
        assert dv == pytest.approx(-1 / c, rel=1e-6)
        assert de == pytest.approx(law.p(h) / c, rel=1e-6)


def test_monotonicity():
    law = GammaLaw(1.4)
    h = np.geomspace(1e-3, 10.0, 50)
    assert np.all(np.diff(law.p(h)) > 0)
    assert np.all(np.diff(law.c(h)) > 0)
    assert np.all(np.diff(law.v(h)) < 0)


def test_raw_mode_is_rescaled():
    g = 3.0
    b = beta_of_gamma(g)
    raw = GammaLaw(g, A=(b - 1) ** (-(g + 1)) / g)
    res = GammaLaw(g)
    for h in (0.3, 1.0, 2.5):
        assert np.allclose(raw.fields(h), res.fields(h), rtol=1e-12)


def test_raw_mode_dimensional():
    law = GammaLaw(1.4, A=2.0)
    v = 0.7
    assert law.P(v) == pytest.approx(2.0 * v ** -1.4, rel=1e-14)
    h = h_of_v(law, v)
    assert float(law.p(h)) == pytest.approx(2.0 * v ** -1.4, rel=1e-12)


def test_tabulated_reproduces_gamma_law():
    law = GammaLaw(3.0)
    tab = TabulatedLaw.sample(law, 1e-3, 1e4, 400)
    for h in (0.05, 0.5, 1.0, 3.0):
        assert np.allclose(tab.fields(h), law.fields(h), rtol=1e-6)
    for s in (0.1, 1.0, 9.0):
        assert c_inverse(tab, s) == pytest.approx(c_inverse(law, s), rel=1e-8)


def test_tabulated_rejects_bad_tables():
    v = np.geomspace(0.1, 100, 30)
    with pytest.raises(InvalidConstitutiveLaw):
        TabulatedLaw(v, v ** 1.4)          # increasing pressure
    with pytest.raises(InvalidConstitutiveLaw):
        TabulatedLaw(v, v ** -0.5)         # tail too slow: H diverges


def test_law_from_config(tmp_path):
    assert law_from_config({"law": "gamma", "gamma": "2"}).beta == 3.0
    law = GammaLaw(3.0)
    v = np.geomspace(1e-2, 1e3, 200)
    path = tmp_path / "law.csv"
    np.savetxt(path, np.column_stack([v, law.P(v)]), delimiter=",", header="v,P", comments="")
    tab = law_from_config({"law": "table", "table_path": "law.csv"}, tmp_path)
    assert float(tab.p(1.0)) == pytest.approx(1 / 3, rel=1e-6)
