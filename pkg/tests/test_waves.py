import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lagvac.errors import InvalidShock, UnsupportedData
from lagvac.scenarios import vrp_norm_closed_form
from lagvac.thermo import GammaLaw, SymState, TabulatedLaw
from lagvac.waves import (_left_curve, _right_curve, entropy_mass, jump_wave, rarefaction_wave,
                          rh_residuals, riemann_solve, shock_from_ratio, vacuum_riemann_solve)
from lagvac.measure import total_variation

LAW = GammaLaw(3.0)

# 30-digit reference values computed with mpmath from v = 1/h, p = h^3/3
SYM_HM = 1.93250875025558078587673775676
SYM_SIGMA = 2.07237599617796755273501243594
STEP_HM = 1.4933865838998699452624693267
STEP_UM = -0.506613416100130054737530673301


def test_shock_from_ratio_values():
    w = shock_from_ratio(LAW, 1.0, 2.0, "backward")
    # [u]^2 = [p][-v] = (7/3)(1/2), sigma = sqrt([p]/[-v])
    assert w.right.u - w.left.u == pytest.approx(-math.sqrt(7 / 6), rel=1e-14)
    assert w.speed_range[0] == pytest.approx(-math.sqrt(14 / 3), rel=1e-14)


def test_shock_rejects_expansive_ratio():
    with pytest.raises(InvalidShock):
        shock_from_ratio(LAW, 1.0, 0.9, "forward")


def test_acoustic_limit():
    for h in (0.5, 1.0, 3.0):
        w = shock_from_ratio(LAW, h, 1.0 + 1e-9, "forward")
        assert w.speed_range[0] == pytest.approx(float(LAW.c(h)), rel=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(1.0001, 20.0), st.sampled_from(["backward", "forward"]),
       st.sampled_from([1.4, 5 / 3, 3.0]))
def test_shocks_satisfy_jumps_entropy_and_lax(h, z, family, gamma):
    law = GammaLaw(gamma)
    w = shock_from_ratio(law, h, z, family)
    s = w.speed_range[0]
    left, right = (w.left.h, w.left.u), (w.right.h, w.right.u)
    res = rh_residuals(law, left, right, s)
    scale = max(1.0, abs(s), abs(law.p(w.behind.h)))
    assert res[0] <= 1e-12 * scale and res[1] <= 1e-12 * scale
    assert entropy_mass(law, left, right, s) <= 1e-12 * scale
    assert float(law.c(w.ahead.h)) < abs(s) < float(law.c(w.behind.h))


def test_expansion_jump_violates_entropy():
    w = jump_wave(LAW, 1.0, 0.5, "forward")
    left, right = (w.left.h, w.left.u), (w.right.h, w.right.u)
    s = w.speed_range[0]
    assert max(rh_residuals(LAW, left, right, s)[:2]) < 1e-13
    assert entropy_mass(LAW, left, right, s) > 0


def test_symmetric_collision_oracle():
    fan = riemann_solve(LAW, SymState(1.0, 1.0), SymState(1.0, -1.0))
    assert fan.kinds == ["shock", "shock"]
    assert fan.h_m == pytest.approx(SYM_HM, rel=1e-13)
    assert fan.states[1].u == pytest.approx(0.0, abs=1e-13)
    assert fan.waves[1].speed_range[0] == pytest.approx(SYM_SIGMA, rel=1e-13)


def test_step_oracles():
    fan = riemann_solve(LAW, SymState(1.0, 0.0), SymState(2.0, 0.0))
    assert fan.kinds == ["shock", "rarefaction"]
    assert fan.h_m == pytest.approx(STEP_HM, rel=1e-13)
    assert fan.states[1].u == pytest.approx(STEP_UM, rel=1e-13)
    mirror = riemann_solve(LAW, SymState(2.0, 0.0), SymState(1.0, 0.0))
    assert mirror.kinds == ["rarefaction", "shock"]
    assert mirror.h_m == pytest.approx(STEP_HM, rel=1e-13)
    assert mirror.states[1].u == pytest.approx(-STEP_UM, rel=1e-13)


def test_vacuum_opens_for_separating_data():
    fan = riemann_solve(LAW, SymState(1.0, -1.5), SymState(1.0, 1.5))
    assert fan.kinds == ["rarefaction", "vacuum", "rarefaction"]
    assert fan.waves[1].atom_rate == pytest.approx(1.0)
    assert fan.atom_rate == pytest.approx(1.0)


def test_near_vacuum_middle_state():
    fan = riemann_solve(LAW, SymState(1.0, -1.0 + 5e-7), SymState(1.0, 1.0 - 5e-7))
    assert fan.kinds == ["rarefaction", "rarefaction"]
    assert 0 < fan.h_m < 1e-4


def test_wave_curves_monotone():
    left, right = SymState(1.0, 0.3), SymState(0.7, -0.2)
    hs = np.linspace(1e-3, 5.0, 300)
    lc = np.array([_left_curve(LAW, left, h) for h in hs])
    rc = np.array([_right_curve(LAW, right, h) for h in hs])
    assert np.all(np.diff(lc) < 0) and np.all(np.diff(rc) > 0)


def test_rarefaction_profile():
    w = rarefaction_wave(LAW, 0.0, 1.0, "forward", (0.0, 0.0), 1.0)
    h, u = w.hu(0.25, 0.0, 1.0)
    assert float(h) == pytest.approx(0.5) and float(u) == pytest.approx(0.5)


def test_riemann_with_tabulated_law_matches_gamma():
    tab = TabulatedLaw.sample(LAW, 1e-3, 1e3, 400)
    a = riemann_solve(LAW, SymState(1.0, 1.0), SymState(1.0, -1.0))
    b = riemann_solve(tab, SymState(1.0, 1.0), SymState(1.0, -1.0))
    assert b.h_m == pytest.approx(a.h_m, rel=1e-5)


def test_compressive_data_against_vacuum_rejected():
    with pytest.raises(UnsupportedData):
        riemann_solve(LAW, SymState(0.0, 1.0), SymState(1.0, -1.0))


def test_vrp_closing_time_and_weight():
    sol = vacuum_riemann_solve(LAW, SymState(1.0, 0.0), SymState(1.0, 0.0), 1.0, (-2.0, 2.0), 1.0)
    # du = (0 - 1) - (0 + 1) = -2, T = w0 / 2
    assert sol.T == pytest.approx(0.5)
    assert sol.weight(0.25) == pytest.approx(0.5)
    assert sol.valid_time == (0.0, 0.5)
    assert sol.outer_fan.kinds == []


def test_vrp_norm_matches_quadrature():
    sol = vacuum_riemann_solve(LAW, SymState(1.0, -0.5), SymState(1.0, 0.5), 0.5, (-2.0, 2.0), 1.0)
    for t in (0.0, 0.2, 0.45):
        assert total_variation(sol.measure(t)).quadrature == pytest.approx(
            vrp_norm_closed_form(sol, t), abs=1e-9)


def test_vrp_zero_width_reduces_to_riemann():
    sol = vacuum_riemann_solve(LAW, SymState(1.0, 1.0), SymState(1.0, -1.0), 0.0, (-3.0, 3.0), 1.0)
    assert sol.fan.h_m == pytest.approx(SYM_HM, rel=1e-13)
