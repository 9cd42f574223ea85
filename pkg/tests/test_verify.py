import json
import math

import numpy as np
import pytest

from lagvac.errors import EventTimeError
from lagvac.thermo import GammaLaw, SymState
from lagvac.verify import (EulerHistory, EulerJump, PiecewiseConstantSolution, PolytropicGas,
                           TestFunctionFamily, check_euler_rh, check_generalized_rh,
                           default_family, entropy_audit, euler_shock, isentropic_euler_shock,
                           nonphysical_solution, rh_failures, solution_from_dict, time_nodes,
                           verify_solution, weakstar_residual)
from lagvac.scenarios import collapse_solution
from lagvac.waves import jump_wave, riemann_solve, vacuum_riemann_solve

LAW = GammaLaw(3.0)


def two_shock(eps=0.0):
    fan = riemann_solve(LAW, SymState(1.0, 1.0), SymState(1.0, -1.0))
    s = fan.waves[1].speed_range[0]
    curves = [{"name": "backward-shock", "x0": 0.0, "speed": -s},
              {"name": "forward-shock", "x0": 0.0, "speed": s + eps}]
    return PiecewiseConstantSolution(LAW, (-3.0, 3.0), (0.0, 1.0), fan.states, curves, name="two-shock")


def test_time_nodes_integrate_polynomials():
    t, w, hmax = time_nodes((0.0, 1.0), [0.3], 4)
    assert hmax == pytest.approx(0.3)
    assert np.sum(w) == pytest.approx(1.0)
    assert np.sum(w * t ** 7) == pytest.approx(1 / 8, rel=1e-12)
    # the event splits a panel
    assert np.sum(w[t < 0.3]) == pytest.approx(0.3)


def test_family_support_check():
    fam = TestFunctionFamily([0.0], [0.5], [(0.1, 0.4)])
    fam.check_inside((-1.0, 1.0), (0.0, 1.0))
    with pytest.raises(Exception):
        fam.check_inside((-0.3, 1.0), (0.0, 1.0))


def test_constant_state_residual_vanishes():
    sol = PiecewiseConstantSolution(LAW, (-1.0, 1.0), (0.0, 1.0), [SymState(1.0, 0.2)], [])
    fam = TestFunctionFamily([0.0, 0.1], [0.5, 0.3], [(0.1, 0.6)])
    assert weakstar_residual(sol, fam).residual < 1e-13


@pytest.mark.parametrize("make", [
    lambda: collapse_solution(LAW, 1.0, 1.0, 1.0, -1.0, t_range=(-0.5, 0.5)),
    lambda: vacuum_riemann_solve(LAW, SymState(1.0, -0.5), SymState(1.0, 0.5), 0.5, (-2.0, 2.0), 1.0),
    lambda: two_shock(),
])
def test_exact_solutions_pass_equation(make):
    res = weakstar_residual(make())
    assert res.passed()
    assert res.max_residual[-1] <= res.max_residual[0] + 1e-12


def test_corrupted_speed_flagged_by_both_checks():
    sol = two_shock(1e-4)
    assert weakstar_residual(sol).residual > 1e-6
    rows = check_generalized_rh(sol, [0.25, 0.5])
    bad = rh_failures(rows)
    assert bad and {r["curve"] for r in bad} == {"forward-shock"}
    assert not rh_failures(check_generalized_rh(two_shock(), [0.25, 0.5]))


def test_rh_at_event_time_raises():
    sol = collapse_solution(LAW, 1.0, 1.0, 1.0, -1.0, t_range=(-0.5, 0.5))
    with pytest.raises(EventTimeError):
        check_generalized_rh(sol, [0.0])


def test_expansion_shock_flagged_by_entropy():
    w = jump_wave(LAW, 1.0, 0.5, "forward")
    sol = PiecewiseConstantSolution(LAW, (-2.0, 2.0), (0.0, 1.0), [w.left, w.right],
                                    [{"name": "expansion", "x0": 0.0, "speed": w.speed_range[0]}])
    assert not rh_failures(check_generalized_rh(sol, [0.5]))
    viol, atoms, _ = entropy_audit(sol, [0.5])
    assert viol and viol[0]["curve"] == "expansion" and viol[0]["mass"] > 0


def test_admissible_solutions_have_no_entropy_violations():
    sol = collapse_solution(LAW, 1.0, 1.0, 1.0, -1.0, t_range=(-0.5, 0.5))
    viol, atoms, interior = entropy_audit(sol, [-0.3, 0.25])
    assert not viol and interior < 1e-8
    assert all(a["mass"] <= 0 for a in atoms)


def test_nonphysical_passes_equation_fails_consistency():
    rep = verify_solution(nonphysical_solution(LAW), [0.25, 0.5, 0.75], name="nonphysical")
    assert rep.verdicts["equation"] == "PASS"
    assert rep.verdicts["RH"] == "PASS"
    assert rep.verdicts["consistency"] == "FAIL"
    assert not rep.passed
    text = rep.summary()
    assert "equation: PASS" in text and "consistency: FAIL" in text and "overall: FAIL" in text


def test_report_round_trip_and_hash():
    rep = verify_solution(two_shock(), [0.25, 0.5], name="two-shock", config={"a": 1})
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["verdicts"] == {"equation": "PASS", "RH": "PASS", "entropy": "PASS", "consistency": "PASS"}
    assert d["config_hash"] == rep.config_hash and len(rep.config_hash) == 16
    other = verify_solution(two_shock(), [0.25, 0.5], name="two-shock", config={"a": 2}, equation=False)
    assert other.config_hash != rep.config_hash


def test_solution_from_dict_accepts_volume():
    d = two_shock().to_dict()
    d["states"][0] = {"v": 1.0, "u": 1.0}
    sol = solution_from_dict(d)
    assert sol.states[0].h == pytest.approx(1.0)
    assert len(sol.curves) == 2


def test_default_family_fits_solution():
    sol = two_shock()
    fam = default_family(sol)
    fam.check_inside(sol.domain, sol.valid_time)
    # 3 widths x 4 centers x 3 time windows
    assert fam.size == 36


# --------------------------------------------------------------------------
# 3x3 Euler fixtures

EOS = PolytropicGas(A=1.0, gamma=1.4, c_v=1.0)


def test_euler_contact():
    s_l, s_r = 0.0, 0.7
    v_l = 1.0
    v_r = v_l * math.exp((s_r - s_l) / (EOS.gamma * EOS.c_v))
    hist = EulerHistory(EOS, [EulerJump((v_l, 0.3, s_l), (v_r, 0.3, s_r), 0.0, name="contact")])
    row, = check_euler_rh(hist, [0.5])
    assert row["class"] == "contact" and row["max"] < 1e-12 and row["entropy_atom"] == 0.0


def test_euler_vacuum():
    hist = EulerHistory(EOS, [EulerJump((math.inf, -0.5, 0.0), (math.inf, 0.5, 0.0), 0.0,
                                        w0=0.2, rate=1.0, name="vacuum")])
    row, = check_euler_rh(hist, [0.5])
    assert row["class"] == "vacuum" and row["max"] < 1e-12
    assert hist.state(0.5).V is None


def test_euler_hugoniot_shock():
    jump = euler_shock(EOS, (1.0, 0.0, 0.0), 0.6, "backward")
    row, = check_euler_rh(EulerHistory(EOS, [jump]), [0.5])
    assert row["class"] == "shock" and row["max"] < 1e-12
    assert row["entropy_atom"] < 0


def test_constant_entropy_shock_fails_energy_jump():
    law = GammaLaw(1.4)
    jump, wave = isentropic_euler_shock(EOS, law, 1.0, 1.5)
    row, = check_euler_rh(EulerHistory(EOS, [jump]), [0.5])
    assert row["r_momentum"] < 1e-12 and row["r_mass"] < 1e-12
    assert row["r_energy"] > 1e-6
