"""The twelve acceptance criteria, each at its stated tolerance."""

import math

import numpy as np
from lagvac.cli import _scenario_by_id, main
from lagvac.elasticity import (LinearStress, PowerSaturatingStress, SlicSolution, TabulatedStress,
                               crack_solve, crack_weakstar_admissible)
from lagvac.measure import total_variation
from lagvac.scenarios import (collapse_norm_closed_form, collapse_solution, shock_through_rarefaction,
                              vint_identity)
from lagvac.thermo import GammaLaw, SymState, TabulatedLaw
from lagvac.verify import (EulerHistory, EulerJump, PiecewiseConstantSolution, PolytropicGas,
                           check_euler_rh, check_generalized_rh, entropy_audit, euler_shock,
                           nonphysical_solution, rh_failures, verify_solution, weakstar_residual)
from lagvac.waves import entropy_mass, hugoniot_jumps, jump_wave, riemann_solve, shock_jumps

LAW = GammaLaw(3.0)
SCENARIOS = ("collapse", "vrp", "riemann", "offcenter")


def mixed_table():
    v = np.geomspace(1e-3, 1e4, 300)
    return TabulatedLaw(v, v ** -3.0 + 0.5 * v ** -1.6)


def test_01_closed_form_identities(criterion):
    worst = 0.0
    laws = [GammaLaw(1.4), GammaLaw(5 / 3), GammaLaw(3.0), mixed_table()]
    rng = np.random.default_rng(1)
    for law in laws:
        for h in rng.uniform(0.1, 2.0, 20):
            d = 1e-5 * h
            c = float(law.c(h))
            dp = (float(law.p(h + d)) - float(law.p(h - d))) / (2 * d)
            dv = (float(law.v(h + d)) - float(law.v(h - d))) / (2 * d)
            de = (float(law.eps(h + d)) - float(law.eps(h - d))) / (2 * d)
            worst = max(worst, abs(dp / c - 1), abs(-dv * c - 1), abs(de * c / float(law.p(h)) - 1))
    assert criterion(1, "closed-form identities dp/dh, dv/dh, deps/dh", worst <= 1e-6,
                     f"max rel err {worst:.2e}")


def test_02_shock_oracle_equivalence(criterion):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        beta = rng.uniform(1.0, 5.0)
        while beta == 1.0:
            beta = rng.uniform(1.0, 5.0)
        h = rng.uniform(0.0, 10.0) or 10.0
        z = rng.uniform(1.0, 50.0)
        law = GammaLaw((beta + 1.0) / (beta - 1.0))
        a = shock_jumps(law, h, z * h)
        b = hugoniot_jumps(law, h, z * h)
        worst = max(worst, abs(a[0] - b[0]) / b[0], abs(a[1] - b[1]) / b[1])
    assert criterion(2, "z-form vs sqrt([p]/[-v]) shock jumps", worst <= 1e-10, f"max rel diff {worst:.2e}")


def test_03_generalized_rh(criterion):
    rng = np.random.default_rng(3)
    worst, vac_exact = 0.0, 0.0
    for name in SCENARIOS:
        sol, _ = _scenario_by_id(name)
        lo, hi = sol.valid_time
        if name == "offcenter":
            # the shock curve is exact until it leaves the rarefaction
            hi = min(sol.t_exit, 5.0)
        ts = [t for t in rng.uniform(lo, hi, 20) if t not in sol.events]
        rows = check_generalized_rh(sol, ts)
        worst = max(worst, max(r["max"] for r in rows))
        for t in ts:
            for c in sol.active_curves(t):
                if c.kind != "vacuum":
                    continue
                (hl, ul), (hr, ur) = sol.curve_states(t, c)
                vac_exact = max(vac_exact, abs(c.dX(t)), abs(c.dw(t) - (ur - ul)))
    ok = worst <= 1e-9 and vac_exact <= 1e-14
    assert criterion(3, "generalized RH on all scenarios", ok,
                     f"max residual {worst:.2e}, vacuum |X'|,|w'-[u]| {vac_exact:.1e}")


def test_04_norm_reproduction(criterion):
    cases = [("pre-collapse", collapse_solution(LAW, 1.0, 1.0, 1.0, -1.0, t_range=(-0.5, 0.5)), (-0.5, -0.01)),
             ("two-shock", collapse_solution(LAW, 1.0, 1.0, 1.0, -1.0, t_range=(-0.5, 0.5)), (0.01, 0.5)),
             ("shock+rarefaction", collapse_solution(LAW, 0.05, 1.0, 0.1, 0.0, t_range=(-0.5, 0.5)),
              (0.01, 0.5))]
    err, fit = 0.0, 0.0
    for label, sol, (a, b) in cases:
        if label != "pre-collapse":
            assert sol.case == label.replace("+", "-")
        ts = np.linspace(a, b, 20)
        q = np.array([total_variation(sol.measure(t)).quadrature for t in ts])
        cf = np.array([collapse_norm_closed_form(sol, t) for t in ts])
        err = max(err, float(np.max(np.abs(q - cf))))
        line = np.polyval(np.polyfit(ts, q, 1), ts)
        fit = max(fit, float(np.max(np.abs(q - line))))
    assert criterion(4, "norm quadrature vs closed form", err <= 1e-7 and fit <= 1e-8,
                     f"max err {err:.2e}, linear fit residual {fit:.2e}")


def test_05_vint_identity(criterion):
    rng = np.random.default_rng(5)
    worst = 0.0
    for law in (GammaLaw(1.4), GammaLaw(5 / 3), GammaLaw(3.0), mixed_table()):
        hmax = getattr(law, "h_max", 5.0)
        for h in rng.uniform(0.01, min(5.0, 0.9 * hmax), 10):
            worst = max(worst, abs(vint_identity(law, h)))
    assert criterion(5, "vint identity", worst <= 1e-8, f"max residual {worst:.2e}")


def test_06_shock_through_rarefaction(criterion):
    curve = shock_through_rarefaction(LAW, 1.0, 2.0, 1.0, z_max=1e6)
    rel = max(abs(curve.relation_residual(z)) for z in curve.samples[:, 1])
    order = np.argsort(curve.samples[:, 0])
    sig = curve.samples[order, 4]
    increasing = bool(np.all(np.diff(sig) > 0))
    e5 = shock_through_rarefaction(LAW, 1.0, 2.0, 1.0, z_max=1e5).endpoint_limit[0]
    e6 = curve.endpoint_limit[0]
    conv = abs(e6 - e5) / abs(e6)
    ok = rel <= 1e-10 and increasing and conv <= 1e-6
    assert criterion(6, "shock through rarefaction", ok,
                     f"relation {rel:.1e}, sigma increasing in h: {increasing}, endpoint change {conv:.1e}")


def test_07_weakstar_oracle(criterion):
    details, ok = [], True
    for name in SCENARIOS:
        sol, _ = _scenario_by_id(name)
        res = weakstar_residual(sol)
        good = res.residual <= 1e-6 and res.slope is not None and res.slope >= 0.9
        ok &= good
        details.append(f"{name} {res.residual:.1e}/slope {res.slope:.2f}")
    fan = riemann_solve(LAW, SymState(1.0, 1.0), SymState(1.0, -1.0))
    s = fan.waves[1].speed_range[0]
    bad = PiecewiseConstantSolution(LAW, (-3.0, 3.0), (0.0, 1.0), fan.states,
                                    [{"x0": 0.0, "speed": -s}, {"x0": 0.0, "speed": s + 1e-3}])
    r_bad = weakstar_residual(bad).residual
    rh_bad = bool(rh_failures(check_generalized_rh(bad, [0.25, 0.5])))
    ok &= r_bad > 1e-6 and rh_bad
    details.append(f"corrupted {r_bad:.1e}, RH flagged: {rh_bad}")
    assert criterion(7, "weak* residual oracle", ok, ", ".join(details))


def test_08_nonphysical(criterion):
    rep = verify_solution(nonphysical_solution(LAW), [0.25, 0.5, 0.75], name="nonphysical")
    ok = rep.verdicts["equation"] == "PASS" and rep.verdicts["consistency"] == "FAIL"
    assert criterion(8, "nonphysical: equation PASS and consistency FAIL", ok,
                     f"residual {rep.weakstar['max_residual'][-1]:.1e}")


def test_09_entropy(criterion):
    violations, vac = 0, 0.0
    for name in SCENARIOS:
        sol, times = _scenario_by_id(name)
        viol, atoms, _ = entropy_audit(sol, times)
        violations += len(viol)
        vac = max([vac] + [abs(a["mass"]) for a in atoms if a["kind"] == "vacuum"])
    off, _ = _scenario_by_id("offcenter")
    curved = max(entropy_mass(LAW, *off.shock_states(t), off.shock_speed(t)) for t in (0.01, 1.0, 5.0))
    violations += curved > 0
    w = jump_wave(LAW, 1.0, 0.5, "forward")
    exp = PiecewiseConstantSolution(LAW, (-2.0, 2.0), (0.0, 1.0), [w.left, w.right],
                                    [{"name": "expansion", "x0": 0.0, "speed": w.speed_range[0]}])
    flagged = bool(entropy_audit(exp, [0.5])[0])
    ok = violations == 0 and vac <= 1e-12 and flagged
    assert criterion(9, "entropy admissibility", ok,
                     f"violations {violations}, max vacuum mass {vac:.1e}, expansion flagged: {flagged}")


def test_10_euler(criterion):
    eos = PolytropicGas(A=1.0, gamma=1.4, c_v=1.0)
    v_r = math.exp(0.7 / (eos.gamma * eos.c_v))
    fixtures = {
        "contact": EulerJump((1.0, 0.3, 0.0), (v_r, 0.3, 0.7), 0.0, name="contact"),
        "vacuum": EulerJump((math.inf, -0.5, 0.0), (math.inf, 0.5, 0.0), 0.0, w0=0.2, rate=1.0,
                            name="vacuum"),
        "shock": euler_shock(eos, (1.0, 0.0, 0.0), 0.6, "backward"),
    }
    ok, worst = True, 0.0
    for label, jump in fixtures.items():
        for row in check_euler_rh(EulerHistory(eos, [jump]), [0.3, 0.7]):
            ok &= row["class"] == label
            worst = max(worst, row["max"])
    ok &= worst <= 1e-9
    assert criterion(10, "Euler 3x3 classification and jump residuals", ok, f"max residual {worst:.1e}")


def test_11_elasticity(criterion):
    rng = np.random.default_rng(11)
    agree, theta_neg, crack_pos = 0.0, True, True
    for _ in range(50):
        law = PowerSaturatingStress(tau_inf=rng.uniform(0.5, 3.0), m=rng.uniform(1.2, 4.0))
        lam = rng.uniform(0.2, 10.0)
        c = crack_solve(law, lam, rng.uniform(0.05, 0.95) * lam)
        agree = max(agree, abs(c.theta - c.theta_algebraic) / max(1.0, abs(c.theta)))
        theta_neg &= c.theta < 0
        crack_pos &= c.crack_mass >= 0
    power = PowerSaturatingStress(1.0, 2.0)
    slic = SlicSolution(power, 2.0, 1.5)
    rh = max(r["max"] for t in (0.25, 0.5, 1.0) for r in slic.rh_residuals(t))
    u = np.linspace(0.25, 10, 40)
    flips = (bool(crack_weakstar_admissible(power))
             and bool(crack_weakstar_admissible(TabulatedStress.sample(power, 0.01, 1e5, 400)))
             and not crack_weakstar_admissible(LinearStress(0.5))
             and not crack_weakstar_admissible(TabulatedStress(u, 0.5 * (u - 1.0))))
    gap = slic.energy(1.0, (-2.0, 2.0)) - slic.energy_no_crack(1.0, (-2.0, 2.0))
    ok = agree <= 1e-10 and theta_neg and crack_pos and rh <= 1e-10 and flips and gap > 0
    assert criterion(11, "elasticity with fracture", ok,
                     f"theta forms {agree:.1e}, RH {rh:.1e}, verdict flips: {flips}, energy gap {gap:.4f}")


GOLDEN = [["riemann", "--config", "riemann"], ["collapse", "--config", "collapse"],
          ["vrp", "--config", "vrp"], ["offcenter", "--config", "offcenter"],
          ["elastic", "--config", "elastic"], ["elastic", "--config", "elastic_linear"],
          ["verify", "--scenario", "nonphysical"], ["verify", "--solution", "corrupted"]]


def test_12_determinism(tmp_path, criterion):
    mismatched = []
    for k, argv in enumerate(GOLDEN):
        outs = []
        for run in ("a", "b"):
            d = tmp_path / f"{k}{run}"
            main(argv + ["--out-dir", str(d)])
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        if outs[0] != outs[1] or not outs[0]:
            mismatched.append(" ".join(argv))
    assert criterion(12, "byte-identical CLI outputs", not mismatched,
                     f"{len(GOLDEN)} examples" + (f", differing: {mismatched}" if mismatched else ""))
