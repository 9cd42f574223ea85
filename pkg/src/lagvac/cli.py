"""Command-line front end.

    lagvac riemann   --config riemann.ini --out-dir out/
    lagvac collapse  --config collapse.ini --times=-0.5:0.1:0.5
    lagvac offcenter --config offcenter.ini
    lagvac vrp       --config vrp.ini
    lagvac verify    --scenario vrp | --solution fixture.json
    lagvac elastic   --config elastic.ini

Configs are INI files; a bare name such as ``collapse`` selects the
bundled example of that name.  Exit codes: 0 success, 2 verification
failure, 1 configuration or runtime error.  Set LAGVAC_LOG to error,
info or debug for progress messages on stderr.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, LagvacError
from .scenarios import (OffCenterSolution, collapse_solution, entropy_production, norm_closed_form,
                        offcenter_solution)
from .thermo import SymState, law_from_config, law_to_dict
from .waves import FanSolution, riemann_solve, vacuum_riemann_solve

log = logging.getLogger("lagvac")

DATA_DIR = Path(__file__).resolve().parent / "data"

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


# --------------------------------------------------------------------------
# config and formatting


def fmt(x):
    if isinstance(x, (float, np.floating)):
        return format(float(x) + 0.0, ".17g")  # no negative zeros
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join("" if v is None else fmt(v) for v in r) + "\n")
    log.info("wrote %s", path)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, data):
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        json.dump(_clean(data), f, indent=2, sort_keys=True)
        f.write("\n")
    log.info("wrote %s", path)


def resolve_config(name):
    """Path to a config: an existing file, or a bundled example by name."""
    if name is None:
        return None
    p = Path(name)
    if p.exists():
        return p
    for cand in (DATA_DIR / name, DATA_DIR / f"{name}.ini", DATA_DIR / f"{name}.json"):
        if cand.exists():
            return cand
    raise ConfigError(f"config {name!r} not found")


def load_config(name, default):
    path = resolve_config(name or default)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path, encoding="utf-8") as f:
        cp.read_file(f)
    return cp, path.parent


def parse_times(text):
    """'0.1,0.2' or 'start:step:end' (end included)."""
    text = text.strip()
    try:
        if ":" in text:
            a, s, b = (float(x) for x in text.split(":"))
            if not s > 0 or b < a:
                raise ConfigError(f"bad time range {text!r}")
            n = int(round((b - a) / s))
            return [round(a + k * s, 12) for k in range(n + 1)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse times {text!r}") from exc


def getf(sec, key, default=None):
    if key in sec:
        try:
            return float(sec[key])
        except ValueError as exc:
            raise ConfigError(f"{key} = {sec[key]!r} is not a number") from exc
    if default is None:
        raise ConfigError(f"missing key {key!r} in [{sec.name}]")
    return float(default)


def section(cp, name):
    if not cp.has_section(name):
        raise ConfigError(f"config has no [{name}] section")
    return cp[name]


def run_settings(args, cp):
    out = cp["output"] if cp.has_section("output") else {}
    times = parse_times(args.times) if args.times else parse_times(out.get("times", "0.5"))
    grid = args.grid if args.grid else int(out.get("grid", 101))
    tol = args.tol if args.tol else float(out.get("tol", 1e-10))
    if not tol > 0 or grid < 2:
        raise ConfigError("need tol > 0 and grid >= 2")
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    return times, grid, tol, outdir


# --------------------------------------------------------------------------
# shared writers


def write_profiles(sol, times, grid, path):
    a, b = sol.domain
    xs = np.linspace(a, b, grid)
    rows = []
    for t in times:
        s = sol.sample(t, xs)
        for k in range(xs.size):
            rows.append((float(t), float(xs[k]), float(s["h"][k]), float(s["u"][k]),
                         float(s["p"][k]), float(s["v"][k]), s["region_id"][k]))
    write_csv(path, ["t", "x", "h", "u", "p", "v", "region_id"], rows)


def write_atoms(sol, times, path):
    rows = []
    for t in times:
        for c in sol.curves:
            if c.w is None:
                continue
            lo, hi = c.t_range
            if lo <= t <= hi or c.active(t):
                rows.append((float(t), float(c.X(t)), c.weight(t), c.name))
    write_csv(path, ["t", "x_atom", "w", "curve"], rows)


def write_norms(sol, times, tol, path):
    rows = []
    for t in times:
        rep = sol.norm(t, tol=tol)
        cf = norm_closed_form(sol, t)
        err = None if cf is None else abs(rep.quadrature - cf)
        rows.append((float(t), cf, rep.quadrature, err, rep.error_estimate))
    write_csv(path, ["t", "closed_form", "quadrature", "abs_err", "error_estimate"], rows)


def write_entropy(sol, times, path):
    rows = []
    for t in times:
        if t in sol.events:
            continue
        for r in entropy_production(sol, t):
            rows.append((float(t), float(r["x"]), r["kind"], float(r["mass"]), r["name"]))
    write_csv(path, ["t", "x_disc", "kind", "mass", "curve"], rows)


def _check_times(sol, times):
    lo, hi = sol.valid_time
    bad = [t for t in times if not lo <= t <= hi]
    if bad:
        raise ConfigError(f"times {bad} outside the validity interval [{lo}, {hi}]")


def _domain(sec, a, b):
    return getf(sec, "x_min", a), getf(sec, "x_max", b)


# --------------------------------------------------------------------------
# subcommands


def cmd_riemann(args):
    cp, base = load_config(args.config, "riemann")
    law = law_from_config(section(cp, "law"), base)
    sec = section(cp, "riemann")
    times, grid, tol, outdir = run_settings(args, cp)
    left = SymState(getf(sec, "h_left"), getf(sec, "u_left"))
    right = SymState(getf(sec, "h_right"), getf(sec, "u_right"))
    fan = riemann_solve(law, left, right)
    sol = FanSolution(fan, _domain(sec, -1.0, 1.0), max(times))
    _check_times(sol, times)
    d = fan.to_dict()
    d["law"] = law_to_dict(law)
    d["kinds"] = fan.kinds
    if fan.has_vacuum:
        d["vacuum_rate"] = fan.atom_rate
    write_json(outdir / "fan.json", d)
    write_profiles(sol, times, grid, outdir / "profile.csv")
    print(f"riemann: waves {', '.join(fan.kinds) or 'none'}")
    return EXIT_OK


def _scenario_outputs(sol, times, grid, tol, outdir):
    _check_times(sol, times)
    write_profiles(sol, times, grid, outdir / "profile.csv")
    write_atoms(sol, times, outdir / "atoms.csv")
    write_norms(sol, times, tol, outdir / "norms.csv")
    write_entropy(sol, times, outdir / "entropy.csv")


def cmd_collapse(args):
    cp, base = load_config(args.config, "collapse")
    law = law_from_config(section(cp, "law"), base)
    sec = section(cp, "collapse")
    times, grid, tol, outdir = run_settings(args, cp)
    sol = collapse_solution(law, getf(sec, "h_left"), getf(sec, "h_right"), getf(sec, "u_minus"),
                            getf(sec, "u_plus"), _domain(sec, -3.0, 3.0),
                            (getf(sec, "t_min", -1.0), getf(sec, "t_max", 1.0)))
    _scenario_outputs(sol, times, grid, tol, outdir)
    print(f"collapse: {sol.case}, {len(times)} times")
    return EXIT_OK


def cmd_vrp(args):
    cp, base = load_config(args.config, "vrp")
    law = law_from_config(section(cp, "law"), base)
    sec = section(cp, "vrp")
    times, grid, tol, outdir = run_settings(args, cp)
    left = SymState(getf(sec, "h_left"), getf(sec, "u_left"))
    right = SymState(getf(sec, "h_right"), getf(sec, "u_right"))
    sol = vacuum_riemann_solve(law, left, right, getf(sec, "w0"), _domain(sec, -1.0, 1.0),
                               getf(sec, "t_end", 1.0))
    _scenario_outputs(sol, times, grid, tol, outdir)
    T = getattr(sol, "T", math.inf)
    print(f"vrp: atom closes at T = {fmt(T)}" if math.isfinite(T) else "vrp: atom never closes")
    return EXIT_OK


def cmd_offcenter(args):
    cp, base = load_config(args.config, "offcenter")
    law = law_from_config(section(cp, "law"), base)
    sec = section(cp, "offcenter")
    times, grid, tol, outdir = run_settings(args, cp)
    t_c = getf(sec, "t_c", 1.0)
    sol = offcenter_solution(law, getf(sec, "h_left", 1.0), getf(sec, "u_minus", 1.0),
                             getf(sec, "u_plus", -1.0), getf(sec, "h_right", 1.5), t_c,
                             _domain(sec, -2.0, 4.0), getf(sec, "t_min", -0.5 * t_c),
                             z_max=getf(sec, "z_max", 1e6))
    _scenario_outputs(sol, times, grid, tol, outdir)
    n = int(cp["output"].get("shock_samples", 200)) if cp.has_section("output") else 200
    write_shock_curve(sol, n, outdir / "shock_curve.csv")
    print(f"offcenter: A = {fmt(sol.A)}, shock exits at t = {fmt(sol.t_exit)}")
    return EXIT_OK


def write_shock_curve(sol: OffCenterSolution, n, path):
    """Shock inside the rarefaction from the collapse to its exit, by increasing h."""
    c = sol.curve
    z_hi = 1e6 if not c.z_max else c.z_max
    zs = np.geomspace(max(sol.z_exit, 1.0 + 1e-9), z_hi, n)[::-1]
    rows = []
    for z in zs:
        t = float(c.t(z)) - sol.t_c
        rows.append((float(z), float(c.h(z)), t, float(c.x(z)), float(c.sigma(z))))
    write_csv(path, ["z", "h", "t", "x", "sigma"], rows)


def _scenario_by_id(name):
    from .verify import nonphysical_solution, solution_from_dict
    from .thermo import GammaLaw
    law = GammaLaw(3.0)
    if name == "collapse":
        sol = collapse_solution(law, 1.0, 1.0, 1.0, -1.0, t_range=(-0.5, 0.5))
    elif name == "vrp":
        sol = vacuum_riemann_solve(law, SymState(1.0, -0.5), SymState(1.0, 0.5), 0.5, (-2.0, 2.0), 1.0)
    elif name == "riemann":
        sol = FanSolution(riemann_solve(law, SymState(1.0, 1.0), SymState(1.0, -1.0)), (-3.0, 3.0), 1.0)
    elif name == "offcenter":
        sol = offcenter_solution(law)
    elif name == "nonphysical":
        sol = nonphysical_solution(law)
    else:
        with open(resolve_config(name), encoding="utf-8") as f:
            sol = solution_from_dict(json.load(f))
    return sol, default_times(sol)


def default_times(sol):
    """Three interior times, avoiding interaction events."""
    lo, hi = sol.valid_time
    ts = [lo + (hi - lo) * k / 8 for k in (2, 3, 5, 6)]
    return [t for t in ts if t not in sol.events][:3]


def cmd_verify(args):
    from .verify import solution_from_dict, verify_solution
    cp = None
    if args.config:
        cp, _ = load_config(args.config, None)
    target = args.solution or args.scenario
    if target is None and cp is not None and cp.has_section("verify"):
        target = cp["verify"].get("solution") or cp["verify"].get("scenario")
    if target is None:
        raise ConfigError("verify needs --scenario or --solution")
    if args.solution:
        with open(resolve_config(args.solution), encoding="utf-8") as f:
            sol = solution_from_dict(json.load(f))
        times = default_times(sol)
    else:
        sol, times = _scenario_by_id(target)
    if args.times:
        times = parse_times(args.times)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = {"target": str(target), "times": times}
    rep = verify_solution(sol, times, name=str(Path(str(target)).stem), config=cfg)
    d = rep.to_dict()
    d["summary"] = rep.summary()
    write_json(outdir / "report.json", d)
    print(rep.summary())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_elastic(args):
    from .elasticity import crack_report, stress_law_from_config
    cp, base = load_config(args.config, "elastic")
    law = stress_law_from_config(section(cp, "law"), base)
    sec = section(cp, "elastic")
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    t = parse_times(args.times)[0] if args.times else getf(sec, "t", 1.0)
    rep = crack_report(law, getf(sec, "lambda"), getf(sec, "alpha"), t)
    write_json(outdir / "crack_report.json", rep)
    verdict = "admissible" if rep["admissible"] else f"inadmissible (L_tau = {fmt(rep['L_tau'])})"
    print(f"elastic: theta = {fmt(rep['theta'])}, crack mass = {fmt(rep['crack_mass'])}, {verdict}")
    return EXIT_OK


COMMANDS = {"riemann": cmd_riemann, "collapse": cmd_collapse, "offcenter": cmd_offcenter,
            "vrp": cmd_vrp, "verify": cmd_verify, "elastic": cmd_elastic}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="INI config file, or the name of a bundled example")
    common.add_argument("--out-dir", default=argparse.SUPPRESS, help="output directory (default: .)")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="quadrature tolerance for norms (default 1e-10)")
    common.add_argument("--times", default=argparse.SUPPRESS,
                        help="sample times: comma list or start:step:end")
    common.add_argument("--grid", type=int, default=argparse.SUPPRESS,
                        help="number of profile grid points")

    p = argparse.ArgumentParser(prog="lagvac", parents=[common],
                                description="Vacuum solutions of Lagrangian gas dynamics and "
                                            "elastodynamics with fracture.")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {"riemann": "solve a Riemann problem (profile.csv, fan.json)",
             "collapse": "vacuum collapse between two compressions",
             "offcenter": "collapse followed by a shock through a rarefaction",
             "vrp": "vacuum Riemann problem with an initial atom",
             "verify": "check a solution: weak* residual, jump conditions, entropy, consistency",
             "elastic": "crack opening in a softening elastic bar (crack_report.json)"}
    for name, text in helps.items():
        sp = sub.add_parser(name, parents=[common], help=text, description=text)
        if name == "verify":
            sp.add_argument("--scenario", default=None,
                            help="collapse, vrp, riemann, offcenter, nonphysical or a bundled fixture")
            sp.add_argument("--solution", default=None, help="piecewise-constant solution JSON")
    return p


def main(argv=None):
    level = os.environ.get("LAGVAC_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    for key, default in (("config", None), ("out_dir", "."), ("tol", None), ("times", None),
                         ("grid", None)):
        if not hasattr(args, key):
            setattr(args, key, default)
    try:
        return COMMANDS[args.command](args)
    except (LagvacError, OSError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
