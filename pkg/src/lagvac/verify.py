"""Independent checks of measure-valued solutions.

* ``weakstar_residual``: pairs the solution with compactly supported test
  functions and integrates by parts in time,

      R1 = int eta' <V, phi> dt - int eta <u, phi'> dt,
      R2 = int eta' <u, phi> dt + int eta <p, phi'> dt,

  which vanish for weak* solutions.  Atoms enter <V, phi> as w phi(X).
* ``check_generalized_rh`` / ``check_euler_rh``: jump relations at every
  discontinuity, with X' and w' from finite differences.
* ``entropy_audit``: sign of the entropy atoms plus the smooth-region
  entropy equality.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, EventTimeError
from .measure import (ConsistencyResult, Density, RadonMeasure, consistency_check,
                      constant_piece)
from .quadrature import integrate
from .solution import DiscCurve, PiecewiseSolution, constant_region, straight
from .thermo import SymState, law_from_config, law_to_dict
from .waves import entropy_mass, rh_residuals

RH_TOL = 1e-9
EQUATION_TOL = 1e-6
ENTROPY_TOL = 1e-12


# --------------------------------------------------------------------------
# test functions


def bump(s):
    """(1 - s^2)^4 on |s| < 1: compact support, three continuous derivatives."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    return np.where(inside, (1.0 - s * s) ** 4, 0.0)


def dbump(s):
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    return np.where(inside, -8.0 * s * (1.0 - s * s) ** 3, 0.0)


@dataclass
class TestFunctionFamily:
    """Spatial bumps phi((x - c)/w) times temporal windows eta((t - m)/l)."""

    centers: np.ndarray
    widths: np.ndarray
    windows: list

    __test__ = False  # not a pytest class

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float)
        self.widths = np.asarray(self.widths, dtype=float)
        if self.centers.shape != self.widths.shape or np.any(self.widths <= 0):
            raise DomainError("bump centers and widths must match and widths be > 0")
        for t1, t2 in self.windows:
            if not t2 > t1:
                raise DomainError(f"empty time window ({t1}, {t2})")

    @property
    def size(self):
        return self.centers.size * len(self.windows)

    @property
    def support(self):
        return float(np.min(self.centers - self.widths)), float(np.max(self.centers + self.widths))

    def phi(self, x):
        return bump((x[None, :] - self.centers[:, None]) / self.widths[:, None])

    def dphi(self, x):
        return dbump((x[None, :] - self.centers[:, None]) / self.widths[:, None]) / self.widths[:, None]

    @staticmethod
    def eta(t, window):
        t1, t2 = window
        m, l = 0.5 * (t1 + t2), 0.5 * (t2 - t1)
        return bump((t - m) / l), dbump((t - m) / l) / l

    def check_inside(self, domain, valid_time):
        lo, hi = self.support
        if not (domain[0] < lo and hi < domain[1]):
            raise DomainError(f"test-function support [{lo}, {hi}] not inside domain {domain}")
        for t1, t2 in self.windows:
            if not (valid_time[0] <= t1 and t2 <= valid_time[1]):
                raise DomainError(f"window ({t1}, {t2}) outside valid time {valid_time}")


def default_family(sol, windows=None, n_windows=3):
    """3 widths x 4 centers around the discontinuities, times 3 windows."""
    t_lo, t_hi = sol.valid_time
    if windows is None:
        if not (math.isfinite(t_lo) and math.isfinite(t_hi)):
            raise DomainError("give explicit windows for an unbounded time interval")
        span = t_hi - t_lo
        starts = np.linspace(t_lo + 0.05 * span, t_hi - 0.45 * span, n_windows)
        windows = [(float(s), float(s + 0.4 * span)) for s in starts]
    xs = []
    for t1, t2 in windows:
        tm = 0.5 * (t1 + t2)
        xs += [float(c.X(tm)) for c in sol.curves if c.active(tm)]
    a, b = sol.domain
    x_mid = float(np.median(xs)) if xs else 0.5 * (a + b)
    room = min(x_mid - a, b - x_mid)
    centers, widths = [], []
    for frac in (0.2, 0.35, 0.5):
        w = frac * room
        for off in (-0.75, -0.25, 0.25, 0.75):
            centers.append(x_mid + off * w)
            widths.append(w)
    return TestFunctionFamily(np.array(centers), np.array(widths), list(windows))


# --------------------------------------------------------------------------
# snapshots: what the pairing needs from a solution at one time


@dataclass
class Segment:
    x0: float
    x1: float
    density: object      # (y, origin) -> V density
    u: object            # (y, origin) -> velocity
    p: object            # (y, origin) -> flux in the momentum equation
    singular: tuple = (False, False)


@dataclass
class Snapshot:
    segments: list
    atoms: list          # (x, w, flux_weight)


def snapshot_of(sol: PiecewiseSolution, t) -> Snapshot:
    """Snapshot of a p-system solution: V, u and p = P(Pi V); atoms carry no pressure."""
    if hasattr(sol, "snapshot"):
        return sol.snapshot(t)
    law = sol.law
    segs = []
    for r in sol._regions(t):
        piece = r.piece(r.x0, r.x1)

        def uf(y, o, r=r):
            return r.hu(y, o)[1]

        def pf(y, o, r=r):
            return np.asarray(law.p(r.hu(y, o)[0]), dtype=float)

        segs.append(Segment(r.x0, r.x1, piece.evaluate, uf, pf, piece.singular))
    atoms = [(float(c.X(t)), c.weight(t), 0.0) for c in sol.active_curves(t) if c.weight(t) > 0]
    return Snapshot(segs, atoms)


def pairings(snap: Snapshot, fam: TestFunctionFamily, tol=1e-12):
    """<V, phi>, <u, phi'>, <u, phi>, <p, phi'> for every bump (4 x K array)."""
    K = fam.centers.size
    lo, hi = fam.support
    out = np.zeros((4, K))
    for seg in snap.segments:
        a, b = max(seg.x0, lo), min(seg.x1, hi)
        if not b > a:
            continue
        left = seg.singular[0] and a == seg.x0
        right = seg.singular[1] and b == seg.x1
        anchor = b if right and not left else a

        def f(y, o=anchor, seg=seg):
            x = o + y
            ph, dph = fam.phi(x), fam.dphi(x)
            v = seg.density(y, o)
            u = seg.u(y, o)
            p = seg.p(y, o)
            return np.concatenate([ph * v, dph * u, ph * u, dph * p])

        if left and right:
            m = 0.5 * (a + b)
            parts = [integrate(lambda y: f(y, a), 0.0, m - a, tol=tol, singular=(True, False)).value,
                     integrate(lambda y: f(y, b), m - b, 0.0, tol=tol, singular=(False, True)).value]
            val = parts[0] + parts[1]
        else:
            val = integrate(f, a - anchor, b - anchor, tol=tol, singular=(left, right)).value
        out += np.asarray(val).reshape(4, K)
    for x, w, pw in snap.atoms:
        xx = np.array([x])
        out[0] += w * fam.phi(xx)[:, 0]
        out[3] += pw * fam.dphi(xx)[:, 0]
    return out


@dataclass
class WeakStarResult:
    levels: list          # number of time steps per window at each level
    tolerances: list      # (time step)^2, the nominal accuracy of each level
    max_residual: list    # per level
    slope: float | None
    table: list           # finest level: per (bump, window) R1, R2

    @property
    def residual(self):
        return self.max_residual[-1]

    def passed(self, tol=EQUATION_TOL):
        return self.residual <= tol

    def to_dict(self):
        return asdict(self)


def time_nodes(window, events, panels, order=4):
    """Composite Gauss-Legendre nodes on a window, split at events.

    Pairings are only continuous at interaction times, so panels never
    straddle one.  Returns (nodes, weights, largest panel width).
    """
    gx, gw = np.polynomial.legendre.leggauss(order)
    t1, t2 = window
    cuts = [t1] + sorted(e for e in events if t1 < e < t2) + [t2]
    nodes, weights, hmax = [], [], 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = max(1, int(round(panels * (b - a) / (t2 - t1))))
        edges = np.linspace(a, b, n + 1)
        h = (b - a) / n
        hmax = max(hmax, h)
        for lo in edges[:-1]:
            nodes += list(lo + 0.5 * h * (gx + 1.0))
            weights += list(0.5 * h * gw)
    return np.array(nodes), np.array(weights), hmax


def weakstar_residual(sol, family: TestFunctionFamily | None = None, levels=(4, 8, 16),
                      spatial_tol=1e-12, floor=1e-11, order=4) -> WeakStarResult:
    """Weak* residuals of both equations over a test-function family.

    Each level integrates in time with the given number of Gauss panels
    per window; its nominal tolerance is (panel width)^4, the order of the
    rule.  The slope is the log-log fit of max residual against tolerance
    over the levels whose residual is above ``floor`` (None when fewer
    than two are).
    """
    fam = family or default_family(sol)
    fam.check_inside(sol.domain, sol.valid_time)
    K = fam.centers.size
    events = getattr(sol, "events", ())
    cache = {}
    maxres, tols, table = [], [], []
    for N in levels:
        R = np.zeros((2, len(fam.windows), K))
        hmax = 0.0
        for j, win in enumerate(fam.windows):
            ts, ws, h = time_nodes(win, events, N, order)
            hmax = max(hmax, h)
            for t, wt in zip(ts, ws):
                e, de = fam.eta(t, win)
                key = float(t)
                if key not in cache:
                    cache[key] = pairings(snapshot_of(sol, t), fam, spatial_tol)
                P = cache[key]
                R[0, j] += wt * (de * P[0] - e * P[1])
                R[1, j] += wt * (de * P[2] + e * P[3])
        maxres.append(float(np.max(np.abs(R))))
        tols.append(hmax ** 4)
        table = [{"bump": k, "center": float(fam.centers[k]), "width": float(fam.widths[k]),
                  "window": list(fam.windows[j]), "R1": float(R[0, j, k]), "R2": float(R[1, j, k])}
                 for j in range(len(fam.windows)) for k in range(K)]
    use = [(tl, r) for tl, r in zip(tols, maxres) if r > floor]
    slope = None
    if len(use) >= 2:
        x = np.log([u[0] for u in use])
        y = np.log([u[1] for u in use])
        slope = float(np.polyfit(x, y, 1)[0])
    return WeakStarResult(list(levels), tols, maxres, slope, table)


# --------------------------------------------------------------------------
# jump conditions


def fd_derivative(f, t, step):
    return (-f(t + 2 * step) + 8 * f(t + step) - 8 * f(t - step) + f(t - 2 * step)) / (12 * step)


def _step(curve: DiscCurve, t, base=1e-3):
    lo, hi = curve.t_range
    gap = min(t - lo, hi - t)
    return min(base, 0.2 * gap)


def curve_derivatives(curve: DiscCurve, t, exact=False):
    """(X', w') by fourth-order central differences unless exact ones are requested."""
    if exact and curve.dX is not None:
        dX = float(curve.dX(t))
    else:
        dX = fd_derivative(lambda s: float(curve.X(s)), t, _step(curve, t))
    if curve.w is None:
        dw = 0.0
    elif exact and curve.dw is not None:
        dw = float(curve.dw(t))
    else:
        dw = fd_derivative(curve.weight, t, _step(curve, t))
    return dX, dw


def check_generalized_rh(sol: PiecewiseSolution, times, exact=False):
    """Residuals |X'[u] - [p]|, |[u] - w' + X'[v]|, |w X'| per curve and time."""
    rows = []
    for t in times:
        if any(abs(t - e) <= 1e-12 * max(1.0, abs(e)) for e in sol.events):
            raise EventTimeError(f"t={t} is an interaction time")
        for c in sol.active_curves(t):
            left, right = sol.curve_states(t, c)
            dX, dw = curve_derivatives(c, t, exact)
            w = c.weight(t)
            r1, r2, r3 = rh_residuals(sol.law, left, right, dX, w, dw)
            rows.append({"curve": c.name, "kind": c.kind, "t": float(t), "X": float(c.X(t)),
                         "dX": float(dX), "w": float(w), "dw": float(dw),
                         "r_momentum": float(r1), "r_mass": float(r2), "r_wX": float(r3),
                         "max": float(max(r1, r2, r3))})
    return rows


def rh_failures(rows, tol=RH_TOL):
    return [r for r in rows if not r["max"] <= tol]


# --------------------------------------------------------------------------
# entropy


def entropy_audit(sol: PiecewiseSolution, times, tol=ENTROPY_TOL, interior_points=5,
                  interior_tol=1e-8, exact=False):
    """Entropy violations: positive atoms at curves and smooth-region residuals.

    Returns (violations, atoms, interior_max); a violation is an atom whose
    mass exceeds tol (relative to the jump size) or a smooth-region point
    where (u^2/2 + eps)_t + (u p)_x is not zero to interior_tol.
    """
    law = sol.law
    violations, atoms, interior_max = [], [], 0.0
    for t in times:
        for c in sol.active_curves(t):
            left, right = sol.curve_states(t, c)
            dX, _ = curve_derivatives(c, t, exact)
            if c.kind == "vacuum":
                dX = 0.0 if abs(dX) < 1e-13 else dX
            mass = float(entropy_mass(law, left, right, dX))
            scale = max(1.0, abs(left[1]), abs(right[1])) ** 2
            rec = {"t": float(t), "curve": c.name, "kind": c.kind, "x": float(c.X(t)), "mass": mass}
            atoms.append(rec)
            if mass > tol * scale:
                violations.append(rec)
        if interior_points:
            r = _interior_entropy(sol, t, interior_points)
            interior_max = max(interior_max, r)
            if r > interior_tol:
                violations.append({"t": float(t), "curve": None, "kind": "interior", "x": None,
                                   "mass": r})
    return violations, atoms, interior_max


def _interior_entropy(sol, t, n, step=2.5e-4):
    law = sol.law
    worst = 0.0
    lo_t, hi_t = sol.valid_time
    if not (lo_t + 3 * step < t < hi_t - 3 * step):
        return 0.0
    for r in sol._regions(t):
        if r.kind == "constant" or not (math.isfinite(r.x0) and math.isfinite(r.x1)):
            continue
        width = r.x1 - r.x0
        for x in r.x0 + width * (np.arange(n) + 0.5) / n:
            d = min(x - r.x0, r.x1 - x)
            hx = min(step, 0.002 * d)
            ht = hx

            def ent(tt, xx):
                h, u = sol.state(tt, xx)
                return 0.5 * u * u + law.eps(h)

            def flux(tt, xx):
                h, u = sol.state(tt, xx)
                return u * law.p(h)

            try:
                et = fd_derivative(lambda s: ent(s, x), t, ht)
                fx = fd_derivative(lambda s: flux(t, s), x, hx)
            except Exception:
                continue
            worst = max(worst, abs(et + fx))
    return worst


# --------------------------------------------------------------------------
# piecewise-constant solutions built from data (fixtures, JSON input)


class PiecewiseConstantSolution(PiecewiseSolution):
    """Constant states separated by straight curves x = x0 + speed (t - t0).

    Curves may carry atoms of weight w0 + rate (t - t0).  States are (h, u)
    pairs; a state given by its volume is converted with the law.
    """

    kind = "piecewise-constant"

    def __init__(self, law, domain, valid_time, states, curves, t0=0.0, name="data"):
        self.states = [s if isinstance(s, SymState) else SymState(*s) for s in states]
        if len(self.states) != len(curves) + 1:
            raise DomainError("need one more state than curves")
        self.t0 = float(t0)
        self.name = name
        self.lines = [dict(c) for c in curves]
        dcs = []
        for k, c in enumerate(self.lines):
            x0, sp = float(c["x0"]), float(c.get("speed", 0.0))
            w0, rate = float(c.get("w0", 0.0)), float(c.get("rate", 0.0))
            kind = c.get("kind") or ("vacuum" if (w0 > 0 or rate != 0) else "shock")
            wf = (lambda t, w0=w0, rate=rate: w0 + rate * (t - self.t0)) if (w0 or rate) else None
            dcs.append(DiscCurve(c.get("name", f"curve{k}"), kind, straight(x0, self.t0, sp),
                                 (-math.inf, math.inf), w=wf, dX=lambda t, sp=sp: sp,
                                 dw=(lambda t, rate=rate: rate) if wf else None))
        super().__init__(law, domain, valid_time, dcs, ())

    def regions(self, t):
        xs = [-math.inf] + [float(c.X(t)) for c in self.curves] + [math.inf]
        return [constant_region(xs[k], xs[k + 1], f"state{k}", s, self.law)
                for k, s in enumerate(self.states)]

    def to_dict(self):
        return {"kind": "piecewise-constant", "name": self.name, "law": law_to_dict(self.law),
                "domain": list(self.domain), "valid_time": list(self.valid_time), "t0": self.t0,
                "states": [{"h": s.h, "u": s.u} for s in self.states], "curves": self.lines}


def solution_from_dict(d) -> PiecewiseConstantSolution:
    """Build a piecewise-constant solution from its JSON description.

    States are given either by ``h`` or by the specific volume ``v``.
    """
    law = law_from_config(d.get("law", {"law": "gamma", "gamma": 3.0}))
    states = []
    for s in d["states"]:
        h = s["h"] if "h" in s else law.h_of_v(float(s["v"]))
        states.append(SymState(float(h), float(s["u"])))
    return PiecewiseConstantSolution(law, tuple(d["domain"]), tuple(d["valid_time"]), states,
                                     d.get("curves", []), d.get("t0", 0.0), d.get("name", "data"))


def nonphysical_solution(law, v0=1.0, u_left=-0.5, u_right=0.5, w0=0.5, domain=(-1.0, 1.0),
                         valid_time=(0.0, 1.0)):
    """V = iota(v0) + (w0 + [u] t) delta_0 with u piecewise constant.

    It satisfies the equations in the weak* sense, but the density stays
    finite next to the atom, so the medium is not consistent.
    """
    h0 = law.h_of_v(v0)
    return PiecewiseConstantSolution(
        law, domain, valid_time, [SymState(h0, u_left), SymState(h0, u_right)],
        [{"name": "atom", "x0": 0.0, "speed": 0.0, "w0": w0, "rate": u_right - u_left,
          "kind": "vacuum"}], name="nonphysical")


# --------------------------------------------------------------------------
# compressible Euler (3x3)


@dataclass(frozen=True)
class PolytropicGas:
    """E(v, s) = A/(gamma-1) v^(1-gamma) e^(s/c_v), P = A v^-gamma e^(s/c_v)."""

    A: float = 1.0
    gamma: float = 1.4
    c_v: float = 1.0

    def P(self, v, s):
        return 0.0 if math.isinf(v) else self.A * v ** (-self.gamma) * math.exp(s / self.c_v)

    def E(self, v, s):
        if math.isinf(v):
            return 0.0
        return self.A / (self.gamma - 1.0) * v ** (1.0 - self.gamma) * math.exp(s / self.c_v)


@dataclass
class EulerState:
    """(V, u, s) at one time: the volume measure plus one-sided fields."""

    V: RadonMeasure
    u: object
    s: object
    eos: PolytropicGas


@dataclass
class EulerJump:
    """Straight jump x = x0 + speed t between constant (v, u, s) states."""

    left: tuple
    right: tuple
    speed: float
    x0: float = 0.0
    w0: float = 0.0
    rate: float = 0.0
    name: str = "jump"

    def X(self, t):
        return self.x0 + self.speed * t

    def w(self, t):
        return self.w0 + self.rate * t


class EulerHistory:
    """Constant states separated by straight jumps (for the 3x3 checks)."""

    def __init__(self, eos: PolytropicGas, jumps, domain=(-1.0, 1.0)):
        self.eos = eos
        self.jumps = list(jumps)
        self.domain = domain

    def state(self, t) -> EulerState:
        pieces, atoms = [], []
        a, b = self.domain
        xs = [a] + [j.X(t) for j in self.jumps] + [b]
        vols = [self.jumps[0].left[0]] + [j.right[0] for j in self.jumps]
        for k in range(len(vols)):
            if xs[k + 1] > xs[k] and math.isfinite(vols[k]):
                pieces.append(constant_piece(xs[k], xs[k + 1], vols[k]))
        for j in self.jumps:
            if j.w(t) > 0:
                atoms.append((j.X(t), j.w(t)))
        us = [self.jumps[0].left[1]] + [j.right[1] for j in self.jumps]
        ss = [self.jumps[0].left[2]] + [j.right[2] for j in self.jumps]
        V = RadonMeasure(self.domain, Density(tuple(pieces)), tuple(atoms)) if pieces else None
        return EulerState(V, list(zip(xs[:-1], xs[1:], us)), list(zip(xs[:-1], xs[1:], ss)), self.eos)


def classify_jump(left, right, dX, tol=1e-12) -> str:
    """shock | contact | vacuum: [u] = 0 with finite v is a contact, X' = 0 with [u] != 0 a vacuum."""
    du = right[1] - left[1]
    finite = math.isfinite(left[0]) and math.isfinite(right[0])
    scale = max(1.0, abs(left[1]), abs(right[1]))
    if abs(du) <= tol * scale and finite:
        return "contact"
    if abs(dX) <= tol * scale and abs(du) > tol * scale:
        return "vacuum"
    return "shock"


def euler_jump_residuals(eos: PolytropicGas, left, right, dX, w=0.0, dw=0.0):
    (vl, ul, sl), (vr, ur, sr) = left, right
    pl, pr = eos.P(vl, sl), eos.P(vr, sr)
    el, er = eos.E(vl, sl), eos.E(vr, sr)
    du = ur - ul
    mom = dX * du - (pr - pl)
    energy = dX * (0.5 * ur * ur + er - 0.5 * ul * ul - el) - (ur * pr - ul * pl)
    if dX == 0.0:
        xv = 0.0
    elif math.isfinite(vl) and math.isfinite(vr):
        xv = dX * (vr - vl)
    else:
        xv = math.inf
    mass = du - dw + xv
    return abs(mom), abs(energy), abs(mass), abs(w * dX)


def check_euler_rh(history: EulerHistory, times):
    """Four jump residuals, a classification and the entropy atom per jump and time.

    The entropy atom is reported as -s' = X'[s] so that admissible jumps
    have atoms <= 0: shocks raise the specific entropy of the gas crossing
    them, contacts and vacuums carry none.
    """
    rows = []
    for t in times:
        for j in history.jumps:
            step = 1e-3
            dX = fd_derivative(j.X, t, step)
            dw = fd_derivative(j.w, t, step)
            if abs(dX) < 1e-13:
                dX = 0.0
            res = euler_jump_residuals(history.eos, j.left, j.right, dX, j.w(t), dw)
            label = classify_jump(j.left, j.right, dX)
            ent = dX * (j.right[2] - j.left[2]) if label == "shock" else 0.0
            rows.append({"jump": j.name, "t": float(t), "class": label, "dX": float(dX),
                         "r_momentum": res[0], "r_energy": res[1], "r_mass": res[2], "r_wX": res[3],
                         "max": float(max(res)), "entropy_atom": float(ent)})
    return rows


def euler_shock(eos: PolytropicGas, ahead, v_behind, family="backward"):
    """Admissible Euler shock from the full Hugoniot (energy jump included).

    ``ahead`` is (v, u, s); the behind pressure follows from
    e1 - e0 + (p0 + p1)(v1 - v0)/2 = 0 with e = p v/(gamma - 1).
    """
    v0, u0, s0 = ahead
    g = eos.gamma
    p0 = eos.P(v0, s0)
    v1 = float(v_behind)
    if not v1 < v0:
        raise DomainError("compressive shock needs v_behind < v_ahead")
    # (p1 v1 - p0 v0)/(g-1) + (p0 + p1)(v1 - v0)/2 = 0, linear in p1
    p1 = p0 * (v0 / (g - 1.0) - 0.5 * (v1 - v0)) / (v1 / (g - 1.0) + 0.5 * (v1 - v0))
    if not p1 > p0:
        raise DomainError("volume ratio outside the Hugoniot range")
    s1 = eos.c_v * math.log(p1 * v1 ** g / eos.A)
    sigma = math.sqrt((p1 - p0) / (v0 - v1))
    du = math.sqrt((p1 - p0) * (v0 - v1))
    if family == "backward":
        return EulerJump((v0, u0, s0), (v1, u0 - du, s1), -sigma, name="shock")
    return EulerJump((v1, u0 + du, s1), (v0, u0, s0), sigma, name="shock")


def isentropic_euler_shock(eos: PolytropicGas, law, ahead_h, z, u_ahead=0.0):
    """Backward 2x2 shock at constant s, lifted to (v, u, s) states.

    It satisfies the mass and momentum jumps but not the energy jump: the
    energy residual equals minus its p-system entropy atom.
    """
    from .waves import shock_from_ratio
    w = shock_from_ratio(law, ahead_h, z, "backward", u_ahead)
    s = eos.c_v * math.log(law.A / eos.A) if hasattr(law, "A") else 0.0
    return EulerJump((law.v(w.left.h), w.left.u, s), (law.v(w.right.h), w.right.u, s),
                     w.speed_range[0], name="isentropic-shock"), w


# --------------------------------------------------------------------------
# report


@dataclass
class VerificationReport:
    name: str
    config: dict
    weakstar: dict | None = None
    rh: list = field(default_factory=list)
    entropy_violations: list = field(default_factory=list)
    entropy_atoms: list = field(default_factory=list)
    consistency: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)

    @property
    def config_hash(self):
        blob = json.dumps(self.config, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @property
    def passed(self):
        return all(v == "PASS" for v in self.verdicts.values())

    @property
    def max_rh(self):
        return max((r["max"] for r in self.rh), default=0.0)

    def to_dict(self):
        return {"name": self.name, "config": self.config, "config_hash": self.config_hash,
                "verdicts": self.verdicts, "weakstar": self.weakstar, "rh": self.rh,
                "max_rh_residual": self.max_rh, "entropy_violations": self.entropy_violations,
                "entropy_atoms": self.entropy_atoms, "consistency": self.consistency}

    def summary(self):
        lines = [f"verification of {self.name} (config {self.config_hash})"]
        for key in ("equation", "RH", "entropy", "consistency"):
            if key not in self.verdicts:
                continue
            line = f"{key}: {self.verdicts[key]}"
            if key == "equation" and self.weakstar:
                ws = self.weakstar
                slope = "n/a" if ws["slope"] is None else f"{ws['slope']:.3f}"
                line += f" (max residual {ws['max_residual'][-1]:.3e}, slope {slope})"
            if key == "RH":
                bad = rh_failures(self.rh)
                line += f" (max residual {self.max_rh:.3e})"
                if bad:
                    worst = max(bad, key=lambda r: r["max"])
                    line += f" at curve {worst['curve']} t={worst['t']:.6g}"
            if key == "entropy" and self.entropy_violations:
                v = self.entropy_violations[0]
                line += f" (first violation: {v['curve']} t={v['t']:.6g} mass={v['mass']:.3e})"
            if key == "consistency":
                bad = [c for c in self.consistency if not c["consistent"]]
                if bad:
                    line += f" (atom {bad[0]['atom_index']} at x={bad[0]['x']:.6g}, t={bad[0]['t']:.6g})"
            lines.append(line)
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def verify_solution(sol: PiecewiseSolution, times, name="solution", family=None, levels=(4, 8, 16),
                    config=None, equation=True) -> VerificationReport:
    """Run every check on one solution."""
    rep = VerificationReport(name, dict(config or {}))
    if equation:
        ws = weakstar_residual(sol, family, levels)
        rep.weakstar = ws.to_dict()
        rep.verdicts["equation"] = "PASS" if ws.passed() else "FAIL"
    rep.rh = check_generalized_rh(sol, times)
    rep.verdicts["RH"] = "PASS" if not rh_failures(rep.rh) else "FAIL"
    viol, atoms, _ = entropy_audit(sol, times)
    rep.entropy_violations, rep.entropy_atoms = viol, atoms
    rep.verdicts["entropy"] = "PASS" if not viol else "FAIL"
    ok = True
    for t in times:
        res: ConsistencyResult = consistency_check(sol.measure(t))
        d = res.to_dict()
        d["t"] = float(t)
        rep.consistency.append(d)
        ok &= res.consistent
    rep.verdicts["consistency"] = "PASS" if ok else "FAIL"
    return rep
