"""Elementary waves and Riemann solvers for the p-system in (h, u).

Conventions: a backward wave moves with negative speed and has its ahead
state on the left; a forward wave has its ahead state on the right.  Across
a backward simple wave u + h is constant, across a forward one u - h is.
Shocks satisfy sigma^2 = [p]/[-v] and u_R - u_L = -sqrt([p][-v]) < 0.

For gamma-law gases, with z = h_behind/h_ahead and m = (beta+1)/2,

    [u] = -h z^m r(z),   sigma = c(h) z^m s(z),

where q_n(z) = (1 - z^-n)/n, r = sqrt(q_{beta+1} q_{beta-1}) and
s = sqrt(q_{beta+1}/q_{beta-1}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidShock, NumericalError, UnsupportedData
from .measure import simple_wave_piece
from .solution import DiscCurve, PiecewiseSolution, Region, constant_region, straight
from .thermo import GammaLaw, GasLaw, SymState

SIGN = {"backward": -1, "forward": 1, "stationary": 0}


def q(n, z):
    """q_n(z) = (1 - z^-n)/n, accurate near z = 1."""
    return -np.expm1(-n * np.log(z)) / n


def r_fn(z, beta):
    return np.sqrt(q(beta + 1.0, z) * q(beta - 1.0, z))


def s_fn(z, beta):
    z = np.asarray(z, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.sqrt(q(beta + 1.0, z) / q(beta - 1.0, z))
    out = np.where(z == 1.0, 1.0, out)
    return float(out) if out.ndim == 0 else out


def shock_jumps(law: GasLaw, h_ahead, h_behind):
    """(|[u]|, sigma) for a compressive jump between two nonvacuum states."""
    if isinstance(law, GammaLaw):
        b = law.beta
        z = h_behind / h_ahead
        zm = z ** ((b + 1.0) / 2.0)
        return h_ahead * zm * r_fn(z, b), law.c(h_ahead) * zm * s_fn(z, b)
    return hugoniot_jumps(law, h_ahead, h_behind)


def hugoniot_jumps(law: GasLaw, h_ahead, h_behind):
    """(|[u]|, sigma) from sigma = sqrt([p]/[-v]) directly."""
    dp = law.p(h_behind) - law.p(h_ahead)
    dv = law.v(h_ahead) - law.v(h_behind)
    if dp == 0.0:
        return 0.0, float(law.c(h_ahead))
    return math.sqrt(abs(dp * dv)), math.sqrt(dp / dv)


@dataclass
class Wave:
    family: str
    kind: str
    left: SymState
    right: SymState
    speed_range: tuple
    center: tuple = (0.0, 0.0)
    atom_rate: float = 0.0
    law: GasLaw | None = field(default=None, repr=False, compare=False)

    @property
    def sign(self):
        return SIGN[self.family]

    @property
    def ahead(self):
        return self.left if self.family == "backward" else self.right

    @property
    def behind(self):
        return self.right if self.family == "backward" else self.left

    @property
    def is_fan(self):
        return self.kind in ("rarefaction", "compression")

    def extent(self, t):
        """Spatial interval covered at time t."""
        t0, x0 = self.center
        dt = t - t0
        a, b = x0 + self.speed_range[0] * dt, x0 + self.speed_range[1] * dt
        return (a, b) if a <= b else (b, a)

    def hu(self, y, origin, t):
        """(h, u) inside a fan at x = origin + y, time t."""
        if not self.is_fan:
            raise ValueError("hu is only defined inside simple waves")
        t0, x0 = self.center
        if self.kind == "compression" and t >= t0:
            raise ValueError(f"compression focuses at t={t0}; no profile at t={t}")
        y = np.asarray(y, dtype=float)
        lam = ((origin - x0) + y) / (t - t0)
        speed = np.clip(self.sign * lam, 0.0, None)
        hs = sorted((self.left.h, self.right.h))
        h = np.clip(np.asarray(self.law.c_inverse(speed), dtype=float), hs[0], hs[1])
        if self.family == "forward":
            u = (self.left.u - self.left.h) + h
        else:
            u = (self.left.u + self.left.h) - h
        return h, u

    def position(self, t):
        t0, x0 = self.center
        return x0 + self.speed_range[0] * (t - t0)

    def to_dict(self):
        d = {"family": self.family, "kind": self.kind,
             "left": {"h": self.left.h, "u": self.left.u},
             "right": {"h": self.right.h, "u": self.right.u},
             "speed_range": list(self.speed_range), "center": list(self.center)}
        if self.kind == "vacuum":
            d["atom_rate"] = self.atom_rate
        return d


def shock_from_ratio(law: GasLaw, h_ahead: float, z: float, family: str, u_ahead: float = 0.0,
                     center=(0.0, 0.0)) -> Wave:
    """Admissible shock with behind state h_ahead*z (z > 1)."""
    if not z > 1.0:
        raise InvalidShock(f"compressive shock needs z > 1, got z={z!r}")
    if not h_ahead > 0.0:
        raise InvalidShock("shock ahead state must be nonvacuum")
    du, sigma = shock_jumps(law, h_ahead, z * h_ahead)
    ahead = SymState(h_ahead, u_ahead)
    if family == "backward":
        behind = SymState(z * h_ahead, u_ahead - du)
        return Wave("backward", "shock", ahead, behind, (-sigma, -sigma), tuple(center), law=law)
    if family == "forward":
        behind = SymState(z * h_ahead, u_ahead + du)
        return Wave("forward", "shock", behind, ahead, (sigma, sigma), tuple(center), law=law)
    raise ValueError(f"family must be backward or forward, got {family!r}")


def jump_wave(law: GasLaw, h_ahead: float, h_behind: float, family: str, u_ahead: float = 0.0,
              center=(0.0, 0.0)) -> Wave:
    """Jump satisfying the two RH conditions for any h_behind, including expansive ones.

    With h_behind < h_ahead the result is an expansion shock: it satisfies
    the Rankine-Hugoniot conditions but violates the entropy inequality.
    """
    du, sigma = hugoniot_jumps(law, h_ahead, h_behind)
    if h_behind < h_ahead:
        du = -du
    ahead = SymState(h_ahead, u_ahead)
    if family == "backward":
        return Wave("backward", "shock", ahead, SymState(h_behind, u_ahead - du),
                    (-sigma, -sigma), tuple(center), law=law)
    return Wave("forward", "shock", SymState(h_behind, u_ahead + du), ahead,
                (sigma, sigma), tuple(center), law=law)


def rarefaction_wave(law: GasLaw, h_behind: float, h_ahead: float, family: str, center=(0.0, 0.0),
                     u_ahead: float = 0.0) -> Wave:
    """Centered simple wave; compressive ordering (h_behind > h_ahead) gives a compression."""
    kind = "rarefaction" if h_behind <= h_ahead else "compression"
    if family == "forward":
        inv = u_ahead - h_ahead
        left, right = SymState(h_behind, inv + h_behind), SymState(h_ahead, u_ahead)
        speeds = (float(law.c(left.h)), float(law.c(right.h)))
    elif family == "backward":
        inv = u_ahead + h_ahead
        left, right = SymState(h_ahead, u_ahead), SymState(h_behind, inv - h_behind)
        speeds = (-float(law.c(left.h)), -float(law.c(right.h)))
    else:
        raise ValueError(f"family must be backward or forward, got {family!r}")
    return Wave(family, kind, left, right, speeds, tuple(center), law=law)


def vacuum_wave(u_minus, u_plus, x0=0.0, t0=0.0, law=None) -> Wave:
    return Wave("stationary", "vacuum", SymState(0.0, u_minus), SymState(0.0, u_plus), (0.0, 0.0),
                (t0, x0), atom_rate=u_plus - u_minus, law=law)


# --------------------------------------------------------------------------
# Riemann problem


@dataclass
class WaveFan:
    """Centered fan: waves ordered left to right with the constant states between."""

    waves: list
    states: list
    center: tuple = (0.0, 0.0)
    law: GasLaw | None = field(default=None, repr=False)
    h_m: float | None = None

    @property
    def kinds(self):
        return [w.kind for w in self.waves]

    @property
    def has_vacuum(self):
        return any(w.kind == "vacuum" for w in self.waves)

    @property
    def atom_rate(self):
        return sum(w.atom_rate for w in self.waves if w.kind == "vacuum")

    def regions(self, t, prefix=""):
        """Regions at time t (> center time), ordered left to right."""
        t0, x0 = self.center
        out = []
        x_prev = -math.inf
        for k, w in enumerate(self.waves):
            xa, xb = w.extent(t)
            st = self.states[k]
            out.append(constant_region(x_prev, xa, f"{prefix}state{k}", st, self.law))
            if w.is_fan and xb > xa:
                out.append(_fan_region(w, xa, xb, t, f"{prefix}{w.family}-{w.kind}{k}"))
            x_prev = xb
        out.append(constant_region(x_prev, math.inf, f"{prefix}state{len(self.waves)}",
                                   self.states[-1], self.law))
        return out

    def to_dict(self):
        d = {"center": list(self.center),
             "states": [{"h": s.h, "u": s.u} for s in self.states],
             "waves": [w.to_dict() for w in self.waves]}
        if self.h_m is not None:
            d["h_m"] = self.h_m
        return d


def _fan_region(w: Wave, xa, xb, t, rid):
    t0, x0 = w.center
    return Region(xa, xb, rid, lambda y, o: w.hu(y, o, t),
                  lambda a, b: simple_wave_piece(a, b, w.law, t, t0, x0, w.sign), w.kind)


def _left_curve(law, left, h):
    if h <= left.h:
        return left.u + left.h - h
    return left.u - shock_jumps(law, left.h, h)[0]


def _right_curve(law, right, h):
    if h <= right.h:
        return right.u - right.h + h
    return right.u + shock_jumps(law, right.h, h)[0]


def riemann_solve(law: GasLaw, left: SymState, right: SymState, center=(0.0, 0.0),
                  rtol: float = 1e-14) -> WaveFan:
    """Exact solution of the Riemann problem with data (left, right)."""
    if left == right:
        return WaveFan([], [left], tuple(center), law)
    gap = (right.u - left.u) - (left.h + right.h)
    if gap >= 0.0:
        waves, states = [], [left]
        u_minus, u_plus = left.u + left.h, right.u - right.h
        if left.h > 0:
            waves.append(rarefaction_wave(law, 0.0, left.h, "backward", center, left.u))
            states.append(SymState(0.0, u_minus))
        waves.append(vacuum_wave(u_minus, u_plus, center[1], center[0], law))
        if right.h > 0:
            states.append(SymState(0.0, u_plus))
            waves.append(rarefaction_wave(law, 0.0, right.h, "forward", center, right.u))
        states.append(right)
        return WaveFan(waves, states, tuple(center), law, 0.0)
    if left.h == 0.0 or right.h == 0.0:
        raise UnsupportedData("compressive data against a vacuum state cannot be resolved")

    phi = lambda h: _left_curve(law, left, h) - _right_curve(law, right, h)
    hi = max(left.h, right.h)
    n = 0
    while phi(hi) > 0.0:
        hi *= 2.0
        n += 1
        if n > 200 or not math.isfinite(hi):
            raise NumericalError("could not bracket the middle state",
                                 {"left": left, "right": right, "h_hi": hi})
    if hasattr(law, "h_max"):
        hi = min(hi, law.h_max)
    try:
        h_m = brentq(phi, 0.0, hi, xtol=1e-300, rtol=max(rtol, 4 * np.finfo(float).eps),
                     maxiter=500)
    except (ValueError, RuntimeError) as exc:
        raise NumericalError(f"middle-state root finding failed: {exc}",
                             {"left": left, "right": right, "bracket": (0.0, hi)}) from exc
    u_m = 0.5 * (_left_curve(law, left, h_m) + _right_curve(law, right, h_m))
    mid = SymState(h_m, u_m)

    waves = []
    if h_m > left.h:
        waves.append(shock_from_ratio(law, left.h, h_m / left.h, "backward", left.u, center))
    elif h_m < left.h:
        waves.append(rarefaction_wave(law, h_m, left.h, "backward", center, left.u))
    if h_m > right.h:
        waves.append(shock_from_ratio(law, right.h, h_m / right.h, "forward", right.u, center))
    elif h_m < right.h:
        waves.append(rarefaction_wave(law, h_m, right.h, "forward", center, right.u))
    states = [left] + [mid] * (len(waves) - 1) + [right]
    # pin the wave endpoints to the solved states
    for k, w in enumerate(waves):
        w.left, w.right = states[k], states[k + 1]
    return WaveFan(waves, states, tuple(center), law, float(h_m))


class FanSolution(PiecewiseSolution):
    """A centered fan as an evaluable solution for t > t0."""

    kind = "riemann"

    def __init__(self, fan: WaveFan, domain=(-1.0, 1.0), t_end=1.0):
        t0, x0 = fan.center
        super().__init__(fan.law, domain, (t0, t_end), fan_curves(fan, (t0, math.inf)), (t0,))
        self.fan = fan

    def regions(self, t):
        t0, x0 = self.fan.center
        if t == t0:
            st = self.fan.states
            return [constant_region(-math.inf, x0, "state0", st[0], self.law),
                    constant_region(x0, math.inf, f"state{len(st) - 1}", st[-1], self.law)]
        return self.fan.regions(t)


def fan_curves(fan: WaveFan, t_range, prefix="", w0=0.0):
    """Discontinuity curves of a fan: one per shock, one per vacuum."""
    t0, x0 = fan.center
    out = []
    for k, w in enumerate(fan.waves):
        if w.kind == "shock":
            s = w.speed_range[0]
            out.append(DiscCurve(f"{prefix}{w.family}-shock{k}", "shock", straight(x0, t0, s),
                                 t_range, dX=lambda t, s=s: s, meta={"wave": w}))
        elif w.kind == "vacuum":
            rate = w.atom_rate
            out.append(DiscCurve(f"{prefix}vacuum{k}", "vacuum", lambda t, x0=x0: x0, t_range,
                                 w=lambda t, rate=rate: w0 + rate * (t - t0),
                                 dX=lambda t: 0.0, dw=lambda t, rate=rate: rate,
                                 meta={"wave": w}))
    return out


# --------------------------------------------------------------------------
# jump relations shared with the verification layer


def jumps(law: GasLaw, left, right):
    """[u], [p], [v], [u^2/2], [eps], [u p] from two (h, u) states; v may be inf."""
    hl, ul = left
    hr, ur = right
    pl, pr = law.p(hl), law.p(hr)
    vl, vr = law.v(hl), law.v(hr)
    el, er = law.eps(hl), law.eps(hr)
    return {"u": ur - ul, "p": pr - pl, "v": vr - vl, "ke": 0.5 * (ur * ur - ul * ul),
            "eps": er - el, "up": ur * pr - ul * pl}


def rh_residuals(law: GasLaw, left, right, dX, w=0.0, dw=0.0):
    """Residuals of X'[u] = [p], [u] = w' - X'[v] and w X' = 0."""
    j = jumps(law, left, right)
    vac = not (math.isfinite(law.v(left[0])) and math.isfinite(law.v(right[0])))
    xv = 0.0 if (vac and dX == 0.0) else dX * j["v"]
    if vac and dX != 0.0:
        xv = math.inf
    return (abs(dX * j["u"] - j["p"]), abs(j["u"] - dw + xv), abs(w * dX))


def entropy_mass(law: GasLaw, left, right, dX):
    """Atom of the entropy production: -X'([u^2/2] + [eps]) + [u p]."""
    j = jumps(law, left, right)
    if dX == 0.0:
        return j["up"]
    return -dX * (j["ke"] + j["eps"]) + j["up"]


class VacuumRiemannSolution(PiecewiseSolution):
    """Riemann data separated by a vacuum atom of initial width w0 > 0.

    Two centered rarefactions to vacuum bound an atom at x0 whose weight
    w(t) = w0 + du t grows at the rate du = u_r - h_r - u_l - h_l.  When
    du < 0 the atom closes at T = -w0/du; the rarefactions then interact
    and no closed form is available, so the solution stops at T.  The
    Riemann fan of the data without the atom is kept as ``outer_fan``.
    """

    kind = "vrp"

    def __init__(self, law, left: SymState, right: SymState, w0: float, domain=(-1.0, 1.0),
                 t_end=1.0, x0=0.0):
        if left.h == 0.0 or right.h == 0.0:
            raise UnsupportedData("vacuum Riemann problem needs nonvacuum outer states")
        if not w0 > 0.0:
            raise UnsupportedData("use riemann_solve for w0 = 0")
        self.left, self.right, self.w0 = left, right, float(w0)
        self.u_minus = left.u + left.h
        self.u_plus = right.u - right.h
        self.du = self.u_plus - self.u_minus
        self.T = -self.w0 / self.du if self.du < 0 else math.inf
        t_hi = min(t_end, self.T)
        self.fan = WaveFan([rarefaction_wave(law, 0.0, left.h, "backward", (0.0, x0), left.u),
                            vacuum_wave(self.u_minus, self.u_plus, x0, 0.0, law),
                            rarefaction_wave(law, 0.0, right.h, "forward", (0.0, x0), right.u)],
                           [left, SymState(0.0, self.u_minus), SymState(0.0, self.u_plus), right],
                           (0.0, x0), law, 0.0)
        self.outer_fan = riemann_solve(law, left, right, (0.0, x0))
        curves = fan_curves(self.fan, (0.0, self.T), w0=self.w0)
        events = (0.0,) + ((self.T,) if math.isfinite(self.T) else ())
        super().__init__(law, domain, (0.0, t_hi), curves, events)

    def weight(self, t):
        return max(self.w0 + self.du * t, 0.0)

    def regions(self, t):
        if t == 0.0:
            x0 = self.fan.center[1]
            return [constant_region(-math.inf, x0, "state0", self.left, self.law),
                    constant_region(x0, math.inf, "state3", self.right, self.law)]
        return self.fan.regions(t)


def vacuum_riemann_solve(law: GasLaw, left: SymState, right: SymState, w0: float,
                         domain=(-1.0, 1.0), t_end=1.0):
    """Solution of the Riemann problem with an embedded atom of width w0."""
    if w0 < 0:
        raise UnsupportedData("atom width must be >= 0")
    if left.h == 0.0 or right.h == 0.0:
        raise UnsupportedData("vacuum Riemann problem needs nonvacuum outer states")
    if w0 == 0.0:
        return FanSolution(riemann_solve(law, left, right), domain, t_end)
    return VacuumRiemannSolution(law, left, right, w0, domain, t_end)
