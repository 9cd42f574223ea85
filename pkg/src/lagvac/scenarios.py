"""Exact solutions with vacuum: collapse, off-center collapse, vacuum Riemann problem.

All three are built from centered waves, so fields are closed form except
for the curved shock of the off-center example, whose trajectory is given
by a one-dimensional integral in the shock strength z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (DomainError, EventTimeError, NumericalError, UnsupportedData)
from .quadrature import integrate
from .solution import DiscCurve, PiecewiseSolution, constant_region
from .thermo import GammaLaw, GasLaw, SymState
from .waves import (FanSolution, _fan_region, VacuumRiemannSolution, WaveFan, entropy_mass, fan_curves,
                    r_fn, rarefaction_wave, riemann_solve, s_fn, vacuum_riemann_solve, vacuum_wave)

__all__ = ["CollapseSolution", "collapse_solution", "collapse_norm_closed_form", "vrp_norm_closed_form",
           "fan_norm_rate", "vint_identity", "ShockCurve", "shock_through_rarefaction",
           "OffCenterSolution", "offcenter_solution", "entropy_production", "vacuum_riemann_solve"]


# --------------------------------------------------------------------------
# collapse of a vacuum between two focusing compressions


class CollapseSolution(PiecewiseSolution):
    """Vacuum between two centered compressions that focus at (0, 0).

    For t < 0 the atom has weight du t (du = u_plus - u_minus < 0); the
    compressions carry u - h = u_minus on the left and u + h = u_plus on the
    right.  For t > 0 the solution is the Riemann fan between the outer
    states (h_l, u_minus + h_l) and (h_r, u_plus - h_r).
    """

    kind = "collapse"

    def __init__(self, law, h_l, h_r, u_minus, u_plus, domain=(-3.0, 3.0), t_range=(-1.0, 1.0)):
        du = u_plus - u_minus
        if not du < 0.0:
            raise UnsupportedData(f"not a collapse: u_plus - u_minus = {du:g} must be < 0")
        if not (h_l > 0.0 and h_r > 0.0):
            raise UnsupportedData("collapse needs nonvacuum outer states")
        self.h_l, self.h_r = float(h_l), float(h_r)
        self.u_minus, self.u_plus, self.du = float(u_minus), float(u_plus), du
        self.left = SymState(self.h_l, self.u_minus + self.h_l)
        self.right = SymState(self.h_r, self.u_plus - self.h_r)
        self.pre = WaveFan([rarefaction_wave(law, self.h_l, 0.0, "forward", (0.0, 0.0), self.u_minus),
                            vacuum_wave(self.u_minus, self.u_plus, 0.0, 0.0, law),
                            rarefaction_wave(law, self.h_r, 0.0, "backward", (0.0, 0.0), self.u_plus)],
                           [self.left, SymState(0.0, self.u_minus), SymState(0.0, self.u_plus), self.right],
                           (0.0, 0.0), law)
        self.post = riemann_solve(law, self.left, self.right)
        t_lo, t_hi = t_range
        curves = [DiscCurve("vacuum", "vacuum", lambda t: 0.0, (-math.inf, 0.0),
                            w=lambda t: self.du * t, dX=lambda t: 0.0, dw=lambda t: self.du)]
        curves += fan_curves(self.post, (0.0, math.inf), prefix="post-")
        super().__init__(law, domain, (t_lo, t_hi), curves, (0.0,))
        a, b = self.domain
        for t in (t_lo, t_hi):
            for r in self.regions(t)[1:-1]:
                if r.x0 < a or r.x1 > b:
                    raise DomainError(f"waves leave the domain [{a}, {b}] at t={t}")

    @property
    def case(self):
        kinds = self.post.kinds
        if kinds == ["shock", "shock"]:
            return "two-shock"
        if kinds == ["shock", "rarefaction"]:
            return "shock-rarefaction"
        return "-".join(kinds) or "trivial"

    def regions(self, t):
        if t < 0.0:
            return self.pre.regions(t)
        if t == 0.0:
            return [constant_region(-math.inf, 0.0, "state0", self.left, self.law),
                    constant_region(0.0, math.inf, "state3", self.right, self.law)]
        return self.post.regions(t, prefix="post-")


def collapse_solution(law, h_l, h_r, u_minus, u_plus, domain=(-3.0, 3.0), t_range=(-1.0, 1.0)):
    return CollapseSolution(law, h_l, h_r, u_minus, u_plus, domain, t_range)


def fan_norm_rate(fan: WaveFan, law: GasLaw) -> float:
    """d/dt of the total volume inside a centered fan, wave by wave.

    A jump with speed X' contributes X'(v_L - v_R); a rarefaction
    contributes |h_L - h_R| (integrating v(c^-1) across it by parts); a
    vacuum contributes its atom growth rate.
    """
    rate = 0.0
    for w in fan.waves:
        if w.kind == "shock":
            rate += w.speed_range[0] * (law.v(w.left.h) - law.v(w.right.h))
        elif w.kind in ("rarefaction", "compression"):
            rate += abs(w.left.h - w.right.h) * (1 if w.kind == "rarefaction" else -1)
        elif w.kind == "vacuum":
            rate += w.atom_rate
    return rate


def collapse_norm_closed_form(sol, t) -> float:
    """Closed-form total variation of V(t) for the collapse solution."""
    if not isinstance(sol, CollapseSolution):
        raise UnsupportedData(f"no collapse closed form for a {type(sol).__name__}")
    law = sol.law
    a, b = -sol.domain[0], sol.domain[1]
    v_l, v_r = law.v(sol.h_l), law.v(sol.h_r)
    base = b * v_r + a * v_l
    if t < 0:
        return base + t * (sol.du - sol.h_l - sol.h_r)
    fan = sol.post
    if sol.case == "two-shock":
        v_m = law.v(fan.h_m)
        s_l, s_r = -fan.waves[0].speed_range[0], fan.waves[1].speed_range[0]
        return base + t * (s_l * (v_m - v_l) + s_r * (v_m - v_r))
    if sol.case == "shock-rarefaction":
        v_m = law.v(fan.h_m)
        s_l = -fan.waves[0].speed_range[0]
        return base + t * (s_l * (v_m - v_l) + sol.h_r - fan.h_m)
    return base + t * fan_norm_rate(fan, law)


def vrp_norm_closed_form(sol, t) -> float:
    """Closed-form total variation for the vacuum Riemann problem."""
    law = sol.law
    a, b = -sol.domain[0], sol.domain[1]
    base = a * law.v(sol.left.h) + b * law.v(sol.right.h)
    if isinstance(sol, VacuumRiemannSolution):
        return base + sol.w0 + t * (sol.left.h + sol.du + sol.right.h)
    if isinstance(sol, FanSolution):
        return base + t * fan_norm_rate(sol.fan, law)
    raise UnsupportedData(f"no closed form for a {type(sol).__name__}")


def norm_closed_form(sol, t):
    if isinstance(sol, CollapseSolution):
        return collapse_norm_closed_form(sol, t)
    if isinstance(sol, (VacuumRiemannSolution, FanSolution)):
        return vrp_norm_closed_form(sol, t)
    return None


def vint_identity(law: GasLaw, h: float, tol: float = 1e-12) -> float:
    """Residual of v(h)c(h) + int_{c(h)}^0 v(c^-1(y)) dy = -h."""
    if not h > 0:
        raise DomainError("vint identity needs h > 0")
    c = float(law.c(h))
    f = lambda y: np.asarray(law.volume_at_speed(y), dtype=float)
    # tabulated laws: the inverse is only piecewise smooth between knot speeds
    knots = np.sort(getattr(law, "speed_knots", np.empty(0)))
    cuts = [0.0] + [k for k in knots if 0.0 < k < c] + [c]
    integral = integrate(f, cuts[0], cuts[1], tol=tol, singular=(True, False)).value
    for a, b in zip(cuts[1:-1], cuts[2:]):
        integral += integrate(f, a, b, tol=tol).value
    return float(law.v(h) * c - integral + h)


# --------------------------------------------------------------------------
# shock running through a centered rarefaction


def _D(z, beta):
    return 1.0 + z + z ** ((beta + 1.0) / 2.0) * r_fn(z, beta)


def _dD(z, beta):
    m = (beta + 1.0) / 2.0
    qp = -np.expm1(-(beta + 1.0) * np.log(z)) / (beta + 1.0)
    qm = -np.expm1(-(beta - 1.0) * np.log(z)) / (beta - 1.0)
    r = np.sqrt(qp * qm)
    dr = (z ** (-beta - 2.0) * qm + qp * z ** (-beta)) / (2.0 * r)
    return 1.0 + m * z ** (m - 1.0) * r + z ** m * dr


def _F(z, beta):
    """Integrand of the shock-time integral in z (decays like z^-(beta+3)/2)."""
    m = (beta + 1.0) / 2.0
    return _dD(z, beta) / (_D(z, beta) * (z ** m * s_fn(z, beta) - 1.0))


# fixed composite Gauss-Legendre rule in y = log z: smooth in the endpoint,
# so finite differences of the trajectory are clean
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def shock_time_integral(z, beta, z_max=1e6, panels=96, tail=True):
    """J(z) = beta int_z^z_max F, plus the leading-order tail beyond z_max."""
    y0, y1 = math.log(z), math.log(z_max)
    if y1 <= y0:
        return 0.0
    edges = np.linspace(y0, y1, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    y = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    zz = np.exp(y)
    vals = (_F(zz, beta) * zz).reshape(panels, -1)
    total = float(np.sum((vals @ _GL_W) * half))
    if tail:
        m = (beta + 1.0) / 2.0
        total += float(_F(z_max, beta)) * z_max / m
    return beta * total


def shock_time_integral_adaptive(z, beta, z_max=1e6, tol=1e-14):
    """Same integral with adaptive quadrature (no tail correction); used as a cross-check."""
    res = integrate(lambda y: _F(np.exp(y), beta) * np.exp(y), math.log(z), math.log(z_max), tol=tol)
    return beta * float(res.value)


@dataclass
class ShockCurve:
    """Shock through a centered rarefaction, parametrized by z = h_behind/h_ahead.

    Time t is measured from the rarefaction center; ``endpoint_limit`` is
    the (t, x) limit as z -> infinity, where the shock meets the vacuum.
    """

    law: GammaLaw
    A: float
    z_hash: float
    t_hash: float
    z_max: float = 1e6
    samples: np.ndarray | None = None

    def __post_init__(self):
        self._J_hash = shock_time_integral(self.z_hash, self.law.beta, self.z_max)

    @property
    def beta(self):
        return self.law.beta

    def h(self, z):
        return self.A / _D(np.asarray(z, dtype=float), self.beta)

    def t(self, z):
        J = shock_time_integral(z, self.beta, self.z_max)
        return self.t_hash * math.exp(J - self._J_hash)

    def x(self, z):
        return float(self.law.c(self.h(z))) * self.t(z)

    def sigma(self, z):
        b = self.beta
        return float(self.law.c(self.h(z))) * z ** ((b + 1.0) / 2.0) * float(s_fn(z, b))

    @property
    def endpoint_limit(self):
        return self.t_hash * math.exp(-self._J_hash), 0.0

    def z_at_time(self, t):
        """Invert t(z); t must lie between the endpoint limit and t(z=1+)."""
        t_inf = self.endpoint_limit[0]
        if not t > t_inf:
            raise DomainError(f"t={t} precedes the shock emergence at {t_inf}")
        f = lambda lz: self.t(math.exp(lz)) - t
        lo, hi = 1e-12, math.log(self.z_max)
        if f(lo) < 0:
            raise DomainError(f"t={t} is beyond the zero-strength end of the shock")
        if f(hi) > 0:
            raise DomainError(f"t={t} is closer to emergence than z_max resolves")
        return math.exp(brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=400))

    def relation_residual(self, z):
        """h (1 + z + z^m r(z)) - A."""
        return float(self.h(z) * _D(z, self.beta) - self.A)

    def sample(self, n=200, z_hi=None):
        z = np.geomspace(self.z_hash, z_hi or self.z_max, n)
        rows = [(float(self.h(zi)), zi, self.t(zi), self.x(zi), self.sigma(zi)) for zi in z]
        self.samples = np.array(rows)
        return self.samples


def shock_through_rarefaction(law: GasLaw, h_hash: float, z_hash: float, t_hash: float,
                              z_max: float = 1e6, n: int = 200) -> ShockCurve:
    """Shock trajectory through a rarefaction centered at the origin.

    The reference point has ahead state h_hash, strength z_hash and time
    t_hash.  Along the curve h (1 + z + z^m r(z)) = A, the position is
    x = c(h) t and t = t_hash exp(-beta int_{z_hash}^z D'/(D (z^m s - 1)) dz)
    with D = 1 + z + z^m r(z).
    """
    if not isinstance(law, GammaLaw):
        raise UnsupportedData("the shock-through-rarefaction closed form needs a gamma-law gas")
    if not (h_hash > 0 and z_hash > 1 and t_hash > 0):
        raise DomainError("need h_hash > 0, z_hash > 1 and t_hash > 0")
    A = float(h_hash * _D(z_hash, law.beta))
    curve = ShockCurve(law, A, float(z_hash), float(t_hash), float(z_max))
    if not math.isfinite(curve.endpoint_limit[0]):
        raise NumericalError("shock-time integral diverged", {"z_hash": z_hash})
    curve.sample(n)
    return curve


class OffCenterSolution(PiecewiseSolution):
    """Vacuum collapsing between a compression and an off-center rarefaction.

    Before the collapse (t < 0): the left state (h_l, u_minus + h_l), a
    forward compression focusing at (0, 0) with u - h = u_minus, the atom of
    weight du t, and a forward rarefaction from vacuum centered at
    (-t_c, 0) with u - h = u_plus, ending in the state (h_r, u_plus + h_r).

    After the collapse a shock enters the rarefaction.  Its trajectory and
    both one-sided states are exact: with A = u_minus + 2 h_l - u_plus,
    the ahead state is (h, u_plus + h) and the behind state is
    (z h, u_plus + A - z h).  The region behind it (a backward rarefaction
    from the collapse point plus the transmitted compression) is a backward
    simple wave with u + h = u_minus + 2 h_l, but the transmitted
    characteristics cross each other arbitrarily soon after the collapse
    (see ``focus_time``), so field evaluation stops at t = 0 while the
    shock curve stays available until it leaves the rarefaction.
    """

    kind = "offcenter"

    def __init__(self, law: GammaLaw, h_l, u_minus, u_plus, h_r, t_c, domain=(-2.0, 2.0),
                 t_min=None, z_max=1e6):
        if not isinstance(law, GammaLaw):
            raise UnsupportedData("the off-center example needs a gamma-law gas")
        du = u_plus - u_minus
        if not du < 0:
            raise UnsupportedData(f"not a collapse: u_plus - u_minus = {du:g} must be < 0")
        if not (h_l > 0 and h_r > 0 and t_c > 0):
            raise UnsupportedData("need h_l, h_r, t_c > 0")
        self.law = law
        self.h_l, self.h_r, self.t_c = float(h_l), float(h_r), float(t_c)
        self.u_minus, self.u_plus, self.du = float(u_minus), float(u_plus), du
        self.left = SymState(self.h_l, self.u_minus + self.h_l)
        self.right = SymState(self.h_r, self.u_plus + self.h_r)
        self.A = self.u_minus + 2.0 * self.h_l - self.u_plus
        self.compression = rarefaction_wave(law, self.h_l, 0.0, "forward", (0.0, 0.0), self.u_minus)
        self.rarefaction = rarefaction_wave(law, 0.0, self.h_r, "forward", (-self.t_c, 0.0),
                                           self.u_plus + self.h_r)
        self.curve = ShockCurve(law, self.A, 2.0, 1.0, z_max)
        # rescale time so the shock emerges exactly from the collapse point
        self.curve.t_hash = self.t_c * math.exp(self.curve._J_hash)
        # the shock leaves the rarefaction where h(z) = h_r, or dies out at z = 1
        if self.h_r < self.A / 2.0:
            self.z_exit = brentq(lambda z: self.curve.h(z) - self.h_r, 1.0 + 1e-15, 1e15,
                                 xtol=1e-14, rtol=1e-15)
        else:
            self.z_exit = 1.0
        self.t_exit = self.curve.t(self.z_exit) - self.t_c if self.z_exit > 1.0 else math.inf
        if t_min is None:
            t_min = -0.5 * self.t_c
        if not -self.t_c < t_min < 0:
            raise UnsupportedData("t_min must lie between the rarefaction center and the collapse")
        self.focus_time = self.transmitted_focus_time(z_max)
        curves = [DiscCurve("vacuum", "vacuum", lambda t: 0.0, (-self.t_c, 0.0), w=lambda t: du * t,
                            dX=lambda t: 0.0, dw=lambda t: du),
                  DiscCurve("shock", "shock", self.shock_position, (0.0, self.t_exit),
                            dX=self.shock_speed)]
        events = (0.0,) + ((self.t_exit,) if math.isfinite(self.t_exit) else ())
        super().__init__(law, domain, (t_min, 0.0), curves, events)

    # shock ----------------------------------------------------------------
    def z_at(self, t):
        if not 0.0 < t < self.t_exit:
            raise EventTimeError(f"shock exists only for 0 < t < {self.t_exit}")
        return self.curve.z_at_time(t + self.t_c)

    def shock_position(self, t):
        return self.curve.x(self.z_at(t))

    def shock_speed(self, t):
        return self.curve.sigma(self.z_at(t))

    def shock_states(self, t):
        """((h_b, u_b), (h, u_h)): behind (left) and ahead (right) of the shock."""
        z = self.z_at(t)
        h = float(self.curve.h(z))
        hb = z * h
        return (hb, self.u_plus + self.A - hb), (h, self.u_plus + h)

    def four_state_residual(self, z, z_hash=None):
        """Compatibility of the states around the shock with a reference point."""
        b = self.law.beta
        m = (b + 1.0) / 2.0
        z_hash = z_hash or 2.0
        h, hh = float(self.curve.h(z)), float(self.curve.h(z_hash))
        u_hash, u_h = self.u_plus + hh, self.u_plus + h
        u_star = self.u_plus + self.A - z_hash * hh
        u_b = self.u_plus + self.A - z * h
        res1 = (u_hash - u_b) - (hh - h - h * z ** m * float(r_fn(z, b)))
        res2 = (u_hash - u_b) - (-hh * z_hash ** m * float(r_fn(z_hash, b)) + z * h - z_hash * hh)
        res3 = (u_h - u_b) + h * z ** m * float(r_fn(z, b))
        res4 = (u_star - u_b) - (z * h - z_hash * hh)
        return max(abs(res1), abs(res2), abs(res3), abs(res4))

    def transmitted_focus_time(self, z_max=1e6, n=400):
        """Earliest crossing of a transmitted characteristic with the x = 0 ray.

        The transmitted characteristic leaving the shock at strength z
        reaches x = 0 at t_s + x_s / c(z h); this tends to the collapse
        time as z grows, so the estimate shrinks to 0 as z_max grows.
        """
        zs = np.geomspace(max(self.z_exit, 1.0 + 1e-6) * 1.0001, z_max, n)
        best = math.inf
        for z in zs:
            h = float(self.curve.h(z))
            tau = self.curve.t(z)
            x = float(self.law.c(h)) * tau
            best = min(best, tau - self.t_c + x / float(self.law.c(z * h)))
        return best

    # fields -----------------------------------------------------------------
    def curve_states(self, t, curve):
        if curve.name == "shock":
            return self.shock_states(t)
        return super().curve_states(t, curve)

    def regions(self, t):
        if t == 0.0:
            return [constant_region(-math.inf, 0.0, "left", self.left, self.law)] + \
                self._rarefaction_regions(t, 0.0)
        fan = WaveFan([self.compression, vacuum_wave(self.u_minus, self.u_plus, 0.0, 0.0, self.law)],
                      [self.left, SymState(0.0, self.u_minus), SymState(0.0, self.u_plus)],
                      (0.0, 0.0), self.law)
        regs = fan.regions(t)[:-1]
        return regs + self._rarefaction_regions(t, 0.0)

    def _rarefaction_regions(self, t, x_from):
        w = self.rarefaction
        xa, xb = w.extent(t)
        out = [_fan_region(w, x_from, xb, t, "rarefaction")]
        out.append(constant_region(xb, math.inf, "right", self.right, self.law))
        return out


def offcenter_solution(law, h_l=1.0, u_minus=1.0, u_plus=-1.0, h_r=1.5, t_c=1.0, domain=(-2.0, 4.0),
                       t_min=None, compression_center=(0.0, 0.0), z_max=1e6):
    """Off-center example; the compression must focus at the collapse point (0, 0)."""
    if tuple(compression_center) != (0.0, 0.0):
        raise UnsupportedData("the compression must focus exactly at the vacuum collapse point")
    return OffCenterSolution(law, h_l, u_minus, u_plus, h_r, t_c, domain, t_min, z_max)


# --------------------------------------------------------------------------
# entropy production


def derivative(f, t, step=1e-3):
    """Fourth-order central difference."""
    return (-f(t + 2 * step) + 8 * f(t + step) - 8 * f(t - step) + f(t - 2 * step)) / (12 * step)


def entropy_production(sol: PiecewiseSolution, t, exact=True):
    """Entropy atoms -X'([u^2/2] + [eps]) + [u p] on every curve active at t."""
    if any(abs(t - e) <= 1e-14 * max(1.0, abs(e)) for e in sol.events):
        raise EventTimeError(f"t={t} is an interaction time")
    out = []
    for c in sol.active_curves(t):
        left, right = sol.curve_states(t, c)
        if exact and c.dX is not None:
            dX = float(c.dX(t))
        else:
            lo, hi = c.t_range
            step = min(1e-3, 0.2 * (t - lo), 0.2 * (hi - t))
            dX = derivative(c.X, t, step)
        mass = entropy_mass(sol.law, left, right, dX)
        out.append({"name": c.name, "kind": c.kind, "x": float(c.X(t)), "mass": float(mass)})
    return out
