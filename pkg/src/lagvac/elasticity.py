"""One-dimensional elastodynamics with fracture.

Strain u = y_x and velocity v = y_t satisfy u_t - v_x = 0, v_t - tau(u)_x = 0.
A crack is an atom w delta_X in the strain; the stress and stored energy
of an atom are extended by their linear growth rates

    tau_hat(w delta) = L_tau w delta,   W_hat(w delta) = L_W w delta,

with L_tau = lim tau(u)/u and L_W = lim W(u)/u as u -> infinity.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import (DomainError, InvalidConfiguration, InvalidConstitutiveLaw,
                     NonHyperbolicJump)
from .measure import Density, RadonMeasure, constant_piece
from .quadrature import integrate
from .solution import DiscCurve

ADMISSIBLE_TOL = 1e-10


def richardson_limit(us, ratios):
    """Limit of r(u) as u -> inf from three samples, assuming r = L + a/u + b/u^2."""
    us = np.asarray(us, dtype=float)
    M = np.column_stack([np.ones(3), 1.0 / us, 1.0 / us ** 2])
    return float(np.linalg.solve(M, np.asarray(ratios, dtype=float))[0])


def _tail_limit(us, vals):
    """Richardson limit of vals/us at the three largest samples, or None without a monotone trend."""
    us, vals = np.asarray(us[-3:], dtype=float), np.asarray(vals[-3:], dtype=float)
    r = vals / us
    d = np.diff(r)
    if not (np.all(d > 0) or np.all(d < 0) or np.all(d == 0)):
        return None
    return richardson_limit(us, r)


class StressLaw:
    """Base class: tau, its derivatives, W normalized at u0, and the limits L_tau, L_W."""

    family = "abstract"
    u_min = 0.0
    u_max = math.inf

    def tau(self, u):
        raise NotImplementedError

    def dtau(self, u):
        raise NotImplementedError

    def W(self, u):
        raise NotImplementedError

    @property
    def u0(self):
        raise NotImplementedError

    @property
    def L_tau(self):
        raise NotImplementedError

    @property
    def L_W(self):
        raise NotImplementedError

    @property
    def tau_inf(self):
        return self.L_W

    def check_domain(self, u):
        if not (self.u_min < u <= self.u_max) or u <= 0:
            raise DomainError(f"strain {u} outside the law domain ({self.u_min}, {self.u_max}]")

    def validate(self, u_lo=None, u_hi=None, n=200, blowup=5.0):
        """Check tau' > 0, tau'' < 0 on a sample and that W grows large near u = 0."""
        lo = u_lo if u_lo is not None else max(self.u_min, 1e-3)
        hi = u_hi if u_hi is not None else min(self.u_max, 1e3)
        us = np.geomspace(lo, hi, n)
        if np.any(lo == self.u_min):
            us = us[1:]
        t = np.array([self.tau(u) for u in us])
        if np.any(np.diff(t) <= 0):
            raise InvalidConstitutiveLaw("stress must be strictly increasing (tau' > 0)")
        slopes = np.diff(t) / np.diff(us)
        if np.any(np.diff(slopes) >= 0):
            raise InvalidConstitutiveLaw("stress must be softening (tau'' < 0)")
        if not self.W(us[0]) > blowup:
            raise InvalidConstitutiveLaw(f"W({us[0]:g}) = {self.W(us[0]):g} does not diverge near u = 0")
        return True

    def to_dict(self):
        return {"family": self.family}


class PowerSaturatingStress(StressLaw):
    """tau(u) = tau_inf (1 - u^-m), m > 1: u0 = 1, L_tau = 0, L_W = tau_inf."""

    family = "power-saturating"

    def __init__(self, tau_inf=1.0, m=2.0):
        if not m > 1.0:
            raise InvalidConstitutiveLaw(f"need m > 1, got {m}")
        if not tau_inf > 0.0:
            raise InvalidConstitutiveLaw(f"need tau_inf > 0, got {tau_inf}")
        self.m = float(m)
        self._tau_inf = float(tau_inf)

    def tau(self, u):
        return self._tau_inf * (1.0 - np.power(u, -self.m))

    def dtau(self, u):
        return self._tau_inf * self.m * np.power(u, -self.m - 1.0)

    def W(self, u):
        m = self.m
        return self._tau_inf * (u + np.power(u, 1.0 - m) / (m - 1.0) - m / (m - 1.0))

    @property
    def u0(self):
        return 1.0

    @property
    def L_tau(self):
        return 0.0

    @property
    def L_W(self):
        return self._tau_inf

    @property
    def tau_inf(self):
        return self._tau_inf

    def to_dict(self):
        return {"family": self.family, "tau_inf": self._tau_inf, "m": self.m}


class LinearStress(StressLaw):
    """tau(u) = k (u - u0): a stiff law with L_tau = k and infinite L_W."""

    family = "linear"

    def __init__(self, k=0.5, u0=1.0):
        self.k, self._u0 = float(k), float(u0)

    def tau(self, u):
        return self.k * (np.asarray(u) - self._u0)

    def dtau(self, u):
        return self.k * np.ones_like(np.asarray(u, dtype=float))

    def W(self, u):
        return 0.5 * self.k * (np.asarray(u) - self._u0) ** 2

    @property
    def u0(self):
        return self._u0

    @property
    def L_tau(self):
        return self.k

    @property
    def L_W(self):
        return math.inf

    @property
    def tau_inf(self):
        return math.inf

    def to_dict(self):
        return {"family": self.family, "k": self.k, "u0": self._u0}


class TabulatedStress(StressLaw):
    """Monotone cubic (PCHIP) interpolation of sampled (u, tau) data.

    W is the exact antiderivative of the interpolant from the zero-stress
    strain u0.  L_tau and L_W are Richardson limits of tau/u and W/u at
    the three largest samples; a non-monotone trend leaves them None
    (indeterminate).
    """

    family = "tabulated"

    def __init__(self, u, tau):
        u = np.asarray(u, dtype=float)
        tau = np.asarray(tau, dtype=float)
        if u.ndim != 1 or u.shape != tau.shape or u.size < 4:
            raise InvalidConstitutiveLaw("need at least 4 matching (u, tau) samples")
        if np.any(np.diff(u) <= 0) or u[0] <= 0:
            raise InvalidConstitutiveLaw("strains must be positive and strictly ascending")
        if np.any(np.diff(tau) <= 0):
            raise InvalidConstitutiveLaw("stress must be strictly increasing (tau' > 0)")
        if not (tau[0] < 0.0 < tau[-1]):
            raise InvalidConstitutiveLaw("the table must bracket the zero-stress strain")
        self.u_data, self.tau_data = u, tau
        self.u_min, self.u_max = float(u[0]), float(u[-1])
        self._interp = PchipInterpolator(u, tau, extrapolate=False)
        self._d = self._interp.derivative()
        self._u0 = brentq(lambda s: float(self._interp(s)), u[0], u[-1], xtol=1e-15, rtol=1e-15)
        self._anti = self._interp.antiderivative()
        self._a0 = float(self._anti(self._u0))
        w = np.array([self.W(s) for s in u])
        self._L_tau = _tail_limit(u, tau)
        self._L_W = _tail_limit(u, w)

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1])

    @classmethod
    def sample(cls, law: StressLaw, u_lo, u_hi, n=400):
        us = np.geomspace(u_lo, u_hi, n)
        return cls(us, np.array([float(law.tau(s)) for s in us]))

    def _inside(self, u):
        u = np.asarray(u, dtype=float)
        if np.any((u < self.u_min) | (u > self.u_max)):
            raise DomainError(f"strain outside the table [{self.u_min}, {self.u_max}]")
        return u

    def tau(self, u):
        return self._interp(self._inside(u))[()]

    def dtau(self, u):
        return self._d(self._inside(u))[()]

    def W(self, u):
        return (self._anti(self._inside(u)) - self._a0)[()]

    @property
    def u0(self):
        return self._u0

    @property
    def L_tau(self):
        return self._L_tau

    @property
    def L_W(self):
        return self._L_W

    @property
    def tau_inf(self):
        return self._L_W

    def validate(self, u_lo=None, u_hi=None, n=200, blowup=5.0):
        return super().validate(u_lo or self.u_min, u_hi or self.u_max, n, blowup)

    def to_dict(self):
        return {"family": self.family, "n": int(self.u_data.size), "u_min": self.u_min,
                "u_max": self.u_max}


def stress_law_from_config(section, base_dir=None):
    """Build a stress law from a config mapping (keys: law, tau_inf, m, table_path)."""
    kind = section.get("law", "power-saturating")
    if kind in ("power-saturating", "power"):
        return PowerSaturatingStress(float(section.get("tau_inf", 1.0)), float(section.get("m", 2.0)))
    if kind == "linear":
        return LinearStress(float(section.get("k", 0.5)), float(section.get("u0", 1.0)))
    if kind in ("table", "tabulated"):
        import os
        path = section["table_path"]
        if base_dir and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        return TabulatedStress.from_csv(path)
    raise InvalidConstitutiveLaw(f"unknown stress law {kind!r}")


# --------------------------------------------------------------------------
# atomic extensions


def _check_atoms(atoms):
    out = []
    for x, w in atoms:
        if not w > 0:
            raise DomainError(f"atom weights must be positive, got {w}")
        out.append((float(x), float(w)))
    return out


def extend_stress_atomic(law: StressLaw, atoms):
    """tau_hat of an atomic measure: every weight scaled by L_tau."""
    atoms = _check_atoms(atoms)
    L = law.L_tau
    if L is None:
        raise InvalidConstitutiveLaw("L_tau is indeterminate for this law")
    if L == 0.0:
        return []
    return [(x, L * w) for x, w in atoms]


@dataclass
class AtomicEnergy:
    atoms: list
    infinite: bool = False


def extend_energy_atomic(law: StressLaw, atoms) -> AtomicEnergy:
    """W_hat of an atomic measure: weights scaled by L_W, or flagged infinite."""
    atoms = _check_atoms(atoms)
    L = law.L_W
    if L is None:
        raise InvalidConstitutiveLaw("L_W is indeterminate for this law")
    if math.isinf(L):
        return AtomicEnergy([], infinite=bool(atoms))
    return AtomicEnergy([(x, L * w) for x, w in atoms if L != 0.0])


# --------------------------------------------------------------------------
# crack opening behind two shocks


@dataclass
class CrackSolution:
    lam: float
    alpha: float
    sigma: float
    Y0: float
    theta: float
    theta_algebraic: float
    crack_mass: float
    energy_gap: float
    law: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


def theta_integral(law: StressLaw, lam, alpha, sigma, tol=1e-13):
    """sigma int_alpha^lam ((tau(lam) + tau(alpha))/2 - tau(s)) ds."""
    mid = 0.5 * (float(law.tau(lam)) + float(law.tau(alpha)))
    r = integrate(lambda s: mid - law.tau(s), alpha, lam, tol=tol)
    return sigma * float(r.value)


def crack_solve(law: StressLaw, lam, alpha) -> CrackSolution:
    """Speeds, crack velocity and entropy masses of the self-similar crack.

    The shocks at x = +-sigma t separate the outer strain lam from the
    crack-face strain alpha, with Y0 = sigma (lam - alpha) and
    sigma^2 (lam - alpha) = tau(lam) - tau(alpha).
    """
    lam, alpha = float(lam), float(alpha)
    if not alpha < lam:
        raise InvalidConfiguration(f"need alpha < lambda, got alpha={alpha}, lambda={lam}")
    if not alpha > 0:
        raise InvalidConfiguration(f"need alpha > 0, got {alpha}")
    law.check_domain(alpha)
    law.check_domain(lam)
    ta, tl = float(law.tau(alpha)), float(law.tau(lam))
    if not tl > ta:
        raise NonHyperbolicJump(f"tau(lambda)={tl} must exceed tau(alpha)={ta}")
    sigma = math.sqrt((tl - ta) / (lam - alpha))
    Y0 = sigma * (lam - alpha)
    theta_alg = sigma * (0.5 * Y0 * Y0 + float(law.W(alpha)) - float(law.W(lam))) + ta * Y0
    theta = theta_integral(law, lam, alpha, sigma)
    tinf = law.tau_inf
    crack_mass = 2.0 * Y0 * (tinf - ta)
    gap = 2.0 * (theta + Y0 * (tinf - ta))
    return CrackSolution(lam, alpha, sigma, Y0, theta, theta_alg, crack_mass, gap, law.to_dict())


@dataclass
class Admissibility:
    admissible: bool
    L_tau: float | None
    reason: str = ""

    def __bool__(self):
        return self.admissible


def crack_weakstar_admissible(law: StressLaw, tol=ADMISSIBLE_TOL) -> Admissibility:
    """Cracks are weak* solutions exactly when L_tau = 0."""
    L = law.L_tau
    if L is None:
        return Admissibility(False, None, "L_tau indeterminate: tail ratios are not monotone")
    if abs(L) <= tol:
        return Admissibility(True, float(L), "L_tau = 0")
    return Admissibility(False, float(L), f"L_tau = {L:.6g} != 0")


# --------------------------------------------------------------------------
# the slic example as a measure-valued solution


def _elastic_jump_residuals(law, left, right, dX, w, dw):
    """Residuals of w' - X'[u] = [v], -X'[v] = [tau], w X' = 0 and L_tau w = 0."""
    (ul, vl), (ur, vr) = left, right
    du, dv = ur - ul, vr - vl
    dtau = float(law.tau(ur)) - float(law.tau(ul))
    Lt = law.L_tau or 0.0
    return (abs(dw - dX * du - dv), abs(-dX * dv - dtau), abs(w * dX), abs(Lt * w))


def _elastic_entropy_mass(law, left, right, dX, dw):
    """Atom of eta_t + q_x with eta = v^2/2 + W_hat(U) and q = -v tau_hat(U)."""
    (ul, vl), (ur, vr) = left, right
    deta = 0.5 * (vr * vr - vl * vl) + float(law.W(ur)) - float(law.W(ul))
    dq = -vr * float(law.tau(ur)) + vl * float(law.tau(ul))
    LW = law.L_W if law.L_W is not None else 0.0
    return -dX * deta + dq + (LW * dw if dw else 0.0)


class SlicSolution:
    """Crack opening at the origin behind shocks at x = -+sigma t.

    Strain: lam | alpha | 2 t Y0 delta_0 | alpha | lam; velocity 0 | -Y0 | Y0 | 0.
    Offers the snapshot interface used by the weak* residual, with
    V <-> U, u <-> v and p <-> -tau_hat(U).
    """

    kind = "slic"

    def __init__(self, law: StressLaw, lam, alpha, domain=(-2.0, 2.0), valid_time=(0.0, 1.0)):
        self.law = law
        self.crack = crack_solve(law, lam, alpha)
        self.domain = (float(domain[0]), float(domain[1]))
        if not valid_time[0] >= 0:
            raise DomainError("the crack opens at t = 0")
        self.valid_time = tuple(valid_time)
        self.events = (0.0,)
        s, Y0 = self.crack.sigma, self.crack.Y0
        self.curves = [
            DiscCurve("shock-left", "shock", lambda t: -s * t, (0.0, math.inf), dX=lambda t: -s),
            DiscCurve("crack", "crack", lambda t: 0.0, (0.0, math.inf), w=lambda t: 2.0 * t * Y0,
                      dX=lambda t: 0.0, dw=lambda t: 2.0 * Y0),
            DiscCurve("shock-right", "shock", lambda t: s * t, (0.0, math.inf), dX=lambda t: s),
        ]

    def _states(self):
        c = self.crack
        return [(c.lam, 0.0), (c.alpha, -c.Y0), (c.alpha, c.Y0), (c.lam, 0.0)]

    def _check(self, t):
        if not t > 0:
            raise DomainError(f"slic fields need t > 0, got {t}")

    def fields(self, t):
        """(U, v pieces, tau_hat(U) pieces, entropy atoms) at time t."""
        self._check(t)
        c = self.crack
        a, b = self.domain
        xs = [a, -c.sigma * t, 0.0, c.sigma * t, b]
        st = self._states()
        pieces = tuple(constant_piece(xs[k], xs[k + 1], st[k][0]) for k in range(4) if xs[k + 1] > xs[k])
        U = RadonMeasure(self.domain, Density(pieces), ((0.0, 2.0 * t * c.Y0),))
        v = [(xs[k], xs[k + 1], st[k][1]) for k in range(4)]
        tau = [(xs[k], xs[k + 1], float(self.law.tau(st[k][0]))) for k in range(4)]
        tau_atoms = extend_stress_atomic(self.law, U.atoms)
        ent = self.entropy_atoms(t)
        return U, v, (tau, tau_atoms), ent

    def curve_states(self, t, curve):
        st = self._states()
        k = [c.name for c in self.curves].index(curve.name)
        return st[k], st[k + 1]

    def rh_residuals(self, t):
        self._check(t)
        rows = []
        for c in self.curves:
            left, right = self.curve_states(t, c)
            r = _elastic_jump_residuals(self.law, left, right, c.dX(t), c.weight(t),
                                        c.dw(t) if c.dw else 0.0)
            rows.append({"curve": c.name, "t": float(t), "residuals": list(r), "max": max(r)})
        return rows

    def entropy_atoms(self, t):
        self._check(t)
        out = []
        for c in self.curves:
            left, right = self.curve_states(t, c)
            m = _elastic_entropy_mass(self.law, left, right, c.dX(t), c.dw(t) if c.dw else 0.0)
            out.append((float(c.X(t)), float(m)))
        return out

    def energy(self, t, interval):
        """eta_hat(I) for the crack solution, with I containing the crack and both shocks."""
        self._check(t)
        c = self.crack
        a, b = interval
        if not (a < -c.sigma * t and c.sigma * t < b):
            raise DomainError("the interval must contain both shocks")
        W = self.law.W
        outer = (b - a - 2.0 * c.sigma * t) * float(W(c.lam))
        inner = 2.0 * c.sigma * t * (0.5 * c.Y0 ** 2 + float(W(c.alpha)))
        return outer + inner + self.law.L_W * 2.0 * t * c.Y0

    def energy_no_crack(self, t, interval):
        """Energy of the crack-free motion y = lam x on the same interval."""
        self._check(t)
        a, b = interval
        return (b - a) * float(self.law.W(self.crack.lam))

    def snapshot(self, t):
        from .verify import Segment, Snapshot
        self._check(t)
        c = self.crack
        a, b = self.domain
        xs = [a, -c.sigma * t, 0.0, c.sigma * t, b]
        segs = []
        for k, (u, v) in enumerate(self._states()):
            if not xs[k + 1] > xs[k]:
                continue
            mt = -float(self.law.tau(u))
            segs.append(Segment(xs[k], xs[k + 1],
                                lambda y, o, u=u: np.full(np.shape(y), u),
                                lambda y, o, v=v: np.full(np.shape(y), v),
                                lambda y, o, mt=mt: np.full(np.shape(y), mt)))
        w = 2.0 * t * c.Y0
        tau_atoms = extend_stress_atomic(self.law, [(0.0, w)])
        flux = -tau_atoms[0][1] if tau_atoms else 0.0
        return Snapshot(segs, [(0.0, w, flux)])


def slic_example_fields(law: StressLaw, lam, alpha, t, domain=(-2.0, 2.0)):
    """U(t), v(t), tau_hat(U(t)) and the entropy-production atoms of the slic example."""
    if not t > 0:
        raise DomainError(f"slic fields need t > 0, got {t}")
    return SlicSolution(law, lam, alpha, domain, (0.0, max(1.0, t))).fields(t)


def crack_report(law: StressLaw, lam, alpha, t=1.0):
    """Everything a crack run writes out: solution fields, verdict and RH residuals."""
    sol = SlicSolution(law, lam, alpha, valid_time=(0.0, max(1.0, t)))
    adm = crack_weakstar_admissible(law)
    d = sol.crack.to_dict()
    d.update({"admissible": adm.admissible, "L_tau": adm.L_tau, "reason": adm.reason,
              "t": float(t), "rh_residuals": sol.rh_residuals(t),
              "entropy_atoms": [{"x": x, "mass": m} for x, m in sol.entropy_atoms(t)]})
    return d
