"""Constitutive laws for the Lagrangian p-system.

Every law exposes two views of the same state:

* the physical view in the specific volume ``v``: pressure ``P(v)``, sound
  speed ``C(v) = sqrt(-P'(v))``, internal energy ``E(v)`` and the symmetric
  variable ``H(v) = int_v^inf C``;
* the symmetric view in ``h >= 0``: ``c(h)``, ``v(h)``, ``p(h)``, ``eps(h)``.

``h = 0`` is the vacuum, where ``v`` is reported as ``inf`` and the other
fields vanish.  The symmetric fields satisfy dp/dh = c, dv/dh = -1/c and
deps/dh = p/c.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import ConfigError, DomainError, InvalidConstitutiveLaw
from .quadrature import integrate


def beta_of_gamma(gamma: float) -> float:
    """beta = (gamma+1)/(gamma-1); gamma must exceed 1."""
    gamma = float(gamma)
    if not gamma > 1.0 or not math.isfinite(gamma):
        raise InvalidConstitutiveLaw(f"adiabatic exponent must be > 1, got {gamma!r}")
    return (gamma + 1.0) / (gamma - 1.0)


@dataclass(frozen=True)
class SymState:
    """Constant state in symmetric variables; h = 0 is the vacuum."""

    h: float
    u: float

    def __post_init__(self):
        if not self.h >= 0.0:
            raise DomainError(f"symmetric variable must be >= 0, got h={self.h!r}")

    @property
    def is_vacuum(self) -> bool:
        return self.h == 0.0

    def invariants(self):
        """Riemann invariants (u - h, u + h)."""
        return self.u - self.h, self.u + self.h


def _nonneg(h, name="h"):
    h = np.asarray(h, dtype=float)
    if np.any(~(h >= 0.0)):
        raise DomainError(f"{name} must be >= 0")
    return h


def _positive(v, name="v"):
    v = np.asarray(v, dtype=float)
    if np.any(~(v > 0.0)):
        raise DomainError(f"{name} must be > 0")
    return v


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


class GasLaw:
    """Interface shared by the gamma-law and tabulated laws."""

    kind = "abstract"
    beta = None

    # physical view ---------------------------------------------------
    def P(self, v):
        raise NotImplementedError

    def C(self, v):
        raise NotImplementedError

    def E(self, v):
        raise NotImplementedError

    def H(self, v):
        raise NotImplementedError

    # symmetric view --------------------------------------------------
    def v(self, h):
        raise NotImplementedError

    def c(self, h):
        v = self.v(h)
        return _out(np.where(np.isinf(v), 0.0, self.C(np.where(np.isinf(v), 1.0, v))))

    def p(self, h):
        v = self.v(h)
        return _out(np.where(np.isinf(v), 0.0, self.P(np.where(np.isinf(v), 1.0, v))))

    def eps(self, h):
        v = self.v(h)
        return _out(np.where(np.isinf(v), 0.0, self.E(np.where(np.isinf(v), 1.0, v))))

    def h_of_v(self, v):
        return self.H(v)

    def c_inverse(self, speed):
        raise NotImplementedError

    def volume_at_speed(self, speed):
        """Specific volume at which the sound speed equals ``speed``."""
        return self.v(self.c_inverse(speed))

    def fields(self, h):
        return self.c(h), self.v(h), self.p(h), self.eps(h)


class GammaLaw(GasLaw):
    """Polytropic law P(v) = A v^-gamma with closed-form symmetric fields.

    In the default rescaled mode the constant A is chosen so that

        c = h^beta, v = h^(1-beta)/(beta-1), p = h^(1+beta)/(beta+1),
        eps = h^2/(2(beta+1)).

    Passing ``A`` switches to raw mode, where with kappa = sqrt(A gamma)(beta-1)
    the fields read v = (h/kappa)^(1-beta), p = A (h/kappa)^(1+beta),
    c = sqrt(A gamma) (h/kappa)^beta and eps = A (h/kappa)^2/(gamma-1).
    The rescaled mode is the raw mode with A = (beta-1)^-(gamma+1)/gamma.
    """

    kind = "gamma"

    def __init__(self, gamma: float, A: float | None = None):
        self.beta = beta_of_gamma(gamma)
        self.gamma = float(gamma)
        self.rescaled = A is None
        if A is None:
            A = (self.beta - 1.0) ** (-(self.gamma + 1.0)) / self.gamma
        if not A > 0.0:
            raise InvalidConstitutiveLaw(f"pressure scale must be > 0, got A={A!r}")
        self.A = float(A)
        self.kappa = math.sqrt(self.A * self.gamma) * (self.beta - 1.0)

    def __repr__(self):
        mode = "rescaled" if self.rescaled else f"A={self.A:g}"
        return f"GammaLaw(gamma={self.gamma:g}, {mode})"

    def __eq__(self, other):
        return isinstance(other, GammaLaw) and (self.gamma, self.A) == (other.gamma, other.A)

    def __hash__(self):
        return hash(("gamma", self.gamma, self.A))

    def P(self, v):
        v = _positive(v)
        return _out(self.A * v ** (-self.gamma))

    def dP(self, v):
        v = _positive(v)
        return _out(-self.gamma * self.A * v ** (-self.gamma - 1.0))

    def C(self, v):
        v = _positive(v)
        return _out(np.sqrt(self.gamma * self.A) * v ** (-(self.gamma + 1.0) / 2.0))

    def E(self, v):
        v = _positive(v)
        return _out(self.A * v ** (1.0 - self.gamma) / (self.gamma - 1.0))

    def H(self, v):
        v = _positive(v)
        return _out(self.kappa * v ** (-1.0 / (self.beta - 1.0)))

    def v(self, h):
        h = _nonneg(h)
        b = self.beta
        with np.errstate(divide="ignore"):
            if self.rescaled:
                out = h ** (1.0 - b) / (b - 1.0)
            else:
                out = (h / self.kappa) ** (1.0 - b)
        return _out(out)

    def c(self, h):
        h = _nonneg(h)
        if self.rescaled:
            return _out(h ** self.beta)
        return _out(math.sqrt(self.A * self.gamma) * (h / self.kappa) ** self.beta)

    def p(self, h):
        h = _nonneg(h)
        b = self.beta
        if self.rescaled:
            return _out(h ** (1.0 + b) / (1.0 + b))
        return _out(self.A * (h / self.kappa) ** (1.0 + b))

    def eps(self, h):
        h = _nonneg(h)
        if self.rescaled:
            return _out(h * h / (2.0 * (self.beta + 1.0)))
        return _out(self.A * (h / self.kappa) ** 2 / (self.gamma - 1.0))

    def c_inverse(self, speed):
        s = _nonneg(speed, "speed")
        if self.rescaled:
            return _out(s ** (1.0 / self.beta))
        return _out(self.kappa * (s / math.sqrt(self.A * self.gamma)) ** (1.0 / self.beta))

    def volume_at_speed(self, speed):
        # v(c^-1(s)) without the intermediate h, so the power is taken once
        s = _nonneg(speed, "speed")
        b = self.beta
        with np.errstate(divide="ignore"):
            if self.rescaled:
                out = s ** ((1.0 - b) / b) / (b - 1.0)
            else:
                out = (s / math.sqrt(self.A * self.gamma)) ** ((1.0 - b) / b)
        return _out(out)


class TabulatedLaw(GasLaw):
    """Pressure law given by samples (v_i, P_i), v ascending.

    P is interpolated monotonically in log-log coordinates, so power laws are
    reproduced exactly.  Beyond the last sample P follows A v^-g with g the
    log-log slope of the interpolant at the last sample (or ``tail_exponent``)
    and A matched for continuity, so P and P' join smoothly by default.  The law is only defined for v >= v_min.
    """

    kind = "table"

    def __init__(self, v, P, tail_exponent: float | None = None, quad_tol: float = 1e-13):
        v = np.asarray(v, dtype=float)
        P = np.asarray(P, dtype=float)
        if v.ndim != 1 or v.shape != P.shape or v.size < 4:
            raise InvalidConstitutiveLaw("pressure table needs at least 4 (v, P) rows")
        if np.any(v <= 0) or np.any(np.diff(v) <= 0):
            raise InvalidConstitutiveLaw("table volumes must be positive and strictly increasing")
        if np.any(P <= 0) or np.any(np.diff(P) >= 0):
            raise InvalidConstitutiveLaw("tabulated pressure must be positive and strictly decreasing")
        self.v_tab, self.P_tab = v, P
        self.v_min, self.v_max = float(v[0]), float(v[-1])
        self._logv = np.log(v)
        self._spline = PchipInterpolator(self._logv, np.log(P))
        self._slope = self._spline.derivative()

        if tail_exponent is None:
            tail_exponent = -float(self._slope(self._logv[-1]))
        self.tail_exponent = float(tail_exponent)
        if not self.tail_exponent > 1.0:
            raise InvalidConstitutiveLaw(
                f"tail exponent {self.tail_exponent:.4g} <= 1: the integral of sqrt(-P') diverges")
        self._tail_A = self.P_tab[-1] * self.v_max ** self.tail_exponent
        self._tol = quad_tol

        # sound speed must be positive and decreasing (P convex) on the table
        grid = np.exp(np.linspace(self._logv[0], self._logv[-1], 8 * v.size))
        Cg = self.C(grid)
        if np.any(Cg <= 0.0) or np.any(np.diff(Cg) >= 0.0):
            raise InvalidConstitutiveLaw("tabulated law is not convex: sqrt(-P') must decrease in v")

        # cumulative H and E at the knots, integrated from the right
        g = self.tail_exponent
        H = np.empty_like(v)
        E = np.empty_like(v)
        H[-1] = 2.0 * math.sqrt(g * self.P_tab[-1] * self.v_max) / (g - 1.0)
        E[-1] = self.P_tab[-1] * self.v_max / (g - 1.0)
        for k in range(v.size - 2, -1, -1):
            H[k] = H[k + 1] + self._seg(self._C_log, self._logv[k], self._logv[k + 1])
            E[k] = E[k + 1] + self._seg(self._P_log, self._logv[k], self._logv[k + 1])
        self._H_knots, self._E_knots = H, E
        self.speed_knots = np.asarray(self.C(v), dtype=float)
        self.h_max = float(H[0])

    def __repr__(self):
        return f"TabulatedLaw(n={self.v_tab.size}, v=[{self.v_min:g}, {self.v_max:g}], tail={self.tail_exponent:.4g})"

    @classmethod
    def from_csv(cls, path, **kw):
        rows = []
        with open(path, newline="") as fh:
            for rec in csv.reader(fh):
                if not rec or rec[0].strip().startswith("#"):
                    continue
                try:
                    rows.append((float(rec[0]), float(rec[1])))
                except ValueError:
                    if rows:
                        raise ConfigError(f"{path}: bad row {rec!r}")
                    continue  # header
        if not rows:
            raise ConfigError(f"{path}: no data rows")
        arr = np.array(rows)
        return cls(arr[:, 0], arr[:, 1], **kw)

    @classmethod
    def sample(cls, law: GasLaw, v_lo=1e-3, v_hi=1e4, n=200, **kw):
        """Tabulate another law on a log-spaced grid."""
        v = np.geomspace(v_lo, v_hi, n)
        return cls(v, law.P(v), **kw)

    # integrands in y = log v, for the cumulative integrals
    def _C_log(self, y):
        return self.C(np.exp(y)) * np.exp(y)

    def _P_log(self, y):
        return self.P(np.exp(y)) * np.exp(y)

    def _seg(self, f, a, b):
        return integrate(f, a, b, tol=self._tol * max(1.0, abs(float(f(np.array([a]))[0]))) * (b - a)).value

    def _check(self, v):
        v = _positive(v)
        if np.any(v < self.v_min * (1 - 1e-14)):
            raise DomainError(f"v below tabulated range (v_min={self.v_min:g})")
        return v

    def P(self, v):
        v = self._check(v)
        inside = v <= self.v_max
        y = np.log(v)
        out = np.where(inside, np.exp(self._spline(np.minimum(y, self._logv[-1]))),
                       self._tail_A * v ** (-self.tail_exponent))
        return _out(out)

    def dP(self, v):
        v = self._check(v)
        inside = v <= self.v_max
        y = np.log(v)
        ys = np.minimum(y, self._logv[-1])
        in_val = np.exp(self._spline(ys)) * self._slope(ys) / v
        tail = -self.tail_exponent * self._tail_A * v ** (-self.tail_exponent - 1.0)
        return _out(np.where(inside, in_val, tail))

    def C(self, v):
        return _out(np.sqrt(np.maximum(-np.asarray(self.dP(v)), 0.0)))

    def _cumulative(self, v, knots, f, tail):
        v = np.atleast_1d(self._check(v))
        out = np.empty_like(v)
        for i, vi in enumerate(v):
            if vi >= self.v_max:
                out[i] = tail(vi)
                continue
            k = min(int(np.searchsorted(self.v_tab, vi, side="right")), self.v_tab.size - 1)
            out[i] = knots[k] + self._seg(f, math.log(vi), self._logv[k])
        return out

    def H(self, v):
        g = self.tail_exponent
        tail = lambda x: 2.0 * math.sqrt(g * self._tail_A) * x ** ((1.0 - g) / 2.0) / (g - 1.0)
        res = self._cumulative(v, self._H_knots, self._C_log, tail)
        return _out(res if np.ndim(v) else res[0])

    def E(self, v):
        g = self.tail_exponent
        tail = lambda x: self._tail_A * x ** (1.0 - g) / (g - 1.0)
        res = self._cumulative(v, self._E_knots, self._P_log, tail)
        return _out(res if np.ndim(v) else res[0])

    def v(self, h):
        h = _nonneg(h)
        if np.any(h > self.h_max * (1 + 1e-12)):
            raise DomainError(f"h exceeds tabulated range (h_max={self.h_max:g})")
        flat = np.atleast_1d(h).ravel()
        out = np.empty_like(flat)
        g = self.tail_exponent
        h_tail = self._H_knots[-1]
        for i, hi in enumerate(flat):
            if hi == 0.0:
                out[i] = math.inf
            elif hi <= h_tail:
                # invert the analytic tail directly
                out[i] = (hi * (g - 1.0) / (2.0 * math.sqrt(g * self._tail_A))) ** (2.0 / (1.0 - g))
            else:
                k = int(np.searchsorted(-self._H_knots, -hi, side="left"))
                k = min(max(k, 1), self.v_tab.size - 1)
                lo, hi_v = self._logv[k - 1], self._logv[k]
                y = brentq(lambda y: self.H(math.exp(y)) - hi, lo, hi_v, xtol=1e-15, rtol=1e-15)
                out[i] = math.exp(y)
        return _out(out.reshape(np.shape(h)) if np.ndim(h) else out[0])

    def volume_at_speed(self, speed):
        s = _nonneg(speed, "speed")
        flat = np.atleast_1d(s).ravel()
        out = np.empty_like(flat)
        c_top = float(self.C(self.v_min))
        g = self.tail_exponent
        c_in = float(self.C(self.v_max))
        # a user-set tail exponent can leave a jump in C at v_max
        c_tail = math.sqrt(g * self._tail_A * self.v_max ** (-g - 1.0))
        for i, si in enumerate(flat):
            if si == 0.0:
                out[i] = math.inf
            elif si > c_top * (1 + 1e-12):
                raise DomainError(f"speed {si:g} exceeds tabulated range ({c_top:g})")
            elif si <= c_tail:
                out[i] = (si * si / (g * self._tail_A)) ** (-1.0 / (g + 1.0))
            elif si <= c_in:
                out[i] = self.v_max
            else:
                k = int(np.searchsorted(-self.speed_knots, -si, side="left"))
                k = min(max(k, 1), self.v_tab.size - 1)
                y = brentq(lambda y: float(self.C(math.exp(y))) - si, self._logv[k - 1],
                           self._logv[k], xtol=1e-15, rtol=1e-15)
                out[i] = math.exp(y)
        return _out(out.reshape(np.shape(s)) if np.ndim(s) else out[0])

    def c_inverse(self, speed):
        vs = np.asarray(self.volume_at_speed(speed), dtype=float)
        out = np.zeros_like(vs)
        fin = np.isfinite(vs)
        if np.any(fin):
            out[fin] = self.H(vs[fin])
        return _out(out)


def sym_fields(law: GasLaw, h):
    """Return (c, v, p, eps) at symmetric variable ``h``; v(0) = inf."""
    return law.fields(h)


def h_of_v(law: GasLaw, v):
    return law.h_of_v(v)


def c_inverse(law: GasLaw, speed):
    return law.c_inverse(speed)


def law_from_config(section, base_dir=None) -> GasLaw:
    """Build a law from a config mapping: law = gamma | table."""
    kind = str(section.get("law", "gamma")).strip().lower()
    if kind == "gamma":
        try:
            gamma = float(section.get("gamma", 3.0))
            A = section.get("A")
            return GammaLaw(gamma, None if A in (None, "") else float(A))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if kind == "table":
        path = section.get("table_path")
        if not path:
            raise ConfigError("law = table needs table_path")
        path = Path(path)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        tail = section.get("tail_exponent")
        return TabulatedLaw.from_csv(path, tail_exponent=None if tail in (None, "") else float(tail))
    raise ConfigError(f"unknown law {kind!r} (expected gamma or table)")


def law_to_dict(law: GasLaw) -> dict:
    if isinstance(law, GammaLaw):
        d = {"law": "gamma", "gamma": law.gamma}
        if not law.rescaled:
            d["A"] = law.A
        return d
    return {"law": "table", "n": int(law.v_tab.size), "tail_exponent": law.tail_exponent}
