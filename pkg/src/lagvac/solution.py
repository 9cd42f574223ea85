"""Time-dependent piecewise solutions evaluable at any (t, x).

A solution is described, at each time, by an ordered list of ``Region``
objects partitioning the domain, and globally by a list of ``DiscCurve``
objects (shocks and vacuum atoms) with their positions X(t) and atom
weights w(t).  Subclasses only have to provide ``regions(t)`` and
``curves``; sampling, one-sided limits and the measure V(t) are generic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, EventTimeError, OnDiscontinuity
from .measure import ATOM_CUTOFF, Density, RadonMeasure, constant_piece


@dataclass
class Region:
    """Smooth part of the solution between x0 and x1 at a fixed time.

    ``hu(y, origin)`` returns arrays (h, u) at x = origin + y and ``piece``
    builds the density descriptor of the specific volume on [x0, x1].
    """

    x0: float
    x1: float
    rid: str
    hu: Callable
    piece: Callable
    kind: str = "constant"

    def edge(self, side):
        """One-sided (h, u) at the left (side=0) or right (side=1) edge."""
        x = self.x0 if side == 0 else self.x1
        h, u = self.hu(np.zeros(1), x)
        return float(h[0]), float(u[0])


def constant_region(x0, x1, rid, state, law):
    h, u = state.h, state.u
    v = law.v(h)

    def hu(y, origin):
        y = np.asarray(y, dtype=float)
        return np.full(y.shape, h), np.full(y.shape, u)

    return Region(x0, x1, rid, hu, lambda a, b: constant_piece(a, b, v), "constant")


@dataclass
class DiscCurve:
    """Discontinuity x = X(t) for t in the open interval ``t_range``.

    ``w`` is the atom weight of the specific volume carried by the curve
    (zero for shocks).  ``dX`` / ``dw`` are exact derivatives when known.
    """

    name: str
    kind: str
    X: Callable
    t_range: tuple
    w: Callable | None = None
    dX: Callable | None = None
    dw: Callable | None = None
    meta: dict = field(default_factory=dict)

    def weight(self, t):
        return 0.0 if self.w is None else float(self.w(t))

    def active(self, t):
        lo, hi = self.t_range
        return lo < t < hi

    def present(self, t):
        lo, hi = self.t_range
        return lo <= t <= hi


class PiecewiseSolution:
    """Base class; subclasses implement ``regions(t)`` and set ``curves``."""

    kind = "piecewise"

    def __init__(self, law, domain, valid_time, curves=(), events=()):
        self.law = law
        self.domain = (float(domain[0]), float(domain[1]))
        self.valid_time = tuple(valid_time)
        self.curves = list(curves)
        self.events = tuple(sorted(events))

    # to be provided -------------------------------------------------
    def regions(self, t) -> list:
        raise NotImplementedError

    # generic machinery -----------------------------------------------
    def check_time(self, t, allow_events=True):
        lo, hi = self.valid_time
        if not lo <= t <= hi:
            raise DomainError(f"t={t} outside validity interval [{lo}, {hi}]")
        if not allow_events and any(abs(t - e) <= 1e-14 * max(1.0, abs(e)) for e in self.events):
            raise EventTimeError(f"t={t} is an interaction time")

    def active_curves(self, t):
        return [c for c in self.curves if c.active(t)]

    def _regions(self, t):
        a, b = self.domain
        out = []
        for reg in self.regions(t):
            x0, x1 = max(reg.x0, a), min(reg.x1, b)
            if x1 > x0:
                reg.x0, reg.x1 = x0, x1
                out.append(reg)
        return out

    def measure(self, t) -> RadonMeasure:
        """Specific volume V(t) as a Radon measure."""
        self.check_time(t)
        pieces = tuple(r.piece(r.x0, r.x1) for r in self._regions(t))
        atoms = []
        # closed range: an atom already exists at its creation time
        for c in (c for c in self.curves if c.present(t)):
            w = c.weight(t)
            if w >= ATOM_CUTOFF:
                atoms.append((float(c.X(t)), w))
        return RadonMeasure(self.domain, Density(pieces), tuple(atoms))

    def one_sided(self, t, x, rtol=1e-12):
        """(left, right) limits of (h, u) at x; regions are matched by edges."""
        regs = self._regions(t)
        scale = rtol * max(1.0, abs(x))
        left = right = None
        for r in regs:
            if abs(r.x1 - x) <= scale:
                left = r.edge(1)
            if abs(r.x0 - x) <= scale and right is None:
                right = r.edge(0)
            if r.x0 < x - scale and x + scale < r.x1:
                left = right = tuple(float(a[0]) for a in r.hu(np.array([x - r.x0]), r.x0))
        if left is None or right is None:
            raise DomainError(f"no region edge at x={x} for t={t}")
        return left, right

    def curve_states(self, t, curve):
        """One-sided (h, u) states on both sides of a curve."""
        return self.one_sided(t, float(curve.X(t)))

    def state(self, t, x):
        """(h, u) at a point; raises OnDiscontinuity on a curve."""
        self.check_time(t)
        for c in self.active_curves(t):
            X = float(c.X(t))
            if x == X:
                left, right = self.curve_states(t, c)
                if left != right:
                    raise OnDiscontinuity(f"x={x} lies on {c.name} at t={t}", left, right)
        for r in self._regions(t):
            if r.x0 <= x <= r.x1:
                h, u = r.hu(np.array([x - r.x0]), r.x0)
                return float(h[0]), float(u[0])
        raise DomainError(f"x={x} outside the domain {self.domain}")

    def sample(self, t, xs):
        """Fields on a grid: dict of arrays h, u, p, v and region ids.

        Grid points that fall exactly on a discontinuity take the value of
        the region to their right.
        """
        self.check_time(t)
        xs = np.asarray(xs, dtype=float)
        h = np.full(xs.shape, np.nan)
        u = np.full(xs.shape, np.nan)
        rid = np.empty(xs.shape, dtype=object)
        for r in self._regions(t):
            sel = (xs >= r.x0) & (xs <= r.x1)
            if sel.any():
                hh, uu = r.hu(xs[sel] - r.x0, r.x0)
                h[sel], u[sel] = hh, uu
                rid[sel] = r.rid
        ok = np.isfinite(h)
        p = np.full(xs.shape, np.nan)
        v = np.full(xs.shape, np.nan)
        p[ok] = self.law.p(h[ok])
        v[ok] = self.law.v(h[ok])
        return {"x": xs, "h": h, "u": u, "p": p, "v": v, "region_id": rid}

    def norm(self, t, tol=1e-10):
        from .measure import total_variation
        return total_variation(self.measure(t), tol=tol)

    def describe(self) -> dict:
        return {"kind": self.kind, "domain": list(self.domain), "valid_time": list(self.valid_time),
                "events": list(self.events), "curves": [c.name for c in self.curves]}


def straight(x0, t0, speed):
    """Position function of a straight line through (t0, x0)."""
    return lambda t: x0 + speed * (t - t0)


def finite_or_inf(x):
    return x if math.isfinite(x) else math.inf
