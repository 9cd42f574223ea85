"""Measure-valued specific volume: density pieces plus Dirac atoms.

A ``RadonMeasure`` on ``[a, b]`` is a ``Density`` (ordered pieces, each an
analytic evaluator) plus a finite list of atoms ``(x, w)``.  Pieces are
symbolic rather than sampled so that quadrature can resolve the integrable
blow-up of the density next to a vacuum.

Pieces evaluate at offsets from an anchor point (``x = origin + y``) so that
points very close to a singular endpoint are represented without
cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DomainError, QuadratureError
from .quadrature import integrate
from .thermo import GasLaw, law_from_config, law_to_dict

ATOM_CUTOFF = 1e-14

# named callbacks usable by "tabulated" pieces (and thus by JSON files)
CALLBACKS: dict[str, Callable] = {}


def register_callback(name: str, fn: Callable):
    CALLBACKS[name] = fn
    return fn


@dataclass(frozen=True)
class Piece:
    """Density on ``[x0, x1]``.

    kind:
      constant     params ``value``
      simple-wave  params ``law``, ``t``, ``t0``, ``xc``, ``family`` (+1/-1);
                   density v(c^-1(family (x - xc)/(t - t0)))
      tabulated    params ``name`` of a registered callback ``f(x) -> v``
      callback     params ``fn`` (not serialisable), ``singular``
    """

    x0: float
    x1: float
    kind: str
    params: dict = field(default_factory=dict, compare=False, hash=False)
    key: tuple = ()

    def __post_init__(self):
        if not self.x1 > self.x0:
            raise DomainError(f"piece endpoints must increase: [{self.x0}, {self.x1}]")
        if self.kind not in ("constant", "simple-wave", "tabulated", "callback"):
            raise DomainError(f"unknown piece kind {self.kind!r}")
        if not self.key:
            object.__setattr__(self, "key", _piece_key(self.kind, self.params))

    def __eq__(self, other):
        return (isinstance(other, Piece) and (self.x0, self.x1, self.kind, self.key)
                == (other.x0, other.x1, other.kind, other.key))

    def __hash__(self):
        return hash((self.x0, self.x1, self.kind, self.key))

    @property
    def singular(self) -> tuple[bool, bool]:
        """Whether the density may blow up at the left / right endpoint."""
        if self.kind == "simple-wave":
            xc = self.params["xc"]
            return self.x0 == xc, self.x1 == xc
        if self.kind == "callback":
            return tuple(self.params.get("singular", (False, False)))
        return False, False

    def evaluate(self, y, origin: float):
        """Density at x = origin + y (array ``y``)."""
        y = np.asarray(y, dtype=float)
        kind, prm = self.kind, self.params
        if kind == "constant":
            return np.full(y.shape, float(prm["value"]))
        if kind == "simple-wave":
            law = prm["law"]
            dt = prm["t"] - prm["t0"]
            speed = prm["family"] * ((origin - prm["xc"]) + y) / dt
            # round-off may push the speed of an edge point slightly negative
            return np.asarray(law.volume_at_speed(np.maximum(speed, 0.0)), dtype=float)
        fn = CALLBACKS[prm["name"]] if kind == "tabulated" else prm["fn"]
        try:
            return np.asarray(fn(y, origin), dtype=float)
        except TypeError:
            return np.asarray(fn(origin + y), dtype=float)

    def __call__(self, x):
        return self.evaluate(np.asarray(x, dtype=float), 0.0)

    def with_bounds(self, x0, x1):
        return Piece(x0, x1, self.kind, self.params, self.key)

    def to_dict(self):
        prm = dict(self.params)
        if self.kind == "simple-wave":
            prm["law"] = law_to_dict(prm["law"])
        elif self.kind == "callback":
            raise ValueError("callback pieces cannot be serialised; register a named callback")
        return {"x0": self.x0, "x1": self.x1, "kind": self.kind, "params": prm}

    @classmethod
    def from_dict(cls, d):
        prm = dict(d.get("params", {}))
        if d["kind"] == "simple-wave":
            prm["law"] = law_from_config(prm["law"])
        if d["kind"] == "tabulated" and prm.get("name") not in CALLBACKS:
            raise DomainError(f"unknown density callback {prm.get('name')!r}")
        return cls(float(d["x0"]), float(d["x1"]), d["kind"], prm)


def _piece_key(kind, prm):
    if kind == "constant":
        return (float(prm["value"]),)
    if kind == "simple-wave":
        return (repr(prm["law"]), prm["t"], prm["t0"], prm["xc"], prm["family"])
    if kind == "tabulated":
        return (prm["name"],)
    return (id(prm.get("fn")),)


def constant_piece(x0, x1, value):
    return Piece(float(x0), float(x1), "constant", {"value": float(value)})


def simple_wave_piece(x0, x1, law, t, t0, xc, family):
    return Piece(float(x0), float(x1), "simple-wave",
                 {"law": law, "t": float(t), "t0": float(t0), "xc": float(xc), "family": int(family)})


def callback_piece(x0, x1, fn, singular=(False, False)):
    return Piece(float(x0), float(x1), "callback", {"fn": fn, "singular": tuple(singular)})


@dataclass(frozen=True)
class Density:
    """Ordered pieces covering a domain.

    ``field`` says what the pieces' values mean downstream: ``"v"`` for the
    specific volume itself, ``"p"`` / ``"eps"`` for the constitutive fields
    composed with it (see ``extend_pressure``).
    """

    pieces: tuple
    field: str = "v"
    law: GasLaw | None = None

    def __post_init__(self):
        ps = tuple(self.pieces)
        object.__setattr__(self, "pieces", ps)
        for p, q in zip(ps, ps[1:]):
            if not q.x0 == p.x1:
                raise DomainError(f"pieces must be contiguous: {p.x1} != {q.x0}")

    @property
    def domain(self):
        if not self.pieces:
            return None
        return self.pieces[0].x0, self.pieces[-1].x1

    @property
    def breakpoints(self):
        if not self.pieces:
            return np.empty(0)
        return np.array([p.x0 for p in self.pieces] + [self.pieces[-1].x1])

    def _apply(self, vals):
        if self.field == "v":
            return vals
        fin = np.isfinite(vals)
        safe = np.where(fin, vals, 1.0)
        out = self.law.P(safe) if self.field == "p" else self.law.E(safe)
        return np.where(fin, out, 0.0)

    def evaluate(self, y, origin=0.0):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        x = origin + y
        bp = self.breakpoints
        if bp.size == 0:
            return self._apply(np.zeros_like(y))
        idx = np.clip(np.searchsorted(bp, x, side="right") - 1, 0, len(self.pieces) - 1)
        out = np.zeros_like(y)
        outside = (x < bp[0]) | (x > bp[-1])
        for k in np.unique(idx):
            sel = (idx == k) & ~outside
            if sel.any():
                out[sel] = self.pieces[k].evaluate(y[sel], origin)
        return self._apply(out)

    def __call__(self, x):
        res = self.evaluate(x)
        return float(res[0]) if np.ndim(x) == 0 else res


@dataclass(frozen=True)
class RadonMeasure:
    """Positive measure on ``domain``: density pieces plus atoms."""

    domain: tuple
    density: Density
    atoms: tuple = ()

    def __post_init__(self):
        a, b = map(float, self.domain)
        if not b > a:
            raise DomainError(f"empty domain [{a}, {b}]")
        object.__setattr__(self, "domain", (a, b))
        dens = self.density
        if not isinstance(dens, Density):
            dens = Density(tuple(dens))
            object.__setattr__(self, "density", dens)
        if dens.pieces and dens.domain != (a, b):
            raise DomainError(f"pieces cover {dens.domain}, domain is {(a, b)}")
        atoms = sorted((float(x), float(w)) for x, w in self.atoms if w >= ATOM_CUTOFF)
        for x, w in atoms:
            if not a <= x <= b:
                raise DomainError(f"atom at {x} outside domain [{a}, {b}]")
        for (x1, _), (x2, _) in zip(atoms, atoms[1:]):
            if x1 == x2:
                raise DomainError(f"duplicate atom location {x1}")
        if any(w < 0 for _, w in self.atoms):
            raise DomainError("atom weights must be positive")
        object.__setattr__(self, "atoms", tuple(atoms))

    @property
    def pieces(self):
        return self.density.pieces

    def to_dict(self):
        return {"domain": list(self.domain),
                "pieces": [p.to_dict() for p in self.pieces],
                "atoms": [{"x": x, "w": w} for x, w in self.atoms]}

    @classmethod
    def from_dict(cls, d):
        pieces = tuple(Piece.from_dict(p) for p in d["pieces"])
        atoms = tuple((a["x"], a["w"]) for a in d.get("atoms", []))
        return cls(tuple(d["domain"]), Density(pieces), atoms)

    def with_atoms(self, atoms):
        return replace(self, atoms=tuple(atoms))


def iota(density, domain=None) -> RadonMeasure:
    """Embed a density (Density or list of pieces) as an atomless measure."""
    if not isinstance(density, Density):
        density = Density(tuple(density))
    return RadonMeasure(domain or density.domain, density, ())


def project_pi(mu: RadonMeasure) -> Density:
    """Density of the absolutely continuous part."""
    return mu.density


def constant_measure(a, b, value, atoms=()):
    return RadonMeasure((a, b), Density((constant_piece(a, b, value),)), tuple(atoms))


def extend_pressure(law: GasLaw, V: RadonMeasure) -> Density:
    """Pressure field P(Pi(V)); atoms carry no pressure."""
    return Density(project_pi(V).pieces, "p", law)


def extend_energy(law: GasLaw, V: RadonMeasure) -> Density:
    """Internal energy field E(Pi(V)); atoms carry no energy."""
    return Density(project_pi(V).pieces, "eps", law)


def _piece_integral(piece: Piece, fn, tol):
    """Integral of fn(piece values) over the piece, anchored at singular ends."""
    L = piece.x1 - piece.x0
    left, right = piece.singular
    if left and right:
        mid = piece.x0 + 0.5 * L
        lo = _piece_integral(piece.with_bounds(piece.x0, mid), fn, tol / 2)
        hi = _piece_integral(piece.with_bounds(mid, piece.x1), fn, tol / 2)
        return lo[0] + hi[0], lo[1] + hi[1]
    if right:
        res = integrate(lambda y: fn(piece.evaluate(y, piece.x1)), -L, 0.0, tol=tol,
                        singular=(False, True))
    else:
        res = integrate(lambda y: fn(piece.evaluate(y, piece.x0)), 0.0, L, tol=tol,
                        singular=(left, False))
    return float(res.value), res.error


@dataclass(frozen=True)
class MeasureNormReport:
    closed_form: float | None
    quadrature: float
    abs_err: float | None
    error_estimate: float = 0.0

    def to_dict(self):
        return {"closed_form": self.closed_form, "quadrature": self.quadrature,
                "abs_err": self.abs_err, "error_estimate": self.error_estimate}


def density_integral(density: Density, tol=1e-10, absolute=True):
    total, err = 0.0, 0.0
    fn = (lambda f: np.abs(density._apply(f))) if absolute else density._apply
    for piece in density.pieces:
        try:
            val, e = _piece_integral(piece, fn, tol)
        except QuadratureError as exc:
            raise QuadratureError(f"density quadrature failed on [{piece.x0}, {piece.x1}]: {exc}",
                                  partial=total) from exc
        total += val
        err += e
    return total, err


def total_variation(mu: RadonMeasure, tol=1e-10, closed_form=None) -> MeasureNormReport:
    """|mu|(domain) = int |density| + sum |w_i|."""
    dens, err = density_integral(mu.density, tol)
    quad = dens + sum(abs(w) for _, w in mu.atoms)
    abs_err = None if closed_form is None else abs(closed_form - quad)
    return MeasureNormReport(closed_form, quad, abs_err, err)


@dataclass(frozen=True)
class ConsistencyResult:
    consistent: bool
    atom_index: int | None = None
    x: float | None = None
    liminf_estimate: float | None = None
    bounds: tuple = ()

    def __bool__(self):
        return self.consistent

    def to_dict(self):
        return {"consistent": self.consistent, "atom_index": self.atom_index, "x": self.x,
                "liminf_estimate": self.liminf_estimate}


DEFAULT_RADII = tuple(2.0 ** -k for k in range(3, 21))


def _ess_lower_bound(density: Density, x, r, a, b, n=48):
    offs = r * np.concatenate([np.geomspace(1e-3, 1.0, n), np.linspace(0.05, 1.0, n)])
    vals = []
    for sgn in (-1.0, 1.0):
        y = sgn * offs
        ok = (x + y >= a) & (x + y <= b)
        if ok.any():
            vals.append(density.evaluate(y[ok], x))
    if not vals:
        return math.inf
    return float(np.min(np.concatenate(vals)))


def consistency_check(V: RadonMeasure, probe_radii=DEFAULT_RADII, growth=2.0, threshold=None,
                      monotone_rtol=1e-9) -> ConsistencyResult:
    """Test that the density blows up approaching every atom.

    For each atom the essential lower bound of the density on the punctured
    neighbourhood of radius r is sampled over ``probe_radii`` (decreasing).
    The atom passes when these bounds never decrease and grow by at least the
    factor ``growth`` from the largest to the smallest radius.  If
    ``threshold`` (a function of r) is given the bounds must additionally
    exceed ``threshold(r)`` at every radius of the second half of the
    schedule.  The first failing atom is reported.
    """
    radii = np.asarray(probe_radii, dtype=float)
    if radii.size < 2 or np.any(np.diff(radii) >= 0) or np.any(radii <= 0):
        raise DomainError("probe radii must be positive and strictly decreasing")
    a, b = V.domain
    for i, (x, _w) in enumerate(V.atoms):
        lb = np.array([_ess_lower_bound(V.density, x, r, a, b) for r in radii])
        ok = bool(np.all(np.diff(lb) >= -monotone_rtol * np.abs(lb[1:])))
        ok &= bool(lb[-1] >= growth * lb[0]) if np.isfinite(lb[-1]) else True
        if threshold is not None:
            half = radii.size // 2
            ok &= bool(np.all(lb[half:] > np.array([threshold(r) for r in radii[half:]])))
        if not ok:
            return ConsistencyResult(False, i, x, float(lb[-1]), tuple(float(v) for v in lb))
    return ConsistencyResult(True)


def sqrt_threshold(r):
    """The r^(-1/2) divergence schedule."""
    return r ** -0.5


def measure_distance(mu1: RadonMeasure, mu2: RadonMeasure, tol=1e-10) -> float:
    """Total variation of mu1 - mu2: L1 distance of densities plus atom mismatch."""
    if mu1.domain != mu2.domain:
        raise DomainError(f"domains differ: {mu1.domain} vs {mu2.domain}")
    d1, d2 = mu1.density, mu2.density
    pts = np.union1d(np.union1d(d1.breakpoints, d2.breakpoints), mu1.domain)
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        sing = [False, False]
        for d in (d1, d2):
            for p in d.pieces:
                if p.x0 <= lo and hi <= p.x1:
                    sl, sr = p.singular
                    sing[0] |= sl and p.x0 == lo
                    sing[1] |= sr and p.x1 == hi
        anchor = hi if sing[1] and not sing[0] else lo
        f = lambda y, o=anchor: np.abs(d1.evaluate(y, o) - d2.evaluate(y, o))
        a, b = lo - anchor, hi - anchor
        if sing[0] and sing[1]:
            mid = 0.5 * (lo + hi)
            total += integrate(lambda y: np.abs(d1.evaluate(y, lo) - d2.evaluate(y, lo)),
                               0.0, mid - lo, tol=tol, singular=(True, False)).value
            total += integrate(lambda y: np.abs(d1.evaluate(y, hi) - d2.evaluate(y, hi)),
                               mid - hi, 0.0, tol=tol, singular=(False, True)).value
        else:
            total += integrate(f, a, b, tol=tol, singular=tuple(sing)).value
    w1 = dict(mu1.atoms)
    w2 = dict(mu2.atoms)
    for x in set(w1) | set(w2):
        total += abs(w1.get(x, 0.0) - w2.get(x, 0.0))
    return float(total)
