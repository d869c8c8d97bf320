"""Closed curves on a surface: words, geodesic representatives, crossings, twists.

Every geometric question is answered by walking the closed geodesic through
the Dirichlet domain (see ``_walk``).  Intersection numbers are counts of
chord crossings inside the domain; Dehn twists splice a loop around the
twisting curve into the cutting word at every crossing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from .hyp2 import GeodesicH2, MoebiusMap, NonHyperbolic, axis as _axis
from .words import (Word, cyclic_reduce, exponent_sums, format_word, free_reduce_int,
                    parse_word)
from . import _walk
from ._domain import disk_to_ideal


class TrivialClass(ValueError):
    pass


class NotDisjoint(ValueError):
    pass


@dataclass(frozen=True)
class CurveClass:
    """Free homotopy class, stored as a cyclically reduced word."""
    word: Word

    def __post_init__(self):
        w = tuple(self.word)
        object.__setattr__(self, "word", w)
        if not w:
            raise TrivialClass("empty word")
        if cyclic_reduce(w) != w:
            raise ValueError(f"word {format_word(w)} is not cyclically reduced")

    @classmethod
    def of(cls, w) -> "CurveClass":
        """Accepts text or a symbol sequence and reduces it."""
        if isinstance(w, str):
            w = parse_word(w)
        w = cyclic_reduce(w)
        if not w:
            raise TrivialClass("word reduces to the identity")
        return cls(w)

    def __str__(self):
        return format_word(self.word)

    def inverse(self) -> "CurveClass":
        from .words import inverse
        return CurveClass(inverse(self.word))


class ClosedGeodesic:
    """Geodesic representative of a class, with its walk through the domain."""

    def __init__(self, surface, cls: CurveClass, walk: "_walk.Walk"):
        self.surface = surface
        self.cls = cls
        self.walk = walk
        self.length = walk.length
        self._simple: Optional[bool] = None

    @property
    def axis(self) -> GeodesicH2:
        e1, e2 = self.walk.e1[0], self.walk.e2[0]
        return GeodesicH2.from_endpoints(disk_to_ideal(e1), disk_to_ideal(e2))

    @property
    def simple(self) -> bool:
        if self._simple is None:
            self._simple = not self_crossings(self)
        return self._simple

    @property
    def key(self) -> tuple:
        """Oriented identity: canonical cutting word."""
        return self.walk.sides

    @property
    def unoriented_key(self) -> tuple:
        rev = _reverse_sides(self.surface.domain, self.walk.sides)
        return min(self.walk.sides, _canonical(rev))

    def same_curve(self, other: "ClosedGeodesic") -> bool:
        return self.unoriented_key == other.unoriented_key

    def reversed(self) -> "ClosedGeodesic":
        return geodesic_rep(self.surface, self.cls.inverse())

    def __repr__(self):
        return f"ClosedGeodesic({self.cls}, length={self.length:.9f})"


def _canonical(sides: Sequence[int]) -> tuple:
    sides = tuple(sides)
    n = len(sides)
    return min(sides[j:] + sides[:j] for j in range(n))


def _reverse_sides(domain, sides) -> tuple:
    return tuple(domain.inv[i] for i in reversed(sides))


# ---------------------------------------------------------------- reps

def _cache(surface) -> dict:
    c = surface.__dict__.get("_geodesic_cache")
    if c is None:
        c = surface.__dict__["_geodesic_cache"] = {}
    return c


def geodesic_rep(s, c) -> ClosedGeodesic:
    if not isinstance(c, CurveClass):
        c = CurveClass.of(c)
    cache = _cache(s)
    if c.word in cache:
        return cache[c.word]
    m = MoebiusMap.from_entries(*s.matrix(c.word))
    if m.kind(1e-9) != "hyperbolic":
        raise TrivialClass(f"{c} has {m.kind(1e-9)} holonomy")
    try:
        w = _walk.walk_generator_word(s, c.word)
    except _walk.WalkError as e:
        raise TrivialClass(str(e)) from e
    g = ClosedGeodesic(s, c, w)
    cache[c.word] = g
    return g


def _from_side_word(s, side_word) -> ClosedGeodesic:
    dom = s.domain
    w = _walk.walk_side_word(dom, side_word)
    gen = cyclic_reduce(dom.side_word_to_generators(w.sides))
    cls = CurveClass(gen)
    g = ClosedGeodesic(s, cls, w)
    _cache(s).setdefault(gen, g)
    return g


# ---------------------------------------------------------------- crossings

def self_crossings(g: ClosedGeodesic):
    return _walk.crossings(g.walk, g.walk, self_pairs=True)


def is_simple(s, c) -> bool:
    g = c if isinstance(c, ClosedGeodesic) else geodesic_rep(s, c)
    if g.walk.power > 1:
        return False
    return g.simple


def crossings(g1: ClosedGeodesic, g2: ClosedGeodesic):
    """Crossing records of g1 with g2, ordered along g1."""
    if g1.same_curve(g2):
        return []
    return _walk.crossings(g1.walk, g2.walk)


def geom_intersection(s, c1, c2) -> int:
    g1 = c1 if isinstance(c1, ClosedGeodesic) else geodesic_rep(s, c1)
    g2 = c2 if isinstance(c2, ClosedGeodesic) else geodesic_rep(s, c2)
    # count from the shorter walk so that the symmetric answer is computed
    # by one fixed rule
    a, b = sorted((g1, g2), key=lambda g: (g.walk.n, g.key))
    return len(crossings(a, b))


# ---------------------------------------------------------------- twists

@dataclass
class TwistSpec:
    """Twists about mutually disjoint simple geodesics, (curve, exponent) pairs."""
    pairs: List[Tuple[ClosedGeodesic, int]] = field(default_factory=list)

    def __post_init__(self):
        self.pairs = [(a, int(n)) for a, n in self.pairs]
        for i, (a, _) in enumerate(self.pairs):
            if not a.simple:
                raise ValueError(f"twist curve {a.cls} is not simple")
            for b, _ in self.pairs[i + 1:]:
                if _walk.crossings(a.walk, b.walk):
                    raise NotDisjoint(f"{a.cls} and {b.cls} intersect")

    @classmethod
    def single(cls, alpha: ClosedGeodesic, n: int) -> "TwistSpec":
        return cls([(alpha, n)])


# Sign convention: with exponent +1 the curve turns right onto the twisting
# curve at every crossing (clockwise from its own heading).  This is the
# direction in which raising the Fenchel-Nielsen twist by one full cuff
# length acts on markings, and it makes angles in the collar fall towards
# the core angle and rise after it.
TWIST_SIGN = -1


def _crossing_exponent(n: int, angle: float) -> int:
    """Loop exponent spliced in at one crossing with oriented angle ``angle``."""
    e = n if angle < math.pi else -n
    return e * TWIST_SIGN


def _twisted_side_word(dom, gamma: ClosedGeodesic, spec: TwistSpec) -> tuple:
    gw = gamma.walk
    inserts = {}   # tile of gamma -> list of (position, side word)
    for alpha, n in spec.pairs:
        if n == 0:
            continue
        aw = alpha.walk
        for c in _walk.crossings(gw, aw):
            e = _crossing_exponent(n, c.angle)
            loop = aw.rotation(c.tile_b)
            if e < 0:
                loop = _reverse_sides(dom, loop)
            inserts.setdefault(c.tile_a, []).append((c.pos_a, loop * abs(e)))
    out = []
    for j, sd in enumerate(gw.sides):
        for _, loop in sorted(inserts.get(j, []), key=lambda t: t[0]):
            out.extend(loop)
        out.append(sd)
    return free_reduce_int(out, dom.inv)


def dehn_twist_geodesic(s, gamma, spec: TwistSpec) -> ClosedGeodesic:
    g = gamma if isinstance(gamma, ClosedGeodesic) else geodesic_rep(s, gamma)
    if all(n == 0 for _, n in spec.pairs):
        return g
    sw = _twisted_side_word(s.domain, g, spec)
    if tuple(sw) == tuple(g.walk.sides) or not sw:
        return g
    return _from_side_word(s, sw)


def dehn_twist(s, c, spec: TwistSpec) -> CurveClass:
    g = dehn_twist_geodesic(s, c, spec)
    return g.cls if g is not c else (c.cls if isinstance(c, ClosedGeodesic) else c)


# ---------------------------------------------------------------- lengths

@dataclass
class LengthBounds:
    lower: float
    upper: float
    k: Tuple[int, ...]
    lower_valid: bool


def twist_length_bounds(s, beta, spec: TwistSpec,
                        k: Optional[Sequence[int]] = None) -> LengthBounds:
    """Upper and lower length bounds for the twisted curve.

    The upper bound is unconditional.  The lower bound uses per-curve slack
    ``k`` (default 2, see ``calibrate_k``) and only claims validity when
    every |n| exceeds its slack.
    """
    b = beta if isinstance(beta, ClosedGeodesic) else geodesic_rep(s, beta)
    if k is None:
        k = [2] * len(spec.pairs)
    up = b.length
    lo = 0.0
    valid = True
    for (a, n), ki in zip(spec.pairs, k):
        i = geom_intersection(s, a, b)
        up += i * abs(n) * a.length
        lo += i * (abs(n) - ki) * a.length
        if abs(n) < ki:
            valid = False
    return LengthBounds(lower=lo, upper=up, k=tuple(k), lower_valid=valid)


def calibrate_k(s, beta: ClosedGeodesic, alpha: ClosedGeodesic,
                ns: Iterable[int], tol: float = 1e-9) -> int:
    """Smallest integer slack making the lower bound hold over a sweep."""
    i = geom_intersection(s, alpha, beta)
    if i == 0:
        return 0
    worst = 0
    for n in ns:
        t = dehn_twist_geodesic(s, beta, TwistSpec.single(alpha, n))
        need = abs(n) - (t.length + tol) / (i * alpha.length)
        worst = max(worst, math.ceil(need - 1e-12))
    return max(0, worst)


def calibrate_uniform_k(s, samples, alphas: Sequence[ClosedGeodesic], tol: float = 1e-9) -> int:
    """Smallest common slack for multi-curve twists over (beta, exponents) samples.

    Twisting along several curves with mixed signs can shorten the result
    more than single-curve sweeps suggest, so this calibrates on the kind
    of tuples the bound is later applied to.
    """
    worst = 0
    for beta, v in samples:
        b = beta if isinstance(beta, ClosedGeodesic) else geodesic_rep(s, beta)
        t = dehn_twist_geodesic(s, b, TwistSpec(list(zip(alphas, v))))
        io = [geom_intersection(s, a, b) for a in alphas]
        den = sum(i * a.length for i, a in zip(io, alphas))
        if den == 0:
            continue
        up = sum(i * abs(n) * a.length for i, n, a in zip(io, v, alphas))
        worst = max(worst, math.ceil((up - t.length - tol) / den - 1e-12))
    return max(0, worst)


# ---------------------------------------------------------------- homology

def homology_class(s, c) -> Tuple[int, ...]:
    w = c.cls.word if isinstance(c, ClosedGeodesic) else CurveClass.of(c).word
    return tuple(exponent_sums(w, s.names))


def is_separating(s, c) -> bool:
    """True for simple curves that are null-homologous.

    The relators of the presentation have zero exponent sums, so the
    exponent vector is the first homology class.
    """
    return not any(homology_class(s, c))
