"""Upper half-plane geometry: Moebius maps, geodesics, angles, polygons.

Points of H^2 are ``PointH2(x, y)`` with ``y > 0``.  Geodesics are either
semicircles centred on the real axis or vertical lines, each with an
orientation sign.  Ideal points are real numbers or ``math.inf``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .config import DEFAULT, Tolerances

INF = math.inf


class NonHyperbolic(ValueError):
    pass


class NotOnGeodesic(ValueError):
    pass


class Tangential(ValueError):
    """Raised for geodesic pairs that share support or meet only at infinity."""


class Degenerate(ValueError):
    pass


# ---------------------------------------------------------------- maps

def _canonical_sign(a, b, c, d):
    for v in (a, b, c, d):
        if v != 0:
            return (a, b, c, d) if v > 0 else (-a, -b, -c, -d)
    raise Degenerate("zero matrix")


@dataclass(frozen=True)
class MoebiusMap:
    """Element of PSL(2,R), stored with det 1 and first nonzero entry > 0."""
    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_entries(cls, a, b, c, d) -> "MoebiusMap":
        det = a * d - b * c
        if det <= 0:
            raise Degenerate(f"determinant {det} is not positive")
        s = 1.0 / math.sqrt(det)
        return cls(*_canonical_sign(a * s, b * s, c * s, d * s))

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, t: float) -> "MoebiusMap":
        """Hyperbolic translation by ``t`` along the upward imaginary axis."""
        return cls(math.exp(t / 2), 0.0, 0.0, math.exp(-t / 2))

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(*_canonical_sign(self.d, -self.b, -self.c, self.a))

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return compose(self, other)

    def kind(self, tol: float = 1e-12) -> str:
        t = abs(self.trace)
        if t > 2 + tol:
            return "hyperbolic"
        if t < 2 - tol:
            return "elliptic"
        return "parabolic"

    def apply(self, z):
        """Act on a PointH2, a complex number, a real ideal point or inf."""
        if isinstance(z, PointH2):
            w = self.apply(complex(z.x, z.y))
            return PointH2(w.real, w.imag)
        a, b, c, d = self.entries
        if isinstance(z, complex):
            return (a * z + b) / (c * z + d)
        if z == INF:
            return a / c if c != 0 else INF
        den = c * z + d
        if den == 0:
            return INF
        return (a * z + b) / den

    def apply_geodesic(self, g: "GeodesicH2") -> "GeodesicH2":
        u, v = g.endpoints()
        return GeodesicH2.from_endpoints(self.apply(u), self.apply(v))


def compose(m1: MoebiusMap, m2: MoebiusMap) -> MoebiusMap:
    a1, b1, c1, d1 = m1.entries
    a2, b2, c2, d2 = m2.entries
    return MoebiusMap.from_entries(a1 * a2 + b1 * c2, a1 * b2 + b1 * d2,
                                   c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)


def translation_length(m: MoebiusMap) -> float:
    t = abs(m.trace)
    if t <= 2 + 1e-12:
        raise NonHyperbolic(f"|trace| = {t}")
    return 2.0 * math.acosh(t / 2.0)


def fixed_points(m: MoebiusMap):
    """(repelling, attracting) fixed points of a hyperbolic map."""
    if m.kind() != "hyperbolic":
        raise NonHyperbolic(f"|trace| = {abs(m.trace)}")
    a, b, c, d = m.entries
    if c == 0:
        # z -> (a z + b)/d ; attracting point is inf iff a > d
        x = b / (d - a)
        return (x, INF) if abs(a) > abs(d) else (INF, x)
    # roots of c x^2 + (d - a) x - b = 0
    disc = math.sqrt((a + d) ** 2 - 4.0)
    p = -(d - a)
    q = math.copysign(disc, p) if p != 0 else disc
    r1 = (p + q) / (2 * c)
    r2 = (-2 * b) / (p + q) if (p + q) != 0 else (p - q) / (2 * c)
    # derivative at fixed point x is 1/(c x + d)^2; attracting when < 1
    if abs(c * r1 + d) > abs(c * r2 + d):
        return (r2, r1)
    return (r1, r2)


# ---------------------------------------------------------------- points

@dataclass(frozen=True)
class PointH2:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"point not in upper half-plane: y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def distance(p: PointH2, q: PointH2) -> float:
    dx, dy = p.x - q.x, p.y - q.y
    return math.acosh(1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y))


# ---------------------------------------------------------------- geodesics

@dataclass(frozen=True)
class GeodesicH2:
    """Semicircle (center, radius) or vertical line (foot).

    Orientation +1 runs from center-radius to center+radius for semicircles
    and upward for vertical lines.
    """
    center: Optional[float] = None
    radius: Optional[float] = None
    foot: Optional[float] = None
    orientation: int = 1

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if self.foot is None:
            if self.center is None or self.radius is None or not self.radius > 0:
                raise ValueError("semicircle needs center and positive radius")

    @property
    def vertical(self) -> bool:
        return self.foot is not None

    @classmethod
    def from_endpoints(cls, u: float, v: float) -> "GeodesicH2":
        """Oriented geodesic from ideal point u to ideal point v."""
        if u == v:
            raise Degenerate("coincident endpoints")
        if v == INF:
            return cls(foot=u, orientation=1)
        if u == INF:
            return cls(foot=v, orientation=-1)
        return cls(center=(u + v) / 2, radius=abs(v - u) / 2,
                   orientation=1 if v > u else -1)

    def endpoints(self):
        if self.vertical:
            return (self.foot, INF) if self.orientation > 0 else (INF, self.foot)
        lo, hi = self.center - self.radius, self.center + self.radius
        return (lo, hi) if self.orientation > 0 else (hi, lo)

    def reversed(self) -> "GeodesicH2":
        return GeodesicH2(self.center, self.radius, self.foot, -self.orientation)

    def same_support(self, other: "GeodesicH2", tol: float = 1e-12) -> bool:
        if self.vertical != other.vertical:
            return False
        if self.vertical:
            return abs(self.foot - other.foot) <= tol * (1 + abs(self.foot))
        scale = 1 + abs(self.center) + self.radius
        return (abs(self.center - other.center) <= tol * scale
                and abs(self.radius - other.radius) <= tol * scale)

    def distance_to(self, p: PointH2) -> float:
        if self.vertical:
            return math.asinh(abs(p.x - self.foot) / p.y)
        dx = p.x - self.center
        s = abs(dx * dx + p.y * p.y - self.radius ** 2) / (2 * self.radius * p.y)
        return math.asinh(s)

    def tangent(self, p: PointH2) -> complex:
        """Unit tangent direction (Euclidean) at a point of the geodesic."""
        if self.vertical:
            return complex(0, self.orientation)
        w = complex(p.x - self.center, p.y)
        t = -1j * w * self.orientation
        return t / abs(t)

    def point_at(self, s: float) -> PointH2:
        """Point at signed distance s from the top (or from i*1 for lines)."""
        if self.vertical:
            return PointH2(self.foot, math.exp(self.orientation * s))
        # top of the semicircle is at distance 0; oriented param
        th = 2 * math.atan(math.exp(-self.orientation * s))
        # th = pi/2 at s=0; th decreases toward the end point
        if self.orientation > 0:
            return PointH2(self.center + self.radius * math.cos(th), self.radius * math.sin(th))
        return PointH2(self.center - self.radius * math.cos(th), self.radius * math.sin(th))


def axis(m: MoebiusMap) -> GeodesicH2:
    rep, att = fixed_points(m)
    return GeodesicH2.from_endpoints(rep, att)


def intersect(g1: GeodesicH2, g2: GeodesicH2) -> Optional[PointH2]:
    """Transversal crossing point, or None."""
    if g1.vertical and g2.vertical:
        return None
    if g1.vertical or g2.vertical:
        v, s = (g1, g2) if g1.vertical else (g2, g1)
        dx = v.foot - s.center
        h2 = s.radius ** 2 - dx * dx
        if h2 <= 0:
            return None
        return PointH2(v.foot, math.sqrt(h2))
    c1, r1, c2, r2 = g1.center, g1.radius, g2.center, g2.radius
    dc = c2 - c1
    if dc == 0:
        return None
    # radical line: x where the two circles meet
    x = (r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2 * dc)
    h2 = r1 * r1 - (x - c1) ** 2
    if h2 <= 0:
        return None
    y = math.sqrt(h2)
    return PointH2(x, y)


def angle_at(g1: GeodesicH2, g2: GeodesicH2, p: PointH2,
             tol: Tolerances = DEFAULT) -> float:
    """Counter-clockwise angle from the tangent line of g1 to that of g2.

    Returned in (0, pi); swapping arguments gives the complement.
    """
    if g1.same_support(g2, tol.matrix * 1e3):
        raise Tangential("geodesics share their support")
    u1, v1 = g1.endpoints()
    u2, v2 = g2.endpoints()
    if {u1, v1} & {u2, v2}:
        raise Tangential("geodesics are asymptotic")
    if g1.distance_to(p) > tol.geometric or g2.distance_to(p) > tol.geometric:
        raise NotOnGeodesic(f"point {p} is not on both geodesics")
    t1, t2 = g1.tangent(p), g2.tangent(p)
    th = cmath.phase(t2 / t1) % math.pi
    if th < tol.geometric or th > math.pi - tol.geometric:
        raise Tangential("tangent geodesics")
    return th


def polygon_area(angles: Sequence[float], n: Optional[int] = None) -> float:
    """Area of a geodesic n-gon from its interior angles."""
    angles = list(angles)
    if n is None:
        n = len(angles)
    if n < 3 or len(angles) != n:
        raise Degenerate(f"need n >= 3 angles, got {len(angles)} for n={n}")
    if any(not (0 <= a < math.pi) for a in angles):
        raise Degenerate("interior angles must lie in [0, pi)")
    area = (n - 2) * math.pi - math.fsum(angles)
    if area <= 0:
        raise Degenerate(f"non-positive area {area}")
    return area


def hexagon_solve(a: float, b: float, c: float):
    """Right-angled hexagon with alternate sides a, b, c.

    Returns (A, B, C) where A is the side opposite a (joining the b and c
    sides), and so on.
    """
    if min(a, b, c) <= 0:
        raise ValueError("hexagon sides must be positive")

    def opp(x, y, z):
        # side opposite z, sitting between x and y
        return math.acosh((math.cosh(z) + math.cosh(x) * math.cosh(y))
                          / (math.sinh(x) * math.sinh(y)))

    return opp(b, c, a), opp(c, a, b), opp(a, b, c)
