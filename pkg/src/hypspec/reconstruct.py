"""Rigidity procedures as runnable pipelines.

* one-holed tori rebuilt from (length, length, angle) triples;
* geodesic arcs in a pair of pants recovered from their end angles;
* a pants decomposition whose curves meet a fixed curve at distinct angles;
* recovery of angles and lengths from twisted-curve spectrum data.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import gmpy2
import numpy as np
from scipy.optimize import brentq

from . import _mat, _walk
from .angles import AmbiguousClustering, angle_set, angle_set_multi, cluster_angles, cyclic_distance
from .curves import (ClosedGeodesic, TwistSpec, dehn_twist_geodesic, geodesic_rep,
                     geom_intersection, homology_class, is_separating)
from .hyp2 import (GeodesicH2, MoebiusMap, PointH2, angle_at, axis, distance,
                   intersect, translation_length)
from .surface import YPiece, _ROT, _frame, _translation, build_pants, pant_geometry


class OutOfRange(ValueError):
    pass


class NoSuchArc(ValueError):
    pass


class SearchExhausted(RuntimeError):
    pass


class ClusterFailure(RuntimeError):
    pass


# ---------------------------------------------------------------- tori

@dataclass(frozen=True)
class TorusTriple:
    l_alpha: float
    l_beta: float
    theta: float

    def __post_init__(self):
        if self.l_alpha <= 0 or self.l_beta <= 0:
            raise ValueError("lengths must be positive")
        if not 0 < self.theta < math.pi:
            raise ValueError("angle must lie in (0, pi)")


def perp_from_triple(t: TorusTriple) -> float:
    """Half the distance between the two copies of alpha after cutting."""
    return math.asinh(math.sin(t.theta) * math.sinh(t.l_beta / 2))


def _perp_forward(l_alpha: float, l0: float) -> float:
    return build_pants(l_alpha, l_alpha, l0).between(0, 1)


def boundary_from_perp(l_alpha: float, d: float) -> float:
    """Boundary length l0 of the pants (l_alpha, l_alpha, l0) with perpendicular d."""
    ch = math.cosh(l_alpha / 2)
    sh = math.sinh(l_alpha / 2)
    rhs = sh * sh * math.cosh(d) - ch * ch
    if rhs <= 1:
        raise OutOfRange(f"perpendicular {d} too short for cuff length {l_alpha}")
    # bracket and bisect the monotone forward map
    lo, hi = 1e-12, 1.0
    while _perp_forward(l_alpha, hi) < d:
        hi *= 2
        if hi > 1e4:
            raise OutOfRange("perpendicular too long")
    return brentq(lambda x: _perp_forward(l_alpha, x) - d, lo, hi, xtol=1e-14, rtol=1e-15)


@dataclass
class OneHoledTorus:
    """One-holed torus from a self-glued pair of pants (l_alpha, l_alpha, l_boundary).

    ``A`` translates along alpha, ``B`` is the stable letter; its curve
    beta meets alpha once.
    """
    l_alpha: float
    twist: float
    l_boundary: float
    A: tuple = field(init=False, repr=False)
    B: tuple = field(init=False, repr=False)

    def __post_init__(self):
        geo = pant_geometry(self.l_alpha, self.l_alpha, self.l_boundary)
        fa = _frame(geo["X"][0], geo["markers"][0], math)
        fb = _frame(geo["X"][1], geo["markers"][1], math)
        self.A = geo["X"][0]
        self.B = _mat.mul(fa, _mat.mul(_translation(self.twist, math),
                                       _mat.mul(_ROT, _mat.inv(fb))))

    def triple(self) -> TorusTriple:
        a = MoebiusMap.from_entries(*self.A)
        b = MoebiusMap.from_entries(*self.B)
        ga, gb = axis(a), axis(b)
        p = intersect(ga, gb)
        return TorusTriple(translation_length(a), translation_length(b), angle_at(ga, gb, p))

    def boundary_length(self) -> float:
        c = _mat.mul(_mat.mul(self.A, self.B), _mat.mul(_mat.inv(self.A), _mat.inv(self.B)))
        return 2 * math.acosh(abs(c[0] + c[3]) / 2)

    def simple_lengths(self, cutoff: float) -> List[float]:
        """Lengths <= cutoff of interior simple closed geodesics, sorted.

        Simple classes are the primitive slopes.  Farey neighbours (U, V)
        produce the mediant UV; traces grow down the tree, so a branch is
        cut once its trace exceeds 2 cosh(cutoff / 2).
        """
        lim = 2 * math.cosh(cutoff / 2)
        out = []

        def length(m):
            t = abs(m[0] + m[3])
            return 2 * math.acosh(t / 2)

        for m in (self.A, self.B):
            if abs(m[0] + m[3]) <= lim:
                out.append(length(m))
        stack = [(self.A, self.B), (self.A, _mat.inv(self.B))]
        while stack:
            u, v = stack.pop()
            w = _mat.mul(u, v)
            if abs(w[0] + w[3]) > lim:
                continue
            out.append(length(w))
            stack.append((u, w))
            stack.append((w, v))
        return sorted(out)


def torus_from_triple(t: TorusTriple) -> OneHoledTorus:
    """The one-holed torus carrying alpha, beta with the given lengths and angle.

    Cutting along alpha leaves a pair of pants whose two alpha cuffs are
    2 l_p apart; beta crosses that perpendicular at its midpoint and lands
    on each cuff at distance x from the foot, where
    cosh(l_beta / 2) = cosh(l_p) cosh(x).  The twist is the resulting
    shift between the two feet, offset by half a cuff because the gluing
    markers of the construction sit on the other seam.
    """
    lp = perp_from_triple(t)
    l0 = boundary_from_perp(t.l_alpha, 2 * lp)
    x = math.acosh(max(1.0, math.cosh(t.l_beta / 2) / math.cosh(lp)))
    sgn = 1.0 if t.theta < math.pi / 2 else -1.0
    twist = t.l_alpha / 2 + sgn * 2 * x
    return OneHoledTorus(t.l_alpha, twist, l0)


# ---------------------------------------------------------------- arcs in pants

@dataclass
class Arc:
    start: PointH2          # on the first cuff (canonical coordinates)
    end: PointH2            # on the second cuff
    length: float
    start_offset: float     # signed distance along the first cuff from its marker
    end_offset: float       # same on the second cuff
    angles: Tuple[float, float]
    cuffs: Tuple[int, int]


def _pant_frame(Y: YPiece, i: int, j: int):
    k = 3 - i - j
    l = Y.lengths
    geo = pant_geometry(l[i], l[j], l[k])
    cuff0 = axis(MoebiusMap.from_entries(*geo["X"][0]))
    cuff1 = axis(MoebiusMap.from_entries(*geo["X"][1]))
    return geo, cuff0, cuff1


def _shoot(u: float, theta1: float, cuff1: GeodesicH2):
    """Geodesic leaving i e^u to the right at angle theta1 from the upward cuff."""
    y = math.exp(u)
    psi = theta1 - math.pi / 2
    c = y * math.tan(psi)
    r = math.hypot(c, y)
    g = GeodesicH2(center=c, radius=r, orientation=1)
    # orient along the direction of travel
    t = g.tangent(PointH2(0.0, y))
    if t.real < 0:
        g = g.reversed()
    q = intersect(g, cuff1)
    return g, q


def _hit_angle(u: float, theta1: float, cuff1: GeodesicH2):
    g, q = _shoot(u, theta1, cuff1)
    if q is None:
        return None
    # must be reached going forward
    start = complex(0.0, math.exp(u))
    t = g.tangent(PointH2(0.0, math.exp(u)))
    if ((q.z - start) * t.conjugate()).real <= 0:
        return None
    # angle from the cuff to the arc heading back into the pants
    return angle_at(cuff1, g.reversed(), q), g, q


def _cuff_offset(cuff: GeodesicH2, marker, p: PointH2) -> float:
    m = PointH2(float(marker[0]), float(marker[1]))
    d = distance(m, p)
    t = cuff.tangent(m)
    ahead = ((p.z - m.z) * t.conjugate()).real >= 0
    return d if ahead else -d


def arc_from_angles(Y: YPiece, endpoints: Tuple[int, int], angles: Tuple[float, float],
                    grid: int = 4001) -> Arc:
    """The geodesic arc between two cuffs meeting them at the given angles.

    Angles are measured counterclockwise from the oriented cuff to the arc
    pointing into the pants, mod pi.  Shooting from the first cuff, the
    landing angle on the second cuff is a continuous function of the start
    point; a sign change scan plus Brent's method finds the solution, and a
    second root is reported as an error.
    """
    i, j = endpoints
    th1, th2 = angles
    if not (0 < th1 < math.pi and 0 < th2 < math.pi):
        raise NoSuchArc("angles must lie in (0, pi)")
    geo, cuff0, cuff1 = _pant_frame(Y, i, j)
    L = Y.lengths[i]
    us = np.linspace(-3 * L - 6, 3 * L + 6, grid)

    def f(u):
        h = _hit_angle(u, th1, cuff1)
        return None if h is None else h[0] - th2

    vals = [f(u) for u in us]
    roots = []
    for k in range(len(us) - 1):
        a, b = vals[k], vals[k + 1]
        if a is None or b is None:
            continue
        if a == 0:
            roots.append(us[k])
        elif a * b < 0 and abs(a - b) < 1.0:
            roots.append(brentq(f, us[k], us[k + 1], xtol=1e-15))
    if not roots:
        raise NoSuchArc(f"no arc with angles {angles}")
    roots = sorted(set(round(r, 9) for r in roots))
    if len(roots) > 1:
        raise NoSuchArc(f"several arcs with angles {angles}: {roots}")
    u = brentq(f, roots[0] - 1e-7, roots[0] + 1e-7, xtol=1e-15) \
        if f(roots[0] - 1e-7) is not None and f(roots[0] + 1e-7) is not None \
        and f(roots[0] - 1e-7) * f(roots[0] + 1e-7) < 0 else roots[0]
    ang, g, q = _hit_angle(u, th1, cuff1)
    p = PointH2(0.0, math.exp(u))
    return Arc(start=p, end=q, length=distance(p, q),
               start_offset=u, end_offset=_cuff_offset(cuff1, geo["markers"][1], q),
               angles=(th1, ang), cuffs=(i, j))


def arc_angles(Y: YPiece, endpoints: Tuple[int, int], u: float, target: PointH2):
    """Angles of the arc from i e^u to a point on the second cuff (for tests)."""
    geo, cuff0, cuff1 = _pant_frame(Y, *endpoints)
    p = PointH2(0.0, math.exp(u))
    g = GeodesicH2.from_endpoints(*_endpoints_through(p, target))
    if g.tangent(p).real < 0:
        g = g.reversed()
    th1 = angle_at(cuff0, g, p)
    th2 = angle_at(cuff1, g.reversed(), target)
    return th1, th2


def _endpoints_through(p: PointH2, q: PointH2):
    if abs(p.x - q.x) < 1e-15:
        return p.x, math.inf
    c = ((q.x ** 2 + q.y ** 2) - (p.x ** 2 + p.y ** 2)) / (2 * (q.x - p.x))
    r = math.hypot(p.x - c, p.y)
    return c - r, c + r


# ---------------------------------------------------------------- special pants

@dataclass
class SpecialPants:
    gamma0: ClosedGeodesic
    curves: List[ClosedGeodesic]
    iotas: List[int]
    separating: List[bool]
    phi_margin: float
    twists_applied: List[int]
    etas: List[Optional[ClosedGeodesic]]

    @property
    def minimal(self) -> bool:
        return all(i == (2 if sep else 1) for i, sep in zip(self.iotas, self.separating))


def phi_margin(s, gamma0: ClosedGeodesic, curves: Sequence[ClosedGeodesic]) -> float:
    sets = [angle_set(s, gamma0, c).phi() for c in curves]
    m = math.inf
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            m = min(m, sets[i].distance(sets[j]))
    return m


def _disjoint(s, a: ClosedGeodesic, b: ClosedGeodesic) -> bool:
    return a.same_curve(b) is False and geom_intersection(s, a, b) == 0


def _same_homology(s, a, b) -> bool:
    ha, hb = homology_class(s, a), homology_class(s, b)
    return ha == hb or ha == tuple(-x for x in hb)


def _rotate_away(s, gamma0, beta, others, pool, min_margin, budget, exclude):
    """Twist beta along an auxiliary curve until its angles avoid the others'."""
    def margin(b):
        return phi_margin(s, gamma0, list(others) + [b]) if others else math.inf

    if margin(beta) > min_margin:
        return beta, 0, None
    etas = [e for e in pool
            if geom_intersection(s, e, gamma0) == 0
            and all(geom_intersection(s, e, o) == 0 for o in exclude)
            and geom_intersection(s, e, beta) > 0]
    for eta in etas:
        b = beta
        for k in range(1, budget + 1):
            b = dehn_twist_geodesic(s, b, TwistSpec.single(eta, 1))
            if margin(b) > min_margin:
                return b, k, eta
    raise SearchExhausted(f"no twist within budget {budget} separates the angles of {beta.cls}")


def construct_special_pants(s, gamma0, budget: int = 64, min_margin: float = 1e-9,
                            cutoffs: Sequence[float] = (7.0, 8.0, 9.0)) -> SpecialPants:
    """Pants decomposition meeting gamma0 minimally with pairwise distinct angle sets.

    Genus 2 only: two non-separating curves crossing gamma0 once, then a
    separating curve crossing it twice.  Collisions of angle sets are
    resolved by twisting along a curve disjoint from gamma0 and the curves
    already chosen.  Candidates come from the simple length spectrum; the
    cutoff is raised step by step while no candidate exists.
    """
    from .spectrum import enumerate_scg
    g0 = gamma0 if isinstance(gamma0, ClosedGeodesic) else geodesic_rep(s, gamma0)
    if s.genus != 2:
        raise NotImplementedError("special pants are constructed for genus 2")
    if not g0.simple or is_separating(s, g0):
        raise ValueError("gamma0 must be simple and non-separating")
    last = None
    for cutoff in cutoffs:
        pool = [g for g in enumerate_scg(s, cutoff) if not g.same_curve(g0)]
        try:
            return _special_pants(s, g0, pool, budget, min_margin)
        except _NoCandidate as e:
            last = e
    raise SearchExhausted(f"{last} below length {cutoffs[-1]}")


class _NoCandidate(SearchExhausted):
    pass


def _special_pants(s, g0, pool, budget, min_margin) -> SpecialPants:
    iota = {id(g): geom_intersection(s, g, g0) for g in pool}
    sep = {id(g): is_separating(s, g) for g in pool}
    nonsep1 = [g for g in pool if not sep[id(g)] and iota[id(g)] == 1]
    if not nonsep1:
        raise _NoCandidate("no non-separating curve meets gamma0 once")
    a1 = nonsep1[0]
    cands2 = [g for g in nonsep1[1:] if _disjoint(s, g, a1) and not _same_homology(s, g, a1)]
    if not cands2:
        raise _NoCandidate("no second non-separating curve found")
    cands3_all = [g for g in pool if sep[id(g)] and iota[id(g)] == 2 and _disjoint(s, g, a1)]
    a2, k2, eta2 = _rotate_away(s, g0, cands2[0], [a1], pool, min_margin, budget, [a1])
    cands3 = [g for g in cands3_all if _disjoint(s, g, a2)]
    if not cands3:
        raise _NoCandidate("no separating curve found")
    a3, k3, eta3 = _rotate_away(s, g0, cands3[0], [a1, a2], pool, min_margin, budget, [a1, a2])
    curves = [a1, a2, a3]
    return SpecialPants(
        gamma0=g0, curves=curves,
        iotas=[geom_intersection(s, g0, c) for c in curves],
        separating=[is_separating(s, c) for c in curves],
        phi_margin=phi_margin(s, g0, curves),
        twists_applied=[0, k2, k3], etas=[None, eta2, eta3])


def precise_angles(a: ClosedGeodesic, b: ClosedGeodesic, bits: int = 256) -> List:
    """Crossing angles (mod pi) of a with b as mpfr numbers, ordered along a.

    At each crossing the two local lifts g, h have crossing axes, and
    cos = (tr g tr h - 2 tr gh) / (sqrt(tr g^2 - 4) sqrt(tr h^2 - 4)) gives
    the angle up to the mod-pi branch, which the float angle decides.
    """
    out = []
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        for c in _walk.crossings(a.walk, b.walk):
            g = _positive(tuple(gmpy2.mpfr(x) for x in a.walk.local[c.tile_a]))
            h = _positive(tuple(gmpy2.mpfr(x) for x in b.walk.local[c.tile_b]))
            tg, th = g[0] + g[3], h[0] + h[3]
            gh = _mat.mul(g, h)
            cos = (tg * th - 2 * (gh[0] + gh[3])) / (gmpy2.sqrt(tg * tg - 4) * gmpy2.sqrt(th * th - 4))
            psi = gmpy2.acos(max(min(cos, gmpy2.mpfr(1)), gmpy2.mpfr(-1)))
            approx = c.angle % math.pi
            pi = gmpy2.const_pi()
            out.append(psi if abs(float(psi) - approx) <= abs(float(pi - psi) - approx) else pi - psi)
    return out


def _positive(m):
    return m if m[0] + m[3] > 0 else tuple(-x for x in m)


def rotation_angles(s, gamma0, beta, eta, steps: int, sign: int = 1,
                    bits: int = 256) -> List[Tuple]:
    """Sorted crossing angles of gamma0 with D_eta^k(beta), k = 0..steps, as mpfr."""
    out = []
    b = beta
    for k in range(steps + 1):
        out.append(tuple(sorted(precise_angles(gamma0, b, bits))))
        b = dehn_twist_geodesic(s, b, TwistSpec.single(eta, sign))
    return out


def twist_sequence(s, gamma0, P: SpecialPants, v: Sequence[int]) -> ClosedGeodesic:
    g0 = gamma0 if isinstance(gamma0, ClosedGeodesic) else geodesic_rep(s, gamma0)
    if len(v) != len(P.curves):
        raise ValueError("one exponent per pants curve")
    return dehn_twist_geodesic(s, g0, TwistSpec(list(zip(P.curves, v))))


# ---------------------------------------------------------------- recovery

@dataclass
class SweepPoint:
    n: int
    v: Tuple[int, ...]
    l_gamma: float
    l_delta: float
    thetas: Tuple[float, ...]


_TERM = re.compile(r"^(?:(\d+)\*?)?n(?:\^(\d+))?$|^(\d+)$")


def parse_schedule(text) -> Tuple[str, ...]:
    """Schedule terms such as "n^3,n^2,n" or "2n^2,n"; validated, not evaluated."""
    terms = tuple(t.strip() for t in (text.split(",") if isinstance(text, str) else text))
    for t in terms:
        if not _TERM.match(t):
            raise ValueError(f"bad schedule term {t!r}")
    return terms


def schedule_vector(schedule: Sequence[str], n: int) -> Tuple[int, ...]:
    out = []
    for term in parse_schedule(schedule):
        m = _TERM.match(term)
        if m.group(3) is not None:
            out.append(int(m.group(3)))
        else:
            c = int(m.group(1) or 1)
            e = int(m.group(2) or 1)
            out.append(c * n ** e)
    return tuple(out)


def sweep(s, gamma0, P: SpecialPants, schedule: Sequence[str], ns: Sequence[int]
          ) -> List[SweepPoint]:
    """Spectrum records (l(gamma0), l(T_n), Theta(gamma0, T_n)) along a schedule."""
    g0 = gamma0 if isinstance(gamma0, ClosedGeodesic) else geodesic_rep(s, gamma0)
    out = []
    for n in ns:
        v = schedule_vector(schedule, n)
        t = twist_sequence(s, g0, P, v)
        th = angle_set(s, g0, t)
        out.append(SweepPoint(n, v, g0.length, t.length, tuple(float(x) for x in th.thetas)))
    return out


class NonDecreasingError(Warning):
    """Length error curve that fails to decrease over the tail (diagnostic only)."""


def min_gap(values: Sequence[float], dedup: float = 1e-9) -> float:
    """Smallest gap between distinct values (equal values count once)."""
    v = sorted(values)
    gaps = [b - a for a, b in zip(v, v[1:]) if b - a > dedup]
    return float(min(gaps)) if gaps else math.pi


@dataclass
class RecoveryReport:
    schedule: Tuple[str, ...]
    ns: Tuple[int, ...]
    vectors: List[Tuple[int, ...]]
    eps: float
    recovered_angles: List[float]
    cluster_counts: List[Dict[int, int]]
    cluster_component: List[int]
    recovered_iota: List[int]
    recovered_lengths: List[float]
    length_curves: List[List[Tuple[int, float]]]    # per curve: (n, windowed estimate)
    naive_curve: List[Tuple[int, float]]            # l(T_n) / (iota_1 v_1), first curve only
    separated: bool
    warnings: List[str]
    angle_tol: Optional[float] = None
    angle_error: Optional[float] = None
    length_errors: Optional[List[List[Tuple[int, float]]]] = None
    final_relative_errors: Optional[List[float]] = None
    decreasing: Optional[List[bool]] = None
    length_tol: float = 0.02

    def success(self) -> bool:
        if self.final_relative_errors is None or self.angle_error is None:
            return False
        return (self.separated and self.decreasing is not None and all(self.decreasing)
                and all(e <= self.length_tol for e in self.final_relative_errors)
                and self.angle_tol is not None and self.angle_error <= self.angle_tol)

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["cluster_counts"] = [{str(k): v for k, v in c.items()} for c in self.cluster_counts]
        d["success"] = self.success()
        return d

    def errors_csv(self) -> str:
        """Plot-ready table: n, curve, estimate, relative error."""
        rows = ["n,curve,estimate,relative_error"]
        for i, cur in enumerate(self.length_curves):
            errs = dict(self.length_errors[i]) if self.length_errors else {}
            for n, est in cur:
                e = errs.get(n)
                rows.append(f"{n},{i + 1},{est:.12g},{'' if e is None else f'{e:.6e}'}")
        return "\n".join(rows) + "\n"


class _SpectrumView:
    """Angle sequence with index positions, for data carrying no arclengths."""

    def __init__(self, thetas):
        self.thetas = np.asarray(thetas, dtype=float)
        self.positions = (np.arange(len(self.thetas)) + 0.5) / max(len(self.thetas), 1)
        self.base = type("Base", (), {"length": 1.0})()

    def __len__(self):
        return len(self.thetas)


def _ordered_counts(thetas, centers, labels, eps) -> List[int]:
    """Cluster sizes in one angle sequence, matching runs to clusters in order.

    The sequence is ordered along gamma0 from a fixed basepoint, so the
    clusters appear in the same order at every sweep index.  Runs within
    eps of each centre are matched to the clusters (ordered, same label)
    maximising the total matched size, over all cyclic rotations.
    """
    th = np.asarray(thetas, dtype=float)
    runs = []
    for lab in sorted(set(labels)):
        c = centers[labels.index(lab)]
        for start, length in _runs_of(np.abs(th - c) < eps):
            runs.append((start, length, lab))
    runs.sort()
    m = len(labels)
    best_total, best = -1, [0] * m
    for rot in range(max(len(runs), 1)):
        rr = runs[rot:] + runs[:rot]
        R = len(rr)
        # dp[i][j]: best total using clusters[:i] and runs[:j]
        dp = np.zeros((m + 1, R + 1))
        for i in range(1, m + 1):
            for j in range(1, R + 1):
                v = max(dp[i - 1][j], dp[i][j - 1])
                if rr[j - 1][2] == labels[i - 1]:
                    v = max(v, dp[i - 1][j - 1] + rr[j - 1][1])
                dp[i][j] = v
        if dp[m][R] > best_total:
            best_total = dp[m][R]
            out = [0] * m
            i, j = m, R
            while i > 0 and j > 0:
                if rr[j - 1][2] == labels[i - 1] and dp[i][j] == dp[i - 1][j - 1] + rr[j - 1][1]:
                    out[i - 1] = rr[j - 1][1]
                    i, j = i - 1, j - 1
                elif dp[i][j] == dp[i - 1][j]:
                    i -= 1
                else:
                    j -= 1
            best = out
    return best


def _runs_of(mask):
    from .angles import _runs
    return _runs(mask)


def recover_from_spectrum(points: Sequence[SweepPoint], eps: float = 0.05,
                          schedule: Sequence[str] = ("n^3", "n^2", "n"),
                          reference_angles: Optional[Sequence[float]] = None,
                          reference_lengths: Optional[Sequence[float]] = None
                          ) -> RecoveryReport:
    """Angles and pants lengths from a sweep of spectrum records.

    Angles: centres of the clusters whose size grows with n, in the order met
    along gamma0.  Lengths: the model l(T_n) = sum_i c_i v_{i,n} + C is solved
    on every window of consecutive sweep points (finite differencing kills the
    bounded constant), and c_i is divided by the intersection number read off
    the cluster growth.
    """
    pts = sorted(points, key=lambda p: p.n)
    ns = tuple(p.n for p in pts)
    k = len(pts[0].v) if pts else len(tuple(schedule))
    warnings: List[str] = []
    rep = RecoveryReport(schedule=tuple(schedule), ns=ns, vectors=[p.v for p in pts], eps=eps,
                         recovered_angles=[], cluster_counts=[], cluster_component=[],
                         recovered_iota=[0] * k, recovered_lengths=[math.nan] * k,
                         length_curves=[[] for _ in range(k)], naive_curve=[],
                         separated=False, warnings=warnings)
    if reference_angles is not None:
        rep.angle_tol = min_gap(reference_angles) / 4
    if len(pts) < k + 1:
        warnings.append(f"insufficient sweep: {len(pts)} points cannot separate {k} lengths "
                        f"and a constant (need {k + 1})")
    if not pts:
        return rep
    V = np.array([p.v for p in pts], dtype=float)
    # the ratio condition: each component must outgrow the next one
    separated = True
    lastv = V[-1]
    for i in range(k - 1):
        if lastv[i + 1] <= 0 or lastv[i] / lastv[i + 1] < 1.5:
            separated = False
    if not separated:
        warnings.append("ratio condition fails: schedule components grow at the same rate, "
                        "length estimates are unseparated")
    # ---- angles
    try:
        cr = cluster_angles({pts[-1].n: _SpectrumView(pts[-1].thetas)}, eps)
    except AmbiguousClustering as e:
        raise ClusterFailure(str(e)) from e
    if not cr.clusters:
        raise ClusterFailure("no angle clusters found")
    centers = list(cr.centers)
    labels: List[int] = []
    for c in centers:
        same = [labels[i] for i, d in enumerate(centers[:len(labels)]) if abs(d - c) < 1e-9]
        labels.append(same[0] if same else len(set(labels)))
    per_n = {p.n: _ordered_counts(p.thetas, centers, labels, eps) for p in pts}
    for i, cl in enumerate(cr.clusters):
        cl.counts = {n: per_n[n][i] for n in ns}
    comp = []
    for cl in cr.clusters:
        counts = np.array([cl.counts[n] for n in ns], dtype=float)
        best, best_res = -1, math.inf
        for i in range(k):
            col = V[:, i]
            ratio = round(counts[-1] / col[-1]) if col[-1] else 0
            if ratio <= 0:
                continue
            r = float(np.max(np.abs(counts - ratio * col)))
            if r < best_res:
                best, best_res = i, r
        comp.append(best)
    iota = [sum(1 for c in comp if c == i) for i in range(k)]
    missing = [i + 1 for i in range(k) if iota[i] == 0]
    if missing and separated:
        # with equal growth rates the assignment is arbitrary and already flagged
        raise ClusterFailure(f"no growing cluster matches schedule component(s) {missing}; "
                             f"eps={eps:g} may be too small or too large")
    # ---- lengths
    curves: List[List[Tuple[int, float]]] = [[] for _ in range(k)]
    y = np.array([p.l_delta for p in pts])
    for end in range(k, len(pts)):
        rows = slice(end - k, end + 1)
        A = np.hstack([V[rows], np.ones((k + 1, 1))])
        if np.linalg.matrix_rank(A) < k + 1:
            separated = False
            continue
        sol = np.linalg.solve(A, y[rows])
        for i in range(k):
            if iota[i] > 0:
                curves[i].append((ns[end], float(sol[i] / iota[i])))
    if not separated and not any("unseparated" in w for w in warnings):
        warnings.append("singular window system: length estimates are unseparated")
    if iota[0] > 0:
        rep.naive_curve = [(p.n, float(p.l_delta / (iota[0] * p.v[0]))) for p in pts if p.v[0]]
    rep.recovered_angles = centers
    rep.cluster_counts = [dict(c.counts) for c in cr.clusters]
    rep.cluster_component = comp
    rep.recovered_iota = iota
    rep.recovered_lengths = [c[-1][1] if c else math.nan for c in curves]
    rep.length_curves = curves
    rep.separated = separated
    if reference_angles is not None:
        rep.angle_error = cyclic_distance(centers, reference_angles)
    if reference_lengths is not None:
        errs = [[(n, abs(e - reference_lengths[i]) / reference_lengths[i]) for n, e in curves[i]]
                for i in range(k)]
        rep.length_errors = errs
        rep.final_relative_errors = [e[-1][1] if e else math.inf for e in errs]
        dec = []
        for i, e in enumerate(errs):
            vals = [x for _, x in e]
            ok = len(vals) >= 1 and all(b <= a for a, b in zip(vals, vals[1:]))
            if vals and not ok:
                warnings.append(f"{NonDecreasingError.__name__}: error curve {i + 1} "
                                f"does not decrease over the tail")
            dec.append(ok)
        rep.decreasing = dec
    return rep


# ---------------------------------------------------------------- rigidity

@dataclass
class RigidityReport:
    isometric: bool
    witness: str
    lengths_ok: bool
    per_curve_ok: bool
    interleaved_ok: bool
    spectra_ok: Optional[bool]


def _labelled_match(a, b, tol: float) -> bool:
    """Cyclic match of (angle, label) sequences, allowing reversal."""
    if len(a) != len(b):
        return False
    if not a:
        return True
    for c in (b, b[::-1]):
        for k in range(len(c)):
            rot = c[k:] + c[:k]
            if all(x[1] == y[1] and abs(x[0] - y[0]) <= tol for x, y in zip(a, rot)):
                return True
    return False


def marked_rigidity_check(S, S2, gamma0, P: SpecialPants, gamma0b, P2: SpecialPants,
                          tol: float = 1e-8, cutoff: Optional[float] = 4.0) -> RigidityReport:
    g0 = gamma0 if isinstance(gamma0, ClosedGeodesic) else geodesic_rep(S, gamma0)
    h0 = gamma0b if isinstance(gamma0b, ClosedGeodesic) else geodesic_rep(S2, gamma0b)
    lens = [g0.length] + [c.length for c in P.curves]
    lens2 = [h0.length] + [c.length for c in P2.curves]
    lengths_ok = len(lens) == len(lens2) and all(abs(a - b) <= tol for a, b in zip(lens, lens2))
    if not lengths_ok:
        return RigidityReport(False, "(i) lengths differ", False, False, False, None)
    per = True
    for i, (a, b) in enumerate(zip(P.curves, P2.curves)):
        t1 = angle_set(S, g0, a).thetas
        t2 = angle_set(S2, h0, b).thetas
        if cyclic_distance(t1, t2, reversal=True) > tol:
            return RigidityReport(False, f"(ii) angles with curve {i + 1} differ",
                                  True, False, False, None)
    m1 = angle_set_multi(S, g0, P.curves, [f"c{i}" for i in range(len(P.curves))])
    m2 = angle_set_multi(S2, h0, P2.curves, [f"c{i}" for i in range(len(P2.curves))])
    inter = _labelled_match([(e.theta, e.partner) for e in m1.entries],
                            [(e.theta, e.partner) for e in m2.entries], tol)
    if not inter:
        return RigidityReport(False, "(iii) interleaved angles differ", True, True, False, None)
    spectra_ok = None
    if cutoff is not None:
        from .spectrum import length_angle_spectrum, spectra_compare
        spectra_ok = spectra_compare(length_angle_spectrum(S, cutoff),
                                     length_angle_spectrum(S2, cutoff), tol).empty
    ok = spectra_ok is not False
    return RigidityReport(ok, "" if ok else "length spectra differ at the cutoff",
                          True, True, True, spectra_ok)
