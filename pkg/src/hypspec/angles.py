"""Ordered intersection-angle sets and their behaviour under twisting.

An angle set lists the crossings of a base geodesic with one or more
partners in the order met along the base, starting at the base's walk
basepoint.  Each angle is the counterclockwise angle from the base to the
partner, taken mod pi so that it lies in (0, pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _walk
from .curves import ClosedGeodesic, geodesic_rep
from .surface import Collar


class PartnersIntersect(ValueError):
    pass


class AmbiguousClustering(ValueError):
    pass


@dataclass(frozen=True)
class AngleRecord:
    s: float
    theta: float
    partner: str
    point: complex = field(compare=False, repr=False, default=0j)
    partner_s: float = field(compare=False, repr=False, default=0.0)


@dataclass
class AngleSet:
    entries: Tuple[AngleRecord, ...]
    base: ClosedGeodesic = field(repr=False)
    partners: Dict[str, ClosedGeodesic] = field(repr=False, default_factory=dict)

    def __len__(self):
        return len(self.entries)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([e.theta for e in self.entries])

    @property
    def positions(self) -> np.ndarray:
        return np.array([e.s for e in self.entries])

    @property
    def labels(self) -> List[str]:
        return [e.partner for e in self.entries]

    def restrict(self, partner: str) -> "AngleSet":
        ents = tuple(e for e in self.entries if e.partner == partner)
        return AngleSet(ents, self.base, {partner: self.partners.get(partner)})

    def subset(self, indices: Sequence[int]) -> "AngleSet":
        idx = sorted(indices)
        return AngleSet(tuple(self.entries[i] for i in idx), self.base, self.partners)

    def phi(self, tol: float = 1e-9) -> "PhiSet":
        return PhiSet.of(self.thetas, tol)

    def rows(self):
        return [(i, e.s, e.theta, e.partner) for i, e in enumerate(self.entries)]


@dataclass(frozen=True)
class PhiSet:
    """Distinct angle values, deduplicated at a tolerance."""
    values: Tuple[float, ...]

    @classmethod
    def of(cls, thetas, tol: float = 1e-9) -> "PhiSet":
        out: List[float] = []
        for t in sorted(float(x) for x in thetas):
            if not out or t - out[-1] > tol:
                out.append(t)
        return cls(tuple(out))

    def distance(self, other: "PhiSet") -> float:
        if not self.values or not other.values:
            return math.inf
        return min(abs(a - b) for a in self.values for b in other.values)

    def __len__(self):
        return len(self.values)


def _records(base: ClosedGeodesic, partner: ClosedGeodesic, label: str):
    out = []
    for c in _walk.crossings(base.walk, partner.walk):
        th = c.angle % math.pi
        if not (0 < th < math.pi):
            continue
        out.append(AngleRecord(c.pos_a, th, label, c.point, c.pos_b))
    return out


def angle_set(s, gamma, delta, label: Optional[str] = None) -> AngleSet:
    g = gamma if isinstance(gamma, ClosedGeodesic) else geodesic_rep(s, gamma)
    d = delta if isinstance(delta, ClosedGeodesic) else geodesic_rep(s, delta)
    label = label or str(d.cls)
    if g.same_curve(d):
        return AngleSet((), g, {label: d})
    recs = sorted(_records(g, d, label), key=lambda e: e.s)
    return AngleSet(tuple(recs), g, {label: d})


def angle_set_multi(s, gamma, deltas: Sequence, labels: Optional[Sequence[str]] = None
                    ) -> AngleSet:
    g = gamma if isinstance(gamma, ClosedGeodesic) else geodesic_rep(s, gamma)
    ds = [d if isinstance(d, ClosedGeodesic) else geodesic_rep(s, d) for d in deltas]
    labels = list(labels) if labels else [str(d.cls) for d in ds]
    for i in range(len(ds)):
        for j in range(i + 1, len(ds)):
            if _walk.crossings(ds[i].walk, ds[j].walk):
                raise PartnersIntersect(f"{labels[i]} meets {labels[j]}")
    recs = []
    for d, lab in zip(ds, labels):
        recs.extend(_records(g, d, lab))
    recs.sort(key=lambda e: e.s)
    return AngleSet(tuple(recs), g, dict(zip(labels, ds)))


def cyclic_distance(a: Sequence[float], b: Sequence[float], reversal: bool = False) -> float:
    """Min over rotations of the max entrywise difference; inf if sizes differ."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) != len(b):
        return math.inf
    if len(a) == 0:
        return 0.0
    cands = [b] + ([b[::-1]] if reversal else [])
    best = math.inf
    for c in cands:
        for k in range(len(c)):
            best = min(best, float(np.max(np.abs(a - np.roll(c, k)))))
    return best


# ---------------------------------------------------------------- collars

@dataclass(frozen=True)
class TraceEntry:
    index: int          # position in the parent AngleSet
    s: float
    theta: float
    r: float            # Fermi distance from the core
    side: int           # +1 left of the core, -1 right
    component: int      # which crossing of the base with the core (its arc)
    offset: float       # signed distance along the base from that crossing
    partner_arc: int    # which crossing of the partner with the core


@dataclass
class CollarTrace:
    collar: Collar
    entries: Tuple[TraceEntry, ...]
    core_angles: Tuple[float, ...]     # angle of base with core at each component
    core_positions: Tuple[float, ...]

    def __len__(self):
        return len(self.entries)

    def component(self, k: int) -> List[TraceEntry]:
        return sorted((e for e in self.entries if e.component == k), key=lambda e: e.offset)

    def side_counts(self, k: int) -> Tuple[int, int]:
        es = self.component(k)
        return sum(e.side > 0 for e in es), sum(e.side < 0 for e in es)


def _signed_cdist(x: float, y: float, period: float) -> float:
    d = (x - y) % period
    return d - period if d > period / 2 else d


def collar_trace(aset: AngleSet, c: Collar) -> CollarTrace:
    base = aset.base
    core = c.core
    bx = sorted(_walk.crossings(base.walk, core.walk), key=lambda x: x.pos_a)
    if not bx:
        return CollarTrace(c, (), (), ())
    bpos = [x.pos_a for x in bx]
    bang = [x.angle % math.pi for x in bx]
    partner_pos: Dict[str, List[float]] = {}
    for lab, p in aset.partners.items():
        if p is None:
            continue
        partner_pos[lab] = sorted(x.pos_a for x in _walk.crossings(p.walk, core.walk))
    out = []
    L = base.length
    for i, e in enumerate(aset.entries):
        r, _ = c.chart(e.point)
        if abs(r) >= c.width:
            continue
        offs = [_signed_cdist(e.s, p, L) for p in bpos]
        k = int(np.argmin(np.abs(offs)))
        pp = partner_pos.get(e.partner, [])
        if pp:
            plen = aset.partners[e.partner].length
            arc = int(np.argmin([abs(_signed_cdist(e.partner_s, q, plen)) for q in pp]))
        else:
            arc = -1
        out.append(TraceEntry(i, e.s, e.theta, r, 1 if r > 0 else -1, k, offs[k], arc))
    return CollarTrace(c, tuple(out), tuple(bang), tuple(bpos))


# ---------------------------------------------------------------- statistics

@dataclass
class MonotonicityReport:
    ok: bool
    pattern: str                  # "V" (decrease to phi then increase) or "A"
    first_violation: Optional[Tuple[int, int]] = None   # (component, index)
    message: str = ""
    margin: float = math.inf      # smallest strict step observed


# Twist orientation that produces the V pattern (angles fall towards the core
# angle and rise after it).  Calibrated against the left-handed twist sign of
# ``curves.dehn_twist``; see the test suite.
V_PATTERN_SIGN = 1


def _check_sequence(vals: Sequence[float], phi: float, pattern: str, strict: float):
    """Index of the first violation in the V/A pattern, or None; plus margin."""
    sgn = 1 if pattern == "V" else -1
    margin = math.inf
    for i, v in enumerate(vals):
        gap = sgn * (v - phi)
        margin = min(margin, gap)
        if gap <= strict:
            return i, margin
    return None, margin


def monotonicity_check(tr: CollarTrace, phi: Optional[float] = None, n_sign: int = 1,
                       strict: float = 1e-9) -> MonotonicityReport:
    pattern = "V" if n_sign * V_PATTERN_SIGN > 0 else "A"
    sgn = 1 if pattern == "V" else -1
    best = math.inf
    for k in range(len(tr.core_angles)):
        ph = tr.core_angles[k] if phi is None else phi
        es = tr.component(k)
        before = [e for e in es if e.offset < 0]
        after = [e for e in es if e.offset > 0]
        # each run sits in one half of the collar
        for run in (before, after):
            if len({e.side for e in run}) > 1:
                bad = next(e for e in run if e.side != run[0].side)
                return MonotonicityReport(False, pattern, (k, bad.index),
                                          "run crosses the core", best)
        if before and after and before[0].side == after[0].side:
            return MonotonicityReport(False, pattern, (k, after[0].index),
                                      "both runs in the same half", best)
        # before: moving towards the crossing, angles approach phi
        for i in range(len(before) - 1):
            step = sgn * (before[i].theta - before[i + 1].theta)
            best = min(best, step)
            if step <= strict:
                return MonotonicityReport(False, pattern, (k, before[i + 1].index),
                                          "not monotone before the core", best)
        for i in range(len(after) - 1):
            step = sgn * (after[i + 1].theta - after[i].theta)
            best = min(best, step)
            if step <= strict:
                return MonotonicityReport(False, pattern, (k, after[i + 1].index),
                                          "not monotone after the core", best)
        for e in before + after:
            gap = sgn * (e.theta - ph)
            best = min(best, gap)
            if gap <= strict:
                return MonotonicityReport(False, pattern, (k, e.index),
                                          "angle on the wrong side of phi", best)
    return MonotonicityReport(True, pattern, None, "", best)


def accumulation_count(obj, phi: float, eps: float) -> int:
    if eps <= 0:
        raise ValueError("eps must be positive")
    if isinstance(obj, CollarTrace):
        th = np.array([e.theta for e in obj.entries])
    elif isinstance(obj, AngleSet):
        th = obj.thetas
    else:
        th = np.asarray(obj, dtype=float)
    return int(np.sum(np.abs(th - phi) < eps))


@dataclass
class SimilarReport:
    similar: bool
    k: int
    horizon: int
    growth: bool

    def __iter__(self):
        yield self.similar
        yield self.k


def similar(u: Sequence[int], v: Sequence[int]) -> SimilarReport:
    """Bounded-difference test on finite prefixes.

    Growth is flagged when the largest gap in the last third of the sample
    clearly exceeds the largest gap in the first third.
    """
    if len(u) != len(v):
        raise ValueError("sequences must have equal length")
    d = [abs(int(a) - int(b)) for a, b in zip(u, v)]
    if not d:
        return SimilarReport(True, 0, 0, False)
    m = max(1, len(d) // 3)
    head, tail = max(d[:m]), max(d[-m:])
    growth = len(d) >= 6 and tail > head + max(2, head // 2)
    return SimilarReport(not growth, max(d), len(d), growth)


# ---------------------------------------------------------------- clustering

@dataclass
class Cluster:
    center: float
    position: float          # arclength along the base of the run midpoint
    counts: Dict[int, int]   # size per sweep index


@dataclass
class ClusterResult:
    centers: List[float]
    clusters: List[Cluster]
    discarded: Dict[int, int]   # sweep index -> entries outside growing clusters


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Maximal cyclic runs of True as (start, length)."""
    n = len(mask)
    if n == 0 or not mask.any():
        return []
    if mask.all():
        return [(0, n)]
    start = int(np.argmin(mask))          # a False entry
    runs, cur = [], None
    for step in range(1, n + 1):
        i = (start + step) % n
        if mask[i]:
            if cur is None:
                cur = [i, 0]
            cur[1] += 1
        elif cur is not None:
            runs.append(tuple(cur))
            cur = None
    if cur is not None:
        runs.append(tuple(cur))
    return runs


def _peaks(th: np.ndarray, eps: float, min_count: int) -> List[float]:
    """1-D density peaks: greedy maxima of the eps-window count."""
    s = np.sort(th)
    lo = np.searchsorted(s, s - eps, side="left")
    hi = np.searchsorted(s, s + eps, side="right")
    cnt = hi - lo
    order = np.lexsort((s, -cnt))
    chosen: List[float] = []
    for i in order:
        if cnt[i] < min_count:
            break
        v = float(s[i])
        if all(abs(v - c) > 2 * eps for c in chosen):
            chosen.append(v)
    return chosen


def cluster_angles(asets, eps: float, min_growth: int = 2) -> ClusterResult:
    """Centers of angle clusters that grow along a sweep, in order along the base.

    ``asets`` maps a sweep index n to the AngleSet at that n (or is a list,
    indexed from 0).  Candidate centers are density peaks of the last set;
    a window around each peak is split into runs of consecutive entries
    along the base, and each run whose size grows across the sweep is one
    cluster, centred at its turning point.
    """
    if not isinstance(asets, dict):
        asets = dict(enumerate(asets))
    keys = sorted(asets)
    last = asets[keys[-1]]
    first = asets[keys[0]]
    th_last = last.thetas
    if len(th_last) == 0:
        return ClusterResult([], [], {k: 0 for k in keys})
    peaks = _peaks(th_last, eps, min_count=3)
    for i, a in enumerate(peaks):
        for b in peaks[i + 1:]:
            if abs(a - b) < 2 * eps:
                raise AmbiguousClustering(f"windows around {a:.6f} and {b:.6f} overlap")
    clusters: List[Cluster] = []
    for p in peaks:
        # refine the window centre on the last set
        for aset_key in (keys[-1],):
            th = asets[aset_key].thetas
            mask = np.abs(th - p) < eps
            for start, length in _runs(mask):
                idx = [(start + t) % len(th) for t in range(length)]
                vals = th[idx]
                # turning point: extreme value of the run
                mid = length // 2
                lo_side = vals[0] + vals[-1] > 2 * vals[mid] if length > 2 else True
                center = float(vals.min() if lo_side else vals.max())
                pos = float(asets[aset_key].positions[idx[length // 2]])
                clusters.append(Cluster(center=center, position=pos, counts={}))
    # per-n counts: entries within eps of each center, split by proximity of runs
    for cl in clusters:
        for k in keys:
            a = asets[k]
            th, ps = a.thetas, a.positions
            if len(th) == 0:
                cl.counts[k] = 0
                continue
            mask = np.abs(th - cl.center) < eps
            best = 0
            L = a.base.length
            for start, length in _runs(mask):
                idx = [(start + t) % len(th) for t in range(length)]
                mpos = ps[idx[length // 2]]
                if abs(_signed_cdist(mpos, cl.position, L)) < 0.5 * _min_sep(clusters, cl, L):
                    best = max(best, length)
            cl.counts[k] = best
    growing = [c for c in clusters
               if c.counts[keys[-1]] - c.counts[keys[0]] >= min_growth or len(keys) == 1]
    growing.sort(key=lambda c: c.position)
    discarded = {}
    for k in keys:
        discarded[k] = len(asets[k]) - sum(c.counts[k] for c in growing)
    return ClusterResult([c.center for c in growing], growing, discarded)


def _min_sep(clusters: List[Cluster], cl: Cluster, L: float) -> float:
    others = [abs(_signed_cdist(c.position, cl.position, L)) for c in clusters if c is not cl]
    others = [o for o in others if o > 0]
    return min(others) if others else L


# ---------------------------------------------------------------- collar arc checks

def arc_in_collar(width: float, psi: float) -> Tuple[float, float]:
    """(length, core displacement) of a geodesic arc crossing a collar at angle psi.

    Right triangles with legs along the core give sinh(r) = sinh(t) sin(psi)
    and tanh(x) = tanh(t) cos(psi) for the point at distance t from the core.
    """
    sp = math.sin(psi)
    t = math.asinh(math.sinh(width) / sp)
    # tan(psi) = tanh(r) / sinh(x), stable for nearly tangent crossings
    x = math.asinh(math.tanh(width) / math.tan(psi))
    return 2 * t, 2 * x


def radial_crossings(core_length: float, start: float, span: float, theta0: float) -> int:
    """Crossings of an arc whose core projection covers (start, start+span)
    with the radial segment at theta0."""
    lo, hi = min(start, start + span), max(start, start + span)
    k0 = math.ceil((lo - theta0) / core_length)
    k1 = math.floor((hi - theta0) / core_length)
    return max(0, k1 - k0 + 1)


@dataclass
class Length1Row:
    component: int
    length: float
    crossings: int
    bound: float
    ok: bool


def length1_check(s, curve: ClosedGeodesic, c: Collar, samples: int = 7) -> List[Length1Row]:
    """Arc length of each collar component vs (crossings with a radial arc - 2) * ell."""
    rows = []
    for k, x in enumerate(sorted(_walk.crossings(curve.walk, c.core.walk), key=lambda x: x.pos_a)):
        psi = x.angle % math.pi
        length, disp = arc_in_collar(c.width, psi)
        _, th = c.chart(x.point)
        worst = 0
        for j in range(samples):
            theta0 = (j + 0.5) * c.length / samples
            worst = max(worst, radial_crossings(c.length, th - disp / 2, disp, theta0))
        bound = (worst - 2) * c.length
        rows.append(Length1Row(k, length, worst, bound, length >= bound - 1e-9))
    return rows


def outside_collar_count(aset: AngleSet, collars: Sequence[Collar]) -> int:
    """Entries whose crossing point lies outside every collar."""
    n = 0
    for e in aset.entries:
        inside = False
        for c in collars:
            r, _ = c.chart(e.point)
            if abs(r) < c.width:
                inside = True
                break
        if not inside:
            n += 1
    return n


def arc_intersections(tr: CollarTrace) -> Dict[Tuple[int, int], int]:
    """Crossing counts between base arc (component) and partner arc."""
    out: Dict[Tuple[int, int], int] = {}
    for e in tr.entries:
        key = (e.component, e.partner_arc)
        out[key] = out.get(key, 0) + 1
    return out
