"""Simple length spectrum and length-angle spectrum up to a cutoff.

Every closed geodesic of length at most L has a lift crossing the Dirichlet
domain D, and the matching group element g moves the centre of D by at most
L + 2 rho (rho the circumradius of D).  So the ball of that radius contains
all candidates; each is walked, and classes are identified by their
canonical cutting word.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _walk, __version__
from .angles import angle_set, cyclic_distance
from .curves import ClosedGeodesic, _from_side_word, _reverse_sides
from ._domain import axis_endpoints_disk


class CutoffTooSmall(ValueError):
    pass


class CutoffMismatch(ValueError):
    pass


@dataclass
class Certificate:
    cutoff: float
    ball_radius: float
    prune_margin: float
    circumradius: float
    domain_sides: int
    area_residual: float
    ball_size: int
    candidates: int
    saturated: Optional[bool] = None

    def as_dict(self):
        return dict(self.__dict__)


def _candidates(s, cutoff: float, margin: Optional[float] = None):
    dom = s.domain
    R = cutoff + 2 * dom.rho
    ball = dom.ball_words(R, margin)
    lim = 2 * math.cosh(cutoff / 2) + 1e-9
    out = []
    for w, m in ball:
        t = abs(m[0] + m[3])
        if t <= 2 + 1e-9 or t > lim:
            continue
        e1, e2 = axis_endpoints_disk(m)
        if dom.clip_chord(e1, e2) is None:
            continue
        ell = 2 * math.acosh(t / 2)
        out.append((ell, w, m, e1, e2))
    out.sort(key=lambda c: (round(c[0], 9), len(c[1]), c[1]))
    return out, len(ball), R


def _axis_key(e1: complex, e2: complex) -> tuple:
    a = (round(e1.real, 7), round(e1.imag, 7))
    b = (round(e2.real, 7), round(e2.imag, 7))
    return (a, b) if a <= b else (b, a)


def closed_geodesics(s, cutoff: float, margin: Optional[float] = None,
                     simple_only: bool = False):
    """All primitive closed geodesics with length <= cutoff, one per unoriented class."""
    cands, nball, R = _candidates(s, cutoff, margin)
    dom = s.domain
    seen_axes = set()
    seen_keys = set()
    found: List[ClosedGeodesic] = []
    for ell, w, m, e1, e2 in cands:
        if _axis_key(e1, e2) in seen_axes:
            continue
        g = _from_side_word(s, w)
        for j in range(g.walk.n):
            seen_axes.add(_axis_key(complex(g.walk.e1[j]), complex(g.walk.e2[j])))
        if g.walk.power > 1:
            continue
        key = g.unoriented_key
        if key in seen_keys:
            continue
        seen_keys.add(key)
        if simple_only and not g.simple:
            continue
        found.append(g)
    found.sort(key=lambda g: (round(g.length, 9), g.unoriented_key))
    cert = Certificate(cutoff=cutoff, ball_radius=R,
                       prune_margin=dom.rho if margin is None else margin,
                       circumradius=dom.rho, domain_sides=len(dom.sides),
                       area_residual=abs(dom.area - 4 * math.pi * (s.genus - 1)),
                       ball_size=nball, candidates=len(cands))
    return found, cert


def systole(s) -> float:
    cut = 1.0
    while True:
        gs, _ = closed_geodesics(s, cut)
        if gs:
            return gs[0].length
        cut += 1.0


def enumerate_scg(s, cutoff: float, check_saturation: bool = False,
                  return_certificate: bool = False):
    """Simple closed geodesics with length <= cutoff, sorted by length."""
    gs, cert = closed_geodesics(s, cutoff, simple_only=True)
    if not gs:
        sys_ = systole(s)
        if cutoff < sys_:
            raise CutoffTooSmall(f"cutoff {cutoff} is below the systole {sys_:.6f}")
    if check_saturation:
        gs2, _ = closed_geodesics(s, cutoff, margin=2 * s.domain.rho + 1.0, simple_only=True)
        cert.saturated = [g.unoriented_key for g in gs] == [g.unoriented_key for g in gs2]
    if return_certificate:
        return gs, cert
    return gs


# ---------------------------------------------------------------- spectrum

@dataclass
class LengthAngleRecord:
    l_gamma: float
    l_delta: float
    thetas: Tuple[float, ...]
    gamma: str = field(compare=False, default="")
    delta: str = field(compare=False, default="")

    @property
    def iota(self) -> int:
        return len(self.thetas)


@dataclass
class SpectrumSlice:
    cutoff: float
    geodesics: List[ClosedGeodesic]
    records: List[LengthAngleRecord]
    certificate: Certificate

    def to_csv(self) -> str:
        buf = io.StringIO()
        k = max((r.iota for r in self.records), default=0)
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["l_gamma", "l_delta", "iota"] + [f"theta_{i + 1}" for i in range(k)])
        for r in self.records:
            wr.writerow([f"{r.l_gamma:.12f}", f"{r.l_delta:.12f}", r.iota]
                        + [f"{t:.12f}" for t in r.thetas])
        return buf.getvalue()

    def to_json(self, extra: Optional[dict] = None) -> str:
        doc = {
            "version": __version__,
            "cutoff": self.cutoff,
            "certificate": self.certificate.as_dict(),
            "geodesics": [{"word": str(g.cls), "length": g.length} for g in self.geodesics],
            "records": [{"l_gamma": r.l_gamma, "l_delta": r.l_delta, "iota": r.iota,
                         "theta": list(r.thetas), "gamma": r.gamma, "delta": r.delta}
                        for r in self.records],
        }
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SpectrumSlice":
        doc = json.loads(text)
        recs = [LengthAngleRecord(r["l_gamma"], r["l_delta"], tuple(r["theta"]),
                                  r.get("gamma", ""), r.get("delta", ""))
                for r in doc["records"]]
        cert = Certificate(**doc["certificate"])
        return cls(doc["cutoff"], [], recs, cert)


def length_angle_spectrum(s, cutoff: float, workers: int = 1) -> SpectrumSlice:
    """Singleton records for each simple geodesic plus one record per crossing pair.

    Pair angle sets may be computed on a thread pool; results are assembled
    in pair order, so the slice does not depend on ``workers``.
    """
    gs, cert = enumerate_scg(s, cutoff, return_certificate=True)
    recs: List[LengthAngleRecord] = []
    for g in gs:
        recs.append(LengthAngleRecord(g.length, g.length, (), str(g.cls), str(g.cls)))
    pairs = [(gs[i], gs[j]) for i in range(len(gs)) for j in range(i + 1, len(gs))]

    def thetas(pair):
        a, b = pair   # sorted, so a is the shorter
        return tuple(float(t) for t in angle_set(s, a, b).thetas)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(thetas, pairs))
    else:
        results = [thetas(p) for p in pairs]
    for (a, b), th in zip(pairs, results):
        if th:
            recs.append(LengthAngleRecord(a.length, b.length, th, str(a.cls), str(b.cls)))
    recs.sort(key=lambda r: (round(r.l_gamma, 9), round(r.l_delta, 9), r.iota, r.thetas))
    return SpectrumSlice(cutoff, gs, recs, cert)


def complement(thetas: Sequence[float]) -> Tuple[float, ...]:
    """Angles seen from the partner: each becomes pi - theta."""
    return tuple(math.pi - t for t in thetas)


@dataclass
class SpectrumDiff:
    unmatched_a: List[LengthAngleRecord]
    unmatched_b: List[LengthAngleRecord]
    tol: float

    @property
    def empty(self) -> bool:
        return not self.unmatched_a and not self.unmatched_b

    def __bool__(self):
        return not self.empty


def record_distance(r: LengthAngleRecord, q: LengthAngleRecord) -> float:
    d = max(abs(r.l_gamma - q.l_gamma), abs(r.l_delta - q.l_delta))
    if r.iota != q.iota:
        return math.inf
    th = cyclic_distance(r.thetas, q.thetas, reversal=True)
    if abs(r.l_gamma - r.l_delta) < 1e-9 and r.iota:
        # equal lengths: the roles of the two curves are interchangeable
        th = min(th, cyclic_distance(r.thetas, complement(q.thetas), reversal=True))
    return max(d, th)


def spectra_compare(A: SpectrumSlice, B: SpectrumSlice, tol: float = 1e-8) -> SpectrumDiff:
    if abs(A.cutoff - B.cutoff) > 1e-12:
        raise CutoffMismatch(f"cutoffs differ: {A.cutoff} vs {B.cutoff}")
    used = [False] * len(B.records)
    keys_b = np.array([r.l_gamma for r in B.records]) if B.records else np.zeros(0)
    order_b = np.argsort(keys_b, kind="stable")
    sorted_b = keys_b[order_b]
    un_a = []
    for r in A.records:
        lo = np.searchsorted(sorted_b, r.l_gamma - tol, side="left")
        hi = np.searchsorted(sorted_b, r.l_gamma + tol, side="right")
        hit = False
        for pos in range(lo, hi):
            j = int(order_b[pos])
            if not used[j] and record_distance(r, B.records[j]) <= tol:
                used[j] = True
                hit = True
                break
        if not hit:
            un_a.append(r)
    un_b = [B.records[j] for j in range(len(B.records)) if not used[j]]
    return SpectrumDiff(un_a, un_b, tol)
