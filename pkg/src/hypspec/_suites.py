"""Property suites shared by ``hypspec verify`` and the acceptance tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from .angles import (accumulation_count, angle_set, collar_trace,
                     length1_check, monotonicity_check, outside_collar_count, similar)
from .curves import (TwistSpec, calibrate_uniform_k, dehn_twist_geodesic, geodesic_rep,
                     geom_intersection, twist_length_bounds)
from .surface import collar


@dataclass
class PropertyResult:
    name: str
    ok: bool
    margin: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return f"{tag} {self.name}: margin={self.margin:.6g} {self.detail}".rstrip()


# curve pairs (gamma, alpha) on the reference surface: two meeting once,
# one meeting a separating curve twice
IDENTITY_PAIRS = (("b2", "a1"), ("a1.B3", "A2.A1"), ("b2", "A1.b3.a1.B3"))
BASE, TWIST = "b2", "a1"
MONO_NS = (2, -2, 4, -4, 8, -8, 16, -16)
SWEEP_NS = (4, 8, 16, 32, 64)
SWEEP_EPS = (0.05, 0.1, 0.2)


def _random_tuples(s, count: int, nmax: int, seed: int):
    from .spectrum import enumerate_scg
    pants = s.pants_curves
    # curves missing every twist curve make the bounds trivial
    pool = [g for g in enumerate_scg(s, 4.5)
            if any(geom_intersection(s, g, a) for a in pants)]
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        i, j = rng.choice(len(pool), size=2, replace=False)
        v = tuple(int(x) for x in rng.integers(-nmax, nmax + 1, size=len(s.pants_curves)))
        out.append((pool[i], pool[j], v))
    return out


def suite_intersection(s, seed: int = 7) -> List[PropertyResult]:
    res = []
    worst = 0
    bad = []
    for gw, aw in IDENTITY_PAIRS:
        g, a = geodesic_rep(s, gw), geodesic_rep(s, aw)
        i0 = geom_intersection(s, g, a)
        for n in range(-5, 6):
            if n == 0:
                continue
            t = dehn_twist_geodesic(s, g, TwistSpec.single(a, n))
            got = geom_intersection(s, t, g)
            want = abs(n) * i0 * i0
            if got != want:
                bad.append(f"{gw}/{aw} n={n}: {got} != {want}")
            if geom_intersection(s, t, a) != i0:
                bad.append(f"{gw}/{aw} n={n}: intersection with the twist curve changed")
            worst = max(worst, abs(got - want))
    res.append(PropertyResult("twist-intersection identity", not bad, float(-worst),
                              "; ".join(bad[:3])))
    pants = s.pants_curves
    lo_m, hi_m, bad = math.inf, math.inf, []
    for beta, gamma, v in _random_tuples(s, 20, 8, seed):
        t = dehn_twist_geodesic(s, beta, TwistSpec(list(zip(pants, v))))
        got = geom_intersection(s, t, gamma)
        ib = geom_intersection(s, gamma, beta)
        terms = [geom_intersection(s, a, beta) * geom_intersection(s, a, gamma) for a in pants]
        lower = sum((abs(n) - 2) * x for n, x in zip(v, terms)) - ib
        upper = sum(abs(n) * x for n, x in zip(v, terms)) + ib
        lo_m, hi_m = min(lo_m, got - lower), min(hi_m, upper - got)
        if not lower <= got <= upper:
            bad.append(f"{beta.cls}/{gamma.cls} v={v}: {lower} <= {got} <= {upper} fails")
    res.append(PropertyResult("intersection sandwich", not bad, float(min(lo_m, hi_m)),
                              "; ".join(bad[:3])))
    return res


def suite_length(s, seed: int = 11, calibration_seeds=(1, 2, 3)) -> List[PropertyResult]:
    """Upper bound on every sample; lower bound with a slack calibrated on other samples."""
    pants = s.pants_curves
    cal = [(b, v) for sd in calibration_seeds for b, _, v in _random_tuples(s, 20, 8, sd)]
    k = calibrate_uniform_k(s, cal, pants)
    up_m, lo_m, bad_up, bad_lo, checked = math.inf, math.inf, [], [], 0
    for beta, _, v in _random_tuples(s, 20, 8, seed):
        spec = TwistSpec(list(zip(pants, v)))
        t = dehn_twist_geodesic(s, beta, spec)
        b = twist_length_bounds(s, beta, spec, k=[k] * len(pants))
        up_m = min(up_m, b.upper - t.length)
        if t.length > b.upper + 1e-9:
            bad_up.append(f"{beta.cls} v={v}")
        if all(abs(n) >= k for n in v):
            checked += 1
            lo_m = min(lo_m, t.length - b.lower)
            if t.length < b.lower - 1e-9:
                bad_lo.append(f"{beta.cls} v={v}")
    return [
        PropertyResult("twisted length upper bound", not bad_up, float(up_m), "; ".join(bad_up[:3])),
        PropertyResult("twisted length lower bound", not bad_lo and checked > 0,
                       float(lo_m), f"k={k} checked={checked} " + "; ".join(bad_lo[:3])),
    ]


def _sweep_traces(s, ns):
    g0, a = geodesic_rep(s, BASE), geodesic_rep(s, TWIST)
    c = collar(s, a)
    phi = float(angle_set(s, g0, a).thetas[0])
    out = {}
    for n in ns:
        t = dehn_twist_geodesic(s, g0, TwistSpec.single(a, n))
        aset = angle_set(s, g0, t)
        out[n] = (aset, collar_trace(aset, c))
    return g0, a, c, phi, out


def suite_angles(s) -> List[PropertyResult]:
    g0, a, c, phi, data = _sweep_traces(s, MONO_NS)
    bad, margin = [], math.inf
    for n in MONO_NS:
        rep = monotonicity_check(data[n][1], phi, 1 if n > 0 else -1)
        margin = min(margin, rep.margin)
        if not rep.ok:
            bad.append(f"n={n}: {rep.message}")
    res = [PropertyResult("collar angle monotonicity", not bad and margin > 1e-9, float(margin),
                          "; ".join(bad[:3]))]
    g0, a, c, phi, data = _sweep_traces(s, SWEEP_NS)
    i2 = geom_intersection(s, g0, a) ** 2
    K, bad = 0, []
    for eps in SWEEP_EPS:
        counts = [accumulation_count(data[n][0], phi, eps) for n in SWEEP_NS]
        ref = [n * i2 for n in SWEEP_NS]
        rep = similar(counts, ref)
        K = max(K, max(abs(x - y) for x, y in zip(counts, ref)))
        if not rep.similar:
            bad.append(f"eps={eps}: counts {counts}")
    res.append(PropertyResult("accumulation similarity", not bad, float(-K),
                              f"K={K} " + "; ".join(bad[:3])))
    return res


def suite_collars(s) -> List[PropertyResult]:
    g0, a, c, phi, data = _sweep_traces(s, SWEEP_NS)
    cols = [collar(s, p) for p in s.pants_curves]
    outside = [outside_collar_count(data[n][0], cols) for n in SWEEP_NS]
    N = max(outside)
    # bounded means the tail of the sweep never exceeds its head
    head = max(outside[:2])
    res = [PropertyResult("crossings outside collars bounded", max(outside[2:]) <= head,
                          float(head - max(outside[2:])), f"N={N} per-n={outside}")]
    bad, margin = [], math.inf
    for n in SWEEP_NS:
        t = dehn_twist_geodesic(s, g0, TwistSpec.single(a, n))
        for row in length1_check(s, t, c):
            margin = min(margin, row.length - row.bound)
            if not row.ok:
                bad.append(f"n={n} component {row.component}")
    res.append(PropertyResult("collar arc length bound", not bad, float(margin), "; ".join(bad[:3])))
    return res


SUITES: Dict[str, Callable] = {
    "intersection": suite_intersection,
    "length": suite_length,
    "angles": suite_angles,
    "collars": suite_collars,
}
