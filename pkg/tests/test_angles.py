import math

import numpy as np
import pytest

from hypspec.angles import (PartnersIntersect, PhiSet, accumulation_count, angle_set,
                            angle_set_multi, arc_in_collar, cluster_angles, collar_trace,
                            cyclic_distance, monotonicity_check, radial_crossings, similar)
from hypspec.curves import TwistSpec, dehn_twist_geodesic, geodesic_rep
from hypspec.hyp2 import translation_length
from hypspec.surface import collar, holonomy


def _trace_angle(s, gw, dw):
    """Crossing angle of two once-meeting curves from the trace of their product."""
    lg = translation_length(holonomy(s, gw))
    ld = translation_length(holonomy(s, dw))
    lp = translation_length(holonomy(s, gw + "." + dw))
    c = (math.cosh(lp / 2) - math.cosh(lg / 2) * math.cosh(ld / 2)) / (
        math.sinh(lg / 2) * math.sinh(ld / 2))
    return math.acos(max(-1.0, min(1.0, c)))


@pytest.mark.parametrize("gw,dw", [("b2", "a1"), ("a1.B3", "A2.A1"), ("b2", "a2")])
def test_single_crossing_angle_matches_trace_identity(ref, gw, dw):
    aset = angle_set(ref, gw, dw)
    assert len(aset) == 1
    th = float(aset.thetas[0])
    want = _trace_angle(ref, gw, dw)
    assert min(abs(th - want), abs(math.pi - th - want)) < 1e-9


def test_swapping_roles_complements_angles(ref):
    for gw, dw in [("b2", "a1"), ("b2", "A1.b3.a1.B3")]:
        a = angle_set(ref, gw, dw).thetas
        b = angle_set(ref, dw, gw).thetas
        assert sorted(a) == pytest.approx(sorted(math.pi - b), abs=1e-10)


def test_angles_ignore_orientation(ref):
    assert angle_set(ref, "B2", "a1").thetas == pytest.approx(angle_set(ref, "b2", "a1").thetas)


def test_self_and_disjoint_pairs_are_empty(ref):
    assert len(angle_set(ref, "a1", "a1")) == 0
    assert len(angle_set(ref, "a1", "a2")) == 0


def test_multi_requires_disjoint_partners(ref):
    with pytest.raises(PartnersIntersect):
        angle_set_multi(ref, "a1.a2", ["b2", "a1"])
    m = angle_set_multi(ref, "b2", ["a1", "a2"])
    assert sorted(m.labels) == ["a1", "a2"]


def test_cyclic_distance():
    assert cyclic_distance([1, 2, 3], [2, 3, 1]) == 0
    assert cyclic_distance([1, 2, 3], [3, 2, 1]) > 0
    assert cyclic_distance([1, 2, 3], [3, 2, 1], reversal=True) == 0
    assert cyclic_distance([1, 2], [1, 2, 3]) == math.inf
    assert cyclic_distance([], []) == 0


def test_phi_set():
    p = PhiSet.of([0.5, 0.5 + 1e-12, 1.0])
    assert p.values == (0.5, 1.0)
    assert p.distance(PhiSet.of([1.2])) == pytest.approx(0.2)


def test_arc_in_collar_perpendicular_and_oblique():
    w = 0.77
    length, disp = arc_in_collar(w, math.pi / 2)
    assert length == pytest.approx(2 * w) and disp == pytest.approx(0, abs=1e-15)
    length, disp = arc_in_collar(w, 0.4)
    t = length / 2
    # right triangle: hypotenuse t, leg along the core disp/2, opposite leg w
    assert math.sinh(w) == pytest.approx(math.sinh(t) * math.sin(0.4))
    assert math.cosh(t) == pytest.approx(math.cosh(w) * math.cosh(disp / 2))


def test_radial_crossings():
    assert radial_crossings(2.0, 0.0, 5.0, 0.5) == 3
    assert radial_crossings(2.0, 0.0, -5.0, 0.5) == 2
    assert radial_crossings(2.0, 0.6, 0.2, 0.5) == 0


def test_similarity():
    assert similar([4, 8, 16, 32], [4, 8, 16, 33]).similar
    rep = similar([1, 2, 3, 4, 5, 6, 7, 8, 9], [2, 4, 6, 8, 10, 12, 14, 16, 18])
    assert rep.growth and not rep.similar
    with pytest.raises(ValueError):
        similar([1], [1, 2])


def test_accumulation_count_needs_positive_eps():
    assert accumulation_count([0.1, 0.2, 1.0], 0.15, 0.1) == 2
    with pytest.raises(ValueError):
        accumulation_count([0.1], 0.1, 0.0)


@pytest.mark.parametrize("n", [3, -3, 6])
def test_collar_monotonicity(ref, g0, a1, n):
    phi = float(angle_set(ref, g0, a1).thetas[0])
    t = dehn_twist_geodesic(ref, g0, TwistSpec.single(a1, n))
    rep = monotonicity_check(collar_trace(angle_set(ref, g0, t), collar(ref, a1)), phi,
                             1 if n > 0 else -1)
    assert rep.ok and rep.pattern == ("V" if n > 0 else "A")
    assert rep.margin > 1e-9


def test_clusters_grow_with_the_twist(ref, g0, a1):
    sets = {n: angle_set(ref, g0, dehn_twist_geodesic(ref, g0, TwistSpec.single(a1, n)))
            for n in (4, 8, 16)}
    res = cluster_angles(sets, 0.1)
    phi = float(angle_set(ref, g0, a1).thetas[0])
    assert len(res.centers) == 1
    assert res.centers[0] == pytest.approx(phi, abs=0.05)
    counts = [res.clusters[0].counts[n] for n in (4, 8, 16)]
    assert counts == sorted(counts) and counts[-1] > counts[0]
