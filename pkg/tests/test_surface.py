import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from hypspec.curves import geodesic_rep
from hypspec.hyp2 import translation_length
from hypspec.surface import (FenchelNielsen, InvalidSurfaceData, OutsideCollar, PantsGraph,
                             build_pants, build_surface, collar, collar_width, fermi_coords,
                             fermi_point, holonomy, reference_fn)


def test_reference_presentation(ref):
    assert ref.genus == 2
    assert ref.names == ["a1", "a2", "b2", "b3"]
    assert ref.relator_residual < 1e-12
    lengths = [g.length for g in ref.pants_curves]
    assert lengths == pytest.approx([2.0, 2.5, 3.0], abs=1e-12)


def test_pants_curve_holonomy_matches_lengths(ref):
    for w, ell in zip(ref.pants_curve_words, (2.0, 2.5, 3.0)):
        assert translation_length(holonomy(ref, w)) == pytest.approx(ell, abs=1e-10)


@settings(max_examples=12, deadline=None)
@given(st.lists(st.floats(0.5, 4.0), min_size=3, max_size=3),
       st.lists(st.floats(-2.0, 2.0), min_size=3, max_size=3),
       st.sampled_from(["theta", "dumbbell"]))
def test_random_coordinates_satisfy_relator(lengths, twists, graph):
    fn = FenchelNielsen(getattr(PantsGraph, graph)(), tuple(lengths), tuple(twists))
    s = build_surface(fn)
    assert s.relator_residual < 1e-9
    got = [translation_length(holonomy(s, w)) for w in s.pants_curve_words]
    assert got == pytest.approx(lengths, rel=1e-9)


@pytest.mark.parametrize("bad", [
    dict(lengths=(2.0, -1.0, 3.0), twists=(0, 0, 0)),
    dict(lengths=(2.0, 2.0), twists=(0, 0)),
    dict(lengths=(2.0, float("nan"), 3.0), twists=(0, 0, 0)),
])
def test_invalid_coordinates(bad):
    with pytest.raises(InvalidSurfaceData):
        FenchelNielsen(PantsGraph.theta(), bad["lengths"], bad["twists"])


def test_invalid_graphs():
    with pytest.raises(InvalidSurfaceData):
        PantsGraph(2, ((0, 0, 1, 0), (0, 0, 1, 1), (0, 2, 1, 2)))
    with pytest.raises(InvalidSurfaceData):
        PantsGraph(1, ((0, 0, 0, 1),))


def _uhp_dist(z, w):
    return math.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))


def _perp_line(radius, d):
    """Center and radius of the geodesic meeting |z| = radius orthogonally at distance d from i*radius."""
    x, y = radius * math.tanh(d), radius / math.cosh(d)
    c = (x * x + y * y) / x
    return c, math.hypot(x - c, y), complex(x, y)


def _line_distance(l1, l2):
    def on(line, p):
        t = math.pi / (1 + math.exp(-p))   # keeps the point in the upper half plane
        return line[0] + line[1] * complex(math.cos(t), math.sin(t))

    def f(p):
        return _uhp_dist(on(l1, p[0]), on(l2, p[1]))
    best = min((minimize(f, x0, method="Nelder-Mead",
                         options=dict(xatol=1e-12, fatol=1e-14, maxiter=4000))
                for x0 in ([0.0, 0.0], [-2.0, 2.0], [2.0, -2.0])), key=lambda r: r.fun)
    return best.fun


@pytest.mark.parametrize("ls", [(2.0, 2.5, 3.0), (1.0, 1.0, 1.0), (0.7, 3.1, 2.2)])
def test_pants_perpendiculars_close_the_hexagon(ls):
    """Build the hexagon by hand from two perpendiculars and measure the third."""
    Y = build_pants(*ls)
    h1 = ls[0] / 2
    c2 = _perp_line(1.0, Y.between(0, 1))
    c3 = _perp_line(math.exp(h1), Y.between(0, 2))
    assert _line_distance(c2, c3) == pytest.approx(Y.between(1, 2), abs=1e-7)


def test_collar_width_values():
    assert collar_width(2.0) == pytest.approx(0.7719368329, abs=1e-9)
    assert collar_width(2.0) == pytest.approx(math.asinh(1 / math.sinh(1.0)))


def test_fermi_round_trip(ref):
    c = collar(ref, ref.pants_curves[0])
    for r in (-0.7, -0.3, 0.0, 0.25, 0.7):
        for th in (0.0, 0.4, 1.3, 1.99):
            p = fermi_point(c, r, th)
            r2, th2 = fermi_coords(c, p)
            assert r2 == pytest.approx(r, abs=1e-9)
            assert min(abs(th2 - th), c.length - abs(th2 - th)) < 1e-9


def test_fermi_rejects_far_points(ref):
    c = collar(ref, ref.pants_curves[0])
    with pytest.raises(OutsideCollar):
        fermi_coords(c, fermi_point(c, c.width + 0.3, 0.5))


def test_pants_collars_are_disjoint(ref):
    rng = np.random.default_rng(5)
    cols = [collar(ref, g) for g in ref.pants_curves]
    for i, c in enumerate(cols):
        for r, th in zip(rng.uniform(-c.width, c.width, 700), rng.uniform(0, c.length, 700)):
            p = fermi_point(c, float(r), float(th))
            for j, d in enumerate(cols):
                if j == i:
                    continue
                with pytest.raises(OutsideCollar):
                    fermi_coords(d, p, tol=-1e-9)


def test_full_twist_preserves_simple_lengths(ref, full_twist):
    from hypspec.spectrum import enumerate_scg
    a = [g.length for g in enumerate_scg(ref, 6.0)]
    b = [g.length for g in enumerate_scg(full_twist, 6.0)]
    assert len(a) == len(b)
    assert a == pytest.approx(b, abs=1e-9)


def test_curve_lengths_on_reference(ref):
    assert geodesic_rep(ref, "a1.a2").length == pytest.approx(3.0, abs=1e-10)
    assert geodesic_rep(ref, "b2").length > 0
