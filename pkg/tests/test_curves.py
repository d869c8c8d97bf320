import pytest
from hypothesis import given, settings, strategies as st

from hypspec.curves import (CurveClass, NotDisjoint, TrivialClass, TwistSpec, dehn_twist,
                            dehn_twist_geodesic, geodesic_rep, geom_intersection, homology_class,
                            is_separating, is_simple, twist_length_bounds)

PAIRS = [("b2", "a1", 1), ("a1.B3", "A2.A1", 1), ("b2", "A1.b3.a1.B3", 2)]


def test_curve_class_validation():
    with pytest.raises(TrivialClass):
        CurveClass.of("a1.A1")
    with pytest.raises(ValueError):
        CurveClass(("a1", "b2", "A1"))
    assert CurveClass.of("b2.a1.B2").word == ("a1",)


def test_simplicity(ref):
    assert is_simple(ref, "a1")
    assert is_simple(ref, "A1.b3.a1.B3")
    assert not is_simple(ref, "a1.b2.A1.b2")
    assert is_simple(ref, "a1.a1.b2")   # a twist of b2 along a1
    assert not is_simple(ref, "a1.a1.b2.b2")


def test_homology_and_separation(ref):
    assert homology_class(ref, "a1.B3") == (1, 0, 0, -1)
    assert is_separating(ref, "A1.b3.a1.B3")
    assert not is_separating(ref, "a1")


@pytest.mark.parametrize("gw,aw,i0", PAIRS)
def test_base_intersections(ref, gw, aw, i0):
    assert geom_intersection(ref, gw, aw) == i0
    assert geom_intersection(ref, aw, gw) == i0


@pytest.mark.parametrize("gw,aw,i0", PAIRS)
@pytest.mark.parametrize("n", [-3, -1, 1, 2, 4])
def test_twist_intersection_identity(ref, gw, aw, i0, n):
    g, a = geodesic_rep(ref, gw), geodesic_rep(ref, aw)
    t = dehn_twist_geodesic(ref, g, TwistSpec.single(a, n))
    assert geom_intersection(ref, t, g) == abs(n) * i0 * i0
    assert geom_intersection(ref, t, a) == i0
    assert t.simple


def test_twist_is_a_group_action(ref, g0, a1):
    t = dehn_twist_geodesic(ref, g0, TwistSpec.single(a1, 3))
    back = dehn_twist_geodesic(ref, t, TwistSpec.single(a1, -3))
    assert back.same_curve(g0)
    two = dehn_twist_geodesic(ref, dehn_twist_geodesic(ref, g0, TwistSpec.single(a1, 1)),
                              TwistSpec.single(a1, 1))
    assert two.same_curve(dehn_twist_geodesic(ref, g0, TwistSpec.single(a1, 2)))


def test_twist_fixes_disjoint_curves(ref, a1):
    a2 = geodesic_rep(ref, "a2")
    assert dehn_twist_geodesic(ref, a2, TwistSpec.single(a1, 5)) is a2
    assert dehn_twist(ref, "a2", TwistSpec.single(a1, 5)).word == ("a2",)


def test_twist_preserves_homology_when_disjoint_in_homology(ref, g0, a1):
    # the twist adds n * (a1 . b2) * [a1] to the class of b2
    t = dehn_twist_geodesic(ref, g0, TwistSpec.single(a1, 2))
    h = homology_class(ref, t)
    assert abs(h[0]) == 2 and h[1:] == (0, 1, 0)


def test_twist_spec_rejects_crossing_curves(ref, g0, a1):
    with pytest.raises(NotDisjoint):
        TwistSpec([(a1, 1), (g0, 1)])


@settings(max_examples=10, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
def test_length_upper_bound(ref, g0, n1, n2, n3):
    spec = TwistSpec(list(zip(ref.pants_curves, (n1, n2, n3))))
    t = dehn_twist_geodesic(ref, g0, spec)
    b = twist_length_bounds(ref, g0, spec)
    assert t.length <= b.upper + 1e-9


def test_commutator_of_once_crossing_curves_is_simple(ref):
    # a1 and b2 meet once, so their commutator cuts off a one-holed torus
    assert geom_intersection(ref, "a1", "b2") == 1
    assert is_simple(ref, "a1.b2.A1.B2")
    assert is_separating(ref, "a1.b2.A1.B2")
