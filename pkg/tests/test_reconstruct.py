import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypspec.curves import TwistSpec, dehn_twist_geodesic, geodesic_rep, geom_intersection
from hypspec.reconstruct import (NoSuchArc, OneHoledTorus, OutOfRange, SpecialPants,
                                 TorusTriple, arc_angles, arc_from_angles, boundary_from_perp,
                                 construct_special_pants, marked_rigidity_check, min_gap,
                                 parse_schedule, perp_from_triple, phi_margin, recover_from_spectrum,
                                 rotation_angles, schedule_vector, sweep, torus_from_triple,
                                 twist_sequence)
from hypspec.surface import build_pants, build_surface, reference_fn
from hypspec.spectrum import enumerate_scg

# ---------------------------------------------------------------- tori


def _closed_form_boundary(t):
    return 4 * math.acosh(math.sinh(t.l_alpha / 2) * math.sinh(t.l_beta / 2) * math.sin(t.theta))


@pytest.mark.parametrize("triple", [(2.3, 2.1, 1.1), (2.3, 2.6, 2.3), (3.0, 3.0, math.pi / 2)])
def test_torus_from_triple_round_trip(triple):
    t = TorusTriple(*triple)
    T = torus_from_triple(t)
    back = T.triple()
    assert back.l_alpha == pytest.approx(t.l_alpha, abs=1e-12)
    assert back.l_beta == pytest.approx(t.l_beta, abs=1e-10)
    assert back.theta == pytest.approx(t.theta, abs=1e-10)
    assert T.boundary_length() == pytest.approx(_closed_form_boundary(t), rel=1e-10)


def test_unrealizable_triple():
    with pytest.raises(OutOfRange):
        torus_from_triple(TorusTriple(1.3, 2.1, 1.1))
    with pytest.raises(ValueError):
        TorusTriple(1.0, 1.0, 0.0)


def test_boundary_from_perp_inverts_pants():
    for la, l0 in [(2.0, 1.0), (1.5, 3.3), (3.0, 0.4)]:
        d = build_pants(la, la, l0).between(0, 1)
        assert boundary_from_perp(la, d) == pytest.approx(l0, rel=1e-10)


def test_perp_examples():
    assert perp_from_triple(TorusTriple(2.0, 2.0, math.pi / 2)) == pytest.approx(1.0, abs=1e-15)
    assert perp_from_triple(TorusTriple(2.0, 3.0, math.pi / 6)) == pytest.approx(
        math.asinh(0.5 * math.sinh(1.5)), abs=1e-15)
    assert perp_from_triple(TorusTriple(2.0, 3.0, 1e-9)) < 1e-8


def test_boundary_from_perp_identity_and_monotone():
    l0s = np.linspace(0.5, 6.0, 23)
    for la in (1.0, 2.0, 3.5):
        ds = [build_pants(la, la, l0).between(0, 1) for l0 in l0s]
        back = [boundary_from_perp(la, d) for d in ds]
        assert back == pytest.approx(list(l0s), abs=1e-10)
        assert all(b > a for a, b in zip(ds, ds[1:]))
    with pytest.raises(OutOfRange):
        boundary_from_perp(2.0, 0.1)


def test_boundary_moves_monotonically_with_angle():
    ths = [1.0 + 0.01 * k for k in range(10)]
    l0s = [torus_from_triple(TorusTriple(2.3, 2.6, th)).boundary_length() for th in ths]
    assert all(b > a for a, b in zip(l0s, l0s[1:]))


def test_right_angle_triple_is_symmetric():
    """Swapping the two curves of a right-angled triple gives an isometric torus."""
    for la, lb in [(2.4, 2.4), (2.0, 3.0)]:
        T = torus_from_triple(TorusTriple(la, lb, math.pi / 2))
        U = torus_from_triple(TorusTriple(lb, la, math.pi / 2))
        assert T.simple_lengths(5.0) == pytest.approx(U.simple_lengths(5.0), abs=1e-9)
        assert T.boundary_length() == pytest.approx(U.boundary_length(), abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.8, 3.0), st.floats(-2.0, 2.0), st.floats(0.5, 4.0))
def test_torus_rigidity_round_trip(la, tw, l0):
    T = OneHoledTorus(la, tw, l0)
    R = torus_from_triple(T.triple())
    a, b = T.simple_lengths(5.0), R.simple_lengths(5.0)
    assert len(a) == len(b)
    assert a == pytest.approx(b, abs=1e-8)
    assert R.boundary_length() == pytest.approx(T.boundary_length(), abs=1e-8)


def test_torus_simple_lengths_include_generators():
    T = torus_from_triple(TorusTriple(2.3, 2.6, 2.3))
    ls = T.simple_lengths(5.0)
    assert ls[0] == pytest.approx(2.3) and 2.6 == pytest.approx(min(ls[1:], key=lambda x: abs(x - 2.6)))


# ---------------------------------------------------------------- arcs

def test_perpendicular_arcs_are_hexagon_sides():
    Y = build_pants(2.0, 2.5, 3.0)
    for i, j in [(0, 1), (0, 2), (1, 2)]:
        a = arc_from_angles(Y, (i, j), (math.pi / 2, math.pi / 2))
        assert a.length == pytest.approx(Y.between(i, j), abs=1e-9)


def test_arc_angle_round_trip():
    Y = build_pants(2.0, 2.5, 3.0)
    a = arc_from_angles(Y, (0, 1), (1.0, 2.0))
    assert arc_angles(Y, (0, 1), a.start_offset, a.end) == pytest.approx((1.0, 2.0), abs=1e-9)


def test_symmetric_pants_arcs_agree():
    Y = build_pants(2.0, 2.0, 2.0)
    ls = [arc_from_angles(Y, e, (1.2, 1.0)).length for e in [(0, 1), (1, 2), (2, 0)]]
    assert ls == pytest.approx([ls[0]] * 3, abs=1e-10)


def test_arc_angles_out_of_range():
    with pytest.raises(NoSuchArc):
        arc_from_angles(build_pants(2.0, 2.0, 2.0), (0, 1), (0.0, 1.0))


# ---------------------------------------------------------------- special pants

def test_special_pants_certificates(ref, special):
    P = special
    assert [str(c.cls) for c in P.curves] == ["a1", "a2.b2.a1.B3", "A1.b3.a1.B3"]
    assert P.iotas == [1, 1, 2] and P.separating == [False, False, True]
    assert P.minimal
    assert P.phi_margin == pytest.approx(0.25288, abs=1e-5)
    for i in range(3):
        for j in range(i + 1, 3):
            assert geom_intersection(ref, P.curves[i], P.curves[j]) == 0
    assert phi_margin(ref, P.gamma0, P.curves) == pytest.approx(P.phi_margin)


def test_special_pants_twists_to_reach_margin(ref, g0):
    P = construct_special_pants(ref, g0, min_margin=0.3)
    assert P.twists_applied == [0, 0, 1]
    assert str(P.etas[2].cls) == "a1.a2.b2.a1.B3"
    assert P.phi_margin > 0.3 and P.minimal


def test_twist_sequence(ref, g0, special):
    assert twist_sequence(ref, g0, special, (0, 0, 0)) is g0
    for i in range(3):
        v = [0, 0, 0]
        v[i] = 3
        t = twist_sequence(ref, g0, special, v)
        assert geom_intersection(ref, t, g0) == 3 * special.iotas[i] ** 2
        assert t.simple


def test_special_pants_rejects_separating_base(ref):
    with pytest.raises(ValueError):
        construct_special_pants(ref, "A1.b3.a1.B3")


def test_rotation_is_strictly_decreasing(ref, g0, special):
    beta = special.curves[1]
    eta = geodesic_rep(ref, "b3.B2.a2")
    assert geom_intersection(ref, eta, g0) == 0 and geom_intersection(ref, eta, beta) == 2
    seq = rotation_angles(ref, g0, beta, eta, 10)
    firsts = [s[0] for s in seq]
    diffs = [b - a for a, b in zip(firsts, firsts[1:])]
    assert all(d < 0 for d in diffs)
    assert float(diffs[-1]) < 0   # well below double resolution, still strict


# ---------------------------------------------------------------- recovery

def test_schedule_parsing():
    assert parse_schedule("n^3, n^2, n") == ("n^3", "n^2", "n")
    assert schedule_vector("2n^2,n,3", 4) == (32, 4, 3)
    for bad in ["n**2", "__import__('os')", "n^", "m"]:
        with pytest.raises(ValueError):
            parse_schedule(bad)


def test_min_gap():
    assert min_gap([1.0, 1.0, 1.5, 2.5]) == pytest.approx(0.5)
    assert min_gap([1.0]) == math.pi


@pytest.fixture(scope="module")
def recovery(ref, g0, special):
    from hypspec.angles import angle_set_multi
    pts = sweep(ref, g0, special, ("n^3", "n^2", "n"), range(2, 7))
    ref_angles = list(angle_set_multi(ref, g0, special.curves).thetas)
    rep = recover_from_spectrum(pts, eps=min_gap(ref_angles) / 4,
                                reference_angles=ref_angles,
                                reference_lengths=[c.length for c in special.curves])
    return pts, rep


def test_recovery_succeeds(recovery):
    _, rep = recovery
    assert rep.recovered_iota == [1, 1, 2]
    assert rep.angle_error <= rep.angle_tol
    assert all(e <= 0.02 for e in rep.final_relative_errors)
    assert all(rep.decreasing)
    assert rep.success()
    assert rep.errors_csv().startswith("n,curve,estimate,relative_error\n")


def test_naive_estimate_is_worse(recovery):
    _, rep = recovery
    naive = rep.naive_curve[-1][1]
    assert abs(naive - 2.0) / 2.0 > 0.1 > rep.final_relative_errors[0]


def test_equal_growth_is_flagged(ref, g0, special):
    pts = sweep(ref, g0, special, ("n", "n", "n"), range(2, 7))
    rep = recover_from_spectrum(pts, eps=0.06)
    assert not rep.separated
    assert any("unseparated" in w for w in rep.warnings)


def test_short_sweep_is_flagged(recovery):
    pts, _ = recovery
    rep = recover_from_spectrum(pts[:2], eps=0.06)
    assert any("insufficient sweep" in w for w in rep.warnings)
    assert not rep.success()


# ---------------------------------------------------------------- rigidity

def _carried(S, S2, P, a1):
    def tr(g):
        t = dehn_twist_geodesic(S, g, TwistSpec.single(a1, -1))
        return geodesic_rep(S2, t.cls)
    return tr(P.gamma0), SpecialPants(tr(P.gamma0), [tr(c) for c in P.curves], P.iotas,
                                      P.separating, P.phi_margin, [0, 0, 0], [None] * 3)


def test_marked_rigidity_full_twist(ref, full_twist, special, a1):
    g0b, P2 = _carried(ref, full_twist, special, a1)
    rep = marked_rigidity_check(ref, full_twist, special.gamma0, special, g0b, P2)
    assert rep.isometric and rep.spectra_ok


def test_marked_rigidity_self(ref, special):
    assert marked_rigidity_check(ref, ref, special.gamma0, special, special.gamma0, special).isometric


def test_marked_rigidity_perturbed(ref, perturbed, special):
    g0b = geodesic_rep(perturbed, special.gamma0.cls)
    P2 = SpecialPants(g0b, [geodesic_rep(perturbed, c.cls) for c in special.curves],
                      special.iotas, special.separating, special.phi_margin, [0, 0, 0], [None] * 3)
    rep = marked_rigidity_check(ref, perturbed, special.gamma0, special, g0b, P2)
    assert not rep.isometric and rep.witness == "(i) lengths differ"


def test_marked_rigidity_witness(ref, special, a1):
    fn = reference_fn()
    S2 = build_surface(fn.with_twist(0, fn.twists[0] + 0.5))
    g0b, P2 = _carried(ref, S2, special, a1)
    rep = marked_rigidity_check(ref, S2, special.gamma0, special, g0b, P2)
    assert not rep.isometric and rep.witness.startswith("(i)")
