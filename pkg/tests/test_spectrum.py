import itertools
import math

import numpy as np
import pytest

from hypspec.spectrum import (CutoffMismatch, CutoffTooSmall, SpectrumSlice, closed_geodesics,
                              complement, enumerate_scg, length_angle_spectrum, spectra_compare,
                              systole)
from hypspec.words import cyclic_reduce, invert_symbol


def _brute_lengths(s, max_len, cutoff):
    """Distinct translation lengths <= cutoff over all words up to max_len."""
    mats = {}
    for n in s.names:
        m = np.array(s.generators[n].entries, dtype=float).reshape(2, 2)
        mats[n] = m
        mats[invert_symbol(n)] = np.linalg.inv(m)
    syms = list(mats)
    lim = 2 * math.cosh(cutoff / 2)
    found = set()

    def grow(word, m):
        if word and cyclic_reduce(word) == tuple(word):
            t = abs(m[0, 0] + m[1, 1])
            if 2 + 1e-9 < t <= lim + 1e-9:
                found.add(round(2 * math.acosh(t / 2), 7))
        if len(word) == max_len:
            return
        for x in syms:
            if word and x == invert_symbol(word[-1]):
                continue
            grow(word + [x], m @ mats[x])
    grow([], np.eye(2))
    return found


def test_closed_geodesics_match_word_brute_force(ref):
    gs, cert = closed_geodesics(ref, 3.9)   # below 4, where a1^2 appears
    mine = {round(g.length, 7) for g in gs}
    brute = _brute_lengths(ref, 6, 3.9)
    assert mine == brute
    assert cert.area_residual < 1e-8


def test_simple_curve_counts(ref):
    gs = enumerate_scg(ref, 5.0)
    assert len(gs) == 23
    assert [round(g.length, 4) for g in gs[:5]] == [2.0, 2.3838, 2.5, 2.8917, 3.0]
    assert all(g.simple for g in gs)


def test_systole_and_small_cutoff(ref):
    assert systole(ref) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(CutoffTooSmall):
        enumerate_scg(ref, 1.5)


def test_saturation_certificate(ref):
    _, cert = enumerate_scg(ref, 4.0, check_saturation=True, return_certificate=True)
    assert cert.saturated is True
    assert cert.ball_radius >= 4.0


def test_spectrum_slice_contents(ref):
    sl = length_angle_spectrum(ref, 4.0)
    singles = [r for r in sl.records if r.iota == 0 and r.l_gamma == r.l_delta]
    assert len(singles) == len(sl.geodesics)
    for r in sl.records:
        assert r.l_gamma <= r.l_delta + 1e-12
        assert all(0 < t < math.pi for t in r.thetas)


def test_spectrum_json_round_trip(ref):
    sl = length_angle_spectrum(ref, 4.0)
    back = SpectrumSlice.from_json(sl.to_json())
    assert spectra_compare(sl, back, tol=1e-12).empty


def test_threads_do_not_change_the_slice(ref):
    assert length_angle_spectrum(ref, 4.0, workers=3).to_csv() == length_angle_spectrum(ref, 4.0).to_csv()


def test_compare_detects_perturbation(ref, perturbed):
    d = spectra_compare(length_angle_spectrum(ref, 4.0), length_angle_spectrum(perturbed, 4.0))
    assert not d.empty


def test_compare_accepts_full_twist(ref, full_twist):
    d = spectra_compare(length_angle_spectrum(ref, 4.0), length_angle_spectrum(full_twist, 4.0))
    assert d.empty


def test_cutoff_mismatch(ref):
    with pytest.raises(CutoffMismatch):
        spectra_compare(length_angle_spectrum(ref, 3.0), length_angle_spectrum(ref, 4.0))


def test_complement():
    assert complement((0.5, 1.0)) == pytest.approx((math.pi - 0.5, math.pi - 1.0))
