"""Acceptance criteria 1-11, one PASS/FAIL line each.

Run with pytest (lines are repeated in the terminal summary) or directly:
``python3 tests/test_acceptance.py``.
"""
import hashlib
import json
import math
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from hypspec._suites import suite_angles, suite_collars, suite_intersection, suite_length
from hypspec.angles import angle_set_multi
from hypspec.curves import geodesic_rep, geom_intersection
from hypspec.reconstruct import (OneHoledTorus, construct_special_pants, min_gap,
                                 recover_from_spectrum, rotation_angles, sweep,
                                 torus_from_triple)
from hypspec.spectrum import length_angle_spectrum, spectra_compare
from hypspec.surface import build_surface, reference_fn

LINES = {}


def record(num, ok, detail):
    line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {detail.strip()}"
    LINES[num] = line
    print(line)
    return ok


@pytest.fixture(scope="module", autouse=True)
def _summary(request):
    yield
    rep = request.config.pluginmanager.get_plugin("terminalreporter")
    if rep is not None and LINES:
        rep.write_sep("-", "acceptance criteria")
        for k in sorted(LINES):
            rep.write_line(LINES[k])


@pytest.fixture(scope="module")
def S():
    return build_surface(reference_fn())


def _timed(f, *a, **kw):
    t = time.perf_counter()
    out = f(*a, **kw)
    return out, time.perf_counter() - t


def test_criterion_01_twist_intersection_identity(S):
    res, dt = _timed(suite_intersection, S)
    r = res[0]
    assert record(1, r.ok and dt < 60, f"{r.name} for |n| <= 5 on 3 pairs; {dt:.2f}s {r.detail}")


def test_criterion_02_intersection_sandwich(S):
    res, dt = _timed(suite_intersection, S)
    r = res[1]
    assert record(2, r.ok and dt < 300, f"20 tuples, |n_i| <= 8, min slack {r.margin:g}; {dt:.2f}s")


def test_criterion_03_length_bounds(S):
    res, dt = _timed(suite_length, S)
    up, lo = res
    assert record(3, up.ok and lo.ok and dt < 300,
                  f"upper slack {up.margin:.4g}, lower slack {lo.margin:.4g} ({lo.detail}); {dt:.2f}s")


def test_criterion_04_angle_monotonicity(S):
    r = suite_angles(S)[0]
    assert record(4, r.ok and r.margin > 1e-9,
                  f"n in +-2,4,8,16, strictness margin {r.margin:.3g} {r.detail}".rstrip())


def test_criterion_05_accumulation_similarity(S):
    r = suite_angles(S)[1]
    assert record(5, r.ok, f"n in 4..64, eps in 0.05,0.1,0.2: {r.detail}")


def test_criterion_06_collar_crossings_and_arc_lengths(S):
    out, arc = suite_collars(S)
    assert record(6, out.ok and arc.ok, f"{out.detail}; arc length slack {arc.margin:.4g}")


def test_criterion_07_one_holed_torus_round_trip():
    rng = np.random.default_rng(2024)
    t0, worst, mismatch = time.perf_counter(), 0.0, 0
    for _ in range(20):
        T = OneHoledTorus(rng.uniform(0.8, 3.0), rng.uniform(-2.0, 2.0), rng.uniform(0.5, 4.0))
        R = torus_from_triple(T.triple())
        a, b = T.simple_lengths(5.0), R.simple_lengths(5.0)
        if len(a) != len(b):
            mismatch += 1
            continue
        worst = max([worst] + [abs(x - y) for x, y in zip(a, b)])
    dt = time.perf_counter() - t0
    ok = mismatch == 0 and worst <= 1e-8 and dt < 600
    assert record(7, ok, f"20 instances, cutoff 5.0, max length gap {worst:.2e}, "
                         f"count mismatches {mismatch}; {dt:.2f}s")


def test_criterion_08_special_pants_and_rotation(S):
    g0 = geodesic_rep(S, "b2")
    P = construct_special_pants(S, g0)
    cert = P.minimal and P.phi_margin > 0
    beta = P.curves[1]
    eta = geodesic_rep(S, "b3.B2.a2")
    valid_eta = geom_intersection(S, eta, g0) == 0 and geom_intersection(S, eta, beta) > 0
    seq = rotation_angles(S, g0, beta, eta, 10)
    firsts = [s[0] for s in seq]
    diffs = [b - a for a, b in zip(firsts, firsts[1:])]
    strict = all(d < 0 for d in diffs)
    assert record(8, cert and valid_eta and strict,
                  f"pants {[str(c.cls) for c in P.curves]}, iota {P.iotas}, "
                  f"Phi margin {P.phi_margin:.4g}; 10 twists along {eta.cls} strictly decrease "
                  f"(last step {float(diffs[-1]):.1e})")


def test_criterion_09_spectrum_self_recovery(S):
    t0 = time.perf_counter()
    g0 = geodesic_rep(S, "b2")
    P = construct_special_pants(S, g0)
    ref = [float(t) for t in angle_set_multi(S, g0, P.curves).thetas]
    pts = sweep(S, g0, P, ("n^3", "n^2", "n"), range(2, 7))
    rep = recover_from_spectrum(pts, eps=min_gap(ref) / 4, reference_angles=ref,
                                reference_lengths=[c.length for c in P.curves])
    dt = time.perf_counter() - t0
    errs = ", ".join(f"{e:.1e}" for e in rep.final_relative_errors)
    assert record(9, rep.success() and dt < 1800,
                  f"angle error {rep.angle_error:.1e} (tol {rep.angle_tol:.3g}), "
                  f"length errors {errs}, decreasing {rep.decreasing}; {dt:.2f}s")


def test_criterion_10_rigidity_discrimination(S):
    fn = reference_fn()
    pert = build_surface(fn.with_length(0, fn.lengths[0] + 0.05))
    full = build_surface(fn.with_twist(0, fn.twists[0] + fn.lengths[0]))
    base = length_angle_spectrum(S, 4.0)
    d1 = spectra_compare(base, length_angle_spectrum(pert, 4.0))
    d2 = spectra_compare(base, length_angle_spectrum(full, 4.0), tol=1e-8)
    assert record(10, (not d1.empty) and d2.empty,
                  f"perturbed diff {len(d1.unmatched_a)}+{len(d1.unmatched_b)} records, "
                  f"full twist diff {len(d2.unmatched_a)}+{len(d2.unmatched_b)}")


def _cli(args, env):
    e = dict(os.environ, **env)
    return subprocess.run([sys.executable, "-m", "hypspec", *args], capture_output=True, env=e)


def test_criterion_11_determinism():
    from hypspec.cli import reference_spec
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        spec = tmp / "spec.json"
        spec.write_text(json.dumps(reference_spec()))
        runs, codes = [], []
        for i, w in enumerate(["1", "4", "1", "2"]):
            out = tmp / f"run{i}"
            stdout = []
            for cmd in (["build"], ["spectrum", "--cutoff", "5.0"],
                        ["verify", "--suite", "intersection"], ["recover", "--gamma0", "b2"]):
                r = _cli(cmd + ["--spec", str(spec), "--out", str(out)], {"HYPSPEC_WORKERS": w})
                codes.append(r.returncode)
                stdout.append(r.stdout)
            files = {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(out.iterdir())}
            files["stdout"] = hashlib.sha256(b"".join(stdout)).hexdigest()
            runs.append(files)
    same = all(r == runs[0] for r in runs)
    assert record(11, same and not any(codes),
                  f"{len(runs[0]) - 1} files + stdout identical over 4 runs (workers 1,4,1,2)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
