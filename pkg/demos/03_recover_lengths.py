"""Recover pants lengths and angles of the reference surface from spectrum records alone.

Only (length of the twisted curve, angle sequence) pairs from the sweep are
passed to the recovery; the true values are used afterwards for scoring.
"""
from hypspec.angles import angle_set_multi
from hypspec.curves import geodesic_rep
from hypspec.reconstruct import construct_special_pants, min_gap, recover_from_spectrum, sweep
from hypspec.surface import build_surface, reference_fn

s = build_surface(reference_fn())
g0 = geodesic_rep(s, "b2")
P = construct_special_pants(s, g0)
print("pants curves:", [str(c.cls) for c in P.curves], "iota", P.iotas)

pts = sweep(s, g0, P, ("n^3", "n^2", "n"), range(2, 7))
truth = [float(t) for t in angle_set_multi(s, g0, P.curves).thetas]
rep = recover_from_spectrum(pts, eps=min_gap(truth) / 4, reference_angles=truth,
                            reference_lengths=[c.length for c in P.curves])

for i, c in enumerate(P.curves):
    print(f"curve {i + 1}: true {c.length:.9f}  recovered {rep.recovered_lengths[i]:.9f}")
    for n, e in rep.length_errors[i]:
        print(f"    n={n}  relative error {e:.2e}")
print(f"naive estimate of curve 1 at n=6: {rep.naive_curve[-1][1]:.4f}")
print("angle error", rep.angle_error, "success", rep.success())
