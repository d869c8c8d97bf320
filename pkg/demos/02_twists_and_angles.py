"""Twist b2 around a1 and watch the crossing angles pile up near the core angle."""
import numpy as np

from hypspec.angles import angle_set, collar_trace, monotonicity_check
from hypspec.curves import TwistSpec, dehn_twist_geodesic, geodesic_rep, geom_intersection
from hypspec.surface import build_surface, collar, reference_fn

s = build_surface(reference_fn())
g0, a1 = geodesic_rep(s, "b2"), geodesic_rep(s, "a1")
phi = float(angle_set(s, g0, a1).thetas[0])
print(f"angle of b2 with a1: {phi:.6f}")

for n in (1, 2, 4, 8):
    t = dehn_twist_geodesic(s, g0, TwistSpec.single(a1, n))
    th = angle_set(s, g0, t).thetas
    rep = monotonicity_check(collar_trace(angle_set(s, g0, t), collar(s, a1)), phi)
    near = int(np.sum(np.abs(th - phi) < 0.05))
    print(f"n={n:2d}  length {t.length:9.4f}  i(T,b2)={geom_intersection(s, t, g0):3d}  "
          f"{near:3d} angles within 0.05  pattern {rep.pattern} ok={rep.ok}")
