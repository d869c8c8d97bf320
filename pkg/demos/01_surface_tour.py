"""Build the reference genus-2 surface and list its short simple geodesics."""
from hypspec.curves import geom_intersection, is_separating
from hypspec.spectrum import enumerate_scg
from hypspec.surface import build_surface, collar, reference_fn

s = build_surface(reference_fn())
print(s)
print("generators:", s.names)
print("relator:", ".".join(s.relator))

gs, cert = enumerate_scg(s, 5.0, return_certificate=True)
print(f"\n{len(gs)} simple closed geodesics up to length 5 "
      f"(search ball radius {cert.ball_radius:.3f}, {cert.candidates} candidates)")
a1 = s.pants_curves[0]
for g in gs:
    tag = "sep" if is_separating(s, g) else "   "
    print(f"  {g.length:8.5f}  {tag}  meets a1 {geom_intersection(s, g, a1)}x  {g.cls}")

c = collar(s, a1)
print(f"\ncollar around a1: width {c.width:.6f}")
