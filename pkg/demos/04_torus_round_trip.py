"""A one-holed torus is pinned down by two lengths and one angle."""
import math

from hypspec.reconstruct import OneHoledTorus, TorusTriple, torus_from_triple

T = OneHoledTorus(2.2, 0.7, 1.9)
t = T.triple()
print(f"lengths {t.l_alpha:.6f}, {t.l_beta:.6f}; angle {t.theta:.6f}")
R = torus_from_triple(t)
print(f"boundary {T.boundary_length():.12f} -> {R.boundary_length():.12f}")
a, b = T.simple_lengths(5.0), R.simple_lengths(5.0)
print(f"{len(a)} simple lengths up to 5, max gap {max(abs(x - y) for x, y in zip(a, b)):.2e}")
print("closed form boundary:",
      4 * math.acosh(math.sinh(t.l_alpha / 2) * math.sinh(t.l_beta / 2) * math.sin(t.theta)))
