"""Collars and Fermi coordinates around a simple closed geodesic.

Points are handled in the hyperboloid model, where a geodesic is a plane
with a unit spacelike normal n and the signed distance of X from it is
asinh(<X, n>).  The normal is chosen so that positive distance lies to the
left of the oriented core.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._domain import klein_to_uhp, uhp_to_klein
from .hyp2 import PointH2
from .surface import NotSimple, OutsideCollar

_J = np.array([-1.0, 1.0, 1.0])


def collar_width(length: float) -> float:
    return math.asinh(1.0 / math.sinh(length / 2.0))


def klein_to_hyperboloid(k) -> np.ndarray:
    k = np.asarray(k, dtype=complex)
    s = 1.0 / np.sqrt(1.0 - np.abs(k) ** 2)
    return np.stack([s, k.real * s, k.imag * s], axis=-1)


def hyperboloid_to_klein(X) -> complex:
    return complex(X[1] / X[0], X[2] / X[0])


def mink(a, b):
    return -a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]


def line_normals(e1, e2) -> np.ndarray:
    """Unit spacelike normals of the chords e1 -> e2 (left side positive)."""
    E1 = np.stack([np.ones_like(e1.real), e1.real, e1.imag], axis=-1)
    E2 = np.stack([np.ones_like(e2.real), e2.real, e2.imag], axis=-1)
    n = np.cross(E1, E2) * _J
    return n / np.sqrt(mink(n, n))[..., None]


@dataclass
class Collar:
    """Embedded tubular neighbourhood of a simple closed geodesic.

    Fermi coordinates are (r, theta): r is signed distance from the core,
    positive on its left, and theta is arclength along the core measured in
    length units from the core's walk basepoint, in [0, length).
    """
    core: object            # ClosedGeodesic
    width: float
    _lifts: tuple = field(default=None, repr=False)

    @property
    def length(self) -> float:
        return self.core.length

    def _lift_data(self):
        if self._lifts is None:
            w = self.core.walk
            dom = w.domain
            gs = dom.ball(2 * dom.rho + self.width + 0.5)
            ginv = np.array([(m[3], -m[1], -m[2], m[0]) for m in gs])
            normals = line_normals(w.e1, w.e2)
            self._lifts = (ginv, normals)
        return self._lifts

    def chart(self, k: complex):
        """(r, theta) of a Klein point, over all nearby lifts of the core."""
        w = self.core.walk
        ginv, normals = self._lift_data()
        z = klein_to_uhp(complex(k))
        a, b, c, d = ginv.T
        zs = (a * z + b) / (c * z + d)
        # back to Klein, then hyperboloid
        p = (zs - 1j) / (zs + 1j)
        kk = 2 * p / (1 + np.abs(p) ** 2)
        X = klein_to_hyperboloid(kk)                      # (G, 3)
        sh = X @ (normals * _J).T                          # (G, J) = <X, n_j>
        idx = np.unravel_index(np.argmin(np.abs(sh)), sh.shape)
        gi, j = int(idx[0]), int(idx[1])
        r = math.asinh(float(sh[gi, j]))
        Xg = X[gi]
        n = normals[j]
        F = (Xg - math.sinh(r) * n) / math.cosh(r)
        kf = hyperboloid_to_klein(F)
        pin = w.pin[j]
        Pin = klein_to_hyperboloid(pin)
        dist = math.acosh(max(1.0, -float(mink(F, Pin))))
        direction = (w.e2[j] - w.e1[j])
        ahead = ((kf - pin) * direction.conjugate()).real >= 0
        theta = (w.t[j] + (dist if ahead else -dist)) % w.length
        return r, float(theta)

    def point(self, r: float, theta: float) -> complex:
        """Klein point with Fermi coordinates (r, theta), near the domain."""
        w = self.core.walk
        j, k = w.point_at(theta)
        n = line_normals(w.e1[j:j + 1], w.e2[j:j + 1])[0]
        F = klein_to_hyperboloid(k)
        X = math.cosh(r) * F + math.sinh(r) * n
        return hyperboloid_to_klein(X)


def collar(s, alpha) -> Collar:
    from .curves import geodesic_rep, ClosedGeodesic
    g = alpha if isinstance(alpha, ClosedGeodesic) else geodesic_rep(s, alpha)
    if not g.simple:
        raise NotSimple(f"{g.cls} is not simple")
    return Collar(core=g, width=collar_width(g.length))


def fermi_coords(c: Collar, p, tol: float = 1e-12):
    """Fermi coordinates of a point given as PointH2, complex (UHP) or Klein via kw."""
    if isinstance(p, PointH2):
        k = uhp_to_klein(p.z)
    else:
        k = uhp_to_klein(complex(p))
    r, theta = c.chart(k)
    if abs(r) > c.width + tol:
        raise OutsideCollar(f"|r| = {abs(r):.6g} exceeds collar width {c.width:.6g}")
    return r, theta


def fermi_point(c: Collar, r: float, theta: float) -> PointH2:
    z = klein_to_uhp(c.point(r, theta))
    return PointH2(z.real, z.imag)
