"""Dirichlet fundamental domain centred at i, in Klein-model coordinates.

The Klein model makes every geodesic a straight chord, so the domain is a
Euclidean convex polygon cut out by the perpendicular bisectors of the
orbit points.  Sides are labelled by the group element whose orbit point
defines them; walking out through side s lands in the tile s(D).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import _mat
from .words import free_reduce, inverse, invert_symbol


class DomainError(RuntimeError):
    pass


# ---------------------------------------------------------------- models

def uhp_to_disk(z: complex) -> complex:
    return (z - 1j) / (z + 1j)


def disk_to_uhp(p: complex) -> complex:
    return 1j * (1 + p) / (1 - p)


def ideal_to_disk(x: float) -> complex:
    if math.isinf(x):
        return 1 + 0j
    return (x - 1j) / (x + 1j)


def disk_to_ideal(p: complex) -> float:
    if abs(p - 1) < 1e-15:
        return math.inf
    return (1j * (1 + p) / (1 - p)).real


def klein_to_poincare(k: complex) -> complex:
    return k / (1 + math.sqrt(max(0.0, 1 - abs(k) ** 2)))


def poincare_to_klein(p: complex) -> complex:
    return 2 * p / (1 + abs(p) ** 2)


def uhp_to_klein(z: complex) -> complex:
    return poincare_to_klein(uhp_to_disk(z))


def klein_to_uhp(k: complex) -> complex:
    return disk_to_uhp(klein_to_poincare(k))


def klein_dist(a: complex, b: complex) -> float:
    num = 1 - (a.real * b.real + a.imag * b.imag)
    den = math.sqrt((1 - abs(a) ** 2) * (1 - abs(b) ** 2))
    return math.acosh(max(1.0, num / den))


def klein_dist_vec(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    num = 1 - (a.real * b.real + a.imag * b.imag)
    den = np.sqrt((1 - np.abs(a) ** 2) * (1 - np.abs(b) ** 2))
    return np.arccosh(np.maximum(1.0, num / den))


def oriented_direction(p: complex, e_end: complex) -> complex:
    """Unit tangent at Poincare point p of the geodesic heading to ideal e_end."""
    w = (e_end - p) / (1 - p.conjugate() * e_end)
    return w / abs(w)


def axis_endpoints_disk(m) -> Tuple[complex, complex]:
    """(repelling, attracting) ideal points, in the disk, of a float matrix."""
    from .hyp2 import MoebiusMap, fixed_points
    rep, att = fixed_points(MoebiusMap.from_entries(*m))
    return ideal_to_disk(rep), ideal_to_disk(att)


def apply_klein(m, k: complex) -> complex:
    z = klein_to_uhp(k)
    a, b, c, d = m
    return uhp_to_klein((a * z + b) / (c * z + d))


# ---------------------------------------------------------------- domain

@dataclass
class Side:
    element: tuple          # float matrix
    word: tuple             # generator word
    normal: complex         # unit direction to the orbit point
    offset: float           # Klein distance of the bisector from the centre
    displacement: float     # hyperbolic distance d(i, g i)
    inverse: int = -1


def _sign_key(m, scale=1e5):
    a, b, c, d = m
    for v in m:
        if abs(v) > 1e-9:
            s = 1 if v > 0 else -1
            break
    return tuple(int(round(s * v * scale)) for v in (a, b, c, d))


def _clip(poly, labels, n: complex, c: float, label):
    """Clip polygon by {x : <x, n> <= c}; labels[k] names edge k -> k+1."""
    out, out_lab = [], []
    m = len(poly)
    for k in range(m):
        p, q = poly[k], poly[(k + 1) % m]
        fp = p.real * n.real + p.imag * n.imag - c
        fq = q.real * n.real + q.imag * n.imag - c
        if fp <= 0:
            out.append(p)
            if fq <= 0:
                out_lab.append(labels[k])
            else:
                t = fp / (fp - fq)
                out_lab.append(labels[k])
                out.append(p + t * (q - p))
                out_lab.append(label)
        elif fq <= 0:
            t = fp / (fp - fq)
            out.append(p + t * (q - p))
            out_lab.append(labels[k])
    return out, out_lab


class DirichletDomain:
    def __init__(self, sides: List[Side], vertices: List[complex], genus: int,
                 area: float, search_radius: float):
        self.sides = sides
        self.vertices = vertices
        self.genus = genus
        self.area = area
        self.search_radius = search_radius
        self.rho = max(math.atanh(abs(v)) for v in vertices)
        self.normals = np.array([s.normal for s in sides])
        self.offsets = np.array([s.offset for s in sides])
        self.inv = [s.inverse for s in sides]
        self._hp = {}

    # -- construction -------------------------------------------------
    @classmethod
    def build(cls, surface, radius: float = 0.0) -> "DirichletDomain":
        gens = []
        for n in surface.names:
            m = surface.generators[n].entries
            gens.append(((n,), m))
            gens.append(((invert_symbol(n),), _mat.inv(m)))
        disp = max(math.acosh(_mat.cosh_dist_origin(m)) for _, m in gens)
        R = radius or max(4.0, 2.0 * disp)
        target = 4 * math.pi * (surface.genus - 1)
        for _ in range(12):
            elems = cls._ball(gens, R + 2.0)
            dom = cls._from_elements(elems, surface.genus, R)
            if dom is not None and abs(dom.area - target) < 1e-8:
                dom._attach_hp(surface)
                return dom
            R += 1.5
        raise DomainError("Dirichlet domain did not close up")

    @staticmethod
    def _ball(gens, R):
        coshR = math.cosh(R)
        ident = _mat.I2
        seen = {_sign_key(ident): ((), ident)}
        frontier = [((), ident)]
        while frontier:
            nxt = []
            for w, m in frontier:
                for gw, g in gens:
                    if w and w[-1] == invert_symbol(gw[0]):
                        continue
                    p = _mat.mul(m, g)
                    if _mat.cosh_dist_origin(p) > coshR:
                        continue
                    k = _sign_key(p)
                    if k in seen:
                        continue
                    seen[k] = (w + gw, p)
                    nxt.append((w + gw, p))
            frontier = nxt
        return [v for k, v in seen.items() if v[0]]

    @classmethod
    def _from_elements(cls, elems, genus, R):
        cands = []
        for w, m in elems:
            a, b, c, d = m
            gi = (a * 1j + b) / (c * 1j + d)
            p = uhp_to_disk(gi)
            r = abs(p)
            dist = 2 * math.atanh(r)
            cands.append((dist, w, m, p / r))
        cands.sort(key=lambda t: (round(t[0], 9), len(t[1]), t[1]))
        B = 1.5
        poly = [complex(-B, -B), complex(B, -B), complex(B, B), complex(-B, B)]
        labels = [-1, -1, -1, -1]
        for idx, (dist, w, m, u) in enumerate(cands):
            off = math.tanh(dist / 2)
            # skip half-planes that cannot cut the current polygon
            if max(v.real * u.real + v.imag * u.imag for v in poly) <= off:
                continue
            poly, labels = _clip(poly, labels, u, off, idx)
        if any(abs(v) >= 1 - 1e-12 for v in poly) or -1 in labels:
            return None
        # drop near-degenerate edges
        vs, ls = [], []
        for k in range(len(poly)):
            if abs(poly[(k + 1) % len(poly)] - poly[k]) > 1e-13:
                vs.append(poly[k])
                ls.append(labels[k])
        poly, labels = vs, ls
        # merge consecutive edges carrying the same label
        sides: List[Side] = []
        verts: List[complex] = []
        for k in range(len(poly)):
            if labels[k] == labels[k - 1] and len(poly) > 1:
                continue
            verts.append(poly[k])
        lab_order = []
        for k in range(len(poly)):
            if not lab_order or labels[k] != lab_order[-1]:
                lab_order.append(labels[k])
        if len(lab_order) > 1 and lab_order[0] == lab_order[-1]:
            lab_order.pop()
        for lab in lab_order:
            dist, w, m, u = cands[lab]
            sides.append(Side(element=m, word=w, normal=u, offset=math.tanh(dist / 2),
                              displacement=dist))
        # vertices in order, vertex k is the start of side k
        verts = []
        n = len(poly)
        for k in range(n):
            if labels[k] != labels[k - 1]:
                verts.append(poly[k])
        # interior angles via the Poincare model (conformal)
        angs = []
        nv = len(verts)
        for k in range(nv):
            v = klein_to_poincare(verts[k])
            a = klein_to_poincare(verts[k - 1])
            b = klein_to_poincare(verts[(k + 1) % nv])
            da = (a - v) / (1 - v.conjugate() * a)
            db = (b - v) / (1 - v.conjugate() * b)
            ang = abs(math.atan2((db / da).imag, (db / da).real))
            angs.append(ang)
        area = (nv - 2) * math.pi - sum(angs)
        # side pairing
        keys = {_sign_key(s.element): i for i, s in enumerate(sides)}
        for s in sides:
            j = keys.get(_sign_key(_mat.inv(s.element)))
            if j is None:
                return None
            s.inverse = j
        dom = cls(sides, verts, genus, area, R)
        return dom

    def _attach_hp(self, surface):
        self._surface_ref = surface

    def hp_sides(self, bits: int):
        bits = max(128, -(-bits // 64) * 64)
        if bits not in self._hp:
            self._hp[bits] = [self._surface_ref.hp_matrix(s.word, bits) for s in self.sides]
        return self._hp[bits]

    # -- queries --------------------------------------------------------
    def contains(self, k: complex, tol: float = 1e-12) -> bool:
        v = self.normals.real * k.real + self.normals.imag * k.imag - self.offsets
        return bool(np.all(v <= tol))

    def most_violated(self, k: complex):
        v = self.normals.real * k.real + self.normals.imag * k.imag - self.offsets
        i = int(np.argmax(v))
        return i, float(v[i])

    def reduce_point(self, k: complex, max_steps: int = 10000):
        """Move a Klein point into D; returns (point, side word applied)."""
        word = []
        for _ in range(max_steps):
            i, viol = self.most_violated(k)
            if viol <= 1e-13:
                return k, word
            k = apply_klein(_mat.inv(self.sides[i].element), k)
            word.append(i)
        raise DomainError("point reduction did not terminate")

    def clip_chord(self, e1: complex, e2: complex, entry_side: int = -1):
        """Clip the chord e1 -> e2 to D.

        Returns (lam_in, lam_out, exit_side) with points e1 + lam (e2 - e1),
        or None when the chord misses D.
        """
        d = e2 - e1
        nd = self.normals.real * d.real + self.normals.imag * d.imag
        ne = self.normals.real * e1.real + self.normals.imag * e1.imag
        lo, hi = 0.0, 1.0
        exit_side = -1
        best = math.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = (self.offsets - ne) / nd
        for i in range(len(self.sides)):
            if nd[i] > 1e-15:
                if lam[i] < hi:
                    hi = lam[i]
                if i != entry_side and lam[i] < best:
                    best, exit_side = lam[i], i
            elif nd[i] < -1e-15:
                if lam[i] > lo:
                    lo = lam[i]
            elif ne[i] > self.offsets[i]:
                return None
        if hi < lo - 1e-9:
            return None
        return lo, max(hi, lo), exit_side

    def displacement_bound(self, side_word) -> float:
        return sum(self.sides[i].displacement for i in side_word)

    def side_word_to_generators(self, side_word) -> tuple:
        out = []
        for i in side_word:
            out.extend(self.sides[i].word)
        return free_reduce(out)

    def ball(self, r: float):
        """Group elements g (float matrices) with d(i, g i) <= r, identity first."""
        return [m for _, m in self.ball_words(r)]

    def ball_words(self, r: float, margin: Optional[float] = None):
        """(side word, matrix) for every g with d(i, g i) <= r.

        Breadth-first over face pairings, pruned at r + margin (default the
        circumradius): the tiles met by the segment from i to g i all have
        centres within r + circumradius of i, so nothing is lost.
        """
        margin = self.rho if margin is None else margin
        cache = self.__dict__.setdefault("_balls", {})
        key = (round(r, 6), round(margin, 6))
        if key in cache:
            return cache[key]
        prune = math.cosh(r + margin)
        keep = math.cosh(r)
        ident = _mat.I2
        seen = {_sign_key(ident)}
        frontier = [((), ident)]
        out = [((), ident)]
        while frontier:
            nxt = []
            for w, m in frontier:
                for k, s in enumerate(self.sides):
                    if w and self.inv[w[-1]] == k:
                        continue
                    p = _mat.mul(m, s.element)
                    cd = _mat.cosh_dist_origin(p)
                    if cd > prune:
                        continue
                    key2 = _sign_key(p)
                    if key2 in seen:
                        continue
                    seen.add(key2)
                    nxt.append((w + (k,), p))
                    if cd <= keep:
                        out.append((w + (k,), p))
            frontier = nxt
        cache[key] = out
        return out
