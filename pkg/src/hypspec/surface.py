"""Closed hyperbolic surfaces from Fenchel-Nielsen data.

Each pair of pants is the orientation-preserving half of the reflection
group of a right-angled hexagon.  Pants are glued along cuffs by Moebius
maps carrying one cuff onto the other with reversed orientation, shifted by
the twist.  Gluings along a spanning tree of the pants graph amalgamate;
the remaining gluings add stable letters.  Tietze moves then shrink the
presentation to 2g generators and one relator.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import gmpy2

from . import _mat
from .config import DEFAULT, Tolerances
from .hyp2 import MoebiusMap, PointH2, hexagon_solve
from .words import (Word, base_symbol, cyclic_reduce, free_reduce, inverse,
                    invert_symbol, parse_word)


class InvalidSurfaceData(ValueError):
    pass


class RelatorCheckFailed(RuntimeError):
    pass


class NotSimple(ValueError):
    pass


class OutsideCollar(ValueError):
    pass


# ---------------------------------------------------------------- data

@dataclass(frozen=True)
class PantsGraph:
    """Pants 0..n-1, each with slots 0,1,2; gluings pair up all slots."""
    n_pants: int
    gluings: Tuple[Tuple[int, int, int, int], ...]

    def __post_init__(self):
        seen = set()
        for g in self.gluings:
            if len(g) != 4:
                raise InvalidSurfaceData(f"gluing {g} must be (pant, slot, pant, slot)")
            pa, sa, pb, sb = g
            for p, s in ((pa, sa), (pb, sb)):
                if not (0 <= p < self.n_pants) or s not in (0, 1, 2):
                    raise InvalidSurfaceData(f"bad cuff ({p}, {s})")
                if (p, s) in seen:
                    raise InvalidSurfaceData(f"cuff ({p}, {s}) glued twice")
                seen.add((p, s))
        if len(seen) != 3 * self.n_pants:
            raise InvalidSurfaceData("every slot must be glued (closed surface)")
        if self.n_pants < 2 or self.n_pants % 2:
            raise InvalidSurfaceData("number of pants must be 2g-2 with g >= 2")
        # connectivity
        adj = {p: set() for p in range(self.n_pants)}
        for pa, _, pb, _ in self.gluings:
            adj[pa].add(pb)
            adj[pb].add(pa)
        todo, reached = [0], {0}
        while todo:
            p = todo.pop()
            for q in adj[p] - reached:
                reached.add(q)
                todo.append(q)
        if len(reached) != self.n_pants:
            raise InvalidSurfaceData("pants graph is not connected")

    @property
    def genus(self) -> int:
        return self.n_pants // 2 + 1

    @property
    def pants(self) -> List[int]:
        return list(range(self.n_pants))

    @property
    def cuffs(self) -> List[Tuple[int, int]]:
        return [(p, s) for p in range(self.n_pants) for s in range(3)]

    @classmethod
    def theta(cls) -> "PantsGraph":
        """Genus 2: two pants glued slot-to-slot along three curves."""
        return cls(2, ((0, 0, 1, 0), (0, 1, 1, 1), (0, 2, 1, 2)))

    @classmethod
    def dumbbell(cls) -> "PantsGraph":
        """Genus 2: each pant glued to itself, joined by a separating curve."""
        return cls(2, ((0, 0, 0, 1), (1, 0, 1, 1), (0, 2, 1, 2)))


@dataclass(frozen=True)
class FenchelNielsen:
    graph: PantsGraph
    lengths: Tuple[float, ...]
    twists: Tuple[float, ...]

    def __post_init__(self):
        g = self.graph.genus
        if g < 2:
            raise InvalidSurfaceData("genus must be at least 2")
        m = 3 * g - 3
        if len(self.lengths) != m or len(self.twists) != m:
            raise InvalidSurfaceData(f"need {m} lengths and twists")
        if len(self.graph.gluings) != m:
            raise InvalidSurfaceData("gluing count mismatch")
        for l in self.lengths:
            if not (isinstance(l, (int, float)) and math.isfinite(l) and l > 0):
                raise InvalidSurfaceData(f"lengths must be positive, got {l}")
        for t in self.twists:
            if not (isinstance(t, (int, float)) and math.isfinite(t)):
                raise InvalidSurfaceData(f"twist must be finite, got {t}")
        object.__setattr__(self, "lengths", tuple(float(x) for x in self.lengths))
        object.__setattr__(self, "twists", tuple(float(x) for x in self.twists))

    def cuff_length(self, pant: int, slot: int) -> float:
        for k, (pa, sa, pb, sb) in enumerate(self.graph.gluings):
            if (pa, sa) == (pant, slot) or (pb, sb) == (pant, slot):
                return self.lengths[k]
        raise KeyError((pant, slot))

    def with_twist(self, k: int, value: float) -> "FenchelNielsen":
        tw = list(self.twists)
        tw[k] = value
        return FenchelNielsen(self.graph, self.lengths, tuple(tw))

    def with_length(self, k: int, value: float) -> "FenchelNielsen":
        ls = list(self.lengths)
        ls[k] = value
        return FenchelNielsen(self.graph, tuple(ls), self.twists)


def reference_fn() -> FenchelNielsen:
    """The genus-2 reference surface used throughout the tests."""
    return FenchelNielsen(PantsGraph.theta(), (2.0, 2.5, 3.0), (0.1, 0.2, 0.3))


# ---------------------------------------------------------------- pants

@dataclass(frozen=True)
class YPiece:
    """Pair of pants with boundary lengths and mutual perpendiculars.

    ``perps[k]`` is the length of the common perpendicular between the two
    cuffs other than cuff k.
    """
    lengths: Tuple[float, float, float]
    perps: Tuple[float, float, float]

    def between(self, i: int, j: int) -> float:
        if i == j or {i, j} - {0, 1, 2}:
            raise ValueError("need two distinct cuffs")
        return self.perps[3 - i - j]


def build_pants(l1: float, l2: float, l3: float) -> YPiece:
    if min(l1, l2, l3) <= 0:
        raise InvalidSurfaceData("pants lengths must be positive")
    A, B, C = hexagon_solve(l1 / 2, l2 / 2, l3 / 2)
    return YPiece((l1, l2, l3), (A, B, C))


def _circle_meet(c1, r1, c2, r2, num):
    x = (r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2 * (c2 - c1))
    y = num.sqrt(r1 * r1 - (x - c1) ** 2)
    return x, y


def _reflection(c, r):
    """Matrix (acting on conj z) of inversion in the circle |z - c| = r."""
    return (c / r, (r * r - c * c) / r, 1 / r, -c / r)


def pant_geometry(l1, l2, l3, num=math):
    """Canonical pant: cuff 0 is the imaginary axis, hexagon to its right.

    Returns dict with cuff translations X (tuple of 3 matrices, X0 X1 X2 = 1),
    markers (3 complex-like (x, y) pairs, the seam foot each X moves away
    from), seam circles and cuff circles.
    """
    h1, h2, h3 = l1 / 2, l2 / 2, l3 / 2

    def opp(x, y, z):
        return num.acosh((num.cosh(z) + num.cosh(x) * num.cosh(y))
                         / (num.sinh(x) * num.sinh(y)))

    d_c0c1 = opp(h1, h2, h3)  # between cuffs 0 and 1
    d_c2c0 = opp(h3, h1, h2)  # between cuffs 2 and 0
    e = num.exp(h1)
    one = num.exp(h1 - h1)
    # seam circles: s01 (unit), s20 (radius e); cuff circles k1, k2
    s01 = (0 * one, one)
    s20 = (0 * one, e)
    k1 = (1 / num.tanh(d_c0c1), 1 / num.sinh(d_c0c1))
    k2 = (e / num.tanh(d_c2c0), e / num.sinh(d_c2c0))
    c1, r1 = k1
    c2, r2 = k2
    x0 = ((c2 * c2 - r2 * r2) - (c1 * c1 - r1 * r1)) / (2 * (c2 - c1))
    s12 = (x0, num.sqrt((x0 - c1) ** 2 - r1 * r1))
    R01, R20, R12 = (_reflection(*s) for s in (s01, s20, s12))
    X0 = _mat.mul(R20, R01)
    X1 = _mat.mul(R01, R12)
    X2 = _mat.mul(R12, R20)
    m0 = (0 * one, one)
    m1 = _circle_meet(c1, r1, s12[0], s12[1], num)
    m2 = _circle_meet(c2, r2, s20[0], s20[1], num)
    return {"X": (X0, X1, X2), "markers": (m0, m1, m2),
            "seams": (s12, s20, s01), "cuffs": (None, k1, k2),
            "perp01": d_c0c1, "perp20": d_c2c0}


def _fixed_points_generic(m, num):
    """(repelling, attracting) fixed points; None encodes infinity."""
    a, b, c, d = m
    if c == 0:
        x = b / (d - a)
        return (x, None) if abs(a) > abs(d) else (None, x)
    disc = num.sqrt((a + d) ** 2 - 4 * (a * d - b * c))
    p = a - d
    q = disc if p >= 0 else -disc
    r1 = (p + q) / (2 * c)
    r2 = (-2 * b) / (p + q)
    if abs(c * r1 + d) > abs(c * r2 + d):
        return (r2, r1)
    return (r1, r2)


def _frame(m, marker, num):
    """Map sending (imaginary axis upward, i) to (axis of m, marker)."""
    rep, att = _fixed_points_generic(m, num)
    mx, my = marker
    if att is None:
        s = my
        r = num.sqrt(s)
        return (r, rep / r, 0 * s, 1 / r)
    if rep is None:
        s = 1 / my
        r = num.sqrt(s)
        return (att * s / r, -1 / r, s / r, 0 * s)
    if att > rep:
        M1 = (att, rep, 1 + 0 * att, 1 + 0 * att)
    else:
        M1 = (-att, rep, -1 + 0 * att, 1 + 0 * att)
    a, b, c, d = M1
    det = a * d - b * c
    # M1^{-1}(marker) lies on the imaginary axis; compute its height
    # w = (d z - b)/(-c z + a) with z = mx + i my
    nr, ni = d * mx - b, d * my
    dr, di = -c * mx + a, -c * my
    den = dr * dr + di * di
    s = (ni * dr - nr * di) / den
    r = num.sqrt(s)
    sc = 1 / num.sqrt(det)
    return (a * r * sc, b / r * sc, c * r * sc, d / r * sc)


def _translation(t, num):
    e = num.exp(t / 2)
    return (e, 0 * e, 0 * e, 1 / e)


_ROT = (0.0, -1.0, 1.0, 0.0)


# ---------------------------------------------------------------- Tietze

def _tietze(relators: List[Word], names: List[str], protected: Sequence[str]):
    """Eliminate generators occurring once in a relator until one relator is left.

    Returns (remaining names, remaining relators, substitution dict).
    """
    subs: Dict[str, Word] = {}
    rels = [cyclic_reduce(r) for r in relators]
    names = list(names)

    def priority(n):
        if n in protected:
            return 3
        return {"d": 0, "e": 0, "a": 2, "b": 1}.get(n[0], 1)

    def substitute(w: Word, g: str, expr: Word) -> Word:
        out = []
        for s in w:
            if base_symbol(s) == g:
                out.extend(expr if s == g else inverse(expr))
            else:
                out.append(s)
        return free_reduce(out)

    while len(rels) > 1:
        best = None
        for ri, r in enumerate(rels):
            counts: Dict[str, int] = {}
            for s in r:
                counts[base_symbol(s)] = counts.get(base_symbol(s), 0) + 1
            for g, k in counts.items():
                if k == 1:
                    key = (priority(g), len(r), ri, g)
                    if best is None or key < best[0]:
                        best = (key, ri, g)
        if best is None:
            break
        _, ri, g = best
        r = rels.pop(ri)
        pos = next(i for i, s in enumerate(r) if base_symbol(s) == g)
        rot = r[pos:] + r[:pos]
        rest = rot[1:]
        expr = inverse(rest) if rot[0] == g else tuple(rest)
        expr = free_reduce(expr)
        for k in list(subs):
            subs[k] = substitute(subs[k], g, expr)
        subs[g] = expr
        rels = [cyclic_reduce(substitute(x, g, expr)) for x in rels]
        names.remove(g)
    return names, rels, subs


# ---------------------------------------------------------------- surface

class _Construction:
    """Symbolic and numeric data of the graph-of-groups construction."""

    def __init__(self, fn: FenchelNielsen):
        self.fn = fn
        g = fn.graph
        self.loop_name: Dict[Tuple[int, int], str] = {}
        self.curve_of: Dict[Tuple[int, int], int] = {}
        for k, (pa, sa, pb, sb) in enumerate(g.gluings):
            self.loop_name[(pa, sa)] = f"a{k + 1}"
            self.loop_name[(pb, sb)] = f"d{k + 1}"
            self.curve_of[(pa, sa)] = k
            self.curve_of[(pb, sb)] = k
        # spanning tree by BFS from pant 0
        self.parent_edge: Dict[int, Tuple[int, bool]] = {}
        seen = {0}
        order = [0]
        queue = deque([0])
        tree = set()
        while queue:
            p = queue.popleft()
            for k, (pa, sa, pb, sb) in enumerate(g.gluings):
                if pa == pb:
                    continue
                if pa == p and pb not in seen:
                    self.parent_edge[pb] = (k, True)
                elif pb == p and pa not in seen:
                    self.parent_edge[pa] = (k, False)
                else:
                    continue
                q = pb if pa == p else pa
                seen.add(q)
                order.append(q)
                queue.append(q)
                tree.add(k)
        self.order = order
        self.tree = tree

    def loop_word(self, pant: int, slot: int) -> Word:
        if slot < 2:
            return (self.loop_name[(pant, slot)],)
        x0, x1 = self.loop_name[(pant, 0)], self.loop_name[(pant, 1)]
        return inverse((x0, x1))

    def symbolic(self):
        names: List[str] = []
        for p in range(self.fn.graph.n_pants):
            names += [self.loop_name[(p, 0)], self.loop_name[(p, 1)]]
        relators: List[Word] = []
        for k, (pa, sa, pb, sb) in enumerate(self.fn.graph.gluings):
            x = self.loop_word(pa, sa)
            y = self.loop_word(pb, sb)
            if k in self.tree:
                relators.append(y + x)
            else:
                t = f"b{k + 1}"
                names.append(t)
                relators.append((t,) + y + (invert_symbol(t),) + x)
        curves = [self.loop_word(pa, sa) for (pa, sa, _, _) in self.fn.graph.gluings]
        return names, relators, curves

    def numeric(self, num=math, conv=float):
        """Matrices of all construction letters, basepoint moved to i."""
        fn = self.fn
        geo = {}
        for p in range(fn.graph.n_pants):
            ls = [conv(fn.cuff_length(p, s)) for s in range(3)]
            geo[p] = pant_geometry(ls[0], ls[1], ls[2], num)
        one = conv(1.0)
        ident = (one, 0 * one, 0 * one, one)
        rot = tuple(conv(v) for v in _ROT)

        def glue(k):
            pa, sa, pb, sb = fn.graph.gluings[k]
            FA = _frame(geo[pa]["X"][sa], geo[pa]["markers"][sa], num)
            FB = _frame(geo[pb]["X"][sb], geo[pb]["markers"][sb], num)
            T = _translation(conv(fn.twists[k]), num)
            return _mat.mul(FA, _mat.mul(T, _mat.mul(rot, _mat.inv(FB))))

        G = {0: ident}
        for q in self.order[1:]:
            k, q_is_b = self.parent_edge[q]
            M = glue(k)
            pa, _, pb, _ = fn.graph.gluings[k]
            if q_is_b:
                G[q] = _mat.mul(G[pa], M)
            else:
                G[q] = _mat.mul(G[pb], _mat.inv(M))
        mats = {}
        for p in range(fn.graph.n_pants):
            for s in (0, 1):
                mats[self.loop_name[(p, s)]] = _mat.mul(G[p], _mat.mul(geo[p]["X"][s], _mat.inv(G[p])))
        for k, (pa, sa, pb, sb) in enumerate(fn.graph.gluings):
            if k not in self.tree:
                mats[f"b{k + 1}"] = _mat.mul(G[pa], _mat.mul(glue(k), _mat.inv(G[pb])))
        # basepoint: a generic point of the root pant, then moved to i
        l0 = conv(fn.cuff_length(0, 0))
        h = geo[0]["perp01"] / 2
        sc = num.exp(conv(0.0731) * l0)
        x0, y0 = sc * num.tanh(h), sc / num.cosh(h)
        r = num.sqrt(y0)
        N = (1 / r, -x0 / r, 0 * r, r)
        out = {n: _mat.conj(m, _mat.inv(N)) for n, m in mats.items()}
        return out, (x0, y0)


class Surface:
    """Closed hyperbolic surface with a one-relator Fuchsian presentation.

    The representation is normalized so that the Dirichlet basepoint of the
    surface sits at i.
    """

    def __init__(self, fn: FenchelNielsen, tol: Tolerances = DEFAULT):
        self.fn = fn
        self.tol = tol
        self._con = _Construction(fn)
        names, relators, curves = self._con.symbolic()
        protected = [f"a{k + 1}" for k in range(len(fn.lengths))]
        self.names, rels, subs = _tietze(relators, names, protected)
        self.relators: Tuple[Word, ...] = tuple(rels)
        self._subs = subs
        self.pants_curve_words: Tuple[Word, ...] = tuple(
            cyclic_reduce(self._rewrite(w)) for w in curves)
        self._hp_cache: Dict[int, dict] = {}
        mats, base = self._con.numeric(math, float)
        self.basepoint_original = PointH2(float(base[0]), float(base[1]))
        hp = self.hp_generators(128)
        self.generators: Dict[str, MoebiusMap] = {
            n: MoebiusMap.from_entries(*_mat.to_float(hp[n])) for n in self.names}
        self.relator_residual = max(self._residual(r) for r in self.relators)

    # -- words --------------------------------------------------------
    def _rewrite(self, w: Word) -> Word:
        out = []
        for s in w:
            b = base_symbol(s)
            if b in self._subs:
                e = self._subs[b]
                out.extend(e if s == b else inverse(e))
            else:
                out.append(s)
        return free_reduce(out)

    @property
    def genus(self) -> int:
        return self.fn.graph.genus

    @property
    def relator(self) -> Word:
        return self.relators[0]

    def hp_generators(self, bits: int) -> dict:
        bits = max(128, -(-bits // 64) * 64)
        if bits not in self._hp_cache:
            with gmpy2.context(gmpy2.get_context(), precision=bits):
                mats, _ = self._con.numeric(gmpy2, gmpy2.mpfr)
                gens = {}
                for n in self.names:
                    m = mats[n]
                    gens[n] = m
                    gens[invert_symbol(n)] = _mat.inv(m)
            self._hp_cache[bits] = gens
        return self._hp_cache[bits]

    def hp_matrix(self, word: Sequence[str], bits: int = 128):
        gens = self.hp_generators(bits)
        with gmpy2.context(gmpy2.get_context(), precision=max(128, bits)):
            out = (gmpy2.mpfr(1), gmpy2.mpfr(0), gmpy2.mpfr(0), gmpy2.mpfr(1))
            for s in word:
                out = _mat.mul(out, gens[s])
        return out

    def matrix(self, word: Sequence[str]):
        """Float tuple of the holonomy of a word (not normalized in sign)."""
        out = _mat.I2
        for s in word:
            g = self.generators[base_symbol(s)]
            m = g.entries if s == base_symbol(s) else _mat.inv(g.entries)
            out = _mat.mul(out, m)
        return out

    def _residual(self, r: Word) -> float:
        m = _mat.to_float(self.hp_matrix(r, 128))
        e1 = max(abs(m[0] - 1), abs(m[1]), abs(m[2]), abs(m[3] - 1))
        e2 = max(abs(m[0] + 1), abs(m[1]), abs(m[2]), abs(m[3] + 1))
        return min(e1, e2)

    def parse(self, text: str) -> Word:
        w = parse_word(text)
        for s in w:
            if base_symbol(s) not in self.names:
                raise KeyError(f"unknown generator {s!r}; have {self.names}")
        return w

    # -- derived objects -------------------------------------------------
    @cached_property
    def domain(self):
        from ._domain import DirichletDomain
        return DirichletDomain.build(self)

    @cached_property
    def pants_curves(self):
        from .curves import CurveClass, geodesic_rep
        return tuple(geodesic_rep(self, CurveClass(w)) for w in self.pants_curve_words)

    def __repr__(self):
        return (f"Surface(genus={self.genus}, lengths={self.fn.lengths}, "
                f"twists={self.fn.twists}, residual={self.relator_residual:.2e})")


def build_surface(fn: FenchelNielsen, tol: Tolerances = DEFAULT) -> Surface:
    s = Surface(fn, tol)
    if not s.relator_residual <= tol.relator:
        raise RelatorCheckFailed(f"relator residual {s.relator_residual:.3e}")
    return s


def holonomy(s: Surface, w) -> MoebiusMap:
    word = getattr(w, "word", w)
    if isinstance(word, str):
        word = s.parse(word)
    return MoebiusMap.from_entries(*s.matrix(word))


from ._collar import Collar, collar, collar_width, fermi_coords, fermi_point  # noqa: E402
