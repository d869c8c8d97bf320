"""Tile-by-tile walk of a closed geodesic through the Dirichlet domain.

A hyperbolic element W is conjugated until its axis meets D.  From there
the axis is followed chord by chord; each time it leaves D through side s
the element is replaced by s^-1 W s.  After one period the axis returns to
the first chord, and the recorded exit sides spell the cutting word.  The
chords are exactly the lifts of the closed geodesic that meet D, which is
what the crossing and angle computations need.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import gmpy2
import numpy as np

from . import _mat
from ._domain import DirichletDomain, klein_dist
from .words import min_rotation


class WalkError(RuntimeError):
    pass


def _mp_endpoints(m):
    """(repelling, attracting) fixed points of an mpfr matrix, as disk points."""
    a, b, c, d = m
    t = a + d
    disc = gmpy2.sqrt(t * t - 4)
    if c == 0:
        x = b / (d - a)
        xs = [x, None]
    else:
        p = a - d
        q = disc if p >= 0 else -disc
        r1 = (p + q) / (2 * c)
        r2 = (-2 * b) / (p + q)
        xs = [r1, r2]

    def deriv(x):
        if x is None:
            return abs(a / d) if d != 0 else gmpy2.mpfr("inf")
        return 1 / (c * x + d) ** 2

    def to_disk(x):
        if x is None:
            return 1 + 0j
        x2 = x * x
        den = x2 + 1
        return complex(float((x2 - 1) / den), float(-2 * x / den))

    r1, r2 = xs
    if c == 0:
        att_is_first = deriv(r1) < 1
    else:
        att_is_first = abs(c * r1 + d) > 1
    if att_is_first:
        return to_disk(r2), to_disk(r1)
    return to_disk(r1), to_disk(r2)


def estimate_length(mats: Sequence) -> float:
    """Translation length of a product of float matrices, by rescaling."""
    out = _mat.I2
    logs = 0.0
    for m in mats:
        out = _mat.mul(out, m)
        s = max(abs(v) for v in out)
        if s > 1e100:
            out = tuple(v / s for v in out)
            logs += math.log(s)
    t = abs(out[0] + out[3])
    if t == 0:
        return 0.0
    lt = math.log(t) + logs
    if lt < 30:
        tt = math.exp(lt)
        return 2 * math.acosh(tt / 2) if tt > 2 else 0.0
    return 2 * lt


def bits_for(length: float) -> int:
    return int(128 + 6 * length)


@dataclass
class Walk:
    """Chords of a closed geodesic through D, starting at the canonical tile."""
    domain: DirichletDomain
    e1: np.ndarray         # repelling ideal endpoint of each chord (disk)
    e2: np.ndarray         # attracting ideal endpoint
    pin: np.ndarray        # Klein entry point
    pout: np.ndarray       # Klein exit point
    t: np.ndarray          # arclength at entry
    chord: np.ndarray      # chord lengths
    sides: tuple           # exit side of each tile
    length: float          # period (the primitive length)
    trace_length: float    # translation length of the walked element
    local: list = field(repr=False, default_factory=list)   # hp local elements
    bits: int = 128

    @property
    def power(self) -> int:
        return max(1, int(round(self.trace_length / self.length)))

    @property
    def n(self) -> int:
        return len(self.sides)

    def point_at(self, s: float):
        """(tile index, Klein point) at arclength s mod length."""
        s = s % self.length
        j = int(np.searchsorted(self.t, s, side="right") - 1)
        j = max(0, min(j, self.n - 1))
        a, b = self.pin[j], self.pout[j]
        ds = s - self.t[j]
        if self.chord[j] <= 0:
            return j, a
        # arclength along Klein chord: solve via Poincare along the geodesic
        lam = _klein_param(a, b, ds)
        return j, a + lam * (b - a)

    def rotation(self, j: int) -> tuple:
        return self.sides[j:] + self.sides[:j]


def _klein_param(a: complex, b: complex, ds: float) -> float:
    """Parameter lam in [0,1] with klein distance(a, a + lam (b-a)) = ds."""
    total = klein_dist(a, b)
    if ds >= total:
        return 1.0
    if ds <= 0:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if klein_dist(a, a + mid * (b - a)) < ds:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def walk_element(domain: DirichletDomain, W, bits: int, length: Optional[float] = None,
                 max_tiles: int = 200000) -> Walk:
    """Walk the axis of the hp element W (an mpfr 4-tuple at ``bits``)."""
    hp = domain.hp_sides(bits)
    with gmpy2.context(gmpy2.get_context(), precision=max(128, bits)):
        tr = abs(W[0] + W[3])
        if tr <= 2 + 1e-12:
            raise WalkError("element is not hyperbolic")
        trace_length = float(2 * gmpy2.acosh(tr / 2))
        local = W
        e1, e2 = _mp_endpoints(local)
        res = domain.clip_chord(e1, e2)
        steps = 0
        while res is None:
            # pull the axis toward the centre through the most violated side
            d = e2 - e1
            lam = -((e1.real * d.real + e1.imag * d.imag) / (abs(d) ** 2))
            q = e1 + lam * d
            i, viol = domain.most_violated(q)
            local = _mat.conj(local, hp[i])
            e1, e2 = _mp_endpoints(local)
            res = domain.clip_chord(e1, e2)
            steps += 1
            if steps > 10000:
                raise WalkError("axis reduction did not terminate")
        first = (e1, e2)
        E1, E2, PIN, POUT, T, CH, SIDES, LOC = [], [], [], [], [], [], [], []
        total = 0.0
        entry = -1
        while True:
            lo, hi, ex = res
            pin = e1 + lo * (e2 - e1)
            pout = e1 + hi * (e2 - e1)
            ch = klein_dist(pin, pout) if hi > lo else 0.0
            E1.append(e1); E2.append(e2); PIN.append(pin); POUT.append(pout)
            T.append(total); CH.append(ch); SIDES.append(ex); LOC.append(local)
            total += ch
            local = _mat.conj(local, hp[ex])
            entry = domain.inv[ex]
            e1, e2 = _mp_endpoints(local)
            if abs(e1 - first[0]) + abs(e2 - first[1]) < 1e-8 and total > 1e-9:
                break
            if len(SIDES) > max_tiles or total > trace_length + 1.0:
                raise WalkError(f"walk did not close (length {total}, expected "
                                f"{trace_length}) at {bits} bits")
            res = domain.clip_chord(e1, e2, entry)
            if res is None:
                raise WalkError("axis left the domain; precision too low?")
    n = len(SIDES)
    # canonical start: lexicographically least rotation of the cutting word
    sides = tuple(SIDES)
    k = min(range(n), key=lambda j: sides[j:] + sides[:j])
    order = list(range(k, n)) + list(range(k))
    ch = np.array(CH)[order]
    t = np.concatenate([[0.0], np.cumsum(ch)[:-1]])
    return Walk(domain=domain,
                e1=np.array(E1)[order], e2=np.array(E2)[order],
                pin=np.array(PIN)[order], pout=np.array(POUT)[order],
                t=t, chord=ch, sides=tuple(sides[j] for j in order),
                length=float(np.sum(ch)), trace_length=trace_length,
                local=[LOC[j] for j in order], bits=bits)


def walk_side_word(domain: DirichletDomain, side_word: Sequence[int]) -> Walk:
    mats = [domain.sides[i].element for i in side_word]
    est = estimate_length(mats)
    bits = bits_for(max(est, 1.0))
    for _ in range(4):
        hp = domain.hp_sides(bits)
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            W = (gmpy2.mpfr(1), gmpy2.mpfr(0), gmpy2.mpfr(0), gmpy2.mpfr(1))
            for i in side_word:
                W = _mat.mul(W, hp[i])
        try:
            return walk_element(domain, W, bits)
        except WalkError:
            bits *= 2
    raise WalkError("walk failed at every precision tried")


def walk_generator_word(surface, word) -> Walk:
    dom = surface.domain
    gens = surface.generators
    from .words import base_symbol
    mats = []
    for s in word:
        m = gens[base_symbol(s)].entries
        mats.append(m if s == base_symbol(s) else _mat.inv(m))
    est = estimate_length(mats)
    bits = bits_for(max(est, 1.0))
    for _ in range(4):
        W = surface.hp_matrix(word, bits)
        try:
            return walk_element(dom, W, bits)
        except WalkError:
            bits *= 2
    raise WalkError("walk failed at every precision tried")


# ---------------------------------------------------------------- crossings

@dataclass
class Crossing:
    pos_a: float       # arclength along the first curve
    pos_b: float       # arclength along the second curve
    tile_a: int
    tile_b: int
    point: complex     # Klein point in D
    angle: float       # oriented ccw angle from a to b, in (0, 2 pi)


def _segment_hits(A: Walk, B: Walk, i: int, tol=1e-12):
    """Crossings of chord i of A with all chords of B (vectorized)."""
    p, r = A.pin[i], A.pout[i] - A.pin[i]
    q, s = B.pin, B.pout - B.pin
    # direction of the full chords (robust for zero-length chords)
    rd = A.e2[i] - A.e1[i]
    sd = B.e2 - B.e1
    den = rd.real * sd.imag - rd.imag * sd.real
    qp = q - p
    ok = np.abs(den) > 1e-14
    with np.errstate(divide="ignore", invalid="ignore"):
        # solve p + u rd = q + v sd
        u = (qp.real * sd.imag - qp.imag * sd.real) / den
        v = (qp.real * rd.imag - qp.imag * rd.real) / den
    # restrict to the clipped pieces
    la = np.abs(rd)
    lb = np.abs(sd)
    ua0 = ((A.pin[i] - A.e1[i]) / rd).real
    ua1 = ((A.pout[i] - A.e1[i]) / rd).real
    u_abs = ((p - A.e1[i]) / rd).real + u
    vb0 = ((B.pin - B.e1) / sd).real
    vb1 = ((B.pout - B.e1) / sd).real
    v_abs = vb0 + v
    eps_a = tol / la
    eps_b = tol / lb
    m = ok & (u_abs >= ua0 - eps_a) & (u_abs <= ua1 + eps_a) & \
        (v_abs >= vb0 - eps_b) & (v_abs <= vb1 + eps_b)
    js = np.nonzero(m)[0]
    return js, u[js]


def crossings(A: Walk, B: Walk, self_pairs: bool = False, tol: float = 1e-12):
    """All transverse crossings between two walked geodesics, deduplicated."""
    out: List[Crossing] = []
    for i in range(A.n):
        js, us = _segment_hits(A, B, i, tol)
        rd = A.e2[i] - A.e1[i]
        for j, u in zip(js, us):
            j = int(j)
            if self_pairs and j <= i:
                continue
            if self_pairs and abs(A.e1[i] - B.e1[j]) + abs(A.e2[i] - B.e2[j]) < 1e-9:
                continue
            x = A.pin[i] + u * rd
            if abs(x) >= 1:
                continue
            pa = A.t[i] + (klein_dist(A.pin[i], x) if u > 0 else 0.0)
            pb = B.t[j] + klein_dist(B.pin[j], x)
            ang = _oriented_angle(x, A.e2[i], B.e2[j])
            out.append(Crossing(pa % A.length, pb % B.length, i, j, x, ang))
    return _dedupe(out, A.length, B.length, symmetric=self_pairs)


def _oriented_angle(k: complex, ea: complex, eb: complex) -> float:
    from ._domain import klein_to_poincare, oriented_direction
    p = klein_to_poincare(k)
    da = oriented_direction(p, ea)
    db = oriented_direction(p, eb)
    return math.atan2((db / da).imag, (db / da).real) % (2 * math.pi)


def _cdist(x, y, period):
    d = abs(x - y) % period
    return min(d, period - d)


def _dedupe(cr: List[Crossing], la: float, lb: float, symmetric: bool,
            tol: float = 1e-7) -> List[Crossing]:
    cr.sort(key=lambda c: (c.pos_a, c.pos_b))
    out: List[Crossing] = []
    for c in cr:
        dup = False
        for o in out[-8:] + out[:4]:
            if _cdist(o.pos_a, c.pos_a, la) < tol and _cdist(o.pos_b, c.pos_b, lb) < tol:
                dup = True
                break
            if symmetric and _cdist(o.pos_a, c.pos_b, la) < tol and \
                    _cdist(o.pos_b, c.pos_a, lb) < tol:
                dup = True
                break
        if not dup:
            out.append(c)
    if symmetric:
        # a self crossing shows up as (s, t) and (t, s)
        final: List[Crossing] = []
        for c in out:
            if any(_cdist(o.pos_a, c.pos_b, la) < tol and _cdist(o.pos_b, c.pos_a, la) < tol
                   for o in final):
                continue
            final.append(c)
        out = final
    return out
