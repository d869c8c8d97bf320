"""2x2 matrix helpers on plain tuples (a, b, c, d).

Arithmetic is generic, so the same code runs on floats and on gmpy2 mpfr
values when long words need extra precision.
"""
from __future__ import annotations

import math

import gmpy2

I2 = (1.0, 0.0, 0.0, 1.0)


def mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def inv(m):
    a, b, c, d = m
    return (d, -b, -c, a)


def tr(m):
    return m[0] + m[3]


def conj(m, x):
    """x^-1 m x"""
    return mul(inv(x), mul(m, x))


def product(mats, start=I2):
    out = start
    for m in mats:
        out = mul(out, m)
    return out


def to_float(m):
    return tuple(float(v) for v in m)


def to_mp(m):
    return tuple(gmpy2.mpfr(v) for v in m)


def normalized(m):
    a, b, c, d = m
    det = a * d - b * c
    s = 1 / gmpy2.sqrt(det) if isinstance(a, type(gmpy2.mpfr(0))) else 1 / math.sqrt(det)
    return (a * s, b * s, c * s, d * s)


def cosh_dist_origin(m) -> float:
    """cosh of the displacement of i under m (det 1)."""
    a, b, c, d = m
    return float((a * a + b * b + c * c + d * d) / 2)


def bits_for_length(length_bound: float) -> int:
    """Working precision for a word whose translation is at most length_bound."""
    return int(64 + 1.6 * length_bound)
