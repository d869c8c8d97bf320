"""Words in surface-group generators.

Symbols are strings ``letter + digits``; an uppercase letter denotes the
inverse generator.  Words serialize as dot-separated symbols, e.g.
``"a1.b2.A1.B2"``.
"""
from __future__ import annotations

import re
from typing import Iterable, Sequence, Tuple

Word = Tuple[str, ...]

_SYM = re.compile(r"^[a-zA-Z][0-9]+$")


class WordSyntaxError(ValueError):
    pass


def invert_symbol(s: str) -> str:
    return s.swapcase() if len(s) == 1 else s[0].swapcase() + s[1:]


def is_inverse_symbol(s: str) -> bool:
    return s[0].isupper()


def base_symbol(s: str) -> str:
    return s[0].lower() + s[1:]


def parse_word(text: str) -> Word:
    text = text.strip()
    if not text:
        return ()
    syms = tuple(text.split("."))
    for s in syms:
        if not _SYM.match(s):
            raise WordSyntaxError(f"bad symbol {s!r} in {text!r}")
    return syms


def format_word(w: Sequence[str]) -> str:
    return ".".join(w)


def inverse(w: Sequence[str]) -> Word:
    return tuple(invert_symbol(s) for s in reversed(w))


def free_reduce(w: Iterable[str]) -> Word:
    out: list = []
    for s in w:
        if out and out[-1] == invert_symbol(s):
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def cyclic_reduce(w: Iterable[str]) -> Word:
    w = list(free_reduce(w))
    i, j = 0, len(w) - 1
    while i < j and w[i] == invert_symbol(w[j]):
        i += 1
        j -= 1
    return tuple(w[i:j + 1])


def min_rotation(w: Sequence) -> tuple:
    """Lexicographically least cyclic rotation."""
    w = tuple(w)
    if not w:
        return w
    return min(w[i:] + w[:i] for i in range(len(w)))


def exponent_sums(w: Sequence[str], names: Sequence[str]):
    idx = {n: k for k, n in enumerate(names)}
    v = [0] * len(names)
    for s in w:
        k = idx[base_symbol(s)]
        v[k] += -1 if is_inverse_symbol(s) else 1
    return v


# integer-letter words (used for face pairings): letter k, inverse ~k handled
# by an explicit inverse table, so only plain helpers are needed here

def free_reduce_int(w: Iterable[int], inv_of: Sequence[int]) -> tuple:
    out: list = []
    for s in w:
        if out and out[-1] == inv_of[s]:
            out.pop()
        else:
            out.append(s)
    return tuple(out)
