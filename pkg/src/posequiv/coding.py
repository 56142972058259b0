"""Integer codings: Cantor pairing, tuples, and canonical finite sets."""

from __future__ import annotations

from math import isqrt
from typing import Iterable


def pair(x: int, y: int) -> int:
    """Cantor pairing ``(x+y)(x+y+1)/2 + y``."""
    s = x + y
    return s * (s + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def encode_tuple(values: Iterable[int]) -> int:
    """Injective code for a tuple of naturals of any length.

    The empty tuple is 0; otherwise ``pair(len-1, nested)`` shifted by one.
    """
    values = tuple(values)
    if not values:
        return 0
    acc = values[-1]
    for v in reversed(values[:-1]):
        acc = pair(v, acc)
    return pair(len(values) - 1, acc) + 1


def decode_tuple(code: int) -> tuple[int, ...]:
    if code == 0:
        return ()
    extra, acc = unpair(code - 1)
    out = []
    for _ in range(extra):
        head, acc = unpair(acc)
        out.append(head)
    out.append(acc)
    return tuple(out)


def finite_set_code(elements: Iterable[int]) -> int:
    """Canonical index i of a finite set: D_i has the binary expansion of i."""
    code = 0
    for x in set(elements):
        code |= 1 << x
    return code


def finite_set(code: int) -> frozenset[int]:
    """D_code."""
    out = []
    x = 0
    while code:
        if code & 1:
            out.append(x)
        code >>= 1
        x += 1
    return frozenset(out)


def cantor_pairs(limit: int | None = None):
    """Yield (x, y) in increasing Cantor code order."""
    z = 0
    while limit is None or z < limit:
        yield unpair(z)
        z += 1
