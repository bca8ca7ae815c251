"""Arithmetic over GF(2^m) with log/antilog tables.

Elements are plain Python ints in ``[0, 2**m)``; bit ``k`` is the coefficient
of ``alpha**k`` in the polynomial basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

# Minimal-weight primitive polynomials, bit k <-> x^k.
PRIMITIVE_POLYS = {
    3: 0b1011,                 # x^3 + x + 1
    4: 0b10011,                # x^4 + x + 1
    5: 0b100101,               # x^5 + x^2 + 1
    6: 0b1000011,              # x^6 + x + 1
    7: 0b10000011,             # x^7 + x + 1
    8: 0b100011101,            # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,           # x^9 + x^4 + 1
    10: 0b10000001001,         # x^10 + x^3 + 1
    11: 0b100000000101,        # x^11 + x^2 + 1
    12: 0b1000001010011,       # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,      # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,     # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,    # x^15 + x + 1
    16: 0b10001000000001011,   # x^16 + x^12 + x^3 + x + 1
}

MAX_TABLE_DEGREE = 16


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class FieldContext:
    """GF(2^m) defined by a primitive polynomial.

    ``antilog[e]`` is ``alpha**e`` for ``0 <= e < 2**m - 1`` and ``log`` is its
    inverse on nonzero elements (``log[0]`` is a -1 sentinel).
    """

    m: int
    primitive_poly: int
    antilog: np.ndarray = field(repr=False, compare=False)
    log: np.ndarray = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        """Size of the multiplicative group, ``2**m - 1``."""
        return (1 << self.m) - 1

    @property
    def size(self) -> int:
        return 1 << self.m

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.antilog[(self.log[a] + self.log[b]) % self.order])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^m)")
        return int(self.antilog[(-self.log[a]) % self.order])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        return int(self.antilog[(int(self.log[a]) * e) % self.order])

    def alpha_pow(self, e: int) -> int:
        """``alpha**e``; the exponent is reduced modulo ``2**m - 1``."""
        return int(self.antilog[e % self.order])

    def alpha_pow_array(self, exponents) -> np.ndarray:
        return self.antilog[np.asarray(exponents, dtype=np.int64) % self.order]

    def discrete_log(self, a: int) -> int:
        if a == 0:
            raise FieldError("log of 0 is undefined")
        return int(self.log[a])

    def binary_image(self, x: int) -> np.ndarray:
        return binary_image(x, self.m)


def binary_image(x: int, m: int) -> np.ndarray:
    """Length-``m`` coefficient vector of ``x``, least-significant coefficient first."""
    if not 0 <= x < (1 << m):
        raise FieldError(f"value {x} is not an element of GF(2^{m})")
    return ((x >> np.arange(m)) & 1).astype(np.uint8)


def binary_images(values, m: int) -> np.ndarray:
    """Row-wise :func:`binary_image` of an integer array; shape ``(len(values), m)``."""
    values = np.asarray(values, dtype=np.int64)
    return ((values[:, None] >> np.arange(m)) & 1).astype(np.uint8)


def _build_tables(m: int, poly: int) -> tuple[np.ndarray, np.ndarray]:
    order = (1 << m) - 1
    antilog = np.zeros(order, dtype=np.int64)
    log = np.full(1 << m, -1, dtype=np.int64)
    x = 1
    for e in range(order):
        if log[x] != -1:
            # alpha has order e < 2^m - 1
            raise FieldError(f"polynomial {poly:#x} is not primitive for m={m}")
        antilog[e] = x
        log[x] = e
        x <<= 1
        if x >> m:
            x ^= poly
    if x != 1:
        raise FieldError(f"polynomial {poly:#x} is not primitive for m={m}")
    return antilog, log


@lru_cache(maxsize=None)
def make_field(m: int, primitive_poly: int | None = None) -> FieldContext:
    """Build (and cache) the field context for GF(2^m).

    The default polynomial comes from :data:`PRIMITIVE_POLYS`. Primitivity is
    checked by walking the powers of ``alpha`` until the cycle closes.
    """
    if not 2 <= m <= MAX_TABLE_DEGREE:
        raise FieldError(f"m must be in [2, {MAX_TABLE_DEGREE}], got {m}")
    if primitive_poly is None:
        if m == 2:
            primitive_poly = 0b111
        else:
            primitive_poly = PRIMITIVE_POLYS[m]
    if primitive_poly.bit_length() != m + 1:
        raise FieldError(f"polynomial {primitive_poly:#x} does not have degree {m}")
    antilog, log = _build_tables(m, primitive_poly)
    antilog.setflags(write=False)
    log.setflags(write=False)
    return FieldContext(m, primitive_poly, antilog, log)
