"""BPR codebooks: columns of a binary BCH parity-check matrix split among users.

Column ``j`` of the matrix is the stack of the binary images of
``alpha**(j*(2i-1))`` for ``i = 1..T``. Any ``2T`` columns are linearly
independent over GF(2), so the integer sum of up to ``T`` distinct columns
identifies the columns uniquely. User ``u`` owns the contiguous block of
columns ``[u*q, (u+1)*q)`` with ``q = M // K``; message ``w`` in ``1..q`` maps
to column ``u*q + w - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .field import FieldContext, binary_images, make_field


class CodeError(ValueError):
    pass


class DecodingError(RuntimeError):
    """Raised when a block observation is not a valid sum of codewords."""


class BlockObservation(NamedTuple):
    sum_vector: np.ndarray
    active_count: int


@dataclass(frozen=True)
class BprCode:
    m: int
    T: int
    K: int
    M: int
    gf: FieldContext = field(repr=False, compare=False)
    columns: np.ndarray = field(repr=False, compare=False)  # (M, m*T) uint8
    _lookup: dict = field(repr=False, compare=False)

    @property
    def n_rows(self) -> int:
        return self.m * self.T

    @property
    def messages_per_user(self) -> int:
        return self.M // self.K

    def user_of_column(self, j: int) -> int:
        return j // self.messages_per_user

    def message_of_column(self, j: int) -> int:
        return j % self.messages_per_user + 1

    def column_index(self, user: int, w: int) -> int:
        q = self.messages_per_user
        if not 0 <= user < self.K:
            raise CodeError(f"user {user} outside [0, {self.K})")
        if not 1 <= w <= q:
            raise CodeError(f"message {w} outside [1, {q}]")
        return user * q + w - 1

    def find_column(self, vector) -> int | None:
        """Index of the column equal to ``vector``, or None."""
        v = np.asarray(vector)
        if v.shape != (self.n_rows,) or v.min(initial=0) < 0 or v.max(initial=0) > 1:
            return None
        return self._lookup.get(v.astype(np.uint8).tobytes())

    def parity_check_matrix(self) -> np.ndarray:
        """The ``(m*T, M)`` binary matrix whose columns are the codewords."""
        return self.columns.T.copy()


def usable_length(m: int, K: int) -> int:
    """Largest multiple of ``K`` not exceeding ``2**m - 1``."""
    n = (1 << m) - 1
    return n - n % K


@lru_cache(maxsize=32)
def build_code(m: int, T: int, K: int) -> BprCode:
    """Build the ``(m, T, K)`` BPR code (cached, the result is immutable)."""
    if T < 1:
        raise CodeError(f"T must be >= 1, got {T}")
    if K < 1:
        raise CodeError(f"K must be >= 1, got {K}")
    gf = make_field(m)
    if K > gf.order:
        raise CodeError(f"K={K} exceeds the {gf.order} columns available for m={m}")
    M = usable_length(m, K)
    j = np.arange(M, dtype=np.int64)
    blocks = [binary_images(gf.alpha_pow_array(j * (2 * i - 1)), m) for i in range(1, T + 1)]
    columns = np.concatenate(blocks, axis=1)
    columns.setflags(write=False)
    lookup = {columns[k].tobytes(): k for k in range(M)}
    return BprCode(m, T, K, M, gf, columns, lookup)


def encode_message(code: BprCode, user: int, w: int) -> np.ndarray:
    """Codeword (length ``m*T``) of message ``w`` in ``user``'s codebook."""
    return code.columns[code.column_index(user, w)]


def bpr_decode(code: BprCode, obs: BlockObservation, method: str = "search") -> list[tuple[int, int]]:
    """Recover the ``(user, message)`` pairs whose codewords sum to ``obs.sum_vector``.

    ``method="search"`` runs an exhaustive (pruned) search over subsets of
    columns; ``method="algebraic"`` reduces the sum mod 2 to a BCH syndrome and
    locates the columns with Berlekamp-Massey and a Chien search. Both return
    pairs sorted by user.
    """
    s = np.asarray(obs.sum_vector, dtype=np.int64)
    l = int(obs.active_count)
    if l > code.T:
        raise CodeError(f"{l} active codewords exceed the decoding capability T={code.T}")
    if l < 0 or s.shape != (code.n_rows,):
        raise DecodingError("malformed block observation")
    if method == "search":
        found = _search(code, s, l, 0)
    elif method == "algebraic":
        found = _algebraic(code, s, l)
    else:
        raise ValueError(f"unknown decoding method {method!r}")
    if found is None:
        raise DecodingError(f"no set of {l} codewords sums to the observed block")
    pairs = [(code.user_of_column(j), code.message_of_column(j)) for j in found]
    return sorted(pairs)


def _search(code: BprCode, s: np.ndarray, l: int, start: int) -> list[int] | None:
    if l == 0:
        return [] if not s.any() else None
    if s.min() < 0:
        return None
    if l == 1:
        j = code.find_column(s)
        return [j] if j is not None and j >= start else None
    # the smallest chosen column must fit under s entrywise
    fits = np.all(code.columns[start:] <= s, axis=1)
    for j in np.flatnonzero(fits) + start:
        rest = _search(code, s - code.columns[j], l - 1, j + 1)
        if rest is not None:
            return [int(j)] + rest
    return None


def _syndromes(code: BprCode, s: np.ndarray) -> list[int]:
    gf, m = code.gf, code.m
    bits = (s % 2).astype(np.int64)
    weights = 1 << np.arange(m)
    odd = [int(bits[i * m:(i + 1) * m] @ weights) for i in range(code.T)]
    synd = [0] * (2 * code.T)
    for i, val in enumerate(odd):
        synd[2 * i] = val
    for k in range(1, 2 * code.T, 2):
        # S_{2j} = S_j^2 in characteristic 2
        synd[k] = gf.mul(synd[k // 2], synd[k // 2])
    return synd


def _berlekamp_massey(gf: FieldContext, synd: list[int]) -> list[int]:
    c, b = [1], [1]
    L, shift, last = 0, 1, 1
    for n in range(len(synd)):
        d = synd[n]
        for i in range(1, L + 1):
            if i < len(c):
                d ^= gf.mul(c[i], synd[n - i])
        if d == 0:
            shift += 1
            continue
        coef = gf.mul(d, gf.inv(last))
        new = c + [0] * max(0, len(b) + shift - len(c))
        for i, bi in enumerate(b):
            new[i + shift] ^= gf.mul(coef, bi)
        if 2 * L <= n:
            b, L, last, shift = c, n + 1 - L, d, 1
        else:
            shift += 1
        c = new
    return c[:L + 1] + [0] * max(0, L + 1 - len(c))


def _algebraic(code: BprCode, s: np.ndarray, l: int) -> list[int] | None:
    gf = code.gf
    if s.min(initial=0) < 0:
        return None
    synd = _syndromes(code, s)
    locator = _berlekamp_massey(gf, synd)
    if len(locator) - 1 != l:
        return None
    if l == 0:
        return [] if not s.any() else None
    # Chien search: locator(alpha^-j) == 0  <=>  column j is present
    j = np.arange(gf.order, dtype=np.int64)
    acc = np.zeros(gf.order, dtype=np.int64)
    for i, ci in enumerate(locator):
        if ci:
            acc ^= gf.antilog[(gf.log[ci] - i * j) % gf.order]
    roots = np.flatnonzero(acc == 0)
    if len(roots) != l or roots.max() >= code.M:
        return None
    if not np.array_equal(code.columns[roots].sum(axis=0, dtype=np.int64), s):
        return None
    return [int(r) for r in roots]


def dump_matrix(code: BprCode) -> str:
    """Parity-check matrix as text, one row of ``0``/``1`` characters per line."""
    rows = code.parity_check_matrix()
    return "\n".join("".join(map(str, row)) for row in rows) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    return np.array([[int(ch) for ch in ln] for ln in lines], dtype=np.uint8)
