"""IRSA frame encoder: message -> repetition degree -> slot positions -> frame.

The degree and the slot positions are deterministic functions of the message
``w``. Messages are cut into contiguous ranges, one per degree, with sizes
proportional to the degree distribution; inside the range of degree ``d`` the
offset (reduced modulo ``C(n_slots, d)``) is unranked through the
combinatorial number system into an increasing ``d``-tuple of slots.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from .bpr import BprCode, encode_message

_INT64_MAX = np.iinfo(np.int64).max


class EncodingError(ValueError):
    pass


class ConfigurationWarning(UserWarning):
    """A parameter combination departs from the exact-uniformity assumptions."""


@dataclass(frozen=True)
class IrsaDistribution:
    """Repetition-degree distribution ``{d: Lambda_d}`` with ``d >= 2``.

    >>> IrsaDistribution({2: 0.5, 3: 0.5}).mean_degree
    2.5
    """

    items: tuple[tuple[int, float], ...]

    def __init__(self, probs: Mapping[int, float] | tuple):
        pairs = probs.items() if isinstance(probs, Mapping) else probs
        items = tuple(sorted((int(d), float(p)) for d, p in pairs if float(p) != 0.0))
        if not items:
            raise EncodingError("empty degree distribution")
        if len({d for d, _ in items}) != len(items):
            raise EncodingError("repeated degree in distribution")
        if any(d < 2 for d, _ in items):
            raise EncodingError("degrees must be >= 2")
        if any(p < 0 for _, p in items):
            raise EncodingError("negative degree probability")
        total = math.fsum(p for _, p in items)
        if abs(total - 1.0) > 1e-12:
            raise EncodingError(f"degree probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "items", items)

    @classmethod
    def parse(cls, text: str) -> "IrsaDistribution":
        """Parse ``"d:prob[,d:prob...]"``, e.g. ``"2:0.5,3:0.5"``."""
        probs: dict[int, float] = {}
        try:
            for part in text.split(","):
                d, p = part.split(":")
                probs[int(d)] = probs.get(int(d), 0.0) + float(Fraction(p.strip()))
        except ValueError as exc:
            raise EncodingError(f"cannot parse degree distribution {text!r}") from exc
        return cls(probs)

    def __str__(self) -> str:
        return ",".join(f"{d}:{p:.12g}" for d, p in self.items)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.items)

    @property
    def probs(self) -> dict[int, float]:
        return dict(self.items)

    @property
    def max_degree(self) -> int:
        return self.items[-1][0]

    @property
    def mean_degree(self) -> float:
        return math.fsum(d * p for d, p in self.items)

    @property
    def efficiency(self) -> float:
        return 1.0 / self.mean_degree

    def pgf(self, x: float) -> float:
        return math.fsum(p * x**d for d, p in self.items)

    def derivative(self, x: float) -> float:
        """``Lambda'(x) = sum_d d * Lambda_d * x**(d-1)``."""
        return math.fsum(d * p * x ** (d - 1) for d, p in self.items)


@dataclass(frozen=True)
class FrameCodeword:
    symbols: np.ndarray
    n_slots: int
    block_len: int
    degree: int = 0
    positions: tuple[int, ...] = ()

    @property
    def blocks(self) -> np.ndarray:
        return self.symbols.reshape(self.n_slots, self.block_len)


# ---------------------------------------------------------------- degrees

@lru_cache(maxsize=256)
def degree_thresholds(dist: IrsaDistribution, q: int) -> tuple[tuple[int, int], ...]:
    """Cumulative message thresholds ``(d, round(q * sum_{h<=d} Lambda_h))``.

    Warns when some ``q * Lambda_d`` is not an integer, reporting the largest
    deviation between the realized and the requested degree probabilities.
    """
    out = []
    acc = Fraction(0)
    for d, p in dist.items:
        acc += Fraction(p)
        out.append((d, round(q * acc)))
    out[-1] = (out[-1][0], q)
    realized = [(t - prev) / q for (_, t), prev in zip(out, [0] + [t for _, t in out[:-1]])]
    bias = max(abs(r - p) for r, (_, p) in zip(realized, dist.items))
    # float probabilities like 0.6 are never exact binary fractions
    slack = 1e-6 + q * 1e-15
    exact = all(abs(q * Fraction(p) - round(q * Fraction(p))) <= slack for _, p in dist.items)
    if not exact:
        warnings.warn(
            f"q*Lambda_d is not an integer for q={q}; realized degree probabilities "
            f"deviate from the target by up to {bias:.3g}",
            ConfigurationWarning,
            stacklevel=2,
        )
    return tuple(out)


def degree_from_message(w: int, dist: IrsaDistribution, q: int) -> int:
    """Smallest ``d`` whose cumulative threshold reaches ``w``.

    >>> degree_from_message(3, IrsaDistribution({2: 0.5, 3: 0.5}), 4)
    3
    """
    if not 1 <= w <= q:
        raise EncodingError(f"message {w} outside [1, {q}]")
    for d, t in degree_thresholds(dist, q):
        if t >= w:
            return d
    raise AssertionError("last threshold equals q")


def _degree_offset(dist: IrsaDistribution, q: int, d: int) -> int:
    prev = 0
    for dd, t in degree_thresholds(dist, q):
        if dd == d:
            return prev
        prev = t
    raise EncodingError(f"degree {d} not in distribution")


# ---------------------------------------------------------------- combinadics

def _max_index(r: int, h: int) -> int:
    """Largest ``i`` with ``C(i, h) <= r``."""
    lo = h - 1  # C(h-1, h) = 0 <= r
    step = 1
    while math.comb(lo + step, h) <= r:
        lo += step
        step *= 2
    hi = lo + step  # C(hi, h) > r
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if math.comb(mid, h) <= r:
            lo = mid
        else:
            hi = mid
    return lo


def combinadic_decompose(u: int, d: int) -> tuple[int, ...]:
    """Unique increasing ``(u_1, ..., u_d)`` with ``sum_h C(u_h, h) == u``.

    >>> combinadic_decompose(5, 2)
    (2, 3)
    """
    if u < 0 or d < 1:
        raise EncodingError(f"invalid combinadic input u={u}, d={d}")
    out = [0] * d
    r = u
    for h in range(d, 0, -1):
        i = _max_index(r, h)
        out[h - 1] = i
        r -= math.comb(i, h)
    return tuple(out)


def combinadic_rank(positions) -> int:
    """Inverse of :func:`combinadic_decompose` for an increasing tuple."""
    return sum(math.comb(c, h) for h, c in enumerate(positions, start=1))


def positions_from_message(w: int, d: int, dist: IrsaDistribution, q: int, n_slots: int) -> tuple[int, ...]:
    if d > n_slots:
        raise EncodingError(f"degree {d} exceeds the {n_slots} slots of the frame")
    v = w - _degree_offset(dist, q, d) - 1
    if v < 0:
        raise EncodingError(f"message {w} does not map to degree {d}")
    return combinadic_decompose(v % math.comb(n_slots, d), d)


def message_for_positions(dist: IrsaDistribution, q: int, n_slots: int, positions) -> int:
    """Smallest message whose replicas land on ``positions`` (for building test frames)."""
    positions = tuple(sorted(positions))
    d = len(positions)
    lo = _degree_offset(dist, q, d)
    hi = dict(degree_thresholds(dist, q))[d]
    w = lo + combinadic_rank(positions) + 1
    if w > hi:
        raise EncodingError(f"no message of degree {d} reaches slots {positions} with q={q}")
    return w


def check_frame_design(dist: IrsaDistribution, q: int, n_slots: int) -> list[str]:
    """Validate (dist, q, n_slots) and warn where slot tuples are not equiprobable."""
    if dist.max_degree > n_slots:
        raise EncodingError(f"max degree {dist.max_degree} exceeds n_slots={n_slots}")
    thresholds = degree_thresholds(dist, q)
    notes = []
    prev = 0
    for d, t in thresholds:
        count = t - prev
        prev = t
        if count == 0:
            notes.append(f"degree {d} is unreachable with q={q}")
        elif count % math.comb(n_slots, d):
            notes.append(
                f"C({n_slots},{d})={math.comb(n_slots, d)} does not divide the {count} "
                f"messages of degree {d}: slot tuples are not equiprobable"
            )
    for note in notes:
        warnings.warn(note, ConfigurationWarning, stacklevel=2)
    return notes


# ---------------------------------------------------------------- vectorised path

def degrees_and_positions(ws: np.ndarray, dist: IrsaDistribution, q: int, n_slots: int):
    """Batch version of the degree/position map.

    Returns ``(degrees, positions)`` where ``positions[k]`` is an int array of
    length ``degrees[k]``.
    """
    ws = np.asarray(ws, dtype=np.int64)
    thr = degree_thresholds(dist, q)
    degs = np.array([d for d, _ in thr], dtype=np.int64)
    cut = np.array([t for _, t in thr], dtype=np.int64)
    idx = np.searchsorted(cut, ws, side="left")
    degrees = degs[idx]
    offsets = np.concatenate([[0], cut[:-1]])[idx]
    v = ws - offsets - 1
    positions: list[np.ndarray] = [None] * len(ws)  # type: ignore[list-item]
    for d in np.unique(degrees):
        d = int(d)
        if d > n_slots:
            raise EncodingError(f"degree {d} exceeds the {n_slots} slots of the frame")
        sel = np.flatnonzero(degrees == d)
        total = math.comb(n_slots, d)
        if total > _INT64_MAX:
            for k in sel:
                positions[k] = np.array(combinadic_decompose(int(v[k]) % total, d))
            continue
        tuples = _unrank_batch(v[sel] % total, d, n_slots)
        for k, row in zip(sel, tuples):
            positions[k] = row
    return degrees, positions


def _unrank_batch(u: np.ndarray, d: int, n_slots: int) -> np.ndarray:
    out = np.empty((len(u), d), dtype=np.int64)
    r = u.copy()
    for h in range(d, 0, -1):
        table = _comb_table(n_slots, h)
        i = np.searchsorted(table, r, side="right") - 1
        out[:, h - 1] = i
        r -= table[i]
    return out


@lru_cache(maxsize=64)
def _comb_table(n: int, h: int) -> np.ndarray:
    return np.array([math.comb(i, h) for i in range(n)], dtype=np.int64)


# ---------------------------------------------------------------- frames

def encode_frame(code: BprCode, user: int, w: int, dist: IrsaDistribution, n_slots: int) -> FrameCodeword:
    """Length ``(1 + m*T) * n_slots`` binary frame of ``user`` sending ``w`` (0 = idle)."""
    block_len = 1 + code.n_rows
    q = code.messages_per_user
    if dist.max_degree > n_slots:
        raise EncodingError(f"max degree {dist.max_degree} exceeds n_slots={n_slots}")
    if not 0 <= w <= q:
        raise EncodingError(f"message {w} outside [0, {q}]")
    blocks = np.zeros((n_slots, block_len), dtype=np.int32)
    if w == 0:
        return FrameCodeword(blocks.reshape(-1), n_slots, block_len)
    d = degree_from_message(w, dist, q)
    pos = positions_from_message(w, d, dist, q, n_slots)
    blocks[list(pos), :-1] = encode_message(code, user, w)
    blocks[list(pos), -1] = 1
    return FrameCodeword(blocks.reshape(-1), n_slots, block_len, d, pos)


@dataclass(frozen=True)
class IrsaBprScheme:
    """A BPR code together with the IRSA parameters shared by encoder and decoder."""

    code: BprCode
    dist: IrsaDistribution
    n_slots: int

    def __post_init__(self):
        if self.dist.max_degree > self.n_slots:
            raise EncodingError(f"max degree {self.dist.max_degree} exceeds n_slots={self.n_slots}")

    @property
    def block_len(self) -> int:
        return 1 + self.code.n_rows

    @property
    def frame_len(self) -> int:
        return self.block_len * self.n_slots

    @property
    def q(self) -> int:
        return self.code.messages_per_user

    def replica_slots(self, w: int) -> tuple[int, ...]:
        d = degree_from_message(w, self.dist, self.q)
        return positions_from_message(w, d, self.dist, self.q, self.n_slots)

    def encode(self, user: int, w: int) -> FrameCodeword:
        return encode_frame(self.code, user, w, self.dist, self.n_slots)
