"""Noiseless binary adder channel: the output is the integer sum of the inputs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .encoding import FrameCodeword


@dataclass(frozen=True)
class FrameSignal:
    symbols: np.ndarray  # int32, length n_slots * block_len
    n_slots: int
    block_len: int

    @property
    def blocks(self) -> np.ndarray:
        return self.symbols.reshape(self.n_slots, self.block_len)

    def __add__(self, other: "FrameSignal") -> "FrameSignal":
        _check_shape(self, other)
        return FrameSignal(self.symbols + other.symbols, self.n_slots, self.block_len)

    def __sub__(self, other) -> "FrameSignal":
        _check_shape(self, other)
        return FrameSignal(self.symbols - other.symbols, self.n_slots, self.block_len)


def _check_shape(a, b) -> None:
    if (a.n_slots, a.block_len) != (b.n_slots, b.block_len):
        raise ValueError("frames have different shapes")


def transmit(codewords: Iterable[FrameCodeword], n_slots: int | None = None, block_len: int | None = None) -> FrameSignal:
    """Elementwise integer sum of the users' frames.

    ``n_slots``/``block_len`` are only needed when ``codewords`` is empty.
    """
    codewords = list(codewords)
    if not codewords:
        if n_slots is None or block_len is None:
            raise ValueError("frame shape required when no codeword is given")
        return FrameSignal(np.zeros(n_slots * block_len, dtype=np.int32), n_slots, block_len)
    first = codewords[0]
    n_slots, block_len = first.n_slots, first.block_len
    total = np.zeros(n_slots * block_len, dtype=np.int32)
    for cw in codewords:
        if (cw.n_slots, cw.block_len) != (n_slots, block_len) or cw.symbols.shape != total.shape:
            raise ValueError("codewords have different lengths")
        total += cw.symbols
    return FrameSignal(total, n_slots, block_len)


def slot_occupancy(signal: FrameSignal) -> np.ndarray:
    """Number of codewords per slot, read from each block's trailing count symbol."""
    return signal.blocks[:, -1].copy()
