"""Iterative SIC decoding of an IRSA-BPR frame, plus its graph-level twin.

One iteration decodes every block that holds between 1 and ``T`` codewords,
then re-encodes each decoded message and subtracts the whole frame of that
user. Blocks are visited in slot order and pairs within a block are sorted by
user, so the decoded list is canonical.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .bpr import BlockObservation, DecodingError, bpr_decode
from .channel import FrameSignal, slot_occupancy
from .encoding import IrsaBprScheme

log = logging.getLogger(__name__)


@dataclass
class DecodeResult:
    messages: list[tuple[int, int]]
    flag: int  # 0 success, 1 premature stop
    iterations: int
    residual_occupancy: np.ndarray
    per_iteration: list[list[tuple[int, int]]] = field(default_factory=list)
    occupancy_history: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def success(self) -> bool:
        return self.flag == 0

    @property
    def users(self) -> list[int]:
        return [u for u, _ in self.messages]


def sic_decode(signal: FrameSignal, scheme: IrsaBprScheme, method: str = "search") -> DecodeResult:
    if signal.block_len != scheme.block_len or signal.n_slots != scheme.n_slots:
        raise DecodingError("signal shape does not match the scheme")
    T = scheme.code.T
    residual = signal.blocks.astype(np.int64)
    decoded: list[tuple[int, int]] = []
    per_iteration: list[list[tuple[int, int]]] = []
    seen: set[int] = set()
    history = [residual[:, -1].copy()]

    while True:
        occ = residual[:, -1]
        resolvable = np.flatnonzero((occ >= 1) & (occ <= T))
        if len(resolvable) == 0:
            break
        if len(per_iteration) >= scheme.n_slots:
            # every productive iteration empties a slot for good
            log.error("SIC exceeded %d iterations", scheme.n_slots)
            raise DecodingError("iteration cap reached")
        found: list[tuple[int, int]] = []
        for s in resolvable:
            obs = BlockObservation(residual[s, :-1], int(occ[s]))
            for user, w in bpr_decode(scheme.code, obs, method=method):
                if user not in seen:
                    seen.add(user)
                    found.append((user, w))
        for user, w in found:
            residual -= scheme.encode(user, w).blocks
        if residual.min() < 0:
            raise DecodingError("negative residual: signal inconsistent with the scheme")
        per_iteration.append(found)
        decoded.extend(found)
        history.append(residual[:, -1].copy())

    flag = 0 if not residual.any() else 1
    return DecodeResult(decoded, flag, len(per_iteration), residual[:, -1].copy(), per_iteration, history)


def per_user_errors(result: DecodeResult, truth: Mapping[int, int]) -> tuple[int, bool]:
    """Count contending users whose message is missing or mis-associated.

    ``truth`` maps each contending user to its (nonzero) message. The frame is
    in error when the decoded set differs from the true set in any element.
    """
    got = set(result.messages)
    errors = sum((u, w) not in got for u, w in truth.items())
    return errors, got != set(truth.items())


def clipped_count(occupancy, T: int) -> int:
    """``sum_i min(l_i, T)``: linearly independent equations offered by the slots."""
    return int(np.minimum(np.asarray(occupancy), T).sum())


def empirical_C(signal: FrameSignal, T: int) -> int:
    return clipped_count(slot_occupancy(signal), T)


@dataclass
class PeelResult:
    decoded: list[int]
    per_iteration: list[list[int]]
    flag: int
    residual_occupancy: np.ndarray


def peel(user_slots: Mapping[int, Sequence[int]], n_slots: int, T: int) -> PeelResult:
    """SIC on the user/slot bipartite graph of a T-MPR channel.

    Every slot with between 1 and ``T`` remaining users releases all of them;
    released users leave every slot they touched.
    """
    occupants: list[set[int]] = [set() for _ in range(n_slots)]
    for u, slots in user_slots.items():
        for s in slots:
            occupants[s].add(u)
    live = {s for s in range(n_slots) if occupants[s]}
    decoded: list[int] = []
    rounds: list[list[int]] = []
    while True:
        ready = sorted(s for s in live if len(occupants[s]) <= T)
        if not ready:
            break
        found: list[int] = []
        taken: set[int] = set()
        for s in ready:
            new = sorted(occupants[s] - taken)
            taken.update(new)
            found.extend(new)
        for u in found:
            for s in user_slots[u]:
                occupants[s].discard(u)
                if not occupants[s]:
                    live.discard(s)
        rounds.append(found)
        decoded.extend(found)
    occ = np.array([len(o) for o in occupants], dtype=np.int64)
    return PeelResult(decoded, rounds, 0 if not live else 1, occ)
