"""Seeded Monte Carlo simulation of IRSA-BPR frames and CSV reporting.

Two engines share the same random draws (contention and messages):

``symbol``
    encodes every frame with the real BPR code, sums the frames on the adder
    channel and runs :func:`~irsa_bpr.sic.sic_decode`. Needs ``m <= 16``.
``graph``
    keeps the exact message -> (degree, slots) map but replaces each block
    decode by the T-MPR rule (``<= T`` codewords in a slot are always
    recovered), i.e. peeling on the user/slot graph. Works for any ``m`` up
    to 62, which is what large populations need for the slot tuples to be
    spread over the frame.

Per-trial generators are ``PCG64`` seeded with ``SeedSequence([seed, trial])``,
so a trial's draws depend only on the master seed and its index.
"""
from __future__ import annotations

import io
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import repeat
from statistics import NormalDist
from typing import Iterable, Mapping, Sequence

import numpy as np

from .bpr import build_code, usable_length
from .channel import transmit
from .encoding import (
    ConfigurationWarning,
    IrsaBprScheme,
    IrsaDistribution,
    check_frame_design,
    degrees_and_positions,
    message_for_positions,
)
from .field import MAX_TABLE_DEGREE
from .sic import clipped_count, empirical_C, peel, per_user_errors, sic_decode

log = logging.getLogger(__name__)

ENGINES = ("auto", "symbol", "graph")
MAX_GRAPH_DEGREE = 62

CSV_HEADER = "G,pi,K,Ns,T,m,trials,puer,puer_ci,fer,fer_ci,mean_iters,mean_kc,mean_C_over_Ns,seed"


class ConfigError(ValueError):
    pass


def m_from_eps(K: int, eps: float) -> tuple[int, float]:
    """Smallest integer ``m >= log2(K) / eps`` and the realized ``eps = log2(K) / m``."""
    if not 0 < eps < 1 or K < 2:
        raise ConfigError("need 0 < eps < 1 and K >= 2")
    m = math.ceil(math.log2(K) / eps - 1e-12)
    return m, math.log2(K) / m


@dataclass(frozen=True)
class SimConfig:
    K: int
    n_slots: int
    pi: float
    dist: IrsaDistribution
    T: int
    m: int
    trials: int = 100
    seed: int = 0
    engine: str = "auto"

    @classmethod
    def from_load(cls, G: float, K: int, n_slots: int, **kwargs) -> "SimConfig":
        return cls(K=K, n_slots=n_slots, pi=G * n_slots / K, **kwargs)

    @property
    def G(self) -> float:
        return self.pi * self.K / self.n_slots

    @property
    def M(self) -> int:
        return usable_length(self.m, self.K)

    @property
    def q(self) -> int:
        return self.M // self.K

    @property
    def resolved_engine(self) -> str:
        if self.engine == "auto":
            return "symbol" if self.m <= MAX_TABLE_DEGREE else "graph"
        return self.engine

    def validate(self) -> list[str]:
        """Raise :class:`ConfigError` on inconsistent parameters; return design warnings."""
        if self.K < 1 or self.n_slots < 1 or self.T < 1 or self.trials < 0:
            raise ConfigError("K, n_slots and T must be positive and trials nonnegative")
        if not 0.0 <= self.pi <= 1.0:
            raise ConfigError(f"contention probability {self.pi} (G={self.G}) outside [0, 1]")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}")
        engine = self.resolved_engine
        top = MAX_TABLE_DEGREE if engine == "symbol" else MAX_GRAPH_DEGREE
        if not 2 <= self.m <= top:
            raise ConfigError(f"m={self.m} outside [2, {top}] for the {engine} engine")
        if self.K > (1 << self.m) - 1:
            raise ConfigError(f"K={self.K} exceeds 2^m - 1 = {(1 << self.m) - 1}")
        if self.dist.max_degree > self.n_slots:
            raise ConfigError(f"max degree {self.dist.max_degree} exceeds n_slots={self.n_slots}")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ConfigurationWarning)
            check_frame_design(self.dist, self.q, self.n_slots)
        notes = [str(w.message) for w in caught]
        for note in notes:
            log.warning("%s", note)
        return notes


@dataclass(frozen=True)
class TrialRecord:
    index: int
    contending: int
    decoded: int
    errors: int
    frame_error: bool
    flag: int
    iterations: int
    C: int


@dataclass(frozen=True)
class SimReport:
    config: SimConfig
    trials: int
    per_user_error_rate: float
    puer_ci: float
    frame_error_rate: float
    fer_ci: float
    mean_iterations: float
    mean_kc: float
    mean_C_over_Ns: float
    counting_violations: int
    error: str = ""

    @property
    def realized_load(self) -> float:
        return self.mean_kc / self.config.n_slots

    def csv_row(self) -> str:
        cfg = self.config
        vals = [
            _num(cfg.G), _num(cfg.pi), str(cfg.K), str(cfg.n_slots), str(cfg.T), str(cfg.m),
            str(self.trials), _num(self.per_user_error_rate), _num(self.puer_ci),
            _num(self.frame_error_rate), _num(self.fer_ci), _num(self.mean_iterations),
            _num(self.mean_kc), _num(self.mean_C_over_Ns), str(cfg.seed),
        ]
        return ",".join(vals)


def _num(x: float) -> str:
    return f"{x:.10g}"


@lru_cache(maxsize=16)
def _scheme(m: int, T: int, K: int, dist: IrsaDistribution, n_slots: int) -> IrsaBprScheme:
    return IrsaBprScheme(build_code(m, T, K), dist, n_slots)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def draw_contention(cfg: SimConfig, rng: np.random.Generator) -> dict[int, int]:
    """Active users (Bernoulli(pi) each) mapped to uniform messages in ``1..q``."""
    active = np.flatnonzero(rng.random(cfg.K) < cfg.pi)
    msgs = rng.integers(1, cfg.q, size=len(active), endpoint=True, dtype=np.int64)
    return {int(u): int(w) for u, w in zip(active, msgs)}


def run_trial(cfg: SimConfig, index: int) -> TrialRecord:
    truth = draw_contention(cfg, trial_rng(cfg.seed, index))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConfigurationWarning)
        if cfg.resolved_engine == "symbol":
            return _symbol_trial(cfg, index, truth)
        return _graph_trial(cfg, index, truth)


def _symbol_trial(cfg: SimConfig, index: int, truth: Mapping[int, int]) -> TrialRecord:
    scheme = _scheme(cfg.m, cfg.T, cfg.K, cfg.dist, cfg.n_slots)
    signal = transmit(
        (scheme.encode(u, w) for u, w in truth.items()),
        n_slots=cfg.n_slots,
        block_len=scheme.block_len,
    )
    result = sic_decode(signal, scheme)
    errors, frame_error = per_user_errors(result, truth)
    return TrialRecord(
        index, len(truth), len(result.messages), errors, frame_error,
        result.flag, result.iterations, empirical_C(signal, cfg.T),
    )


def _graph_trial(cfg: SimConfig, index: int, truth: Mapping[int, int]) -> TrialRecord:
    users = list(truth)
    ws = np.fromiter(truth.values(), dtype=np.int64, count=len(users))
    _, positions = degrees_and_positions(ws, cfg.dist, cfg.q, cfg.n_slots)
    user_slots = {u: pos.tolist() for u, pos in zip(users, positions)}
    occupancy = np.zeros(cfg.n_slots, dtype=np.int64)
    for pos in positions:
        occupancy[pos] += 1
    result = peel(user_slots, cfg.n_slots, cfg.T)
    decoded = len(result.decoded)
    errors = len(users) - decoded
    return TrialRecord(
        index, len(users), decoded, errors, errors > 0,
        result.flag, len(result.per_iteration), clipped_count(occupancy, cfg.T),
    )


def run_trials(cfg: SimConfig, workers: int = 1, indices: Iterable[int] | None = None) -> list[TrialRecord]:
    """Run trials (in a process pool when ``workers > 1``), sorted by trial index."""
    idx = list(range(cfg.trials) if indices is None else indices)
    if workers <= 1 or len(idx) < 2:
        records = [run_trial(cfg, i) for i in idx]
    else:
        chunk = max(1, len(idx) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_trial, repeat(cfg), idx, chunksize=chunk))
    return sorted(records, key=lambda r: r.index)


def aggregate(cfg: SimConfig, records: Sequence[TrialRecord], level: float = 0.95) -> SimReport:
    z = NormalDist().inv_cdf(0.5 + level / 2)
    n = len(records)
    users = sum(r.contending for r in records)
    errors = sum(r.errors for r in records)
    puer = errors / users if users else 0.0
    fer = sum(r.frame_error for r in records) / n if n else 0.0

    def half_width(p: float, count: int) -> float:
        return z * math.sqrt(p * (1 - p) / count) if count else 0.0

    def mean(xs) -> float:
        xs = list(xs)
        return math.fsum(xs) / len(xs) if xs else 0.0

    return SimReport(
        config=cfg,
        trials=n,
        per_user_error_rate=puer,
        puer_ci=half_width(puer, users),
        frame_error_rate=fer,
        fer_ci=half_width(fer, n),
        mean_iterations=mean(r.iterations for r in records),
        mean_kc=mean(r.contending for r in records),
        mean_C_over_Ns=mean(r.C for r in records) / cfg.n_slots,
        counting_violations=sum(r.flag == 0 and r.contending > r.C for r in records),
    )


def simulate(cfg: SimConfig, workers: int = 1) -> SimReport:
    cfg.validate()
    return aggregate(cfg, run_trials(cfg, workers))


def run_sweep(
    base: SimConfig,
    loads: Sequence[float] = (),
    pis: Sequence[float] = (),
    workers: int = 1,
) -> tuple[list[SimReport], str]:
    """Simulate ``base`` at every load ``G`` (or contention probability) and build the CSV.

    A point whose configuration or simulation fails yields a ``nan`` row and
    the sweep carries on.
    """
    points = [replace(base, pi=G * base.n_slots / base.K) for G in loads]
    points += [replace(base, pi=p) for p in pis]
    reports = []
    for cfg in points:
        try:
            reports.append(simulate(cfg, workers))
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            log.error("sweep point G=%s failed: %s", cfg.G, exc)
            nan = float("nan")
            reports.append(SimReport(cfg, 0, nan, nan, nan, nan, nan, nan, nan, 0, error=str(exc)))
    return reports, sweep_csv(reports)


def sweep_csv(reports: Iterable[SimReport]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for rep in reports:
        buf.write(rep.csv_row() + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------- config files

def read_config(text: str) -> dict[str, str]:
    """Parse flat ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


# ---------------------------------------------------------------- worked example

#: A user/slot graph with 11 users and 13 slots, 7 of them contending, in which
#: slots 0, 2, 5, 7 are resolvable at T=2, the first SIC round releases users
#: 1, 5, 6, 10 and the second, through slots 4 and 12, users 0, 3, 8.
EXAMPLE_ADJACENCY = {
    0: (1, 4),
    1: (0, 7, 12),
    3: (1, 4),
    5: (0, 4),
    6: (2, 5),
    8: (1, 12),
    10: (5, 12),
}
EXAMPLE_ROUNDS = ([1, 5, 6, 10], [0, 3, 8])


@dataclass
class WorkedExample:
    scheme: IrsaBprScheme
    truth: dict[int, int]
    signal: object = field(repr=False)


def worked_example() -> WorkedExample:
    """Encode :data:`EXAMPLE_ADJACENCY` with a real ``(m=12, T=2, K=11)`` BPR code.

    With ``q = 372`` messages per user, 86 of degree 2 and 286 of degree 3,
    every slot pair and triple of a 13-slot frame is reachable, so each user's
    message is chosen to land on its prescribed slots.
    """
    K, n_slots, T, m = 11, 13, 2, 12
    q = usable_length(m, K) // K
    dist = IrsaDistribution({2: 86 / q, 3: 286 / q})
    scheme = _scheme(m, T, K, dist, n_slots)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConfigurationWarning)
        truth = {u: message_for_positions(dist, q, n_slots, pos) for u, pos in EXAMPLE_ADJACENCY.items()}
        signal = transmit(scheme.encode(u, w) for u, w in truth.items())
    return WorkedExample(scheme, truth, signal)

