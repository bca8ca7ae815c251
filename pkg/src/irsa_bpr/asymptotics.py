"""Density evolution of IRSA on the T-MPR channel and the sum-rate bounds.

``p`` is the probability that an edge of the user/slot graph still points at an
unresolved slot. One SIC round maps it to

    1 - Q(T, G * Lambda'(p)),   Q(T, x) = exp(-x) * sum_{k<T} x**k / k!

starting from ``p = 1``. The load threshold is the largest ``G`` for which the
iteration is driven to zero.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .encoding import IrsaDistribution


class ThresholdError(ArithmeticError):
    """A bisection could not be bracketed or the predicate was not monotone."""


@dataclass(frozen=True)
class DeConfig:
    dist: IrsaDistribution
    T: int
    G: float
    max_iter: int = 100_000
    tol: float = 1e-8

    def __post_init__(self):
        if self.G < 0 or self.T < 1 or not 0 < self.tol < 1:
            raise ValueError(f"invalid density-evolution config {self}")


class DeOutcome(NamedTuple):
    p: float
    converged: bool
    iterations: int


def poisson_cdf(T: int, x: float) -> float:
    """``P[Poisson(x) <= T-1]``; summed in log space for large ``x``."""
    if x <= 0.0:
        return 1.0
    if x <= 30.0:
        term, total = 1.0, 1.0
        for k in range(1, T):
            term *= x / k
            total += term
        return math.exp(-x) * total
    logx = math.log(x)
    return math.fsum(math.exp(-x + k * logx - math.lgamma(k + 1)) for k in range(T))


def de_step(p: float, cfg: DeConfig) -> float:
    x = cfg.G * cfg.dist.derivative(p)
    return min(1.0, max(0.0, 1.0 - poisson_cdf(cfg.T, x)))


def de_run(cfg: DeConfig) -> DeOutcome:
    """Iterate from ``p = 1`` until ``p < tol``, a positive fixed point, or ``max_iter``.

    A positive fixed point is declared once the relative decrease of ``p`` in
    one round drops below ``tol * 1e-3``.
    """
    p = 1.0
    for it in range(1, cfg.max_iter + 1):
        nxt = de_step(p, cfg)
        if nxt < cfg.tol:
            return DeOutcome(nxt, True, it)
        if abs(p - nxt) < cfg.tol * 1e-3 * nxt:
            return DeOutcome(nxt, False, it)
        p = nxt
    return DeOutcome(p, False, cfg.max_iter)


def load_threshold(
    dist: IrsaDistribution,
    T: int,
    tol_G: float = 1e-4,
    *,
    max_bisections: int = 60,
    tol: float = 1e-8,
    max_iter: int = 100_000,
) -> float:
    """Largest load for which density evolution converges, by bisection on ``(0, T]``."""
    if tol_G <= 0:
        raise ValueError("tol_G must be positive")

    def ok(G: float) -> bool:
        return de_run(DeConfig(dist, T, G, max_iter=max_iter, tol=tol)).converged

    lo, hi = 0.0, float(T)
    if ok(hi):
        raise ThresholdError(f"density evolution converges at G=T={T}; no bracket")
    probe = min(tol_G, 1e-3) * T
    if not ok(probe):
        raise ThresholdError(f"density evolution fails already at G={probe}")
    lo = probe
    for _ in range(max_bisections):
        if hi - lo <= tol_G:
            break
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    # a converging point above a failing one means the predicate is not monotone
    if not ok(lo) or ok(hi):
        raise ThresholdError("bracket inverted: convergence is not monotone in G")
    return 0.5 * (lo + hi)


def asymptotic_plr(dist: IrsaDistribution, T: int, G: float, **de_kwargs) -> float:
    """Asymptotic packet loss rate ``sum_d Lambda_d * p**d`` at the DE fixed point."""
    p = de_run(DeConfig(dist, T, G, **de_kwargs)).p
    return plr_from_p(dist, p)


def plr_from_p(dist: IrsaDistribution, p: float) -> float:
    return math.fsum(lam * p**d for d, lam in dist.items)


# ---------------------------------------------------------------- rates

def bpr_rate(m: int, T: int, M: int, K: int) -> float:
    """Bits per channel use of one BPR block including its count symbol."""
    return math.log2(M / K) / (1 + m * T)


def avg_sum_rate(G: float, K: float, eps: float, T: int) -> float:
    """Average sum rate with ``m = log2(K) / eps`` (``m`` not rounded)."""
    if K < 2 or not 0 < eps < 1:
        raise ValueError("need K >= 2 and 0 < eps < 1")
    lk = math.log2(K)
    # log2((K**(1/eps) - 1) / K) without forming K**(1/eps)
    info = lk / eps + math.log2(-math.expm1(-math.log(K) / eps)) - lk
    return G * info / (1 + T * lk / eps)


def rate_limit(eps: float, T: int) -> float:
    """Large-``K`` limit of ``avg_sum_rate / G``."""
    return (1 - eps) / T


def achievable_sum_rate(dist: IrsaDistribution, T: int, eps: float, **threshold_kwargs) -> float:
    return (1 - eps) / T * load_threshold(dist, T, **threshold_kwargs)


# ---------------------------------------------------------------- converse

SCHEMES = ("coordinated", "irsa", "mixed")


def converse_rhs(G, eta: float, T: int, nu: float = 0.0, gamma: float = 0.0):
    """Right-hand side of the self-consistent load inequality ``G <= rhs(G)``.

    Accepts a scalar or an array of loads. The Poisson-weighted sum is formed
    term by term in log space.
    """
    G = np.asarray(G, dtype=float)
    beta = np.minimum(nu * G / T, gamma)
    free = np.maximum(1.0 - beta, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(free > 0, G * (1 - nu) / (eta * free), 0.0)
    logx = np.log(np.maximum(x, np.finfo(float).tiny))
    tail = np.zeros_like(x)
    for t in range(T):
        tail += (T - t) * np.exp(-x + t * logx - math.lgamma(t + 1))
    rhs = T - free * tail
    return float(rhs) if rhs.ndim == 0 else rhs


def converse_G(
    scheme: str,
    T: int,
    eta: float = 0.5,
    nu: float = 0.0,
    gamma: float = 0.0,
    tol: float = 1e-12,
    scan_points: int = 10_000,
) -> float:
    """Supremum of the loads satisfying the converse inequality of ``scheme``.

    The sign of ``rhs(G) - G`` is scanned on ``scan_points`` loads in ``(0, T]``
    and the last sign change is refined by bisection.
    """
    if scheme == "coordinated":
        return float(T)
    if scheme == "irsa":
        nu, gamma = 0.0, 0.0
    elif scheme != "mixed":
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if not (0 <= nu <= 1 and 0 <= gamma <= 1 and eta > 0 and T >= 1):
        raise ValueError("invalid converse parameters")

    def slack(G: float) -> float:
        return converse_rhs(G, eta, T, nu, gamma) - G

    grid = np.linspace(T / scan_points, T, scan_points)
    ok = converse_rhs(grid, eta, T, nu, gamma) - grid >= 0
    if ok[-1]:
        return float(T)
    if not ok.any():
        raise ThresholdError(f"no load in (0, {T}] satisfies the {scheme} converse inequality")
    changes = np.flatnonzero(ok[:-1] & ~ok[1:])
    if len(changes) > 1:
        warnings.warn(
            f"{scheme} converse inequality changes sign {len(changes)} times; using the largest",
            RuntimeWarning,
            stacklevel=2,
        )
    k = changes[-1]
    lo, hi = grid[k], grid[k + 1]
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if slack(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def converse_sum_rate(G_sup: float, eps: float, T: int) -> float:
    return (1 - eps) / T * G_sup
