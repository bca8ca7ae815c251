import math

import numpy as np
import pytest
from scipy import optimize, stats

from irsa_bpr.asymptotics import (
    DeConfig,
    ThresholdError,
    achievable_sum_rate,
    asymptotic_plr,
    avg_sum_rate,
    bpr_rate,
    converse_G,
    converse_rhs,
    converse_sum_rate,
    de_run,
    de_step,
    load_threshold,
    plr_from_p,
    poisson_cdf,
    rate_limit,
)
from irsa_bpr.encoding import IrsaDistribution
from oracles import de_grid_scan

X2 = IrsaDistribution({2: 1.0})
X3 = IrsaDistribution({3: 1.0})
MIX = IrsaDistribution({2: 0.5, 3: 0.5})


@pytest.fixture(scope="module")
def x3_threshold():
    return load_threshold(X3, 1)


def test_poisson_cdf_against_scipy():
    for T in (1, 2, 5, 16, 40):
        for x in (0.0, 0.3, 2.0, 29.9, 30.1, 75.0, 400.0):
            assert poisson_cdf(T, x) == pytest.approx(stats.poisson.cdf(T - 1, x), rel=1e-9, abs=1e-300)


def test_de_step_examples():
    for T in (1, 3):
        assert de_step(0.0, DeConfig(MIX, T, 0.9)) == 0.0
    G = 0.7
    p1 = 1 - stats.poisson.cdf(1, G / MIX.efficiency)
    assert de_step(1.0, DeConfig(MIX, 2, G)) == pytest.approx(p1, rel=1e-12)
    assert de_step(0.5, DeConfig(X2, 1, 0.4)) == pytest.approx(1 - math.exp(-0.4), rel=1e-12)
    assert de_step(0.5, DeConfig(X2, 1, 0.4)) == pytest.approx(0.3297, abs=1e-4)


def test_de_step_monotone_grid():
    ps = np.linspace(0, 1, 41)
    Gs = np.linspace(0.05, 3, 30)
    for dist, T in [(X2, 1), (X3, 2), (MIX, 4)]:
        table = np.array([[de_step(p, DeConfig(dist, T, G)) for p in ps] for G in Gs])
        assert np.all(np.diff(table, axis=1) >= -1e-15)
        assert np.all(np.diff(table, axis=0) >= -1e-15)


def test_de_run_examples():
    low = de_run(DeConfig(X2, 1, 0.4))
    assert low.converged and low.p < 1e-8
    high = de_run(DeConfig(X2, 1, 0.6))
    assert not high.converged and high.p > 0.1
    # the stalled value is a fixed point of the recursion
    assert de_step(high.p, DeConfig(X2, 1, 0.6)) == pytest.approx(high.p, rel=1e-6)
    tiny = de_run(DeConfig(X3, 1, 1e-6))
    assert tiny.converged and tiny.iterations <= 2
    with pytest.raises(ValueError):
        DeConfig(X2, 0, 0.5)


def test_threshold_x2():
    assert load_threshold(X2, 1) == pytest.approx(0.5, abs=1e-3)


def test_threshold_x3_against_grid_scan(x3_threshold):
    grid = np.arange(0.70, 0.90, 1e-3)
    ok = de_grid_scan(grid, lambda p: 3 * p**2, 1)
    scan = grid[ok].max()
    assert x3_threshold == pytest.approx(scan, abs=2e-3)
    assert x3_threshold == pytest.approx(0.818, abs=5e-3)


@pytest.mark.parametrize("dist,T", [(X2, 2), (X3, 3), (MIX, 1), (IrsaDistribution({2: 0.5, 4: 0.3, 8: 0.2}), 2)])
def test_threshold_below_T(dist, T):
    g = load_threshold(dist, T, tol_G=1e-3)
    assert 0 < g <= T
    assert de_run(DeConfig(dist, T, g - 2e-3)).converged
    assert not de_run(DeConfig(dist, T, g + 2e-3)).converged


def test_threshold_errors():
    with pytest.raises(ValueError):
        load_threshold(X2, 1, tol_G=0)
    # with a tolerance this loose nothing converges, so there is no bracket
    with pytest.raises(ThresholdError):
        load_threshold(X2, 1, tol=1e-300, max_iter=3)


def test_plr_examples():
    assert asymptotic_plr(X2, 1, 0.3) < 1e-15
    assert plr_from_p(X2, 0.5) == 0.25
    assert plr_from_p(MIX, 0.1) == pytest.approx(0.0055, rel=1e-12)
    assert asymptotic_plr(X2, 1, 0.8) > 0.1


def test_bpr_rate_examples():
    assert bpr_rate(4, 2, 15, 5) == pytest.approx(math.log2(3) / 9)
    assert bpr_rate(4, 2, 15, 5) == pytest.approx(0.1761, abs=1e-4)
    assert bpr_rate(1, 1, 2, 1) == 0.5
    assert bpr_rate(8, 2, 51, 51) == 0.0


def test_avg_sum_rate_examples():
    direct = math.log2((2**20 - 1) / 2**10) / 21
    assert avg_sum_rate(1.0, 2**10, 0.5, 1) == pytest.approx(direct, rel=1e-12)
    assert avg_sum_rate(1.0, 2**10, 0.5, 1) == pytest.approx(0.4762, abs=1e-4)
    assert avg_sum_rate(0.0, 2**10, 0.5, 1) == 0.0
    # large K: no overflow and close to the limit
    assert avg_sum_rate(1.0, 2.0**200, 0.5, 2) == pytest.approx(rate_limit(0.5, 2), rel=0.01)
    with pytest.raises(ValueError):
        avg_sum_rate(1.0, 1, 0.5, 1)


def test_achievable_sum_rate(x3_threshold):
    assert achievable_sum_rate(X3, 1, 0.5) == pytest.approx(0.409, abs=3e-3)
    assert achievable_sum_rate(X3, 1, 0.5) == pytest.approx(0.5 * x3_threshold, rel=1e-9)
    assert achievable_sum_rate(X3, 1, 0.75) == pytest.approx(0.5 * achievable_sum_rate(X3, 1, 0.5), rel=1e-9)
    assert achievable_sum_rate(X3, 1, 1 - 1e-12) < 1e-11


def test_converse_coordinated():
    for T in (1, 4, 16):
        assert converse_G("coordinated", T) == T
        assert converse_sum_rate(T, 0.3, T) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        converse_G("aloha", 1)


def test_converse_irsa_against_root_finder():
    want = optimize.brentq(lambda G: 1 - math.exp(-2 * G) - G, 0.1, 1.0, xtol=1e-14)
    got = converse_G("irsa", 1, eta=0.5)
    assert got == pytest.approx(want, abs=1e-9)
    assert got == pytest.approx(0.797, abs=1e-3)
    assert converse_sum_rate(got, 0.99, 1) == pytest.approx(0.00797, abs=1e-5)


def test_converse_rhs_against_direct_sum():
    for G, eta, T, nu, gamma in [(0.5, 0.5, 1, 0, 0), (2.3, 1 / 3, 4, 0.2, 0.2), (11.0, 0.5, 12, 0.6, 0.1)]:
        beta = min(nu * G / T, gamma)
        x = G * (1 - nu) / (eta * (1 - beta))
        direct = T - (1 - beta) * math.exp(-x) * sum((T - t) / math.factorial(t) * x**t for t in range(T))
        assert converse_rhs(G, eta, T, nu, gamma) == pytest.approx(direct, rel=1e-12)


def test_converse_mixed_reduces_to_irsa():
    for T in (1, 3, 7):
        assert converse_G("mixed", T, 0.5, 0, 0) == converse_G("irsa", T, 0.5)


@pytest.mark.parametrize("eta", [1 / 2, 1 / 3])
def test_converse_ordering_and_growth(eta):
    irsa = [converse_G("irsa", T, eta) for T in range(1, 17)]
    mixed = [converse_G("mixed", T, eta, 0.2, 0.2) for T in range(1, 17)]
    for T, (a, b) in enumerate(zip(irsa, mixed), 1):
        assert T >= b >= a > 0
    assert all(np.diff(irsa) > 0) and all(np.diff(mixed) > 0)


def test_threshold_never_exceeds_converse():
    for dist in (X2, X3, MIX, IrsaDistribution({2: 0.5, 4: 0.3, 8: 0.2})):
        for T in (1, 2, 3):
            assert load_threshold(dist, T, tol_G=1e-3) <= converse_G("irsa", T, dist.efficiency)


def test_converse_sum_rate_monotone_in_eps():
    rates = [converse_sum_rate(0.797, e, 1) for e in np.linspace(0.01, 0.99, 20)]
    assert all(np.diff(rates) < 0)
