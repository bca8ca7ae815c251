import numpy as np
import pytest

from irsa_bpr.bpr import DecodingError, build_code
from irsa_bpr.channel import FrameSignal, slot_occupancy, transmit
from irsa_bpr.encoding import IrsaBprScheme, IrsaDistribution
from irsa_bpr.harness import EXAMPLE_ADJACENCY, EXAMPLE_ROUNDS, worked_example
from irsa_bpr.sic import clipped_count, empirical_C, peel, per_user_errors, sic_decode
from oracles import peel_oracle


@pytest.fixture(scope="module")
def small():
    # q = 21 messages per user, 6 slots
    return IrsaBprScheme(build_code(6, 2, 3), IrsaDistribution({2: 9 / 21, 3: 12 / 21}), 6)


def test_all_idle(small):
    sig = transmit([], n_slots=6, block_len=small.block_len)
    res = sic_decode(sig, small)
    assert (res.flag, res.messages, res.iterations) == (0, [], 0)


def test_single_user(small):
    sig = transmit([small.encode(1, 17)])
    res = sic_decode(sig, small)
    assert (res.flag, res.messages, res.iterations) == (0, [(1, 17)], 1)


@pytest.mark.parametrize("method", ["search", "algebraic"])
def test_worked_example_trace(method):
    ex = worked_example()
    res = sic_decode(ex.signal, ex.scheme, method=method)
    assert res.flag == 0 and res.iterations == 2
    assert [[u for u, _ in r] for r in res.per_iteration] == [list(r) for r in EXAMPLE_ROUNDS]
    assert sorted(res.messages) == sorted(ex.truth.items())
    assert per_user_errors(res, ex.truth) == (0, False)
    assert [set(r) for r in peel_oracle(EXAMPLE_ADJACENCY, 2)[0]] == [set(r) for r in EXAMPLE_ROUNDS]


def test_identical_slot_pairs_stop():
    scheme = IrsaBprScheme(build_code(5, 1, 3), IrsaDistribution({2: 1.0}), 4)
    sig = transmit([scheme.encode(0, 4), scheme.encode(2, 4)])
    res = sic_decode(sig, scheme)
    assert res.flag == 1 and res.messages == [] and res.iterations == 0
    assert sorted(res.residual_occupancy.tolist()) == [0, 0, 2, 2]
    truth = {0: 4, 2: 4}
    assert per_user_errors(res, truth) == (2, True)


def test_premature_stop_counts(small):
    # users 0 and 1 share both replicas; user 2 is alone
    w_pair = 1
    w_alone = next(w for w in range(1, 22)
                   if not set(small.replica_slots(w)) & set(small.replica_slots(w_pair)))
    truth = {0: w_pair, 1: w_pair, 2: w_alone}
    sig = transmit(small.encode(u, w) for u, w in truth.items())
    code1 = IrsaBprScheme(build_code(6, 1, 3), small.dist, 6)
    sig1 = transmit(code1.encode(u, w) for u, w in truth.items())
    res = sic_decode(sig1, code1)
    assert res.flag == 1 and res.messages == [(2, w_alone)]
    assert per_user_errors(res, truth) == (2, True)
    # with T=2 the shared pair is resolvable
    assert sic_decode(sig, small).flag == 0


def test_empirical_c_examples():
    assert clipped_count([0, 1, 3, 2], 2) == 5
    blocks = np.zeros((4, 3), dtype=np.int32)
    blocks[:, -1] = [0, 1, 3, 2]
    sig = FrameSignal(blocks.reshape(-1), 4, 3)
    assert empirical_C(sig, 2) == 5
    assert empirical_C(FrameSignal(np.zeros(12, dtype=np.int32), 4, 3), 2) == 0
    assert clipped_count([1, 2, 1], 2) == 4


def test_random_frames_properties(small):
    """Subset, counting bound, monotone residual and per-round agreement with peeling."""
    rng = np.random.default_rng(2024)
    oracle_rng = np.random.default_rng(7)
    for _ in range(10_000):
        users = np.flatnonzero(rng.random(3) < rng.uniform(0.2, 1.0))
        truth = {int(u): int(rng.integers(1, small.q + 1)) for u in users}
        cws = {u: small.encode(u, w) for u, w in truth.items()}
        sig = transmit(cws.values(), n_slots=6, block_len=small.block_len)
        res = sic_decode(sig, small)
        assert set(res.messages) <= set(truth.items())
        errors, frame_err = per_user_errors(res, truth)
        assert errors == len(truth) - len(res.messages)
        assert frame_err == (res.flag == 1)
        if res.flag == 0:
            assert len(truth) <= empirical_C(sig, 2)
        hist = np.array(res.occupancy_history)
        assert np.all(np.diff(hist, axis=0) <= 0)
        assert res.iterations <= max(len(truth), 0)
        rounds, left = peel_oracle({u: cw.positions for u, cw in cws.items()}, 2, oracle_rng)
        assert [set(u for u, _ in r) for r in res.per_iteration] == rounds
        assert left == set(truth) - set(res.users)


def test_peel_matches_oracle_random_graphs():
    rng = np.random.default_rng(3)
    for _ in range(2000):
        n_slots, T = int(rng.integers(2, 12)), int(rng.integers(1, 4))
        graph = {
            u: sorted(rng.choice(n_slots, size=int(rng.integers(1, min(4, n_slots) + 1)), replace=False).tolist())
            for u in range(int(rng.integers(0, 15)))
        }
        got = peel(graph, n_slots, T)
        rounds, left = peel_oracle(graph, T)
        assert [set(r) for r in got.per_iteration] == rounds
        assert set(graph) - set(got.decoded) == left
        assert got.flag == (1 if left else 0)


def test_inconsistent_signal_raises(small):
    sig = transmit([small.encode(0, 3)])
    bad = sig.blocks.copy()
    s = small.replica_slots(3)[0]
    bad[s, 0] = 1 - bad[s, 0]
    with pytest.raises(DecodingError):
        sic_decode(FrameSignal(bad.reshape(-1), 6, small.block_len), small)
    # a codeword present in one replica slot only cannot be subtracted
    lone = sig.blocks.copy()
    lone[small.replica_slots(3)[1]] = 0
    with pytest.raises(DecodingError):
        sic_decode(FrameSignal(lone.reshape(-1), 6, small.block_len), small)
    with pytest.raises(DecodingError):
        sic_decode(FrameSignal(np.zeros(10, dtype=np.int32), 2, 5), small)


def test_occupancy_matches_signal(small):
    sig = transmit([small.encode(0, 1), small.encode(1, 1), small.encode(2, 20)])
    res = sic_decode(sig, small)
    assert np.array_equal(res.occupancy_history[0], slot_occupancy(sig))
