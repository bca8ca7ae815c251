import itertools

import numpy as np
import pytest

from irsa_bpr.bpr import (
    BlockObservation,
    CodeError,
    DecodingError,
    bpr_decode,
    build_code,
    dump_matrix,
    encode_message,
    parse_matrix,
    usable_length,
)
from irsa_bpr.field import make_field
from oracles import clmul_mod, gf2_rank


def alpha_power_by_multiplication(e, m, poly):
    x = 1
    for _ in range(e):
        x = clmul_mod(x, 0b10, poly, m)
    return x


def brute_decode(code, s, l):
    """All l-subsets of columns whose integer sum is s."""
    return [
        sub for sub in itertools.combinations(range(code.M), l)
        if np.array_equal(code.columns[list(sub)].sum(axis=0, dtype=np.int64), s)
    ]


def test_build_code_m4_t2_k5():
    code = build_code(4, 2, 5)
    assert (code.M, code.n_rows, code.messages_per_user) == (15, 8, 3)
    assert code.columns.shape == (15, 8)
    assert code.columns[0].tolist() == [1, 0, 0, 0] * 2


def test_columns_match_independent_powers():
    m, T = 5, 3
    code = build_code(m, T, 1)
    poly = make_field(m).primitive_poly
    for j in range(code.M):
        expect = []
        for i in range(1, T + 1):
            x = alpha_power_by_multiplication(j * (2 * i - 1) % (2**m - 1), m, poly)
            expect += [(x >> k) & 1 for k in range(m)]
        assert code.columns[j].tolist() == expect


def test_footnote_length_rule():
    code = build_code(4, 2, 7)
    assert code.M == 14 and code.messages_per_user == 2
    alpha14 = make_field(4).alpha_pow(14)
    image = [(alpha14 >> k) & 1 for k in range(4)]
    assert all(code.columns[j, :4].tolist() != image for j in range(code.M))
    assert usable_length(8, 51) == 255
    assert usable_length(12, 11) == 4092


def test_build_code_errors():
    with pytest.raises(CodeError):
        build_code(4, 2, 16)
    with pytest.raises(CodeError):
        build_code(4, 0, 5)


def test_codebook_invariants():
    for m, T, K in [(4, 2, 5), (6, 3, 9), (8, 2, 51)]:
        code = build_code(m, T, K)
        assert code.M % K == 0 and code.M > (2**m - 1) - K
        assert code.columns.any(axis=1).all()
        assert len({c.tobytes() for c in code.columns}) == code.M


def test_any_2t_columns_independent_exhaustive():
    code = build_code(4, 2, 5)
    for sub in itertools.combinations(range(code.M), 4):
        assert gf2_rank(code.columns[list(sub)]) == 4


def test_any_2t_columns_independent_sampled():
    rng = np.random.default_rng(7)
    code = build_code(10, 3, 1)
    for _ in range(2000):
        sub = rng.choice(code.M, size=6, replace=False)
        assert gf2_rank(code.columns[sub]) == 6


def test_encode_message_indexing():
    code = build_code(4, 2, 5)
    assert np.array_equal(encode_message(code, 0, 1), code.columns[0])
    assert code.column_index(1, 1) == 3
    assert code.column_index(4, 3) == 14
    with pytest.raises(CodeError):
        encode_message(code, 0, 0)
    with pytest.raises(CodeError):
        encode_message(code, 0, 4)
    with pytest.raises(CodeError):
        encode_message(code, 5, 1)


def test_decode_examples():
    code = build_code(4, 2, 5)
    assert bpr_decode(code, BlockObservation(np.zeros(8), 0)) == []
    for j in range(code.M):
        assert bpr_decode(code, BlockObservation(code.columns[j], 1)) == [(j // 3, j % 3 + 1)]
    s = code.columns[2].astype(int) + code.columns[9]
    assert brute_decode(code, s, 2) == [(2, 9)]
    assert bpr_decode(code, BlockObservation(s, 2)) == [(0, 3), (3, 1)]


@pytest.mark.parametrize("method", ["search", "algebraic"])
def test_zero_error_exhaustive(method):
    code = build_code(4, 2, 5)
    sums = set()
    cases = 0
    for size in range(code.T + 1):
        for sub in itertools.combinations(range(code.M), size):
            s = code.columns[list(sub)].sum(axis=0, dtype=np.int64)
            sums.add(s.tobytes())
            got = bpr_decode(code, BlockObservation(s, size), method=method)
            assert got == sorted((j // 3, j % 3 + 1) for j in sub)
            # the sum reduced mod 2 is the GF(2) sum of the columns
            xor = np.bitwise_xor.reduce(code.columns[list(sub)], axis=0) if sub else np.zeros(8)
            assert np.array_equal(s % 2, xor)
            cases += 1
    assert cases == 121 and len(sums) == 121


def test_distinct_sums_across_sizes_exhaustive():
    code = build_code(5, 2, 1)
    seen = {}
    for size in range(3):
        for sub in itertools.combinations(range(code.M), size):
            key = code.columns[list(sub)].sum(axis=0, dtype=np.int64).tobytes()
            assert key not in seen, (sub, seen.get(key))
            seen[key] = sub


@pytest.mark.parametrize("m,T,K,n", [(8, 2, 51, 10_000), (10, 3, 31, 1_500)])
def test_zero_error_randomized(m, T, K, n):
    code = build_code(m, T, K)
    rng = np.random.default_rng(m * 100 + T)
    q = code.messages_per_user
    for _ in range(n):
        size = int(rng.integers(0, T + 1))
        sub = sorted(rng.choice(code.M, size=size, replace=False).tolist())
        s = code.columns[sub].sum(axis=0, dtype=np.int64)
        want = sorted((j // q, j % q + 1) for j in sub)
        obs = BlockObservation(s, size)
        assert bpr_decode(code, obs) == want
        assert bpr_decode(code, obs, method="algebraic") == want


def test_decode_refuses_more_than_t():
    code = build_code(4, 2, 5)
    s = code.columns[:3].sum(axis=0)
    with pytest.raises(CodeError):
        bpr_decode(code, BlockObservation(s, 3))


@pytest.mark.parametrize("method", ["search", "algebraic"])
def test_decode_rejects_inconsistent_observation(method):
    code = build_code(4, 2, 5)
    s = code.columns[0].astype(int) + code.columns[1]
    with pytest.raises(DecodingError):
        bpr_decode(code, BlockObservation(s, 1), method=method)
    bad = s.copy()
    bad[0] += 1
    with pytest.raises(DecodingError):
        bpr_decode(code, BlockObservation(bad, 2), method=method)
    with pytest.raises(DecodingError):
        bpr_decode(code, BlockObservation(np.ones(8), 0), method=method)


def test_matrix_dump_round_trip():
    code = build_code(4, 2, 5)
    text = dump_matrix(code)
    lines = text.splitlines()
    assert len(lines) == 8 and all(len(ln) == 15 and set(ln) <= {"0", "1"} for ln in lines)
    assert lines[0] == "".join(str(b) for b in code.columns[:, 0])
    assert np.array_equal(parse_matrix(text), code.parity_check_matrix())
