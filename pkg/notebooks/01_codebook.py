# %% [markdown]
# # BPR codebooks over the binary adder channel
#
# Each user owns a block of columns of a BCH-style parity-check matrix.
# Any T or fewer columns add up (over the integers) to a distinct vector,
# so a receiver that sees the sum and the number of active users can tell
# exactly who sent what.

# %%
import itertools

import numpy as np

from irsa_bpr import BlockObservation, bpr_decode, build_code, encode_message

code = build_code(m=4, T=2, K=5)
print(f"M={code.M} columns, {code.n_rows} rows, {code.messages_per_user} messages per user")
print(code.parity_check_matrix())

# %% [markdown]
# Two users transmit at once. The channel output is the integer sum of
# their codewords; the decoder returns (user, message) pairs.

# %%
s = encode_message(code, 0, 3).astype(int) + encode_message(code, 3, 1)
print("sum:", s)
print("decoded:", bpr_decode(code, BlockObservation(s, 2)))

# %% [markdown]
# Every subset of at most two columns has its own sum.

# %%
sums = {
    code.columns[list(sub)].sum(axis=0, dtype=np.int64).tobytes()
    for size in range(3)
    for sub in itertools.combinations(range(code.M), size)
}
print(len(sums), "distinct sums for", 1 + 15 + 105, "subsets")

# %% [markdown]
# The algebraic back-end (syndromes, Berlekamp-Massey, Chien search) gives
# the same answer without enumerating subsets, which matters for larger m.

# %%
big = build_code(m=12, T=3, K=11)
rng = np.random.default_rng(0)
cols = sorted(rng.choice(big.M, size=3, replace=False).tolist())
obs = BlockObservation(big.columns[cols].sum(axis=0, dtype=np.int64), 3)
print(bpr_decode(big, obs, method="algebraic"))
print([(j // big.messages_per_user, j % big.messages_per_user + 1) for j in cols])
