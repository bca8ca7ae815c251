# %% [markdown]
# # Successive interference cancellation on a small frame
#
# Eleven users, thirteen slots, T=2. Seven users contend. Slots holding one
# or two codewords are decoded, the decoded users are re-encoded and removed
# from every slot they occupy, and the process repeats.

# %%
from irsa_bpr import sic_decode, slot_occupancy
from irsa_bpr.harness import worked_example
from irsa_bpr.harness import EXAMPLE_ADJACENCY

ex = worked_example()
for user, slots in EXAMPLE_ADJACENCY.items():
    print(f"user {user:2d} -> slots {slots}, message {ex.truth[user]}")
print("occupancy:", slot_occupancy(ex.signal).tolist())

# %%
res = sic_decode(ex.signal, ex.scheme)
for i, (found, occ) in enumerate(zip(res.per_iteration, res.occupancy_history[1:]), 1):
    print(f"round {i}: users {[u for u, _ in found]}, occupancy now {occ.tolist()}")
print("flag:", res.flag, "iterations:", res.iterations)

# %% [markdown]
# The same schedule on the bare user/slot graph:

# %%
from irsa_bpr import peel

print(peel(EXAMPLE_ADJACENCY, 13, 2).per_iteration)
