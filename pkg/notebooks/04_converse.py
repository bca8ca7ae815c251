# %% [markdown]
# # Converse bounds for coordinated, IRSA and mixed access
#
# Coordinated access can fill every slot to capacity, so its load bound is T.
# IRSA with efficiency eta and a mixed scheme (a fraction nu of prioritized
# users, capped at gamma of the slots) satisfy a self-consistent inequality
# solved numerically here.

# %%
from irsa_bpr import converse_G, converse_sum_rate

eps = 0.99
for eta in (1 / 2, 1 / 3):
    print(f"eta = {eta:.3f}")
    print("  T  coordinated   mixed      irsa")
    for T in (1, 2, 4, 8, 16):
        vals = [
            converse_sum_rate(converse_G("coordinated", T), eps, T),
            converse_sum_rate(converse_G("mixed", T, eta, 0.2, 0.2), eps, T),
            converse_sum_rate(converse_G("irsa", T, eta), eps, T),
        ]
        print(f"{T:3d}  " + "  ".join(f"{v:.5f}" for v in vals))
