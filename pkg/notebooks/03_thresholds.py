# %% [markdown]
# # Density evolution and load thresholds
#
# The fraction of unresolved edges evolves as p -> 1 - Q(T, G * Lambda'(p)).
# Below the threshold it is driven to zero.

# %%
from irsa_bpr import DeConfig, IrsaDistribution, de_run, load_threshold

x3 = IrsaDistribution({3: 1.0})
for G in (0.6, 0.8, 0.85, 1.0):
    out = de_run(DeConfig(x3, 1, G))
    print(f"G={G}: p={out.p:.3g} converged={out.converged} after {out.iterations} rounds")

# %%
dists = {
    "x^2": IrsaDistribution({2: 1.0}),
    "x^3": x3,
    "0.5x^2+0.28x^3+0.22x^8": IrsaDistribution({2: 0.5, 3: 0.28, 8: 0.22}),
}
for name, dist in dists.items():
    row = [load_threshold(dist, T, tol_G=1e-3) for T in (1, 2, 3, 4)]
    print(f"{name:>24}: " + "  ".join(f"{g:.3f}" for g in row))

# %% [markdown]
# Sum-rate achievability with m = log2(K)/eps bits per codeword symbol block:

# %%
from irsa_bpr import achievable_sum_rate

for eps in (0.25, 0.5, 0.75):
    print(eps, round(achievable_sum_rate(x3, 1, eps), 4))
