# %% [markdown]
# # Finite-frame Monte Carlo
#
# Frames of 2000 slots with 2000 users, each repeating its packet three
# times. The asymptotic threshold is near 0.818; the error rate jumps across it.
# With m large the codebook is too big for tables, so the graph engine runs
# the same message-to-slot map and peeling schedule without symbol arithmetic.

# %%
from irsa_bpr import IrsaDistribution, SimConfig, run_sweep

base = SimConfig(K=2000, n_slots=2000, pi=0.5, dist=IrsaDistribution({3: 1.0}), T=1, m=60, trials=100, seed=1)
reports, csv_text = run_sweep(base, loads=[0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
print(csv_text)

# %% [markdown]
# A small symbol-level run where every codeword is really summed and decoded.

# %%
small = SimConfig(K=16, n_slots=12, pi=0.5, dist=IrsaDistribution({2: 0.6, 3: 0.4}), T=2, m=12, trials=300, seed=2)
for rep in run_sweep(small, loads=[0.3, 0.6, 0.9, 1.2])[0]:
    print(f"G={rep.config.G:.2f} puer={rep.per_user_error_rate:.4f} +- {rep.puer_ci:.4f} "
          f"E[C]/Ns={rep.mean_C_over_Ns:.3f} counting violations={rep.counting_violations}")
