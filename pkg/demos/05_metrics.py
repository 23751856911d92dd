# %% [markdown]
# # Stationarity gaps, envelopes and the maximizer drift bound

# %%
import numpy as np

from formda.metrics import brute_force_phi, gap_decomposition_check, lemma_ystar_drift_check, stationarity_gap
from formda.oracle import make_quadratic_saddle

o = make_quadratic_saddle(2, 2, seed=4, y_radius=5.0)
x, y = np.array([0.3, -0.6]), np.array([0.5, 1.0])

# %%
for variant, kw in (("true", {}), ("regularized", {"rho": 0.5})):
    g = stationarity_gap(o, x, y, 0.1, 0.1, variant, **kw)
    print(variant, g.norm)
print("decomposition (lhs, rhs, holds):", gap_decomposition_check(o, x, y, 0.1, 0.1, 0.5))

# %% [markdown]
# Grid search for the regularized maximizer against the closed form.

# %%
for rho in (0.1, 1.0, 10.0):
    env = brute_force_phi(o, x, rho)
    print(f"rho={rho:5}: grid {env.y_star}, closed form {o.ystar_unconstrained(x, rho)}, bound {env.argmax_bound:.2e}")

# %% [markdown]
# Drift of the maximizer as both x and rho move.

# %%
chk = lemma_ystar_drift_check(o, x, x + 0.05, 0.8, 0.75)
print(chk)
