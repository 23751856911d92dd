# %% [markdown]
# # Projections and prox maps
# Every solver step ends in a projection (or a prox map for the nonsmooth
# variant). This script walks through the four set types and the three prox terms.

# %%
import numpy as np

from formda.geometry import L1, Ball, Box, IndicatorOf, Simplex, Unbounded, Zero, max_norm, project, prox

# %%
box = Box([0.0, 0.0], [1.0, 1.0])
print("box   ", project(box, [1.7, -0.2]))
print("ball  ", project(Ball(np.zeros(2), 1.0), [3.0, 4.0]))
print("simplex", project(Simplex(3), [0.5, 0.5, 1.0]))
print("free  ", project(Unbounded(2), [1e6, -1e6]))

# %% [markdown]
# `prox(term, set, t, p)` minimizes `h(z) + (t/2)||z - p||^2` over the set, so the
# solver passes `t = 1/alpha` and an L1 weight `w` shrinks by `w * alpha`.

# %%
print(prox(Zero(), Box([-1], [1]), 1.0, [2.0]))
print(prox(L1(1.0), Unbounded(1), 1.0, [2.5]))
print(prox(L1(1.0), Box([0], [1]), 2.0, [0.9]))
print(prox(IndicatorOf(Box([0, -1], [1, 1])), Box.cube(2, 2.0), 3.0, [5.0, -5.0]))

# %% [markdown]
# Nonexpansiveness on random pairs, and the dual-norm bound used by the complexity target.

# %%
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(1000):
    a, b = rng.normal(scale=3, size=(2, 3))
    worst = max(worst, np.linalg.norm(project(Simplex(3), a) - project(Simplex(3), b)) - np.linalg.norm(a - b))
print("max ||Pa - Pb|| - ||a - b|| =", worst)
print("sigma_y for the WGAN critic box:", max_norm(Box.cube(2, 2.0)))
