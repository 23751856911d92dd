# %% [markdown]
# # Worst-case logistic regression over three domains
# FORMDA on the simplex-weighted objective, checked against direct subgradient
# minimization of max_m f_m(x). Takes about half a minute.

# %%
import os
import tempfile

import numpy as np

from formda.harness import load_config, read_run_csv, run_experiment
from formda.metrics import direct_worst_case

here = os.path.dirname(os.path.abspath(__file__))
cfg = load_config(os.path.join(here, "configs", "robust.toml"))
summary = run_experiment(cfg, output_dir=tempfile.mkdtemp(prefix="robust-"))
oracle = cfg.problem.build()

# %%
for run in summary.runs:
    rows = read_run_csv(os.path.join(summary.output_dir, run["csv"]))
    first = next((r["iter"] for r in rows if r["gap_surrogate"] <= 1e-2), None)
    losses = oracle.domain_losses(np.asarray(run["final_x"]))
    print(f"seed {run['seed']}: surrogate <= 1e-2 first at {first}, domain losses {np.round(losses, 4)}, "
          f"weights {np.round(run['final_y'], 3)}")

# %%
best, x_direct = direct_worst_case(oracle, iters=100_000)
print("direct worst-domain loss", best, oracle.domain_losses(x_direct))
