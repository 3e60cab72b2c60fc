"""How much can a membership-inference attacker learn from an eps-DP model?"""
# %%
import numpy as np

from mibound import (
    advantage_maximizing_prior,
    attack_accuracy_bound,
    baseline_erlingsson,
    baseline_sablayrolles,
    baseline_yeom,
    mi_advantage_upper,
    positive_accuracy_bounds,
)

# %% [markdown]
# With a coin-flip prior the attacker's best accuracy is capped by expit(eps).
# The older bounds are looser everywhere on the grid.

# %%
print(f"{'eps':>4} {'ours':>7} {'erl.':>7} {'sabl.':>7} {'yeom':>7}")
for eps in (0.5, 1, 2, 4):
    print(f"{eps:>4} {attack_accuracy_bound(eps).upper:7.4f} {baseline_erlingsson(eps):7.4f} "
          f"{baseline_sablayrolles(eps, 0.5):7.4f} {baseline_yeom(eps):7.4f}")

# %% [markdown]
# The prior matters a lot. A point that is rarely sampled stays well hidden
# even at eps = 2.

# %%
for p in (0.5, 0.1, 0.01, 0.001):
    iv = positive_accuracy_bounds(2.0, p)
    print(f"p={p:<6} bound interval [{iv.lower:.5f}, {iv.upper:.5f}]")

# %% [markdown]
# Advantage 2(UB - p) peaks at a prior below one half.

# %%
for eps in (0.5, 1, 2, 4):
    p_star = advantage_maximizing_prior(eps)
    print(f"eps={eps}: argmax p={p_star:.4f} (closed form {1 / (1 + np.exp(eps / 2)):.4f}), "
          f"advantage={mi_advantage_upper(eps, p_star):.4f}")
