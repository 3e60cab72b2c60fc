"""One noisy gradient step, two candidate datasets, a threshold attacker."""
# %%
from mibound.counterexample import (
    CounterexampleConfig,
    max_overall_accuracy,
    overall_accuracy,
    positive_accuracy,
    positive_accuracy_supremum_demo,
)

cfg = CounterexampleConfig()

# %% [markdown]
# Overall accuracy stays close to a coin flip...

# %%
attack, best = max_overall_accuracy(cfg)
print(f"best threshold w0{attack.alpha_offset:+.4f}: accuracy {best:.4f}")
print(f"accuracy at offset -40: {overall_accuracy(-40, cfg):.4f}")

# %% [markdown]
# ...yet positive accuracy can be pushed as close to 1 as we like by moving
# the threshold further into the tail.

# %%
for alpha in (-0.5, -10, -40, -100):
    print(f"offset {alpha:>6}: positive accuracy {positive_accuracy(alpha, cfg):.5f}")
w = positive_accuracy_supremum_demo(cfg, 0.999)
print(f"above 0.999 at offset {w.alpha_offset:g}: {positive_accuracy(w, cfg):.6f}")
