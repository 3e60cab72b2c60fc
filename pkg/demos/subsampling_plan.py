"""Pick a sub-sampling rate that caps the attacker's positive accuracy."""
# %%
from mibound import positive_accuracy_bounds
from mibound.planner import SubsampleRate, max_rate_for_target, plan, subsample

# %% [markdown]
# Training at eps = 2 on everything gives no certificate at all. Drawing each
# record with probability T caps the prior at T, and that is enough.

# %%
rate = max_rate_for_target(2.0, 0.069)
p = plan(2.0, rate, original_size=1_000_000)
print(p.to_record())
print("check:", positive_accuracy_bounds(2.0, rate.t).upper <= 0.069)

# %% [markdown]
# The draw itself is reproducible from a seed.

# %%
ids = [f"user-{i:04d}" for i in range(1000)]
kept = subsample(ids, SubsampleRate(0.05), seed=2024)
print(len(kept), kept[:5])
assert kept == subsample(ids, SubsampleRate(0.05), seed=2024)
