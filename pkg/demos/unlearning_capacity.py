"""How many deletion requests can plausible deniability absorb?"""
# %%
import numpy as np

from mibound.unlearning import UnlearningPolicy, capacity_curve, deletion_capacity, group_request_check

# %%
res = deletion_capacity(UnlearningPolicy(threshold_b=0.8, eps=1.0, universe_size=10_000,
                                         expected_train_size=100))
print(f"per-request non-membership bound {res.per_request_lower:.5f}")
print(f"capacity {res.capacity:.2f} -> {res.whole_requests} whole requests")
print("60 requests ok:", group_request_check([res.per_request_lower] * 60, 0.8))
print("61 requests ok:", group_request_check([res.per_request_lower] * 61, 0.8))

# %% [markdown]
# Smaller expected training sets leave far more room.

# %%
cap, _ = capacity_curve(1.0, 10_000, 0.8, np.array([1, 10, 100, 1000, 5000]))
for c, m in cap.points:
    print(f"c={c:>6.0f}  capacity={m:12.2f}")
