"""Brute-force posteriors for a tiny universe and check them against the bounds."""
# %%
from mibound.oracle import (
    Universe,
    exact_posterior,
    mechanism_epsilon,
    randomized_response_mechanism,
    simulate_mi_game,
    verify_bounds,
)

# %%
u = Universe((0.3, 0.5, 0.7, 0.2))
m = randomized_response_mechanism(u, flip_prob=0.2)
eps = mechanism_epsilon(m)
print(f"{u.n} points, {m.outcome_count} outcomes, eps = {eps:.4f}")

# %% [markdown]
# Every posterior for every point and outcome lands inside its interval.

# %%
reports = verify_bounds(u, m)
print(f"{len(reports)} posteriors checked, {sum(not r.inside for r in reports)} outside")
worst = max(reports, key=lambda r: r.posterior - r.bound_interval.upper)
print("closest to the upper edge:", worst)

# %% [markdown]
# Single point, flip probability 1/4: the bound is attained exactly.

# %%
one = Universe((0.5,))
print(exact_posterior(one, randomized_response_mechanism(one, 0.25), 0, "1"))

# %% [markdown]
# A Bayes-optimal attacker playing the game many times matches the exact numbers.

# %%
for row in simulate_mi_game(u, m, trials=100_000, seed=1):
    print(f"point {row.point_index}: accuracy {row.accuracy:.4f} +- {row.accuracy_se:.4f} "
          f"(exact {row.expected_accuracy:.4f})")
