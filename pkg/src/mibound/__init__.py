"""Membership-inference accuracy bounds for epsilon-DP training.

Submodules:

- ``bounds``: closed-form positive/negative accuracy bounds, prior-work baselines,
  advantage, generalization gap and amplification terms
- ``planner``: dataset sub-sampling defense and (T, eps) planning
- ``unlearning``: B-MI deletion capacity
- ``oracle``: exact enumeration over small universes and Monte Carlo games
- ``counterexample``: threshold attack on one noisy DP-SGD step
- ``figures``: figure data series and CSV/SVG writers
"""

from .bounds import (
    AmplificationParams,
    BoundInterval,
    GeneralizationParams,
    advantage_maximizing_prior,
    amplification_crossing,
    amplification_factors,
    amplified_term,
    attack_accuracy_bound,
    baseline_erlingsson,
    baseline_sablayrolles,
    baseline_yeom,
    generalization_gap_interval,
    mi_advantage_upper,
    negative_accuracy_bounds,
    positive_accuracy_bounds,
)
from .series import CurveSeries

__version__ = "0.1.0"
