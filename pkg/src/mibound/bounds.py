"""Closed-form membership-inference accuracy bounds for epsilon-DP training.

All bounds are written in terms of the log-odds of the sampling prior
``p = P(x* in D)`` so that large epsilons and priors close to 0 or 1 never
overflow: the positive-accuracy upper bound is ``expit(logit(p) + eps)`` and
the lower bound is ``expit(logit(p) - eps)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

__all__ = [
    "BoundInterval",
    "AmplificationParams",
    "GeneralizationParams",
    "check_probability",
    "check_epsilon",
    "positive_accuracy_bounds",
    "negative_accuracy_bounds",
    "attack_accuracy_bound",
    "baseline_yeom",
    "baseline_yeom_raw",
    "baseline_erlingsson",
    "baseline_sablayrolles",
    "baseline_sablayrolles_raw",
    "mi_advantage_upper",
    "advantage_maximizing_prior",
    "generalization_gap_interval",
    "amplified_term",
    "amplification_factors",
    "amplification_crossing",
]


def check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0):  # also catches NaN
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")
    return p


def check_epsilon(eps: float, name: str = "eps") -> float:
    eps = float(eps)
    if not math.isfinite(eps) or eps < 0.0:
        raise ValueError(f"{name} must be a finite non-negative number, got {eps!r}")
    return eps


@dataclass(frozen=True)
class BoundInterval:
    """A ``[lower, upper]`` pair of probabilities."""

    lower: float
    upper: float

    def __post_init__(self):
        check_probability(self.lower, "lower")
        check_probability(self.upper, "upper")
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower!r} exceeds upper {self.upper!r}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol


@dataclass(frozen=True)
class AmplificationParams:
    """Batch sampling rate ``q`` and per-step budget ``eps0``.

    ``t`` is the optional sweep variable used when comparing the two
    amplification factors.
    """

    q: float
    eps0: float
    t: float | None = None

    def __post_init__(self):
        if not (0.0 < float(self.q) <= 1.0):
            raise ValueError(f"q must lie in (0, 1], got {self.q!r}")
        check_epsilon(self.eps0, "eps0")
        if self.t is not None and not (0.0 < float(self.t) < 1.0):
            raise ValueError(f"t must lie in (0, 1), got {self.t!r}")


@dataclass(frozen=True)
class GeneralizationParams:
    """Loss cap ``loss_bound`` and an observed generalization gap."""

    loss_bound: float
    gap: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.loss_bound) and self.loss_bound > 0):
            raise ValueError(f"loss_bound must be positive, got {self.loss_bound!r}")
        if not abs(self.gap) <= self.loss_bound:
            raise ValueError(f"|gap| must not exceed loss_bound, got {self.gap!r}")


def _shifted_prior(p: float, shift: float) -> float:
    # expit(logit(p) + shift) with exact handling of the degenerate priors
    if p == 0.0 or p == 1.0 or shift == 0.0:
        return p
    return float(expit(logit(p) + shift))


def positive_accuracy_bounds(eps: float, p: float) -> BoundInterval:
    """Bounds on ``P(x* in D | S)`` for any outcome set ``S`` of an eps-DP trainer.

    upper = 1 / (1 + e^-eps (1-p)/p),  lower = 1 / (1 + e^eps (1-p)/p).
    ``p = 0`` and ``p = 1`` return the collapsed limits ``[0, 0]`` and ``[1, 1]``.
    """
    eps = check_epsilon(eps)
    p = check_probability(p)
    return BoundInterval(_shifted_prior(p, -eps), _shifted_prior(p, eps))


def negative_accuracy_bounds(eps: float, p: float) -> BoundInterval:
    """Bounds on ``P(x* not in D | S)``; the complement of the positive interval."""
    eps = check_epsilon(eps)
    p = check_probability(p)
    q = 1.0 - p
    if p == 0.0 or p == 1.0 or eps == 0.0:
        return BoundInterval(q, q)
    return BoundInterval(float(expit(-logit(p) - eps)), float(expit(-logit(p) + eps)))


def attack_accuracy_bound(eps: float) -> BoundInterval:
    """Bound on overall attack accuracy, i.e. both bounds at ``p = 0.5``."""
    return positive_accuracy_bounds(eps, 0.5)


def baseline_yeom_raw(eps: float) -> float:
    return math.exp(check_epsilon(eps)) / 2.0


def baseline_yeom(eps: float) -> float:
    """Yeom et al. accuracy bound ``e^eps / 2``, clamped to 1."""
    return min(baseline_yeom_raw(eps), 1.0)


def baseline_erlingsson(eps: float) -> float:
    """Erlingsson et al. accuracy bound ``1 - e^-eps / 2`` (delta = 0)."""
    return 1.0 - math.exp(-check_epsilon(eps)) / 2.0


def baseline_sablayrolles_raw(eps: float, p: float) -> float:
    return check_probability(p) + check_epsilon(eps) / 4.0


def baseline_sablayrolles(eps: float, p: float) -> float:
    """Sablayrolles et al. positive-accuracy bound ``p + eps/4``, clamped to 1.

    The original derivation assumes a Gibbs-like weight posterior; only the
    formula is reproduced here.
    """
    return min(baseline_sablayrolles_raw(eps, p), 1.0)


def mi_advantage_upper(eps: float, p: float) -> float:
    """Upper bound on the positive advantage ``2 (A(f=1) - p)``."""
    p = check_probability(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    return 2.0 * (positive_accuracy_bounds(eps, p).upper - p)


def advantage_maximizing_prior(eps: float, grid_size: int = 9999) -> float:
    """Grid point ``k / (grid_size + 1)`` maximizing :func:`mi_advantage_upper`.

    Ties go to the smallest prior.
    """
    if int(grid_size) != grid_size or grid_size < 3:
        raise ValueError(f"grid_size must be an integer >= 3, got {grid_size!r}")
    grid_size = int(grid_size)
    grid = np.arange(1, grid_size + 1) / (grid_size + 1)
    adv = np.array([mi_advantage_upper(eps, p) for p in grid])
    # np.argmax returns the first maximum, i.e. the smallest p
    return float(grid[int(np.argmax(adv))])


def generalization_gap_interval(eps: float, gp: GeneralizationParams) -> tuple[float, float]:
    """Admissible range of the generalization gap under eps-DP.

    Solves ``1/(1+e^eps) <= (R/B + 1)/2 <= 1/(1+e^-eps)`` for ``R``; the
    interval is ``B * [-tanh(eps/2), tanh(eps/2)]``.
    """
    eps = check_epsilon(eps)
    half = gp.loss_bound * (2.0 / (1.0 + math.exp(-eps)) - 1.0)
    return (-half, half)


def amplified_term(ap: AmplificationParams, p: float) -> float:
    """The ``e^(-q eps0) (1-p)/p`` term; larger means a smaller accuracy bound."""
    p = check_probability(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    return math.exp(-ap.q * ap.eps0) * (1.0 - p) / p


def amplification_factors(t: float) -> tuple[float, float]:
    """Return ``(e^-t, (1-t)/t)``: batch-sampling vs dataset-sampling growth."""
    t = float(t)
    if not 0.0 < t < 1.0:
        raise ValueError(f"t must lie in (0, 1), got {t!r}")
    return math.exp(-t), (1.0 - t) / t


def amplification_crossing(tol: float = 1e-12) -> float:
    """The unique ``t`` in (0, 1) where ``e^-t == (1-t)/t``, by bisection."""
    def gap(t):
        batch, dataset = amplification_factors(t)
        return dataset - batch

    lo, hi = 1e-6, 1.0 - 1e-12
    # gap(lo) > 0 > gap(hi); the difference is strictly decreasing on (0, 1)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
