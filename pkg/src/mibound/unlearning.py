"""Deletion-request arithmetic for B-MI unlearning.

A model is B-MI unlearnt for a set of requested points when the posterior
probability that none of them was trained on is at least ``B``.  With
independent sampling that posterior factorizes over points, so ``m``
requests that each carry a per-point guarantee ``L`` are covered whenever
``L**m >= B``, i.e. ``m <= ln B / ln L``.

With every point drawn at rate ``c/N``, the per-request factor used here is

    L(c) = 1 / (1 + e^-eps (c/N) / (1 - c/N)),

the expression stated for the unlearning capacity; it coincides with the
*upper* end of the negative-accuracy interval at ``p = c/N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import check_epsilon, check_probability
from .series import CurveSeries

__all__ = [
    "UnlearningPolicy",
    "CapacityResult",
    "l_of_c",
    "log_l_of_c",
    "deletion_capacity",
    "group_request_check",
    "capacity_curve",
]


@dataclass(frozen=True)
class UnlearningPolicy:
    threshold_b: float
    eps: float
    universe_size: int
    expected_train_size: float

    def __post_init__(self):
        b = check_probability(self.threshold_b, "threshold_b")
        if not 0.0 < b < 1.0:
            raise ValueError(f"threshold_b must lie in (0, 1), got {self.threshold_b!r}")
        check_epsilon(self.eps)
        _check_c(self.expected_train_size, self.universe_size)


@dataclass(frozen=True)
class CapacityResult:
    per_request_lower: float
    capacity: float

    @property
    def whole_requests(self) -> float:
        """Capacity rounded down to a whole number of requests (inf stays inf)."""
        return self.capacity if math.isinf(self.capacity) else float(math.floor(self.capacity))


def _check_c(c: float, n: int) -> None:
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise ValueError(f"universe size must be an integer >= 2, got {n!r}")
    if not (math.isfinite(c) and 0.0 < c < n):
        raise ValueError(f"expected training size must lie in (0, {n}), got {c!r}")


def log_l_of_c(eps: float, c: float, n: int) -> float:
    """``ln L(c)``, evaluated as ``-log1p(e^x)`` to keep precision as L -> 1."""
    eps = check_epsilon(eps)
    _check_c(c, n)
    rate = c / n
    x = -eps + math.log(rate) - math.log1p(-rate)
    if x > 30.0:
        return -(x + math.log1p(math.exp(-x)))
    return -math.log1p(math.exp(x))


def l_of_c(eps: float, c: float, n: int) -> float:
    """Per-request non-membership guarantee when every point has prior ``c/n``."""
    return math.exp(log_l_of_c(eps, c, n))


def deletion_capacity(policy: UnlearningPolicy) -> CapacityResult:
    """Maximum number of requests ``ln B / ln L(c)``.

    ``L(c) == 1`` (the log underflows to zero) is reported as ``math.inf``.
    """
    log_l = log_l_of_c(policy.eps, policy.expected_train_size, policy.universe_size)
    if log_l == 0.0:
        capacity = math.inf
    else:
        capacity = math.log(policy.threshold_b) / log_l
    return CapacityResult(per_request_lower=math.exp(log_l), capacity=capacity)


def group_request_check(per_point_lowers: Sequence[float], threshold_b: float) -> bool:
    """True iff the product of per-point guarantees reaches ``threshold_b``.

    The product is taken in log space; an empty request set is trivially covered.
    """
    threshold_b = check_probability(threshold_b, "threshold_b")
    lowers = np.asarray(list(per_point_lowers), dtype=float)
    if lowers.size == 0:
        return True
    if np.any(~(lowers > 0.0)) or np.any(lowers > 1.0):
        raise ValueError("per-point guarantees must lie in (0, 1]")
    if threshold_b == 0.0:
        return True
    return bool(math.fsum(np.log(lowers)) >= math.log(threshold_b))


def capacity_curve(eps: float, n: int, b: float, c_grid: Sequence[float],
                   linear_slope: float = 1.0) -> tuple[CurveSeries, CurveSeries]:
    """Deletion capacity over ``c_grid`` together with a linear reference line.

    The reference ``linear_slope * c`` is illustrative only; its slope is a
    free parameter.
    """
    cs = [float(c) for c in c_grid]
    capacity = [
        deletion_capacity(UnlearningPolicy(b, eps, n, c)).capacity for c in cs
    ]
    return (
        CurveSeries.from_xy("capacity", "c", "m", cs, capacity),
        CurveSeries.from_xy("linear", "c", "m", cs, [linear_slope * c for c in cs]),
    )
