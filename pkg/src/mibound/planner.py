"""Dataset sub-sampling as a defense: certified prior caps and (T, eps) planning.

A defender holding a dataset ``D`` of unknown provenance keeps every point
independently with probability ``T``.  Whatever the original inclusion
probability of a point was, its probability of landing in the kept set is at
most ``T``, so the positive-accuracy bound at prior ``T`` holds for all points.

Random draws come from numpy's PCG64 bit generator seeded directly with the
64-bit seed.  Exactly one double is drawn per identifier, in input order, and
the identifier is kept iff that draw is ``< T``.  The stream is specified by
PCG64's published algorithm, so output is bit-reproducible across platforms.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Hashable, Sequence

import numpy as np

from .bounds import check_epsilon, check_probability, positive_accuracy_bounds

__all__ = [
    "SubsampleRate",
    "SubsamplePlan",
    "certified_prior_cap",
    "subsample",
    "max_rate_for_target",
    "plan",
]

_SEED_LIMIT = 2**64


@dataclass(frozen=True)
class SubsampleRate:
    t: float

    def __post_init__(self):
        t = float(self.t)
        if not 0.0 < t <= 1.0:
            raise ValueError(f"sub-sampling rate must lie in (0, 1], got {self.t!r}")


@dataclass(frozen=True)
class SubsamplePlan:
    rate: SubsampleRate
    eps: float
    certified_upper: float
    expected_size: float
    original_size: int

    def to_record(self) -> dict:
        record = asdict(self)
        record["rate"] = self.rate.t
        return record


def certified_prior_cap(rate: SubsampleRate) -> float:
    """Upper bound on every point's inclusion probability after sub-sampling."""
    return float(rate.t)


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= int(seed) < _SEED_LIMIT:
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


def subsample(ids: Sequence[Hashable], rate: SubsampleRate, seed: int) -> list:
    """Keep each identifier independently with probability ``rate.t``.

    Output preserves input order and is a pure function of its arguments.
    """
    ids = list(ids)
    if not ids:
        raise ValueError("ids must be non-empty")
    if len(set(ids)) != len(ids):
        raise ValueError("ids must be distinct")
    rng = np.random.Generator(np.random.PCG64(_check_seed(seed)))
    draws = rng.random(len(ids))
    return [x for x, u in zip(ids, draws) if u < rate.t]


def max_rate_for_target(eps: float, target_upper: float) -> SubsampleRate:
    """Largest rate ``T`` whose positive-accuracy upper bound stays <= target.

    Inverts ``1/(1 + e^-eps (1-T)/T) = target`` to
    ``T = 1/(1 + e^eps (1/target - 1))``, then steps down by ulps if rounding
    left the bound a hair above the target.
    """
    eps = check_epsilon(eps)
    target = check_probability(target_upper, "target_upper")
    if not 0.0 < target < 1.0:
        raise ValueError(f"target_upper must lie in (0, 1), got {target_upper!r}")
    log_odds = math.log(target) - math.log1p(-target)
    t = 1.0 / (1.0 + math.exp(eps - log_odds))
    t = min(t, 1.0)
    while t > 0.0 and positive_accuracy_bounds(eps, t).upper > target:
        t = math.nextafter(t, 0.0)
    return SubsampleRate(t)


def plan(eps: float, rate: SubsampleRate, original_size: int) -> SubsamplePlan:
    """Certified bound and expected training-set size for a sub-sampling choice.

    The utility cost of training on fewer points is not modelled.
    """
    eps = check_epsilon(eps)
    if isinstance(original_size, bool) or int(original_size) != original_size or original_size < 0:
        raise ValueError(f"original_size must be a non-negative integer, got {original_size!r}")
    original_size = int(original_size)
    upper = positive_accuracy_bounds(eps, certified_prior_cap(rate)).upper
    return SubsamplePlan(
        rate=rate,
        eps=eps,
        certified_upper=upper,
        expected_size=original_size * rate.t,
        original_size=original_size,
    )
