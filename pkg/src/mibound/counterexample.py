"""Threshold attack on one noisy DP-SGD step of a 1-D logistic regression.

Two candidate datasets produce Gaussian final weights: without the second
point the weight stays at ``w0``; with it the clipped gradient moves the mean
to ``w0 - grad_step``.  Both carry noise ``sigma``.  The attacker declares
"member" whenever the weight is ``<= alpha``.

All weights are handled as offsets from ``w0``: near 1e6 an absolute
coordinate would waste six of the sixteen available digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, log_ndtr, ndtr

from .bounds import check_probability

__all__ = [
    "GaussianDist",
    "CounterexampleConfig",
    "ThresholdAttack",
    "gaussian_cdf",
    "gaussian_log_cdf",
    "positive_accuracy",
    "positive_accuracy_supremum_demo",
    "overall_accuracy",
    "max_overall_accuracy",
    "golden_section_max",
]

DEFAULT_SIGMA = 4.0412


def gaussian_cdf(z):
    """Standard normal CDF, ``erfc(-z/sqrt 2) / 2``."""
    return ndtr(z) if np.ndim(z) else float(ndtr(z))


def gaussian_log_cdf(z):
    """Log of the standard normal CDF; uses the asymptotic series in the far left tail."""
    return log_ndtr(z) if np.ndim(z) else float(log_ndtr(z))


@dataclass(frozen=True)
class GaussianDist:
    mean_offset: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")

    def cdf(self, x: float) -> float:
        return gaussian_cdf((x - self.mean_offset) / self.sigma)

    def log_cdf(self, x: float) -> float:
        return gaussian_log_cdf((x - self.mean_offset) / self.sigma)

    def sf(self, x: float) -> float:
        return gaussian_cdf(-(x - self.mean_offset) / self.sigma)


@dataclass(frozen=True)
class CounterexampleConfig:
    w0: float = 1e6
    grad_step: float = 1.0
    sigma: float = DEFAULT_SIGMA
    prior_x2: float = 0.5

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")
        if not self.grad_step > 0:
            raise ValueError(f"grad_step must be positive, got {self.grad_step!r}")
        p = check_probability(self.prior_x2, "prior_x2")
        if not 0.0 < p < 1.0:
            raise ValueError(f"prior_x2 must lie in (0, 1), got {p!r}")

    @property
    def without_x2(self) -> GaussianDist:
        return GaussianDist(0.0, self.sigma)

    @property
    def with_x2(self) -> GaussianDist:
        return GaussianDist(-self.grad_step, self.sigma)


@dataclass(frozen=True)
class ThresholdAttack:
    alpha_offset: float

    def __post_init__(self):
        if not math.isfinite(self.alpha_offset):
            raise ValueError(f"alpha_offset must be finite, got {self.alpha_offset!r}")

    def absolute(self, cfg: CounterexampleConfig) -> float:
        return cfg.w0 + self.alpha_offset


def _alpha(alpha) -> float:
    return alpha.alpha_offset if isinstance(alpha, ThresholdAttack) else ThresholdAttack(float(alpha)).alpha_offset


def positive_accuracy(alpha, cfg: CounterexampleConfig = CounterexampleConfig()) -> float:
    """``P(D2 | W <= alpha)`` computed from log-CDFs so far tails do not underflow."""
    a = _alpha(alpha)
    log_with = cfg.with_x2.log_cdf(a) + math.log(cfg.prior_x2)
    log_without = cfg.without_x2.log_cdf(a) + math.log1p(-cfg.prior_x2)
    return float(expit(log_with - log_without))


def overall_accuracy(alpha, cfg: CounterexampleConfig = CounterexampleConfig()) -> float:
    """Probability the threshold attack labels the dataset correctly."""
    a = _alpha(alpha)
    correct_without = cfg.without_x2.sf(a) * (1.0 - cfg.prior_x2)
    correct_with = cfg.with_x2.cdf(a) * cfg.prior_x2
    return correct_without + correct_with


def positive_accuracy_supremum_demo(cfg: CounterexampleConfig, m: float,
                                    max_doublings: int = 1100) -> ThresholdAttack:
    """Find a threshold whose positive accuracy exceeds ``m``.

    Starts at the midpoint of the two means and doubles the distance below
    it until the accuracy clears ``m``.  Positive accuracy tends to 1 as the
    threshold decreases, so this terminates for every ``m < 1``.
    """
    m = float(m)
    if not m < 1.0:
        raise ValueError(f"m must be < 1, got {m!r}")
    alpha = -cfg.grad_step / 2.0
    for _ in range(max_doublings):
        if positive_accuracy(alpha, cfg) > m:
            return ThresholdAttack(alpha)
        alpha *= 2.0
    raise RuntimeError(f"no threshold reached positive accuracy {m}")


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 500):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def max_overall_accuracy(cfg: CounterexampleConfig = CounterexampleConfig()) -> tuple[ThresholdAttack, float]:
    """Best threshold for overall accuracy, searched on ``[-10 sigma, 10 sigma]``."""
    x, best = golden_section_max(lambda a: overall_accuracy(a, cfg),
                                 -10.0 * cfg.sigma, 10.0 * cfg.sigma)
    return ThresholdAttack(x), best
