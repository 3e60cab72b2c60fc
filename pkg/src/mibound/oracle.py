"""Brute-force Bayesian ground truth for small universes.

Every dataset over a universe of ``N`` points is an ``N``-bit mask (bit ``i``
set iff point ``i`` is in the dataset), and masks are always enumerated in
ascending integer order.  A finite mechanism is a ``2**N x K`` table of
log-probabilities, one row per mask.  With at most 2**20 masks, exact
posteriors ``P(x_i in D | outcome)`` follow from two log-sum-exp reductions.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .bounds import BoundInterval, check_probability, negative_accuracy_bounds, positive_accuracy_bounds

logger = logging.getLogger(__name__)

__all__ = [
    "MAX_POINTS",
    "Universe",
    "FiniteMechanism",
    "PosteriorReport",
    "PriorSwapReport",
    "MIGameRow",
    "ZeroProbabilityOutcomeError",
    "dataset_log_prior",
    "all_log_priors",
    "outcome_log_marginals",
    "posterior_matrix",
    "exact_posterior",
    "mechanism_epsilon",
    "randomized_response_mechanism",
    "constant_mechanism",
    "lemma1_check",
    "verify_bounds",
    "simulate_mi_game",
    "trial_uniforms",
    "load_config",
]

MAX_POINTS = 20
NORMALIZATION_TOL = 1e-9
CONTAINMENT_TOL = 1e-9
# posteriors this close to 1/2 count as ties and are predicted non-member
TIE_TOL = 1e-12
# cap on table entries (2**N * K) so randomized response stays within memory
MAX_TABLE_ENTRIES = 1 << 24


class ZeroProbabilityOutcomeError(ValueError):
    """The requested outcome has probability zero under the prior."""


@dataclass(frozen=True)
class Universe:
    """Inclusion probabilities ``P(x_i in D)`` for each point of the universe."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(check_probability(p, "prob") for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not 1 <= len(probs) <= MAX_POINTS:
            raise ValueError(f"universe size must be in [1, {MAX_POINTS}], got {len(probs)}")
        if any(p in (0.0, 1.0) for p in probs):
            # a point with prior 0 or 1 carries no membership uncertainty; drop it
            # (conditioning the mechanism on its fixed bit) before enumerating
            raise ValueError("enumeration needs priors strictly inside (0, 1)")

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def n_masks(self) -> int:
        return 1 << self.n


def _mask_bits(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(bool)


def _as_mask(mask, n: int) -> int:
    if isinstance(mask, (int, np.integer)) and not isinstance(mask, bool):
        mask = int(mask)
        if not 0 <= mask < (1 << n):
            raise ValueError(f"mask {mask} does not fit a universe of {n} points")
        return mask
    bits = list(mask)
    if len(bits) != n:
        raise ValueError(f"mask has width {len(bits)}, universe has {n} points")
    value = 0
    for i, b in enumerate(bits):
        if b not in (0, 1, True, False):
            raise ValueError(f"mask bits must be 0 or 1, got {b!r}")
        value |= int(b) << i
    return value


def dataset_log_prior(mask, u: Universe) -> float:
    """``log P(D)`` for the dataset encoded by ``mask`` (int or bit sequence)."""
    m = _as_mask(mask, u.n)
    return math.fsum(
        math.log(p) if (m >> i) & 1 else math.log1p(-p) for i, p in enumerate(u.probs)
    )


def all_log_priors(u: Universe) -> np.ndarray:
    """``log P(D)`` for every mask, ascending."""
    bits = _mask_bits(u.n)
    p = np.asarray(u.probs)
    return np.where(bits, np.log(p), np.log1p(-p)).sum(axis=1)


class FiniteMechanism:
    """Finite-outcome training function: row ``mask`` holds ``log P(H(D) = k)``."""

    def __init__(self, logprob_table, outcomes: Sequence[str] | None = None):
        table = np.array(logprob_table, dtype=float)
        if table.ndim != 2:
            raise ValueError("logprob_table must be two-dimensional")
        rows, k = table.shape
        if rows < 2 or rows & (rows - 1):
            raise ValueError(f"row count must be a power of two >= 2, got {rows}")
        if k < 2:
            raise ValueError("a mechanism needs at least two outcomes")
        if np.any(np.isnan(table)) or np.any(table > 0):
            raise ValueError("log-probabilities must be <= 0 and not NaN")
        dev = np.max(np.abs(np.exp(logsumexp(table, axis=1)) - 1.0))
        if dev > NORMALIZATION_TOL:
            raise ValueError(f"rows do not normalize (max deviation {dev:.3g})")
        if outcomes is None:
            outcomes = [str(j) for j in range(k)]
        outcomes = [str(o) for o in outcomes]
        if len(outcomes) != k or len(set(outcomes)) != k:
            raise ValueError("outcome labels must be distinct and match the column count")
        table.setflags(write=False)
        self.logprob_table = table
        self.outcomes = tuple(outcomes)

    @classmethod
    def from_probabilities(cls, rows, outcomes: Sequence[str] | None = None) -> "FiniteMechanism":
        """Build from plain probabilities; rows are renormalized and drift is logged."""
        probs = np.array(rows, dtype=float)
        if probs.ndim != 2 or np.any(~np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError("probability rows must be a 2-D array of finite non-negative numbers")
        sums = probs.sum(axis=1)
        if np.any(sums <= 0):
            raise ValueError("every row needs positive total probability")
        dev = float(np.max(np.abs(sums - 1.0)))
        if dev > NORMALIZATION_TOL:
            logger.warning("renormalizing mechanism rows (max deviation %.3g)", dev)
        with np.errstate(divide="ignore"):
            table = np.log(probs / sums[:, None])
        return cls(table, outcomes)

    @property
    def n_points(self) -> int:
        return self.logprob_table.shape[0].bit_length() - 1

    @property
    def outcome_count(self) -> int:
        return self.logprob_table.shape[1]

    def outcome_index(self, outcome) -> int:
        if isinstance(outcome, (int, np.integer)) and not isinstance(outcome, bool):
            if not 0 <= outcome < self.outcome_count:
                raise ValueError(f"outcome index {outcome} out of range")
            return int(outcome)
        try:
            return self.outcomes.index(str(outcome))
        except ValueError:
            raise ValueError(f"unknown outcome {outcome!r}") from None

    def __repr__(self):
        return f"FiniteMechanism(n_points={self.n_points}, outcomes={self.outcome_count})"


def _check_pair(u: Universe, m: FiniteMechanism) -> None:
    if m.n_points != u.n:
        raise ValueError(f"mechanism covers {m.n_points} points, universe has {u.n}")


def constant_mechanism(u: Universe, probs: Sequence[float]) -> FiniteMechanism:
    """Data-independent mechanism: every dataset yields the same distribution."""
    row = np.asarray(probs, dtype=float)
    return FiniteMechanism.from_probabilities(np.tile(row, (u.n_masks, 1)))


def randomized_response_mechanism(u: Universe, flip_prob: float) -> FiniteMechanism:
    """Report the membership vector with each bit flipped independently w.p. ``flip_prob``.

    Outcome ``o`` is the reported mask; ``log P(o | D) = h log(rho) + (N - h) log(1 - rho)``
    with ``h`` the Hamming distance between ``o`` and ``D``.
    """
    rho = float(flip_prob)
    if not 0.0 < rho < 0.5:
        raise ValueError(f"flip_prob must lie in (0, 0.5), got {flip_prob!r}")
    if (u.n_masks ** 2) > MAX_TABLE_ENTRIES:
        raise ValueError(f"randomized response over {u.n} points needs a 4**{u.n} table; max is 12 points")
    masks = np.arange(u.n_masks, dtype=np.uint64)
    hamming = np.bitwise_count(masks[:, None] ^ masks[None, :]).astype(float)
    table = hamming * math.log(rho) + (u.n - hamming) * math.log1p(-rho)
    labels = [format(o, f"0{u.n}b")[::-1] for o in range(u.n_masks)]
    return FiniteMechanism(table, labels)


def _joint(u: Universe, m: FiniteMechanism) -> np.ndarray:
    _check_pair(u, m)
    return all_log_priors(u)[:, None] + m.logprob_table


def outcome_log_marginals(u: Universe, m: FiniteMechanism) -> np.ndarray:
    """``log P(outcome)`` after marginalizing over the dataset prior."""
    return logsumexp(_joint(u, m), axis=0)


def posterior_matrix(u: Universe, m: FiniteMechanism) -> tuple[np.ndarray, np.ndarray]:
    """All posteriors at once.

    Returns ``(post, log_marginal)`` where ``post[i, k] = P(x_i in D | k)``;
    columns with zero marginal probability are NaN.
    """
    joint = _joint(u, m)
    log_marg = logsumexp(joint, axis=0)
    bits = _mask_bits(u.n)
    post = np.full((u.n, m.outcome_count), np.nan)
    live = np.isfinite(log_marg)
    for i in range(u.n):
        num = logsumexp(joint[bits[:, i]][:, live], axis=0)
        post[i, live] = np.clip(np.exp(num - log_marg[live]), 0.0, 1.0)
    return post, log_marg


def exact_posterior(u: Universe, m: FiniteMechanism, point: int, outcome) -> float:
    """``P(x_point in D | H(D) = outcome)`` by exhaustive enumeration."""
    _check_pair(u, m)
    if not 0 <= point < u.n:
        raise ValueError(f"point index {point} out of range")
    k = m.outcome_index(outcome)
    col = all_log_priors(u) + m.logprob_table[:, k]
    den = logsumexp(col)
    if not np.isfinite(den):
        raise ZeroProbabilityOutcomeError(f"outcome {m.outcomes[k]!r} has probability zero")
    num = logsumexp(col[_mask_bits(u.n)[:, point]])
    return float(min(1.0, math.exp(num - den)))


def mechanism_epsilon(m: FiniteMechanism) -> float:
    """Smallest eps for which the mechanism is eps-DP under add/remove-one adjacency.

    Only singleton outcomes are compared.  That suffices: for any outcome set,
    ``sum_k a_k <= max_k(a_k / b_k) * sum_k b_k``.  A zero entry facing a
    non-zero one across an adjacent pair gives ``inf``.
    """
    table = m.logprob_table
    n = m.n_points
    masks = np.arange(table.shape[0])
    worst = 0.0
    for i in range(n):
        low = masks[(masks >> i) & 1 == 0]
        a, b = table[low], table[low | (1 << i)]
        with np.errstate(invalid="ignore"):
            diff = np.abs(a - b)
        diff[np.isneginf(a) & np.isneginf(b)] = 0.0
        worst = max(worst, float(diff.max()))
    return worst


@dataclass(frozen=True)
class PriorSwapReport:
    holds: bool
    pairs: int
    bijective: bool
    max_abs_error: float

    def __bool__(self):
        return self.holds


def lemma1_check(u: Universe, point: int, tol: float = 1e-12) -> PriorSwapReport:
    """Pair each dataset containing ``point`` with the one that drops it.

    Checks the pairing is one-to-one onto the datasets without the point and
    that ``log P(D) + log(P0/P1) == log P(D')`` for every pair.
    """
    if not 0 <= point < u.n:
        raise ValueError(f"point index {point} out of range")
    bit = 1 << point
    masks = np.arange(u.n_masks)
    with_pt = masks[(masks & bit) != 0]
    partners = with_pt & ~bit
    without_pt = masks[(masks & bit) == 0]
    bijective = (len(np.unique(partners)) == len(with_pt)
                 and np.array_equal(np.sort(partners), without_pt))
    log_prior = all_log_priors(u)
    p = u.probs[point]
    log_ratio = math.log1p(-p) - math.log(p)
    err = np.abs(log_prior[with_pt] + log_ratio - log_prior[partners])
    max_err = float(err.max())
    return PriorSwapReport(bool(bijective and max_err <= tol), len(with_pt), bool(bijective), max_err)


@dataclass(frozen=True)
class PosteriorReport:
    point_index: int
    outcome_id: str
    posterior: float
    bound_interval: BoundInterval
    inside: bool


def _positive_interval(eps: float, p: float) -> BoundInterval:
    if math.isinf(eps):
        return BoundInterval(0.0, 1.0)
    return positive_accuracy_bounds(eps, p)


def verify_bounds(u: Universe, m: FiniteMechanism, tol: float = CONTAINMENT_TOL) -> list[PosteriorReport]:
    """Check every reachable (point, outcome) posterior against the analytic interval.

    The interval uses the mechanism's exact eps.  Negative accuracy is the
    complement of the posterior, so it is covered by the same check; the
    negative interval is additionally checked for consistency.
    """
    eps = mechanism_epsilon(m)
    post, log_marg = posterior_matrix(u, m)
    reports = []
    for i, p in enumerate(u.probs):
        interval = _positive_interval(eps, p)
        neg = None if math.isinf(eps) else negative_accuracy_bounds(eps, p)
        for k in np.flatnonzero(np.isfinite(log_marg)):
            x = float(post[i, k])
            inside = interval.contains(x, tol)
            if neg is not None:
                inside = inside and neg.contains(1.0 - x, tol)
            reports.append(PosteriorReport(i, m.outcomes[k], x, interval, inside))
    return reports


@dataclass(frozen=True)
class MIGameRow:
    point_index: int
    prior: float
    n_predicted_member: int
    positive_accuracy: float
    positive_se: float
    expected_positive: float
    n_predicted_nonmember: int
    negative_accuracy: float
    negative_se: float
    expected_negative: float
    accuracy: float
    accuracy_se: float
    expected_accuracy: float


def trial_uniforms(seed: int, start: int, stop: int, width: int) -> np.ndarray:
    """Uniform draws for trials ``start..stop-1``, ``width`` per trial.

    Trial ``j`` owns positions ``[j*width, (j+1)*width)`` of the PCG64 stream
    seeded with ``seed``; chunks are located with ``advance`` so any
    partition of the trial range reproduces the serial draws exactly.
    """
    bitgen = np.random.PCG64(int(seed))
    bitgen.advance(start * width)
    return np.random.Generator(bitgen).random((stop - start, width))


def _rate(hits: int, n: int) -> tuple[float, float]:
    if n == 0:
        return math.nan, math.nan
    acc = hits / n
    return acc, math.sqrt(acc * (1.0 - acc) / n)


def simulate_mi_game(u: Universe, m: FiniteMechanism, trials: int, seed: int,
                     chunk_size: int = 1 << 16) -> list[MIGameRow]:
    """Monte Carlo membership game against the Bayes-optimal adversary.

    Each trial draws a dataset from the prior (one uniform per point), then an
    outcome (one more uniform, inverse CDF), and for every point predicts
    "member" iff the exact posterior exceeds 1/2.  Rows report empirical
    accuracies with binomial standard errors next to their exact expectations.
    """
    _check_pair(u, m)
    if int(trials) != trials or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be in [0, 2**64), got {seed!r}")
    trials = int(trials)
    n = u.n
    post, log_marg = posterior_matrix(u, m)
    predict = np.nan_to_num(post, nan=0.0) > 0.5 + TIE_TOL  # (n, K)
    cdf = np.cumsum(np.exp(m.logprob_table), axis=1)
    probs = np.asarray(u.probs)
    weights = np.bitwise_left_shift(1, np.arange(n))

    pred_member = np.zeros(n, dtype=np.int64)
    hit_member = np.zeros(n, dtype=np.int64)
    hit_nonmember = np.zeros(n, dtype=np.int64)
    for start in range(0, trials, chunk_size):
        stop = min(trials, start + chunk_size)
        draws = trial_uniforms(seed, start, stop, n + 1)
        bits = draws[:, :n] < probs
        masks = bits.astype(np.int64) @ weights
        outcomes = np.empty(stop - start, dtype=np.int64)
        for mask in np.unique(masks):
            sel = masks == mask
            outcomes[sel] = np.searchsorted(cdf[mask], draws[sel, n], side="right")
        np.minimum(outcomes, m.outcome_count - 1, out=outcomes)
        guess = predict[:, outcomes].T  # (trials, n)
        pred_member += guess.sum(axis=0)
        hit_member += (guess & bits).sum(axis=0)
        hit_nonmember += (~guess & ~bits).sum(axis=0)

    marg = np.exp(log_marg)
    rows = []
    for i in range(n):
        pi = np.nan_to_num(post[i], nan=0.0)
        sel = predict[i]
        mass_member = float(marg[sel].sum())
        mass_non = float(marg[~sel].sum())
        exp_pos = float((marg[sel] * pi[sel]).sum() / mass_member) if mass_member > 0 else math.nan
        exp_neg = float((marg[~sel] * (1 - pi[~sel])).sum() / mass_non) if mass_non > 0 else math.nan
        exp_acc = float((marg[sel] * pi[sel]).sum() + (marg[~sel] * (1 - pi[~sel])).sum())
        n_pos = int(pred_member[i])
        pos, pos_se = _rate(int(hit_member[i]), n_pos)
        neg, neg_se = _rate(int(hit_nonmember[i]), trials - n_pos)
        acc, acc_se = _rate(int(hit_member[i] + hit_nonmember[i]), trials)
        rows.append(MIGameRow(i, u.probs[i], n_pos, pos, pos_se, exp_pos,
                              trials - n_pos, neg, neg_se, exp_neg, acc, acc_se, exp_acc))
    return rows


def load_config(source) -> tuple[Universe, FiniteMechanism]:
    """Universe and mechanism from a JSON file path or an already-parsed dict.

    Schema::

        {"probs": [...],
         "mechanism": {"type": "randomized_response", "flip_prob": 0.25}}
        {"probs": [...],
         "mechanism": {"type": "table", "outcomes": [...], "rows": [[...], ...]}}

    Table rows are plain probabilities ordered by ascending mask.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            config = json.load(fh)
    else:
        config = source
    if not isinstance(config, dict) or "probs" not in config or "mechanism" not in config:
        raise ValueError("config needs 'probs' and 'mechanism' fields")
    u = Universe(tuple(config["probs"]))
    mech = config["mechanism"]
    kind = mech.get("type")
    if kind == "randomized_response":
        m = randomized_response_mechanism(u, mech["flip_prob"])
    elif kind == "table":
        outcomes = mech.get("outcomes")
        if isinstance(outcomes, int):
            outcomes = None
        m = FiniteMechanism.from_probabilities(mech["rows"], outcomes)
        _check_pair(u, m)
    else:
        raise ValueError(f"unknown mechanism type {kind!r}")
    return u, m
