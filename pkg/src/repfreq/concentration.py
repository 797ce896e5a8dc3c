"""Exponential tail bound for discounted sums and its Monte Carlo check.

For an i.i.d. sequence with negative mean that still takes positive values,
the probability that the discounted running sum ever reaches a level c is at
most exp(-r * c), where r is the positive root of the exponential-moment
equation E[exp(r Z)] = 1. This module finds the root and estimates the tail
probability by simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_ROOT_WIDTH = 1e-13  # bisection stops when the bracket is this narrow
_EXP_CAP = 700.0  # beyond this, exp overflows; the moment is effectively +inf


@dataclass(frozen=True)
class FiniteDist:
    """Finite-support distribution given as matched value/probability arrays."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if values.ndim != 1 or values.shape != probs.shape or values.size == 0:
            raise ValueError("values and probs must be matching nonempty 1-d arrays")
        if not np.all(np.isfinite(values)):
            raise ValueError("support values must be finite")
        if np.any(probs <= 0):
            raise ValueError("probabilities must be positive")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {math.fsum(probs)!r}, expected 1")
        if len(np.unique(values)) != len(values):
            raise ValueError("support values must be distinct")
        values.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_pairs(cls, pairs) -> "FiniteDist":
        pairs = list(pairs)
        return cls(
            values=np.array([v for v, _ in pairs], dtype=float),
            probs=np.array([p for _, p in pairs], dtype=float),
        )

    @property
    def mean(self) -> float:
        return float(self.values @ self.probs)

    @property
    def max_value(self) -> float:
        return float(self.values.max())


@dataclass(frozen=True)
class TailReport:
    r_star: float
    analytic_bound: float
    empirical: float
    reps: int
    std_error: float
    c: float
    delta: float
    horizon: int


def tail_exponent(dist: FiniteDist) -> float:
    """Smallest positive root of E[exp(r Z)] = 1.

    The moment function is convex with value 1 and negative slope at r = 0,
    and diverges because some support value is positive, so the positive root
    exists, is unique, and is found by doubling then bisection.
    """
    if dist.mean >= 0:
        raise ValueError("distribution mean must be negative")
    if dist.max_value <= 0:
        raise ValueError("distribution must take a positive value with positive probability")

    values, probs = dist.values, dist.probs
    max_pos = dist.max_value

    def gap(r: float) -> float:
        if r * max_pos > _EXP_CAP:
            return math.inf
        return float(probs @ np.exp(r * values)) - 1.0

    hi = 1.0
    while gap(hi) <= 0.0:
        hi *= 2.0
        if hi > 1e18:  # pragma: no cover - unreachable given the preconditions
            raise RuntimeError("failed to bracket the tail exponent")
    lo = 0.0
    while hi - lo > _ROOT_WIDTH:
        mid = 0.5 * (lo + hi)
        g = gap(mid)
        if g == 0.0:
            return mid
        if g > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def min_horizon(dist: FiniteDist, delta: float, c: float, rel: float = 1e-6) -> int:
    """Smallest horizon whose post-horizon best case moves the sum by less
    than ``rel`` of max(c, 1)."""
    if not 0 < delta < 1:
        raise ValueError("delta must be in (0, 1)")
    max_pos = max(dist.max_value, 0.0)
    if max_pos == 0.0:
        return 1
    # delta^(h+1) * max_pos / (1 - delta) < rel * max(c, 1)
    bound = rel * max(c, 1.0) * (1.0 - delta) / max_pos
    h = math.ceil(math.log(bound) / math.log(delta)) - 1
    return max(int(h), 1)


def _check_horizon(dist: FiniteDist, delta: float, c: float, horizon: int) -> None:
    max_pos = max(dist.max_value, 0.0)
    residual = delta ** (horizon + 1) * max_pos / (1.0 - delta)
    if residual >= 1e-6 * max(c, 1.0):
        raise ValueError(
            f"horizon {horizon} leaves a reachable post-horizon increment of "
            f"{residual:.3g}; need below {1e-6 * max(c, 1.0):.3g}"
        )


def tail_probability_mc(
    dist: FiniteDist,
    delta: float,
    c: float,
    horizon: int,
    reps: int,
    seed: int,
) -> TailReport:
    """Estimate the probability that the discounted running sum of i.i.d.
    draws ever reaches ``c``, and compare against the analytic bound.

    Each replication has its own counter-based stream keyed by (seed, index),
    so results do not depend on execution order. Paths stop early once the
    best possible continuation can no longer reach ``c``; that pruning is
    exact, while the horizon cut can only lower the estimate.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must be in (0, 1)")
    if c < 0:
        raise ValueError("c must be nonnegative")
    if reps < 1000:
        raise ValueError("reps must be at least 1000")
    if horizon < 1:
        raise ValueError("horizon must be positive")
    _check_horizon(dist, delta, c, horizon)

    r_star = tail_exponent(dist)
    analytic = math.exp(-r_star * c)

    values = dist.values
    cum = np.cumsum(dist.probs)
    cum[-1] = 1.0
    max_pos = dist.max_value
    disc_all = np.exp(math.log(delta) * np.arange(1, horizon + 1))

    chunk = 512
    hits = 0
    for rep in range(reps):
        key = np.array([seed % 2**64, rep], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        start = 1  # the sum runs over t = 1, 2, ...
        carry = 0.0
        while start <= horizon:
            n = min(chunk, horizon - start + 1)
            draws = values[np.searchsorted(cum, rng.random(n), side="right").clip(max=len(values) - 1)]
            sums = carry + np.cumsum(disc_all[start - 1 : start - 1 + n] * draws)
            if np.any(sums >= c):
                hits += 1
                break
            carry = float(sums[-1])
            start += n
            # Prune once even an all-positive future cannot reach c.
            if carry + delta**start * max_pos / (1.0 - delta) < c:
                break
    empirical = hits / reps
    std_error = math.sqrt(empirical * (1.0 - empirical) / reps)
    return TailReport(
        r_star=r_star,
        analytic_bound=analytic,
        empirical=empirical,
        reps=reps,
        std_error=std_error,
        c=c,
        delta=delta,
        horizon=horizon,
    )
