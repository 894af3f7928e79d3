"""Evaluation statistics: WDL, SEM, two-sample Z, the probability-of-
superiority effect size, and box-plot summaries."""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Optional


def wdl(wins: int, draws: int, losses: int) -> float:
    """(wins + draws/2) / games."""
    games = wins + draws + losses
    if games <= 0:
        raise ValueError("WDL undefined for zero games")
    if min(wins, draws, losses) < 0:
        raise ValueError("negative counts")
    return (wins + draws / 2) / games


def sem(values) -> float:
    """Standard error of the mean (sample standard deviation based)."""
    n = len(values)
    if n < 2:
        return 0.0
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return math.sqrt(var / n)


@dataclass
class MatchSummary:
    wins: int
    draws: int
    losses: int
    rewards: list
    wdl: float
    sem: float
    manager: str = ""
    engines: dict = field(default_factory=dict)
    opening_set: str = ""
    aborted: int = 0

    @classmethod
    def from_rewards(cls, rewards, manager="", engines=None, opening_set="",
                     aborted=0):
        rewards = list(rewards)
        wins = sum(1 for r in rewards if r == 1.0)
        draws = sum(1 for r in rewards if r == 0.5)
        losses = sum(1 for r in rewards if r == 0.0)
        if wins + draws + losses != len(rewards):
            raise ValueError("rewards must be 0, 0.5 or 1")
        return cls(wins=wins, draws=draws, losses=losses, rewards=rewards,
                   wdl=wdl(wins, draws, losses), sem=sem(rewards),
                   manager=manager, engines=engines or {},
                   opening_set=opening_set, aborted=aborted)

    def to_json_dict(self) -> dict:
        return {"wins": self.wins, "draws": self.draws, "losses": self.losses,
                "wdl": self.wdl, "sem": self.sem, "manager": self.manager,
                "engines": self.engines, "opening_set": self.opening_set,
                "aborted": self.aborted, "rewards": self.rewards}


def z_score(rewards_a, rewards_b) -> float:
    """Two-sample unpooled Z on per-game rewards.

    Z = (mean A - mean B) / sqrt(varA/nA + varB/nB), sample variances.
    Both variances zero: 0 for equal means, signed infinity otherwise.
    """
    if not rewards_a or not rewards_b:
        raise ValueError("both reward lists must be non-empty")
    n_a, n_b = len(rewards_a), len(rewards_b)
    mean_a = sum(rewards_a) / n_a
    mean_b = sum(rewards_b) / n_b
    var_a = (sum((v - mean_a) ** 2 for v in rewards_a) / (n_a - 1)
             if n_a > 1 else 0.0)
    var_b = (sum((v - mean_b) ** 2 for v in rewards_b) / (n_b - 1)
             if n_b > 1 else 0.0)
    denom = math.sqrt(var_a / n_a + var_b / n_b)
    if denom == 0.0:
        if mean_a == mean_b:
            return 0.0
        return math.inf if mean_a > mean_b else -math.inf
    return (mean_a - mean_b) / denom


@dataclass(frozen=True)
class EffectReport:
    """Probability-of-superiority effect size with direction tag.

    `a_w` is reported in the direction of lower to higher mean, so it is
    >= 0.5 unless mean ordering and stochastic dominance disagree (then it
    is reported as-is, the direction tag still naming the higher-mean
    group).
    """

    mean_a: float
    mean_b: float
    a_w: float
    direction: str  # "A" | "B" | "equal": the higher-mean group
    n_a: int
    n_b: int


def _superiority(winners, losers) -> float:
    """P(w > l) + 0.5 P(w = l) by bisect counting; exact, O(n log n)."""
    sorted_losers = sorted(losers)
    total = 0.0
    for w in winners:
        total += bisect_left(sorted_losers, w)
        total += 0.5 * (bisect_right(sorted_losers, w)
                        - bisect_left(sorted_losers, w))
    return total / (len(winners) * len(sorted_losers))


def a_w(group_a, group_b) -> EffectReport:
    group_a, group_b = list(group_a), list(group_b)
    if not group_a or not group_b:
        raise ValueError("both groups must be non-empty")
    mean_a = sum(group_a) / len(group_a)
    mean_b = sum(group_b) / len(group_b)
    if mean_a > mean_b:
        direction = "A"
        value = _superiority(group_a, group_b)
    elif mean_b > mean_a:
        direction = "B"
        value = _superiority(group_b, group_a)
    else:
        direction = "equal"
        value = _superiority(group_b, group_a)
    return EffectReport(mean_a=mean_a, mean_b=mean_b, a_w=value,
                        direction=direction, n_a=len(group_a),
                        n_b=len(group_b))


def frequency_sem(f: float, n: int) -> float:
    """SEM of a binary frequency: sqrt(f(1-f)/n)."""
    if n <= 0:
        raise ValueError("n must be positive")
    return math.sqrt(f * (1 - f) / n)


@dataclass(frozen=True)
class BoxStats:
    """Quartiles plus whiskers at the farthest points within 1.5 IQR."""

    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    whisker_low: float
    whisker_high: float
    outliers: tuple

    @classmethod
    def from_values(cls, values) -> "BoxStats":
        data = sorted(values)
        if not data:
            raise ValueError("no data")

        def quantile(q):
            pos = (len(data) - 1) * q
            lo = int(math.floor(pos))
            hi = int(math.ceil(pos))
            return data[lo] + (data[hi] - data[lo]) * (pos - lo)

        q1, med, q3 = quantile(0.25), quantile(0.5), quantile(0.75)
        iqr = q3 - q1
        lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
        inside = [v for v in data if lo_fence <= v <= hi_fence]
        whisker_low = min(inside)
        whisker_high = max(inside)
        outliers = tuple(v for v in data if v < whisker_low
                         or v > whisker_high)
        return cls(minimum=data[0], q1=q1, median=med, q3=q3,
                   maximum=data[-1], whisker_low=whisker_low,
                   whisker_high=whisker_high, outliers=outliers)
