"""Bootstrap resampling and the paired Wilcoxon signed-rank test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from ..errors import InsufficientDataError, ValidationError

DEFAULT_TRIALS = 10_000

#: Exact enumeration is used up to this many nonzero pairs.
EXACT_LIMIT = 20


@dataclass(frozen=True)
class BootstrapResult:
    mean: float
    std: float
    p2_5: float
    p97_5: float
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std": self.std,
            "p2_5": self.p2_5,
            "p97_5": self.p97_5,
            "trials": self.trials,
            "seed": self.seed,
        }


def bootstrap(values: Sequence[float], trials: int = DEFAULT_TRIALS, seed: int = 0) -> BootstrapResult:
    """Resample-with-replacement distribution of the sample mean.

    Deterministic for a given seed; returns the trial distribution's mean,
    standard deviation, and 2.5/97.5 percentiles.
    """
    data = np.asarray(list(values), dtype=float)
    if data.size == 0:
        raise ValidationError("bootstrap requires at least one value")
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, data.size, size=(trials, data.size))
    trial_means = data[idx].mean(axis=1)
    lo, hi = float(trial_means.min()), float(trial_means.max())
    if lo == hi:
        # Point-mass trial distribution: report it exactly instead of
        # letting grand-mean rounding manufacture a tiny spread.
        return BootstrapResult(mean=lo, std=0.0, p2_5=lo, p97_5=lo, trials=trials, seed=seed)
    return BootstrapResult(
        mean=float(trial_means.mean()),
        std=float(trial_means.std(ddof=0)),
        p2_5=float(np.percentile(trial_means, 2.5)),
        p97_5=float(np.percentile(trial_means, 97.5)),
        trials=trials,
        seed=seed,
    )


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float
    p: float
    n: int
    method: str  # "exact" | "normal"

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "p": self.p, "n": self.n, "method": self.method}


def _ranks_with_ties(abs_diffs: Sequence[float]) -> List[float]:
    order = sorted(range(len(abs_diffs)), key=lambda i: abs_diffs[i])
    ranks = [0.0] * len(abs_diffs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and abs_diffs[order[j + 1]] == abs_diffs[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1  # average of 1-based ranks i+1 .. j+1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _exact_p(ranks: Sequence[float], t_obs: float) -> float:
    """P(min rank sum <= t_obs) via a distribution DP over doubled ranks.

    Under the null each sign is equally likely, so the W+ distribution is
    symmetric and the two-sided p is 2*P(W+ <= t_obs), capped at 1.
    """
    doubled = [int(round(2 * r)) for r in ranks]
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled:
        for s in range(total - r, -1, -1):
            if counts[s]:
                counts[s + r] += counts[s]
    threshold = int(round(2 * t_obs))
    at_or_below = sum(counts[: threshold + 1])
    p = 2.0 * at_or_below / (2 ** len(ranks))
    return min(1.0, p)


def _normal_p(ranks: Sequence[float], t_obs: float) -> float:
    n = len(ranks)
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    # Tie correction over groups of equal absolute differences.
    tie_groups: Dict[float, int] = {}
    for r in ranks:
        tie_groups[r] = tie_groups.get(r, 0) + 1
    correction = sum(t**3 - t for t in tie_groups.values() if t > 1) / 48.0
    var -= correction
    if var <= 0:
        return 1.0
    # The min-side statistic sits at or below the mean, so z <= 0 and the
    # two-sided p is 2*Phi(z) = erfc(-z/sqrt(2)).
    z = (t_obs - mean) / math.sqrt(var)
    return min(1.0, math.erfc(-z / math.sqrt(2)))


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float]) -> WilcoxonResult:
    """Two-sided paired test on a vs b.

    Zero differences are dropped; ties get average ranks; the statistic is
    the smaller signed-rank sum.  Exact enumeration for n <= 20, normal
    approximation with tie correction beyond.
    """
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise ValidationError("paired samples must have equal length")
    diffs = [x - y for x, y in zip(a, b) if x != y]
    n = len(diffs)
    if n < 5:
        raise InsufficientDataError(
            f"need at least 5 nonzero paired differences, got {n}"
        )
    ranks = _ranks_with_ties([abs(d) for d in diffs])
    w_plus = sum(r for d, r in zip(diffs, ranks) if d > 0)
    w_minus = sum(r for d, r in zip(diffs, ranks) if d < 0)
    statistic = min(w_plus, w_minus)
    if n <= EXACT_LIMIT:
        return WilcoxonResult(statistic, _exact_p(ranks, statistic), n, "exact")
    return WilcoxonResult(statistic, _normal_p(ranks, statistic), n, "normal")
