"""Binomial estimates and the trial-parallel map used by every scan."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from scipy import stats

from .errors import DomainError

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"


def clopper_pearson(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    a = 1.0 - level
    lo = 0.0 if k == 0 else float(stats.beta.ppf(a / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - a / 2, k + 1, n - k))
    return lo, hi


@dataclass(frozen=True)
class MonteCarloEstimate:
    successes: int
    trials: int
    p_hat: float
    ci95: tuple[float, float]
    exact: bool = False

    @classmethod
    def from_counts(cls, successes: int, trials: int, exact: bool = False) -> "MonteCarloEstimate":
        if trials < 1:
            raise DomainError("need at least one trial")
        p = successes / trials
        ci = (p, p) if exact else clopper_pearson(successes, trials)
        return cls(int(successes), int(trials), p, ci, exact)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.p_hat * (1 - self.p_hat) / self.trials)

    def below(self, threshold: float) -> str:
        """Tag the claim ``p < threshold`` by where the CI sits."""
        lo, hi = self.ci95
        if hi < threshold:
            return PASS
        if lo >= threshold:
            return FAIL
        return INCONCLUSIVE

    def to_dict(self) -> dict:
        return {"successes": self.successes, "trials": self.trials, "p_hat": self.p_hat,
                "ci95": list(self.ci95), "exact": self.exact}


def map_trials(fn: Callable[[int], object], trial_ids: Iterable[int], workers: int = 1,
               chunksize: int = 16) -> list:
    """Apply ``fn`` to every trial id; results come back in trial order.

    ``fn`` must be picklable when ``workers > 1``.
    """
    ids: Sequence[int] = list(trial_ids)
    if workers <= 1 or len(ids) < 2 * chunksize:
        return [fn(t) for t in ids]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, ids, chunksize=chunksize))
