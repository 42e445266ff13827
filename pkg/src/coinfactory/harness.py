"""Statistical verification harness: seeded trial runner, frequency tables
against exact oracles, chi-square goodness of fit, and flip-count statistics.

Budget-exhausted trials are data, not errors: they are counted separately and
never contribute to frequency cells.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import mpmath

from .coins import BudgetedCoins, CoinBank, FlipBudget
from .errors import BudgetExhausted, LevelCapExceeded, UsageError
from .rationals import format_rational

DEFAULT_ALPHA = 0.001


def outcome_label(outcome) -> str:
    if isinstance(outcome, frozenset):
        return "{" + ",".join(map(str, sorted(outcome))) + "}"
    if isinstance(outcome, tuple):
        return "(" + ",".join(format_rational(x) for x in outcome) + ")"
    return str(outcome)


@dataclass
class ChiSquareResult:
    statistic: Optional[float]
    dof: int
    p_value: Optional[float]
    passed: bool
    alpha: float
    note: str = ""


def chi_square(counts: dict, oracle_probs: dict, alpha: float = DEFAULT_ALPHA) -> ChiSquareResult:
    """Pearson goodness of fit of observed counts against exact probabilities.

    Cells with expected count below 5 are pooled; a zero-probability cell with
    observations is an automatic fail (the sampler produced an impossible
    outcome).
    """
    total_p = sum(oracle_probs.values())
    if total_p != 1:
        raise UsageError("oracle probabilities must sum to exactly 1")
    n = sum(counts.values())
    if n < 1:
        raise UsageError("need at least one observation")
    for outcome, cnt in counts.items():
        if cnt > 0 and oracle_probs.get(outcome, Fraction(0)) == 0:
            return ChiSquareResult(
                None, 0, None, False, alpha,
                f"impossible outcome observed: {outcome_label(outcome)} x{cnt}",
            )
    cells = []  # (observed, expected) with expected > 0
    pool_obs, pool_exp = 0, 0.0
    for outcome, prob in oracle_probs.items():
        if prob == 0:
            continue
        exp = float(prob) * n
        obs = counts.get(outcome, 0)
        if exp < 5:
            pool_obs += obs
            pool_exp += exp
        else:
            cells.append((obs, exp))
    if pool_exp > 0:
        cells.append((pool_obs, pool_exp))
    if len(cells) < 2:
        # Point-mass oracle: everything in one cell, nothing to test.
        return ChiSquareResult(0.0, 0, 1.0, True, alpha, "single-cell (point mass)")
    stat = sum((obs - exp) ** 2 / exp for obs, exp in cells)
    dof = len(cells) - 1
    p_value = float(mpmath.gammainc(dof / 2, stat / 2, mpmath.inf, regularized=True))
    return ChiSquareResult(stat, dof, p_value, p_value >= alpha, alpha)


def _quantile(sorted_vals: list, q: float) -> int:
    if not sorted_vals:
        return 0
    idx = min(len(sorted_vals) - 1, int(math.ceil(q * len(sorted_vals))) - 1)
    return sorted_vals[max(0, idx)]


@dataclass
class TrialReport:
    sampler_id: str
    seed: int
    trials: int
    counts: dict
    exhausted: int
    aborted: int  # level-cap hits, reported like budget exhaustion
    oracle: Optional[dict]
    z_scores: dict
    chi2: Optional[ChiSquareResult]
    flips_p50: int
    flips_p90: int
    flips_p99: int
    flips_max: int

    @property
    def completed(self) -> int:
        return self.trials - self.exhausted - self.aborted

    def frequency(self, outcome) -> float:
        if self.completed == 0:
            return float("nan")
        return self.counts.get(outcome, 0) / self.completed

    def to_csv(self) -> str:
        lines = ["outcome,count,oracle_num,oracle_den,z,flips_p50,flips_p99"]
        keys = sorted(
            set(self.counts) | set(self.oracle or {}), key=outcome_label
        )
        for outcome in keys:
            prob = (self.oracle or {}).get(outcome)
            num = "" if prob is None else prob.numerator
            den = "" if prob is None else prob.denominator
            z = self.z_scores.get(outcome)
            zs = "" if z is None else f"{z:.4f}"
            lines.append(
                f"{outcome_label(outcome)},{self.counts.get(outcome, 0)},"
                f"{num},{den},{zs},{self.flips_p50},{self.flips_p99}"
            )
        if self.exhausted:
            lines.append(
                f"<budget-exhausted>,{self.exhausted},,,,{self.flips_p50},{self.flips_p99}"
            )
        if self.aborted:
            lines.append(
                f"<level-cap>,{self.aborted},,,,{self.flips_p50},{self.flips_p99}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self):
        return {
            "sampler": self.sampler_id,
            "seed": self.seed,
            "trials": self.trials,
            "exhausted": self.exhausted,
            "aborted": self.aborted,
            "rows": [
                {
                    "outcome": outcome_label(o),
                    "count": self.counts.get(o, 0),
                    "oracle": None
                    if self.oracle is None or o not in self.oracle
                    else format_rational(self.oracle[o]),
                    "z": self.z_scores.get(o),
                }
                for o in sorted(set(self.counts) | set(self.oracle or {}), key=outcome_label)
            ],
            "flips": {
                "p50": self.flips_p50,
                "p90": self.flips_p90,
                "p99": self.flips_p99,
                "max": self.flips_max,
            },
            "chi_square": None
            if self.chi2 is None
            else {
                "statistic": self.chi2.statistic,
                "dof": self.chi2.dof,
                "p_value": self.chi2.p_value,
                "pass": self.chi2.passed,
                "note": self.chi2.note,
            },
        }


def run_trials(
    sampler: Callable,
    biases,
    trials: int,
    seed: int = 0,
    budget: Optional[int] = None,
    oracle: Optional[dict] = None,
    sampler_id: str = "",
    alpha: float = DEFAULT_ALPHA,
) -> TrialReport:
    """trials independent runs of sampler(coins) on independently-seeded banks.

    Deterministic given (biases, seed, trials). z-scores are computed from the
    oracle probabilities (never from empirical frequencies); the chi-square
    verdict is attached when an oracle is supplied.
    """
    if trials < 1:
        raise UsageError("need at least one trial")
    template = CoinBank(biases, seed)
    counts: dict = {}
    exhausted = 0
    aborted = 0
    flips: list[int] = []
    for i in range(trials):
        bank = template.spawn(i)
        coins = BudgetedCoins(bank, FlipBudget(budget))
        try:
            outcome = sampler(coins)
        except BudgetExhausted:
            exhausted += 1
            flips.append(coins.flips_used)
            continue
        except LevelCapExceeded:
            aborted += 1
            flips.append(coins.flips_used)
            continue
        counts[outcome] = counts.get(outcome, 0) + 1
        flips.append(coins.flips_used)
    flips.sort()
    completed = trials - exhausted - aborted
    z_scores: dict = {}
    if oracle is not None and completed > 0:
        for outcome, prob in oracle.items():
            q = float(prob)
            obs = counts.get(outcome, 0)
            if q in (0.0, 1.0):
                z_scores[outcome] = 0.0 if obs == round(q * completed) else float("inf")
                continue
            z_scores[outcome] = (obs - completed * q) / math.sqrt(completed * q * (1 - q))
    chi2 = None
    if oracle is not None and completed > 0:
        chi2 = chi_square(counts, oracle, alpha)
    return TrialReport(
        sampler_id,
        seed,
        trials,
        counts,
        exhausted,
        aborted,
        oracle,
        z_scores,
        chi2,
        _quantile(flips, 0.50),
        _quantile(flips, 0.90),
        _quantile(flips, 0.99),
        flips[-1] if flips else 0,
    )


def within_3sigma(report: TrialReport, outcome, prob) -> bool:
    """|freq - prob| <= 3 sqrt(prob(1-prob)/N); exact outcomes for prob in {0,1}."""
    n = report.completed
    if n == 0:
        return False
    q = float(prob)
    obs = report.counts.get(outcome, 0)
    if q in (0.0, 1.0):
        return obs == round(q * n)
    return abs(obs / n - q) <= 3 * math.sqrt(q * (1 - q) / n)
