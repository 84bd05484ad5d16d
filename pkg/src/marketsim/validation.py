"""Validation procedures: perturbation experiments, bootstrap sensitivity, rank agreement.

Three desk-scale checks that a simulated marketplace behaves credibly:

* perturb one agent (latency, cost, or quality) and compare paired runs
  under shared seeds, so any difference is attributable to the knob;
* bootstrap the sensitivity of a metric difference (achieved significance
  level plus a percentile confidence interval);
* Kendall rank correlation between a simulated agent ranking and an
  externally supplied one.

The bootstrap ASL counts resampled mean differences opposing the observed
sign, with exact zeros counted half. That keeps the degenerate paired
cases sensible: fully separated samples give ASL 0, identical samples
give ASL 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .config import ScenarioConfig
from .core import AgentId
from .engine import run
from .errors import DomainError, EmptySample, SetMismatch
from .metrics import market_share_series, retention_agent
from .oracle import Perturbation

__all__ = [
    "Perturbation",
    "BootstrapResult",
    "PerturbationComparison",
    "bootstrap_asl",
    "perturb_and_compare",
    "rank_correlation",
]

MIN_RESAMPLES = 1000


@dataclass(frozen=True)
class BootstrapResult:
    """Bootstrap of a mean difference: observed value, ASL, and percentile CI."""

    statistic: str
    observed: float
    resamples: int
    asl: float
    ci_low: float
    ci_high: float
    paired: bool

    def __post_init__(self):
        if not 0.0 <= self.asl <= 1.0:
            raise DomainError(f"ASL must be in [0,1], got {self.asl}")
        if self.ci_low > self.ci_high:
            raise DomainError("confidence interval bounds out of order")


def bootstrap_asl(
    samples_a: Sequence[float],
    samples_b: Sequence[float],
    resamples: int,
    rng: Union[int, np.random.Generator],
    paired: bool = True,
    statistic: str = "mean_difference",
) -> BootstrapResult:
    """Bootstrap the mean difference a - b.

    Paired mode resamples index-aligned differences; unpaired mode
    resamples each side independently. Deterministic given (samples,
    resamples, rng seed).
    """
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be non-empty")
    if resamples < MIN_RESAMPLES:
        raise DomainError(f"resamples must be >= {MIN_RESAMPLES}, got {resamples}")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)

    if paired:
        if a.size != b.size:
            raise DomainError("paired bootstrap requires equal-length samples")
        diffs = a - b
        observed = float(diffs.mean())
        idx = gen.integers(0, diffs.size, size=(resamples, diffs.size))
        means = diffs[idx].mean(axis=1)
    else:
        observed = float(a.mean() - b.mean())
        idx_a = gen.integers(0, a.size, size=(resamples, a.size))
        idx_b = gen.integers(0, b.size, size=(resamples, b.size))
        means = a[idx_a].mean(axis=1) - b[idx_b].mean(axis=1)

    zeros = float(np.count_nonzero(means == 0.0))
    if observed >= 0:
        opposing = float(np.count_nonzero(means < 0.0))
    else:
        opposing = float(np.count_nonzero(means > 0.0))
    asl = (opposing + 0.5 * zeros) / resamples
    ci_low, ci_high = (float(v) for v in np.percentile(means, [2.5, 97.5]))
    return BootstrapResult(
        statistic=statistic,
        observed=observed,
        resamples=resamples,
        asl=asl,
        ci_low=ci_low,
        ci_high=ci_high,
        paired=paired,
    )


@dataclass
class PerturbationComparison:
    """Per-seed paired statistics for a baseline vs. perturbed scenario."""

    perturbation: Perturbation
    seeds: list[int]
    baseline_share: list[float]
    perturbed_share: list[float]
    baseline_retention: list[Optional[float]]
    perturbed_retention: list[Optional[float]]

    @property
    def share_deltas(self) -> list[float]:
        return [p - b for p, b in zip(self.perturbed_share, self.baseline_share)]

    @property
    def retention_deltas(self) -> list[float]:
        """Paired retention differences over seeds where both sides are defined."""
        return [
            p - b
            for p, b in zip(self.perturbed_retention, self.baseline_retention)
            if p is not None and b is not None
        ]


def perturb_and_compare(
    scenario: ScenarioConfig,
    perturbation: Perturbation,
    seeds: Sequence[int],
) -> PerturbationComparison:
    """Run baseline and perturbed simulations under shared seeds.

    For each seed the two runs consume identical rng streams (perturbations
    never change draw counts), so a zero-magnitude perturbation replays the
    baseline exactly. Compares the target's mean windowed market share and
    its end-of-run retention.
    """
    if len(seeds) < 2:
        raise DomainError(f"perturbation comparison needs >= 2 seeds, got {len(seeds)}")
    target = perturbation.target
    stakeholder = scenario.graph.stakeholder_of(target)
    comparison = PerturbationComparison(
        perturbation=perturbation,
        seeds=list(seeds),
        baseline_share=[],
        perturbed_share=[],
        baseline_retention=[],
        perturbed_retention=[],
    )
    for seed in seeds:
        cfg = scenario.with_seed(seed)
        for perturb, shares, retentions in (
            (None, comparison.baseline_share, comparison.baseline_retention),
            (perturbation, comparison.perturbed_share, comparison.perturbed_retention),
        ):
            log = run(cfg, perturbation=perturb)
            series = market_share_series(log, stakeholder, cfg.window, horizon=cfg.horizon)
            mean_share = sum(series[t][target] for t in series) / len(series)
            shares.append(mean_share)
            retentions.append(retention_agent(log, target, cfg.retention_m))
    return comparison


def rank_correlation(ranking_a: Sequence[AgentId], ranking_b: Sequence[AgentId]) -> float:
    """Kendall tau (tau-a) between two strict rankings of the same agents."""
    if len(set(ranking_a)) != len(ranking_a) or len(set(ranking_b)) != len(ranking_b):
        raise SetMismatch("rankings must not contain duplicates")
    if set(ranking_a) != set(ranking_b):
        raise SetMismatch("rankings must cover the same agents")
    n = len(ranking_a)
    if n < 2:
        raise DomainError("rank correlation needs at least two agents")
    pos_b = {agent: i for i, agent in enumerate(ranking_b)}
    concordant = 0
    discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            if pos_b[ranking_a[i]] < pos_b[ranking_a[j]]:
                concordant += 1
            else:
                discordant += 1
    return (concordant - discordant) / (n * (n - 1) / 2)
