"""Agent-level and marketplace-level metrics over interaction logs.

Agent-level: windowed market share (fraction of interaction volume within
a sliding window) and customer retention (how much of a user's follow-up
traffic stays with an agent after first adoption). Marketplace-level:
concentration (HHI on the conventional 0-10000 scale and its fractional
twin, exposure disparity), dominance gap against a target exposure, and
expected exposure difference (squared L2 distance from the target).

Conventions pinned here:

* windows truncate at the start: for t < w the window is steps 1..t;
* retention indexes a user's own interaction sequence and truncates at
  end of log (denominator min(m, remaining interactions));
* undefined metric values are returned as None and serialized as empty
  CSV cells, never as 0;
* dominance gap reads "the top agent's share minus its target share",
  with ties on the top share broken by agent id ascending; the
  max-over-agents reading is exposed separately as dominance_gap_max.

All functions are pure over immutable logs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

from .config import ScenarioConfig
from .core import AgentId, StakeholderId
from .engine import SimulationLog
from .errors import AllZeroScores, DomainError, EmptyWindow, NotNormalized, SetMismatch

NORMALIZATION_TOL = 1e-9
HHI_SCALE = 10000.0


# -- rosters ----------------------------------------------------------


def _roster(log: SimulationLog, market: Union[StakeholderId, Sequence[AgentId]]) -> list[AgentId]:
    if isinstance(market, str):
        if log.scenario is None:
            raise ValueError(
                "log carries no scenario; pass the market as an explicit agent list"
            )
        return list(log.scenario.graph.stakeholder(market).agents)
    return list(market)


# -- market share -----------------------------------------------------


def market_share(
    log: SimulationLog,
    market: Union[StakeholderId, Sequence[AgentId]],
    t: int,
    w: int,
) -> dict[AgentId, float]:
    """Fraction of interaction volume each market agent received in steps (t-w, t]."""
    if t < 1 or w < 1:
        raise DomainError(f"t and w must be >= 1, got t={t}, w={w}")
    agents = _roster(log, market)
    lo = max(1, t - w + 1)
    counts = {a: 0 for a in agents}
    total = 0
    for rec in log.records:
        if lo <= rec.t <= t:
            total += 1
            for a in rec.trajectory:
                if a in counts:
                    counts[a] += 1
    if total == 0:
        raise EmptyWindow(f"no interactions in steps {lo}..{t}")
    return {a: counts[a] / total for a in agents}


def market_share_series(
    log: SimulationLog,
    market: Union[StakeholderId, Sequence[AgentId]],
    w: int,
    horizon: Optional[int] = None,
) -> dict[int, dict[AgentId, float]]:
    """market_share at every step 1..horizon, via a sliding window."""
    agents = _roster(log, market)
    if horizon is None:
        horizon = max((rec.t for rec in log.records), default=0)
    per_step: dict[int, dict[AgentId, int]] = {}
    step_totals: dict[int, int] = {}
    for rec in log.records:
        counts = per_step.setdefault(rec.t, {a: 0 for a in agents})
        step_totals[rec.t] = step_totals.get(rec.t, 0) + 1
        for a in rec.trajectory:
            if a in counts:
                counts[a] += 1
    series: dict[int, dict[AgentId, float]] = {}
    window_counts = {a: 0 for a in agents}
    window_total = 0
    for t in range(1, horizon + 1):
        if t in per_step:
            for a, c in per_step[t].items():
                window_counts[a] += c
            window_total += step_totals[t]
        drop = t - w
        if drop >= 1 and drop in per_step:
            for a, c in per_step[drop].items():
                window_counts[a] -= c
            window_total -= step_totals[drop]
        if window_total == 0:
            raise EmptyWindow(f"no interactions in steps {max(1, t - w + 1)}..{t}")
        series[t] = {a: window_counts[a] / window_total for a in agents}
    return series


# -- retention --------------------------------------------------------


def retention_user(log: SimulationLog, user: AgentId, agent: AgentId, m: int) -> Optional[float]:
    """Share of the user's next min(m, remaining) interactions that stay with the agent.

    None when the user never selected the agent, or adopted it on their
    very last interaction.
    """
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    sequence = [rec for rec in log.records if rec.user == user]
    adoption = None
    for i, rec in enumerate(sequence):
        if agent in rec.trajectory:
            adoption = i
            break
    if adoption is None:
        return None
    following = sequence[adoption + 1 : adoption + 1 + m]
    if not following:
        return None
    kept = sum(1 for rec in following if agent in rec.trajectory)
    return kept / len(following)


def adopters(log: SimulationLog, agent: AgentId) -> list[AgentId]:
    """Users who selected the agent at least once, in order of first appearance."""
    seen: dict[AgentId, bool] = {}
    for rec in log.records:
        if rec.user not in seen:
            seen[rec.user] = False
        if agent in rec.trajectory:
            seen[rec.user] = True
    return [u for u, tried in seen.items() if tried]


def retention_agent(log: SimulationLog, agent: AgentId, m: int) -> Optional[float]:
    """Mean of defined user-level retentions over the agent's adopters; None if none."""
    values = [
        v
        for u in adopters(log, agent)
        if (v := retention_user(log, u, agent, m)) is not None
    ]
    if not values:
        return None
    return sum(values) / len(values)


# -- concentration and exposure ---------------------------------------


def _check_normalized(shares: Mapping[AgentId, float]) -> None:
    if not shares:
        raise NotNormalized("shares map is empty")
    if any(s < 0 for s in shares.values()):
        raise NotNormalized("shares must be >= 0")
    total = sum(shares.values())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"shares sum to {total}, expected 1 within {NORMALIZATION_TOL}")


def hhi(shares: Mapping[AgentId, float]) -> float:
    """Sum of squared shares on the conventional 0-10000 scale."""
    _check_normalized(shares)
    return HHI_SCALE * sum(s * s for s in shares.values())


def exposure_disparity(shares: Mapping[AgentId, float]) -> float:
    """Sum of squared fractional shares; identically hhi(shares) / 10000."""
    _check_normalized(shares)
    return sum(s * s for s in shares.values())


@dataclass(frozen=True)
class TargetExposure:
    """A target share distribution to compare realized traffic against."""

    shares: dict[AgentId, float]
    mode: str = "merit_static"

    def __post_init__(self):
        if any(v < 0 for v in self.shares.values()):
            raise NotNormalized("target exposure values must be >= 0")
        total = sum(self.shares.values())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"target exposure sums to {total}, expected 1")


def fair_share(scores: Mapping[AgentId, float]) -> TargetExposure:
    """Merit-proportional target: each agent's score over the score total."""
    if any(v < 0 for v in scores.values()):
        raise DomainError("merit scores must be >= 0")
    total = sum(scores.values())
    if not scores or total <= 0:
        raise AllZeroScores("at least one merit score must be positive")
    return TargetExposure(shares={a: v / total for a, v in scores.items()}, mode="merit_static")


def _exposure_map(target: Union[TargetExposure, Mapping[AgentId, float]]) -> Mapping[AgentId, float]:
    return target.shares if isinstance(target, TargetExposure) else target


def _check_same_agents(shares: Mapping, target: Mapping) -> None:
    if set(shares) != set(target):
        missing = set(shares) ^ set(target)
        raise SetMismatch(f"share and target agent sets differ on {sorted(missing)}")


def top_agent(shares: Mapping[AgentId, float]) -> AgentId:
    """Agent with the highest share; ties break toward the smallest agent id."""
    best = max(shares.values())
    return min(a for a, s in shares.items() if s == best)


def dominance_gap(
    shares: Mapping[AgentId, float],
    target: Union[TargetExposure, Mapping[AgentId, float]],
) -> float:
    """Top agent's realized share minus that same agent's target share."""
    eps = _exposure_map(target)
    _check_same_agents(shares, eps)
    leader = top_agent(shares)
    return shares[leader] - eps[leader]


def dominance_gap_max(
    shares: Mapping[AgentId, float],
    target: Union[TargetExposure, Mapping[AgentId, float]],
) -> float:
    """Alternative reading: the largest per-agent excess over target."""
    eps = _exposure_map(target)
    _check_same_agents(shares, eps)
    return max(shares[a] - eps[a] for a in shares)


def expected_exposure(
    shares: Mapping[AgentId, float],
    target: Union[TargetExposure, Mapping[AgentId, float]],
) -> float:
    """Squared L2 distance between realized shares and the target exposure."""
    eps = _exposure_map(target)
    _check_same_agents(shares, eps)
    return sum((shares[a] - eps[a]) ** 2 for a in shares)


def fair_share_delta(
    shares: Mapping[AgentId, float],
    target: Union[TargetExposure, Mapping[AgentId, float]],
) -> dict[AgentId, float]:
    """Per-agent realized share minus target share."""
    eps = _exposure_map(target)
    _check_same_agents(shares, eps)
    return {a: shares[a] - eps[a] for a in shares}


def windowed_merit(
    log: SimulationLog, agents: Sequence[AgentId], t: int, w: int
) -> dict[AgentId, float]:
    """Utility accrued per agent within the window, floored at zero."""
    lo = max(1, t - w + 1)
    acc = {a: 0.0 for a in agents}
    for rec in log.records:
        if lo <= rec.t <= t:
            for a in rec.trajectory:
                if a in acc:
                    acc[a] += rec.outcome.utility
    return {a: max(0.0, v) for a, v in acc.items()}


def target_for(
    mode: str,
    agents: Sequence[AgentId],
    *,
    merit_scores: Optional[Mapping[AgentId, float]] = None,
    log: Optional[SimulationLog] = None,
    t: Optional[int] = None,
    w: Optional[int] = None,
) -> TargetExposure:
    """Target exposure over the given (active) agents for one step.

    merit_windowed falls back to uniform when no agent accrued positive
    utility in the window, so the target stays a distribution.
    """
    agents = list(agents)
    if not agents:
        raise DomainError("target exposure needs at least one agent")
    if mode == "uniform":
        return TargetExposure(shares={a: 1.0 / len(agents) for a in agents}, mode="uniform")
    if mode == "merit_static":
        if merit_scores is None:
            raise DomainError("merit_static target requires merit scores")
        return fair_share({a: merit_scores[a] for a in agents})
    if mode == "merit_windowed":
        if log is None or t is None or w is None:
            raise DomainError("merit_windowed target requires log, t, and w")
        merit = windowed_merit(log, agents, t, w)
        if sum(merit.values()) <= 0:
            return TargetExposure(shares={a: 1.0 / len(agents) for a in agents}, mode="merit_windowed")
        total = sum(merit.values())
        return TargetExposure(
            shares={a: v / total for a, v in merit.items()}, mode="merit_windowed"
        )
    raise DomainError(f"unknown target exposure mode {mode!r}")


# -- full report ------------------------------------------------------


@dataclass
class MetricsReport:
    """All metric series for one run, over the user-facing market."""

    market_agents: list[AgentId]
    window: int
    retention_m: int
    horizon: int
    shares: dict[int, dict[AgentId, float]]
    hhi_series: dict[int, float]
    eed_series: dict[int, float]
    dominance_series: dict[int, float]
    dominance_max_series: dict[int, float]
    ee_series: dict[int, float]
    retention: dict[AgentId, Optional[float]]
    n_adopters: dict[AgentId, int]
    final_target: TargetExposure
    merit_scores: Optional[dict[AgentId, float]]
    fair_delta: dict[AgentId, float]
    config_digest: str


def compute_report(log: SimulationLog, scenario: Optional[ScenarioConfig] = None) -> MetricsReport:
    """Compute every metric series for the log's user-facing market.

    Concentration (HHI/EE-D) uses shares over the full market roster, so
    traffic of recently exited agents still counts while it remains in the
    window. Target-relative metrics (dominance gap, EE, fair-share delta)
    compare over the agents active at each step, since the target is only
    defined for active agents.
    """
    scenario = scenario if scenario is not None else log.scenario
    if scenario is None:
        raise ValueError("compute_report requires a scenario")
    market = list(scenario.market_agents())
    horizon = scenario.horizon
    w = scenario.window
    shares = market_share_series(log, market, w, horizon=horizon)

    hhi_series = {}
    eed_series = {}
    dominance_series = {}
    dominance_max_series = {}
    ee_series = {}
    target = None
    for t in range(1, horizon + 1):
        st = shares[t]
        hhi_series[t] = hhi(st)
        eed_series[t] = exposure_disparity(st)
        active = [a for a in market if scenario.graph.profile(a).active_at(t)]
        target = target_for(
            scenario.target_mode,
            active,
            merit_scores=scenario.merit_scores,
            log=log,
            t=t,
            w=w,
        )
        active_shares = {a: st[a] for a in active}
        dominance_series[t] = dominance_gap(active_shares, target)
        dominance_max_series[t] = dominance_gap_max(active_shares, target)
        ee_series[t] = expected_exposure(active_shares, target)

    retention = {a: retention_agent(log, a, scenario.retention_m) for a in market}
    n_adopters = {a: len(adopters(log, a)) for a in market}

    final_active = [a for a in market if scenario.graph.profile(a).active_at(horizon)]
    final_shares = {a: shares[horizon][a] for a in final_active}
    fair_delta = fair_share_delta(final_shares, target)

    return MetricsReport(
        market_agents=market,
        window=w,
        retention_m=scenario.retention_m,
        horizon=horizon,
        shares=shares,
        hhi_series=hhi_series,
        eed_series=eed_series,
        dominance_series=dominance_series,
        dominance_max_series=dominance_max_series,
        ee_series=ee_series,
        retention=retention,
        n_adopters=n_adopters,
        final_target=target,
        merit_scores=scenario.merit_scores,
        fair_delta=fair_delta,
        config_digest=log.config_digest,
    )


def _cell(value) -> str:
    return "" if value is None else repr(value)


def write_report(report: MetricsReport, out_dir) -> None:
    """Emit the four CSV files plus a JSON summary of scalar aggregates."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "market_share.csv", "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "agent", "share"])
        for t in sorted(report.shares):
            for agent in report.market_agents:
                writer.writerow([t, agent, repr(report.shares[t][agent])])

    with open(out / "concentration.csv", "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "hhi", "eed", "dominance_gap", "ee"])
        for t in sorted(report.hhi_series):
            writer.writerow(
                [
                    t,
                    repr(report.hhi_series[t]),
                    repr(report.eed_series[t]),
                    repr(report.dominance_series[t]),
                    repr(report.ee_series[t]),
                ]
            )

    with open(out / "retention.csv", "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["agent", "m", "cr", "n_adopters"])
        for agent in report.market_agents:
            writer.writerow(
                [agent, report.retention_m, _cell(report.retention[agent]), report.n_adopters[agent]]
            )

    with open(out / "fair_share.csv", "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["agent", "score", "epsilon_star", "delta_fs"])
        for agent in report.market_agents:
            score = report.merit_scores.get(agent) if report.merit_scores else None
            eps = report.final_target.shares.get(agent)
            delta = report.fair_delta.get(agent)
            writer.writerow([agent, _cell(score), _cell(eps), _cell(delta)])

    final_t = report.horizon
    summary = {
        "config_digest": report.config_digest,
        "market_agents": report.market_agents,
        "window": report.window,
        "retention_m": report.retention_m,
        "horizon": report.horizon,
        "final": {
            "t": final_t,
            "hhi": report.hhi_series[final_t],
            "eed": report.eed_series[final_t],
            "ee": report.ee_series[final_t],
            "dominance_gap": report.dominance_series[final_t],
            "dominance_gap_max": report.dominance_max_series[final_t],
            "top_agent": top_agent(report.shares[final_t]),
            "shares": report.shares[final_t],
        },
        "retention": report.retention,
        "n_adopters": report.n_adopters,
        "fair_share_delta": report.fair_delta,
        "target_exposure": {"mode": report.final_target.mode, "shares": report.final_target.shares},
    }
    with open(out / "summary.json", "w", newline="\n", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
