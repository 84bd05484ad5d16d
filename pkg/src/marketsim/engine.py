"""Discrete-time simulation loop and the interaction log.

Each step: apply scheduled agent entries/exits, sample a user batch,
assign queries, walk each sampled user's trajectory down the governance
graph (selecting one downstream agent wherever more than one is active),
score the trajectory, and feed the realized utility back to every
selector along it.

Determinism contract: a run is a pure function of its ScenarioConfig.
Every step draws from a dedicated stream derived from (seed, "step", t),
and within a step draws happen in a fixed documented order (batch
sampling, query assignment, then per-user selection and scoring in user
declaration order). Two runs of the same config are byte-identical, and
logs from different seeds share no rng state.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .config import ScenarioConfig
from .core import AgentId, QueryId, QueryItem, StakeholderId
from .errors import (
    ConfigInvalid,
    DigestMismatch,
    DivergenceAt,
    LogParseError,
    MissingScore,
    PoolExhausted,
)
from .oracle import Perturbation, UtilityOutcome, quality_bearing, trajectory_utility
from .policies import (
    SelectorState,
    drop_agent,
    init_entrant,
    make_selector,
    select,
    update,
)
from .rng import sample_prefix, stream


@dataclass(frozen=True)
class InteractionRecord:
    """One realized interaction: who asked what, which agents served it, and the outcome."""

    t: int
    user: AgentId
    query: QueryId
    trajectory: tuple[AgentId, ...]
    outcome: UtilityOutcome


@dataclass
class SimulationLog:
    """Complete run output: digest-stamped records plus final selector states."""

    config_digest: str
    records: list[InteractionRecord]
    final_states: dict[AgentId, dict] = field(default_factory=dict)
    scenario: Optional[ScenarioConfig] = None
    raw_lines: Optional[list[str]] = None  # original serialized records, when loaded from disk


def record_line(rec: InteractionRecord) -> str:
    return json.dumps(
        {
            "t": rec.t,
            "user": rec.user,
            "query": rec.query,
            "trajectory": list(rec.trajectory),
            "Q": rec.outcome.quality,
            "C": rec.outcome.cost,
            "L": rec.outcome.latency,
            "mu": rec.outcome.utility,
        },
        separators=(",", ":"),
    )


def write_log(log: SimulationLog, path) -> None:
    """JSON Lines: a header line with the config digest, then one record per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps({"config_digest": log.config_digest}, separators=(",", ":")) + "\n")
        for rec in log.records:
            fh.write(record_line(rec) + "\n")


def load_log(path) -> SimulationLog:
    path = Path(path)
    records: list[InteractionRecord] = []
    raw_lines: list[str] = []
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise LogParseError(f"{path}: line 1: empty log file")
        try:
            header = json.loads(header_line)
            digest = header["config_digest"]
        except (json.JSONDecodeError, TypeError, KeyError):
            raise LogParseError(f"{path}: line 1: expected a config_digest header") from None
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                obj = json.loads(line)
                rec = InteractionRecord(
                    t=obj["t"],
                    user=obj["user"],
                    query=obj["query"],
                    trajectory=tuple(obj["trajectory"]),
                    outcome=UtilityOutcome(
                        quality=obj["Q"], cost=obj["C"], latency=obj["L"], utility=obj["mu"]
                    ),
                )
            except (json.JSONDecodeError, TypeError, KeyError) as exc:
                raise LogParseError(f"{path}: line {lineno}: malformed record ({exc})") from None
            records.append(rec)
            raw_lines.append(line)
    return SimulationLog(config_digest=digest, records=records, raw_lines=raw_lines)


class Engine:
    """Single-owner, strictly sequential simulation state.

    Not shareable across threads; parallelism belongs at the level of
    independent runs. ``perturbation`` is a validation-harness hook: the
    produced log keeps the unperturbed config digest and is therefore not
    replayable from the config alone.
    """

    def __init__(self, scenario: ScenarioConfig, perturbation: Optional[Perturbation] = None):
        self.scenario = scenario
        self.perturbation = perturbation
        self.graph = scenario.graph
        self.states: dict[AgentId, SelectorState] = {}
        self._pool_remaining: list[QueryItem] = list(scenario.pool.items)
        self._applied_through = 0  # schedule applied for steps <= this

    # -- schedule ------------------------------------------------------

    def _active(self, sid: StakeholderId, t: int) -> list[AgentId]:
        return [
            a for a in self.graph.stakeholder(sid).agents if self.graph.profile(a).active_at(t)
        ]

    def _candidates(self, sid: StakeholderId, t: int) -> list[AgentId]:
        return [a for succ in self.graph.successors(sid) for a in self._active(succ, t)]

    def _is_selector(self, agent: AgentId) -> bool:
        return bool(self.graph.successors(self.graph.stakeholder_of(agent)))

    def _apply_schedule(self, t: int) -> None:
        """Apply exits then entries for step t: tables always mirror the active set."""
        exiting = [
            a
            for s in self.graph.stakeholders
            for a in s.agents
            if self.graph.profile(a).exit_step == t
        ]
        for agent in exiting:
            self.states.pop(agent, None)
            for state in self.states.values():
                drop_agent(state, agent)

        entering = [
            a
            for s in self.graph.stakeholders
            for a in s.agents
            if self.graph.profile(a).entry_step == t
        ]
        for agent in entering:
            sid = self.graph.stakeholder_of(agent)
            for owner, state in self.states.items():
                owner_sid = self.graph.stakeholder_of(owner)
                if sid in self.graph.successors(owner_sid):
                    init_entrant(state, agent)
        for agent in entering:
            if self._is_selector(agent):
                sid = self.graph.stakeholder_of(agent)
                params = self.scenario.policies[sid]
                self.states[agent] = make_selector(agent, self._candidates(sid, t), params)

    # -- one step ------------------------------------------------------

    def _draw_query(self, rng: random.Random) -> QueryItem:
        if self.scenario.sampling == "without_replacement":
            if not self._pool_remaining:
                raise PoolExhausted("query pool exhausted under without_replacement sampling")
            idx = int(rng.random() * len(self._pool_remaining))
            idx = min(idx, len(self._pool_remaining) - 1)
            return self._pool_remaining.pop(idx)
        items = self.scenario.pool.items
        idx = min(int(rng.random() * len(items)), len(items) - 1)
        return items[idx]

    def _walk(self, user: AgentId, query: QueryItem, t: int, rng: random.Random) -> list[AgentId]:
        trajectory: list[AgentId] = []
        selector = user
        sid = self.graph.stakeholder_of(user)
        while True:
            candidates = self._candidates(sid, t)
            if not candidates:
                break
            if len(candidates) == 1:
                chosen = candidates[0]  # no choice: no rng draw, keeps streams stable
            else:
                chosen = select(self.states[selector], candidates, rng, topic=query.topic)
            trajectory.append(chosen)
            selector = chosen
            sid = self.graph.stakeholder_of(chosen)
        return trajectory

    def _apply_updates(self, user: AgentId, trajectory: Sequence[AgentId], utility: float, topic):
        prev = user
        for chosen in trajectory:
            state = self.states.get(prev)
            if state is not None:
                update(state, chosen, utility, topic=topic)
            prev = chosen

    def step(self, t: int) -> list[InteractionRecord]:
        """Run one simulation step, returning its batch of interaction records."""
        if not 1 <= t <= self.scenario.horizon:
            raise ConfigInvalid(f"step {t} outside horizon 1..{self.scenario.horizon}")
        while self._applied_through < t:
            self._apply_schedule(self._applied_through + 1)
            self._applied_through += 1

        rng = stream(self.scenario.seed, "step", t)
        batch = sample_prefix(self.scenario.users, self.scenario.batch_size, rng)
        chosen_users = set(batch)
        batch = [u for u in self.scenario.users if u in chosen_users]  # declaration order
        queries = [self._draw_query(rng) for _ in batch]

        records: list[InteractionRecord] = []
        pending = []
        for user, query in zip(batch, queries):
            trajectory = self._walk(user, query, t, rng)
            primary, _ = quality_bearing(trajectory, self.graph)
            binding = self.scenario.bindings.get(primary)
            if binding is None:
                raise MissingScore(f"no oracle binding for quality-bearing agent {primary!r}")
            outcome = trajectory_utility(
                trajectory,
                self.scenario.coefficients[user],
                binding,
                query.id,
                rng,
                graph=self.graph,
                topic=query.topic,
                perturbation=self.perturbation,
                step=t,
            )
            records.append(
                InteractionRecord(
                    t=t, user=user, query=query.id, trajectory=tuple(trajectory), outcome=outcome
                )
            )
            if self.scenario.sync_mode == "sync":
                pending.append((user, trajectory, outcome.utility, query.topic))
            else:
                self._apply_updates(user, trajectory, outcome.utility, query.topic)
        for args in pending:
            self._apply_updates(*args)
        return records

    def run(self) -> SimulationLog:
        records: list[InteractionRecord] = []
        for t in range(1, self.scenario.horizon + 1):
            records.extend(self.step(t))
        final = {owner: state.snapshot() for owner, state in self.states.items()}
        return SimulationLog(
            config_digest=self.scenario.digest,
            records=records,
            final_states=final,
            scenario=self.scenario,
        )


def run(scenario: ScenarioConfig, perturbation: Optional[Perturbation] = None) -> SimulationLog:
    """Execute the full horizon and return the complete log."""
    return Engine(scenario, perturbation=perturbation).run()


def replay(log: SimulationLog, scenario: ScenarioConfig) -> SimulationLog:
    """Re-run the scenario and assert the stored log is byte-identical.

    Raises DigestMismatch when the config does not match the log's header,
    and DivergenceAt naming the first differing (step, record) otherwise.
    Returns the freshly computed log on success.
    """
    if log.config_digest != scenario.digest:
        raise DigestMismatch(
            f"log was produced by config {log.config_digest[:12]}..., "
            f"given config has digest {scenario.digest[:12]}..."
        )
    fresh = run(scenario)
    stored_lines = log.raw_lines if log.raw_lines is not None else [record_line(r) for r in log.records]
    fresh_lines = [record_line(r) for r in fresh.records]
    batch = scenario.batch_size
    for i, (stored, new) in enumerate(zip(stored_lines, fresh_lines)):
        if stored != new:
            raise DivergenceAt(step=i // batch + 1, record_index=i % batch,
                               detail=f"stored {stored} != recomputed {new}")
    if len(stored_lines) != len(fresh_lines):
        i = min(len(stored_lines), len(fresh_lines))
        raise DivergenceAt(step=i // batch + 1, record_index=i % batch,
                           detail=f"log has {len(stored_lines)} records, expected {len(fresh_lines)}")
    return fresh
