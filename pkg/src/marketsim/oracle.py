"""Per-interaction quality scoring and utility evaluation.

Quality scores never come from live model calls. A scenario binds each
quality-bearing agent to one of three score sources:

* ``cached_table``: offline scores loaded from CSV, keyed by
  (query, agent) or by (query, generator, retriever);
* ``bernoulli``: synthetic correctness, 1 with probability p, else 0;
* ``constant``: a fixed quality value.

The realized utility of a trajectory combines the quality score with the
cost and latency accumulated along the trajectory:

    utility = alpha * quality - beta * cost - gamma * latency

Controlled perturbations (quality delta, cost/latency multipliers on one
target agent from a given step) are applied here, after scoring, so score
tables never need regeneration.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .core import AgentId, GovernanceGraph, QueryId
from .errors import ConfigInvalid, DomainError, MissingScore

ORACLE_KINDS = ("cached_table", "bernoulli", "constant")


@dataclass(frozen=True)
class ScoreTable:
    """Cached quality scores, single-keyed or (generator, retriever)-paired."""

    scores: Mapping[tuple, float]
    paired: bool

    def lookup(self, query: QueryId, agent: AgentId) -> float:
        if self.paired:
            raise MissingScore(
                f"table is keyed by (query, generator, retriever); "
                f"single lookup for ({query!r}, {agent!r}) is ambiguous"
            )
        try:
            return self.scores[(query, agent)]
        except KeyError:
            raise MissingScore(f"no cached score for query {query!r}, agent {agent!r}") from None

    def lookup_pair(self, query: QueryId, generator: AgentId, retriever: AgentId) -> float:
        if not self.paired:
            raise MissingScore("table is keyed by (query, agent); pair lookup unsupported")
        try:
            return self.scores[(query, generator, retriever)]
        except KeyError:
            raise MissingScore(
                f"no cached score for query {query!r}, generator {generator!r}, "
                f"retriever {retriever!r}"
            ) from None


SINGLE_HEADER = ["query_id", "agent_id", "score"]
PAIRED_HEADER = ["query_id", "generator_id", "retriever_id", "score"]


def load_score_table(path) -> ScoreTable:
    """Load a score table CSV; duplicate keys and out-of-range scores are errors."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigInvalid(f"score table {path}: empty file") from None
        if header == SINGLE_HEADER:
            paired = False
        elif header == PAIRED_HEADER:
            paired = True
        else:
            raise ConfigInvalid(
                f"score table {path}: header must be {','.join(SINGLE_HEADER)} "
                f"or {','.join(PAIRED_HEADER)}, got {','.join(header)}"
            )
        scores: dict[tuple, float] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ConfigInvalid(f"score table {path}: line {lineno}: wrong column count")
            key = tuple(row[:-1])
            try:
                score = float(row[-1])
            except ValueError:
                raise ConfigInvalid(
                    f"score table {path}: line {lineno}: score {row[-1]!r} is not a number"
                ) from None
            if not 0.0 <= score <= 1.0:
                raise ConfigInvalid(
                    f"score table {path}: line {lineno}: score {score} outside [0,1]"
                )
            if key in scores:
                raise ConfigInvalid(f"score table {path}: line {lineno}: duplicate key {key}")
            scores[key] = score
    return ScoreTable(scores=scores, paired=paired)


@dataclass(frozen=True)
class OracleBinding:
    """Score source for one quality-bearing agent."""

    kind: str
    p: Union[float, Mapping[str, float], None] = None  # bernoulli: scalar or per-topic
    q: Optional[float] = None  # constant
    table: Optional[ScoreTable] = None  # cached_table

    def __post_init__(self):
        if self.kind not in ORACLE_KINDS:
            raise ConfigInvalid(f"unknown oracle kind {self.kind!r}")
        if self.kind == "bernoulli":
            values = self.p.values() if isinstance(self.p, Mapping) else [self.p]
            for v in values:
                if v is None or not 0.0 <= v <= 1.0:
                    raise DomainError(f"bernoulli p must be in [0,1], got {v}")
        elif self.kind == "constant":
            if self.q is None or not 0.0 <= self.q <= 1.0:
                raise DomainError(f"constant quality must be in [0,1], got {self.q}")
        elif self.table is None:
            raise ConfigInvalid("cached_table binding requires a table")


def score_quality(
    binding: OracleBinding,
    query: QueryId,
    agent: AgentId,
    rng: random.Random,
    topic: Optional[str] = None,
) -> float:
    """Quality in [0,1] for one (query, agent). Bernoulli consumes one rng draw."""
    if binding.kind == "cached_table":
        return binding.table.lookup(query, agent)
    if binding.kind == "bernoulli":
        if isinstance(binding.p, Mapping):
            try:
                p = binding.p[topic]
            except KeyError:
                raise MissingScore(
                    f"bernoulli binding for {agent!r} has no rate for topic {topic!r}"
                ) from None
        else:
            p = binding.p
        return 1.0 if rng.random() < p else 0.0
    return binding.q


@dataclass(frozen=True)
class UtilityCoefficients:
    """Per-user sensitivity to quality, cost, and latency."""

    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name, v in (("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)):
            if not math.isfinite(v) or v < 0:
                raise DomainError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class UtilityOutcome:
    """One interaction's quality/cost/latency components and combined utility."""

    quality: float
    cost: float
    latency: float
    utility: float

    def recompute(self, coeffs: UtilityCoefficients) -> float:
        # mirrors evaluate() exactly, so stored utility is bit-reproducible
        return coeffs.alpha * self.quality - coeffs.beta * self.cost - coeffs.gamma * self.latency


def evaluate(coeffs: UtilityCoefficients, quality: float, cost: float, latency: float) -> UtilityOutcome:
    """Combine components into a UtilityOutcome; inputs are domain-checked."""
    if not 0.0 <= quality <= 1.0:
        raise DomainError(f"quality must be in [0,1], got {quality}")
    if cost < 0 or latency < 0:
        raise DomainError(f"cost and latency must be >= 0, got {cost}, {latency}")
    utility = coeffs.alpha * quality - coeffs.beta * cost - coeffs.gamma * latency
    return UtilityOutcome(quality=quality, cost=cost, latency=latency, utility=utility)


@dataclass(frozen=True)
class Perturbation:
    """Controlled degradation of one agent from a given step onward.

    Knobs: ``quality_delta`` shifts the scored quality (clamped to [0,1]);
    ``cost_multiplier`` / ``latency_multiplier`` scale the target's own
    contribution to trajectory cost/latency. Applied after scoring, so the
    underlying oracle and its rng draws are untouched.
    """

    target: AgentId
    knob: str  # latency_multiplier | quality_delta | cost_multiplier
    magnitude: float
    active_from: int = 1

    def __post_init__(self):
        if self.knob not in ("latency_multiplier", "quality_delta", "cost_multiplier"):
            raise DomainError(f"unknown perturbation knob {self.knob!r}")
        if self.knob.endswith("multiplier") and not self.magnitude > 0:
            raise DomainError(f"{self.knob} must be > 0, got {self.magnitude}")
        if self.active_from < 1:
            raise DomainError("active_from must be >= 1")

    def active_at(self, step: Optional[int]) -> bool:
        return step is None or step >= self.active_from


def quality_bearing(trajectory: Sequence[AgentId], graph: GovernanceGraph) -> tuple[AgentId, Optional[AgentId]]:
    """Resolve whose score defines the trajectory's quality.

    Returns (primary, retriever): primary is the deepest generator if one
    was traversed, otherwise the deepest non-router agent (falling back to
    the last agent); retriever is the deepest traversed retriever, if any.
    """
    if not trajectory:
        raise DomainError("trajectory must be non-empty")
    generator = None
    retriever = None
    non_router = None
    for a in trajectory:
        kind = graph.stakeholder(graph.stakeholder_of(a)).kind
        if kind == "generator":
            generator = a
        elif kind == "retriever":
            retriever = a
        if kind != "router":
            non_router = a
    primary = generator if generator is not None else (non_router or trajectory[-1])
    return primary, retriever


def trajectory_utility(
    trajectory: Sequence[AgentId],
    coeffs: UtilityCoefficients,
    binding: OracleBinding,
    query: QueryId,
    rng: random.Random,
    *,
    graph: GovernanceGraph,
    topic: Optional[str] = None,
    perturbation: Optional[Perturbation] = None,
    step: Optional[int] = None,
) -> UtilityOutcome:
    """Score a realized trajectory and combine with its summed cost/latency.

    Quality comes from the quality-bearing agent's binding; when the
    trajectory includes a retriever and the binding is a paired score
    table, the (generator, retriever) composition key is used instead.
    """
    primary, retriever = quality_bearing(trajectory, graph)
    if binding.kind == "cached_table" and binding.table.paired and retriever is not None:
        quality = binding.table.lookup_pair(query, primary, retriever)
    else:
        quality = score_quality(binding, query, primary, rng, topic=topic)

    perturb = perturbation if perturbation is not None and perturbation.active_at(step) else None
    if perturb is not None and perturb.knob == "quality_delta" and perturb.target in (primary, retriever):
        quality = min(1.0, max(0.0, quality + perturb.magnitude))

    cost = 0.0
    latency = 0.0
    for a in trajectory:
        prof = graph.profile(a)
        c, l = prof.unit_cost, prof.latency
        if perturb is not None and a == perturb.target:
            if perturb.knob == "cost_multiplier":
                c = c * perturb.magnitude
            elif perturb.knob == "latency_multiplier":
                l = l * perturb.magnitude
        cost += c
        latency += l
    return evaluate(coeffs, quality, cost, latency)
