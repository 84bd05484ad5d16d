"""Stochastic selection policies and preference updates.

Each selecting agent (a user choosing a generator, a generator choosing a
retriever or router, a router choosing a target) owns a SelectorState: a
preference score per currently-active downstream agent plus three knobs.
Selection mixes a softmax over preferences with uniform exploration:

    p(a) = epsilon / n  +  (1 - epsilon) * softmax(theta / temperature)(a)

Feedback moves the chosen agent's preference toward the realized utility
with an exponential moving average at rate ``learning_rate``; nothing else
changes. Preference tables are keyed by agent id, or by (topic, agent id)
when per-topic preferences are enabled.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import AgentId
from .errors import DomainError, DuplicateAgent, EmptyCandidateSet, UnknownAgent
from .rng import choice_index

DEFAULT_EPSILON = 0.05
DEFAULT_TEMPERATURE = 0.1
DEFAULT_LEARNING_RATE = 0.1
DEFAULT_INIT_PREFERENCE = 0.5


@dataclass(frozen=True)
class PolicyParams:
    """Exploration / smoothing / adaptation knobs for one selector population."""

    epsilon: float = DEFAULT_EPSILON
    temperature: float = DEFAULT_TEMPERATURE
    learning_rate: float = DEFAULT_LEARNING_RATE
    init_preference: float = DEFAULT_INIT_PREFERENCE
    per_topic: bool = False

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise DomainError(f"epsilon must be in [0,1], got {self.epsilon}")
        if not self.temperature > 0.0:
            raise DomainError(f"temperature must be > 0, got {self.temperature}")
        if not 0.0 < self.learning_rate <= 1.0:
            raise DomainError(f"learning_rate must be in (0,1], got {self.learning_rate}")


@dataclass
class SelectorState:
    """Mutable per-selector preference table.

    ``tables`` maps a topic key (None in topic-agnostic mode) to an
    insertion-ordered {agent: preference} dict. The engine keeps each
    table's key set equal to the currently active downstream agents.
    """

    owner: AgentId
    params: PolicyParams = field(default_factory=PolicyParams)
    tables: dict[Optional[str], dict[AgentId, float]] = field(default_factory=dict)

    def topic_key(self, topic: Optional[str]) -> Optional[str]:
        return topic if self.params.per_topic else None

    def table(self, topic: Optional[str] = None) -> dict[AgentId, float]:
        """The preference table for a topic, created on first use.

        A fresh table starts every currently-known agent at the configured
        init preference; "currently known" is whatever the topic-agnostic
        template table holds, so lazily-created topic tables stay in sync
        with entries and exits.
        """
        key = self.topic_key(topic)
        if key not in self.tables:
            template = self.tables.get(None, {})
            self.tables[key] = {a: self.params.init_preference for a in template}
        return self.tables[key]

    @property
    def preferences(self) -> dict[AgentId, float]:
        """The topic-agnostic table (the only one in default mode)."""
        return self.table(None)

    def snapshot(self) -> dict:
        return {
            "owner": self.owner,
            "tables": {k if k is not None else "": dict(v) for k, v in self.tables.items()},
        }


def make_selector(
    owner: AgentId,
    candidates: Sequence[AgentId],
    params: PolicyParams,
) -> SelectorState:
    state = SelectorState(owner=owner, params=params)
    state.tables[None] = {a: params.init_preference for a in candidates}
    return state


@dataclass(frozen=True)
class SelectionDistribution:
    """Normalized selection probabilities over the candidate set."""

    probabilities: dict[AgentId, float]

    def __post_init__(self):
        total = sum(self.probabilities.values())
        if any(p < 0 for p in self.probabilities.values()) or abs(total - 1.0) > 1e-9:
            raise DomainError(f"probabilities must be >= 0 and sum to 1, got {total}")


def selection_distribution(
    state: SelectorState,
    candidates: Sequence[AgentId],
    topic: Optional[str] = None,
) -> SelectionDistribution:
    """Epsilon-mixed softmax over the candidates, in the given order.

    The softmax subtracts the max scaled preference before exponentiating
    so extreme preference/temperature ratios cannot overflow.
    """
    if not candidates:
        raise EmptyCandidateSet(f"selector {state.owner!r} has no candidates")
    table = state.table(topic)
    try:
        scaled = [table[a] / state.params.temperature for a in candidates]
    except KeyError as exc:
        raise UnknownAgent(
            f"selector {state.owner!r} has no preference entry for {exc.args[0]!r}"
        ) from None
    peak = max(scaled)
    weights = [math.exp(s - peak) for s in scaled]
    total = sum(weights)
    eps = state.params.epsilon
    n = len(candidates)
    probs = {
        a: eps / n + (1.0 - eps) * (w / total) for a, w in zip(candidates, weights)
    }
    return SelectionDistribution(probabilities=probs)


def select(
    state: SelectorState,
    candidates: Sequence[AgentId],
    rng: random.Random,
    topic: Optional[str] = None,
) -> AgentId:
    """Sample one candidate by inverse CDF, consuming exactly one rng draw."""
    dist = selection_distribution(state, candidates, topic=topic)
    idx = choice_index((dist.probabilities[a] for a in candidates), rng)
    return candidates[idx]


def update(
    state: SelectorState,
    chosen: AgentId,
    utility: float,
    topic: Optional[str] = None,
) -> SelectorState:
    """Move the chosen agent's preference toward the realized utility.

    theta_chosen <- (1 - lr) * theta_chosen + lr * utility; other entries
    are untouched. Mutates and returns the state.
    """
    if not math.isfinite(utility):
        raise DomainError(f"utility must be finite, got {utility}")
    table = state.table(topic)
    if chosen not in table:
        raise UnknownAgent(f"selector {state.owner!r} has no entry for {chosen!r}")
    lr = state.params.learning_rate
    table[chosen] = (1.0 - lr) * table[chosen] + lr * utility
    return state


def init_entrant(
    state: SelectorState,
    entrant: AgentId,
    topic: Optional[str] = None,
) -> SelectorState:
    """Give a new downstream agent a neutral starting preference.

    The entrant starts at the mean of the existing entries (the selector is
    indifferent until evidence arrives), or at the configured init
    preference when the table is empty. In per-topic mode the entrant is
    added to every existing topic table. Mutates and returns the state.
    """
    keys = list(state.tables) if topic is None else [state.topic_key(topic)]
    if not keys:
        keys = [None]
    for key in keys:
        table = state.tables.setdefault(key, {})
        if entrant in table:
            raise DuplicateAgent(
                f"selector {state.owner!r} already has an entry for {entrant!r}"
            )
        if table:
            table[entrant] = sum(table.values()) / len(table)
        else:
            table[entrant] = state.params.init_preference
    return state


def drop_agent(state: SelectorState, agent: AgentId) -> SelectorState:
    """Remove an exited agent from every topic table (missing entries ignored)."""
    for table in state.tables.values():
        table.pop(agent, None)
    return state
