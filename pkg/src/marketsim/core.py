"""Static marketplace structure: stakeholders, agents, governance graph, query pool.

A stakeholder is a population of agents sharing one functional role (user,
generator, retriever, router). The governance graph is a DAG over
stakeholders whose edges state which role may select (call, route to,
delegate to) which other role. One stakeholder must have the user role; it
is the root every interaction starts from, so every other stakeholder must
be reachable from it.

Everything here is immutable after construction and safe to share
read-only across concurrent simulation runs. All iteration follows
declaration order, which is what makes runs bit-for-bit reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    CycleDetected,
    DuplicateAgent,
    NoUserStakeholder,
    UnknownAgent,
    UnknownStakeholder,
    UnreachableStakeholder,
)

StakeholderId = str
AgentId = str
QueryId = str

STAKEHOLDER_KINDS = ("user", "generator", "retriever", "router", "other")

FROM_START = 1  # entry_step value meaning "active from the first step"


@dataclass(frozen=True)
class Stakeholder:
    """A population of agents sharing one functional role."""

    id: StakeholderId
    kind: str
    agents: tuple[AgentId, ...] = ()

    def __post_init__(self):
        if not self.id:
            raise UnknownStakeholder("stakeholder id must be non-empty")
        if self.kind not in STAKEHOLDER_KINDS:
            raise UnknownStakeholder(
                f"stakeholder {self.id!r} has unknown kind {self.kind!r}"
            )
        object.__setattr__(self, "agents", tuple(self.agents))


@dataclass(frozen=True)
class AgentProfile:
    """Per-agent operating profile: cost, latency and lifetime.

    ``entry_step``/``exit_step`` bound the half-open interval
    [entry_step, exit_step) of steps during which the agent is selectable;
    ``exit_step=None`` means it never exits. Cost and latency are abstract
    per-query units aggregated along a trajectory.
    """

    id: AgentId
    stakeholder: StakeholderId
    unit_cost: float = 0.0
    latency: float = 0.0
    entry_step: int = FROM_START
    exit_step: Optional[int] = None

    def __post_init__(self):
        if not self.id:
            raise DuplicateAgent("agent id must be non-empty")
        if self.unit_cost < 0 or self.latency < 0:
            raise ValueError(f"agent {self.id!r}: unit_cost and latency must be >= 0")
        if self.entry_step < 1:
            raise ValueError(f"agent {self.id!r}: entry_step must be >= 1")
        if self.exit_step is not None and not (self.entry_step < self.exit_step):
            raise ValueError(f"agent {self.id!r}: entry_step must precede exit_step")

    def active_at(self, t: int) -> bool:
        if t < self.entry_step:
            return False
        return self.exit_step is None or t < self.exit_step


@dataclass(frozen=True)
class QueryItem:
    id: QueryId
    topic: Optional[str] = None
    payload: Optional[str] = None


@dataclass(frozen=True)
class QueryPool:
    """Ordered pool of evaluation queries with unique ids."""

    items: tuple[QueryItem, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        seen = set()
        for item in self.items:
            if not item.id:
                raise ValueError("query id must be non-empty")
            if item.id in seen:
                raise ValueError(f"duplicate query id {item.id!r}")
            seen.add(item.id)

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class GovernanceGraph:
    """Validated stakeholder DAG with cached topological order.

    ``profiles`` carries the AgentProfile for every agent named by the
    stakeholders; agents without a profile are treated as active for the
    whole run with zero cost and latency.
    """

    stakeholders: tuple[Stakeholder, ...]
    edges: frozenset[tuple[StakeholderId, StakeholderId]]
    topo_order: tuple[StakeholderId, ...]
    profiles: Mapping[AgentId, AgentProfile] = field(default_factory=dict)

    def stakeholder(self, sid: StakeholderId) -> Stakeholder:
        for s in self.stakeholders:
            if s.id == sid:
                return s
        raise UnknownStakeholder(f"unknown stakeholder {sid!r}")

    @property
    def user_stakeholder(self) -> Stakeholder:
        for s in self.stakeholders:
            if s.kind == "user":
                return s
        raise NoUserStakeholder("no user stakeholder")  # unreachable post-build

    def successors(self, sid: StakeholderId) -> tuple[StakeholderId, ...]:
        """Downstream stakeholders of sid, in declaration order."""
        return tuple(s.id for s in self.stakeholders if (sid, s.id) in self.edges)

    def stakeholder_of(self, agent: AgentId) -> StakeholderId:
        for s in self.stakeholders:
            if agent in s.agents:
                return s.id
        raise UnknownAgent(f"unknown agent {agent!r}")

    def profile(self, agent: AgentId) -> AgentProfile:
        prof = self.profiles.get(agent)
        if prof is not None:
            return prof
        return AgentProfile(id=agent, stakeholder=self.stakeholder_of(agent))


def build_graph(
    stakeholders: Sequence[Stakeholder],
    edges: Iterable[tuple[StakeholderId, StakeholderId]],
    profiles: Optional[Mapping[AgentId, AgentProfile]] = None,
) -> GovernanceGraph:
    """Validate and return the governance graph.

    Checks, in order: unique stakeholder ids, disjoint agent lists, known
    edge endpoints, exactly one user stakeholder, acyclicity (via Kahn's
    algorithm with declaration-order tie-breaking), and reachability of
    every non-user stakeholder from the user root.
    """
    stakeholders = tuple(stakeholders)
    ids = [s.id for s in stakeholders]
    if len(set(ids)) != len(ids):
        dup = next(i for i in ids if ids.count(i) > 1)
        raise UnknownStakeholder(f"duplicate stakeholder id {dup!r}")

    seen_agents: dict[AgentId, StakeholderId] = {}
    for s in stakeholders:
        for a in s.agents:
            if a in seen_agents:
                raise DuplicateAgent(
                    f"agent {a!r} declared under both {seen_agents[a]!r} and {s.id!r}"
                )
            seen_agents[a] = s.id

    edge_set = set()
    for x, y in edges:
        if x not in ids:
            raise UnknownStakeholder(f"edge references unknown stakeholder {x!r}")
        if y not in ids:
            raise UnknownStakeholder(f"edge references unknown stakeholder {y!r}")
        edge_set.add((x, y))

    users = [s for s in stakeholders if s.kind == "user"]
    if len(users) != 1:
        raise NoUserStakeholder(
            f"marketplace requires exactly one user stakeholder, found {len(users)}"
        )

    topo = _topological_order(ids, edge_set)

    root = users[0].id
    reachable = {root}
    frontier = [root]
    while frontier:
        x = frontier.pop()
        for (a, b) in edge_set:
            if a == x and b not in reachable:
                reachable.add(b)
                frontier.append(b)
    for sid in ids:
        if sid not in reachable:
            raise UnreachableStakeholder(
                f"stakeholder {sid!r} is not reachable from the user root {root!r}"
            )

    profiles = dict(profiles or {})
    for agent, prof in profiles.items():
        if prof.stakeholder not in ids:
            raise UnknownStakeholder(
                f"agent {agent!r} references unknown stakeholder {prof.stakeholder!r}"
            )

    return GovernanceGraph(
        stakeholders=stakeholders,
        edges=frozenset(edge_set),
        topo_order=tuple(topo),
        profiles=profiles,
    )


def _topological_order(
    ids: Sequence[StakeholderId], edges: set[tuple[StakeholderId, StakeholderId]]
) -> list[StakeholderId]:
    indegree = {i: 0 for i in ids}
    for _, y in edges:
        indegree[y] += 1
    order = []
    ready = [i for i in ids if indegree[i] == 0]  # declaration order
    while ready:
        x = ready.pop(0)
        order.append(x)
        for i in ids:
            if (x, i) in edges:
                indegree[i] -= 1
                if indegree[i] == 0:
                    ready.append(i)
    if len(order) != len(ids):
        stuck = [i for i in ids if i not in order]
        raise CycleDetected(f"governance edges contain a cycle through {stuck}")
    return order


def adjacency(graph: GovernanceGraph) -> list[list[int]]:
    """0/1 adjacency matrix in stakeholder declaration order."""
    ids = [s.id for s in graph.stakeholders]
    return [[1 if (x, y) in graph.edges else 0 for y in ids] for x in ids]


def active_agents(graph: GovernanceGraph, stakeholder: StakeholderId, t: int) -> list[AgentId]:
    """Agents of the stakeholder active at step t, in declaration order."""
    if t < 1:
        raise ValueError(f"step must be >= 1, got {t}")
    s = graph.stakeholder(stakeholder)
    return [a for a in s.agents if graph.profile(a).active_at(t)]
