"""Shared builders for tests: scenario documents, synthetic logs, tiny random scenarios."""

from __future__ import annotations

import random

from marketsim.config import parse_document
from marketsim.engine import InteractionRecord, SimulationLog
from marketsim.oracle import UtilityOutcome

DEFAULT_POLICY = {
    "epsilon": 0.05,
    "temperature": 0.1,
    "learning_rate": 0.1,
    "init_preference": 0.5,
    "per_topic": False,
}


def document(
    agents=("a1", "a2"),
    users=2,
    horizon=5,
    batch_size=1,
    seed=0,
    oracle=None,
    sampling="without_replacement",
    pool_size=None,
    window=2,
    retention_m=3,
    target_exposure="uniform",
    schedule=None,
    policy=None,
    coefficients=None,
    sync_mode="async",
    agent_costs=None,
    agent_latencies=None,
):
    """A single-market scenario document with sensible defaults."""
    if pool_size is None:
        pool_size = horizon * batch_size
    agent_costs = agent_costs or {}
    agent_latencies = agent_latencies or {}
    doc = {
        "marketplace": {
            "stakeholders": [
                {"id": "users", "kind": "user"},
                {"id": "services", "kind": "generator", "policy": policy or DEFAULT_POLICY},
            ],
            "edges": [["users", "services"]],
        },
        "agents": [
            {
                "id": a,
                "stakeholder": "services",
                "unit_cost": agent_costs.get(a, 0.0),
                "latency": agent_latencies.get(a, 0.0),
            }
            for a in agents
        ],
        "users": {
            "count": users,
            "coefficients": coefficients or {"alpha": 1.0, "beta": 0.0, "gamma": 0.0},
            "policy": policy or DEFAULT_POLICY,
        },
        "pool": {"items": [f"q{i:04d}" for i in range(pool_size)]},
        "oracle": oracle or {"kind": "constant", "q": 1.0},
        "simulation": {
            "horizon": horizon,
            "batch_size": batch_size,
            "seed": seed,
            "sampling": sampling,
            "sync_mode": sync_mode,
        },
        "metrics": {
            "window": window,
            "retention_m": retention_m,
            "target_exposure": target_exposure,
        },
    }
    if schedule:
        doc["schedule"] = list(schedule)
    return doc


def scenario(**kwargs):
    return parse_document(document(**kwargs))


def record(t, user, trajectory, quality=1.0, cost=0.0, latency=0.0, utility=None, query="q"):
    if isinstance(trajectory, str):
        trajectory = (trajectory,)
    if utility is None:
        utility = quality
    return InteractionRecord(
        t=t,
        user=user,
        query=query,
        trajectory=tuple(trajectory),
        outcome=UtilityOutcome(quality=quality, cost=cost, latency=latency, utility=utility),
    )


def log_of(records, digest="test"):
    return SimulationLog(config_digest=digest, records=list(records))


def random_tiny_log(rng: random.Random, max_steps=5, max_users=3, max_agents=3) -> tuple[SimulationLog, list[str]]:
    """A small synthetic single-market log plus its agent roster."""
    n_steps = rng.randint(1, max_steps)
    n_users = rng.randint(1, max_users)
    n_agents = rng.randint(1, max_agents)
    agents = [f"a{i}" for i in range(n_agents)]
    users = [f"user_{i}" for i in range(n_users)]
    records = []
    for t in range(1, n_steps + 1):
        batch = rng.sample(users, rng.randint(1, n_users))
        for u in sorted(batch, key=users.index):
            a = agents[rng.randrange(n_agents)]
            records.append(record(t, u, a, quality=rng.choice([0.0, 1.0]), query=f"q{t}_{u}"))
    return log_of(records), agents


def random_small_scenario(rng: random.Random):
    """A random valid scenario for invariant fuzzing (optionally with a retriever tier)."""
    n_agents = rng.randint(2, 5)
    agents = [f"a{i}" for i in range(n_agents)]
    users = rng.randint(2, 4)
    horizon = rng.randint(2, 6)
    batch = rng.randint(1, users)
    schedule = []
    if n_agents >= 3 and rng.random() < 0.5:
        schedule.append({"agent": agents[-1], "entry_step": rng.randint(2, horizon)})
    if n_agents >= 3 and rng.random() < 0.3:
        schedule.append({"agent": agents[-2], "exit_step": rng.randint(2, horizon)})
    doc = document(
        agents=agents,
        users=users,
        horizon=horizon,
        batch_size=batch,
        seed=rng.randrange(2**32),
        oracle={"kind": "bernoulli", "p": {a: rng.random() for a in agents}},
        window=rng.randint(1, horizon),
        retention_m=rng.randint(1, 4),
        schedule=schedule,
        agent_costs={a: rng.choice([0.0, 0.5]) for a in agents},
        agent_latencies={a: rng.choice([0.0, 1.0]) for a in agents},
        coefficients={"alpha": 1.0, "beta": 0.05, "gamma": 0.05},
        sync_mode=rng.choice(["async", "sync"]),
    )
    if rng.random() < 0.35:
        doc["marketplace"]["stakeholders"].append({"id": "backends", "kind": "retriever"})
        doc["marketplace"]["edges"].append(["services", "backends"])
        doc["agents"].append({"id": "r0", "stakeholder": "backends"})
        doc["agents"].append({"id": "r1", "stakeholder": "backends"})
        doc["oracle"] = {
            "kind": "bernoulli",
            "p": {a: rng.random() for a in agents + ["r0", "r1"]},
        }
    return parse_document(doc)
