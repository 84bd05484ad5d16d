"""Scenario configuration: JSON document parsing, validation, and digesting.

A scenario is a single JSON document with sections for the marketplace
structure, agent roster, user population, query pool, oracle binding,
simulation parameters, metrics parameters, and an optional entry/exit
schedule. Parsing is strict: unknown keys are rejected and every
constraint violation raises ConfigInvalid naming the constraint.

Resolution fills in defaults, inlines pool files, and pins score-table
paths (with a content hash), producing a document that parses to an
identical configuration. The run digest is the SHA-256 of the resolved
document in canonical JSON form (sorted keys, no whitespace); logs carry
it so metrics and replays can verify they were given the matching config.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from .core import (
    AgentId,
    AgentProfile,
    GovernanceGraph,
    QueryItem,
    QueryPool,
    Stakeholder,
    StakeholderId,
    build_graph,
)
from .errors import ConfigInvalid, DomainError, MarketSimError
from .oracle import OracleBinding, UtilityCoefficients, load_score_table
from .policies import PolicyParams

SAMPLING_MODES = ("without_replacement", "with_replacement")
SYNC_MODES = ("async", "sync")
TARGET_MODES = ("uniform", "merit_static", "merit_windowed")

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved, validated scenario."""

    graph: GovernanceGraph
    pool: QueryPool
    users: tuple[AgentId, ...]
    coefficients: dict[AgentId, UtilityCoefficients]
    policies: dict[StakeholderId, PolicyParams]
    bindings: dict[AgentId, OracleBinding]
    horizon: int
    batch_size: int
    seed: int
    sampling: str
    sync_mode: str
    window: int
    retention_m: int
    target_mode: str
    merit_scores: Optional[dict[AgentId, float]]
    document: dict = field(repr=False)
    digest: str = ""

    def market_stakeholders(self) -> tuple[StakeholderId, ...]:
        """Stakeholders directly selectable by users: the user-facing market."""
        return self.graph.successors(self.graph.user_stakeholder.id)

    def market_agents(self) -> tuple[AgentId, ...]:
        out: list[AgentId] = []
        for sid in self.market_stakeholders():
            out.extend(self.graph.stakeholder(sid).agents)
        return tuple(out)

    def entrants(self) -> tuple[AgentId, ...]:
        return tuple(
            a
            for s in self.graph.stakeholders
            if s.kind != "user"
            for a in s.agents
            if self.graph.profile(a).entry_step > 1
        )

    def with_seed(self, seed: int) -> "ScenarioConfig":
        doc = json.loads(json.dumps(self.document))
        doc["simulation"]["seed"] = seed
        return parse_document(doc)


def canonical_json(doc: Mapping) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def document_digest(doc: Mapping) -> str:
    return hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()


def apply_overrides(doc: dict, overrides: Sequence[str]) -> dict:
    """Apply ``section.key=value`` overrides; values parse as JSON when possible."""
    for item in overrides:
        if "=" not in item:
            raise ConfigInvalid(f"override {item!r} is not of the form path=value")
        path, raw = item.split("=", 1)
        keys = path.split(".")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = doc
        for k in keys[:-1]:
            if not isinstance(node, dict) or k not in node:
                raise ConfigInvalid(f"override path {path!r} does not exist in the config")
            node = node[k]
        if not isinstance(node, dict) or keys[-1] not in node:
            raise ConfigInvalid(f"override path {path!r} does not exist in the config")
        node[keys[-1]] = value
    return doc


def load_config(path, overrides: Sequence[str] = ()) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigInvalid(f"config file {path} does not exist")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config file {path} is not valid JSON: {exc}") from None
    if overrides:
        doc = apply_overrides(doc, overrides)
    return parse_document(doc, base_dir=path.parent)


def _check_keys(obj: Mapping, where: str, required: Sequence[str], optional: Sequence[str] = ()):
    if not isinstance(obj, Mapping):
        raise ConfigInvalid(f"{where} must be an object")
    for key in obj:
        if key not in required and key not in optional:
            raise ConfigInvalid(f"{where}: unknown key {key!r}")
    for key in required:
        if key not in obj:
            raise ConfigInvalid(f"{where}: missing required key {key!r}")


def _pos_int(value, where: str, minimum: int = 1) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigInvalid(f"{where} must be an integer >= {minimum}, got {value!r}")
    return value


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigInvalid(f"{where} must be a number, got {value!r}")
    return float(value)


def _policy_params(obj: Optional[Mapping], where: str) -> PolicyParams:
    if obj is None:
        return PolicyParams()
    _check_keys(
        obj, where, required=(),
        optional=("epsilon", "temperature", "learning_rate", "init_preference", "per_topic"),
    )
    kwargs: dict[str, Any] = {}
    for key in ("epsilon", "temperature", "learning_rate", "init_preference"):
        if key in obj:
            kwargs[key] = _number(obj[key], f"{where}.{key}")
    if "per_topic" in obj:
        if not isinstance(obj["per_topic"], bool):
            raise ConfigInvalid(f"{where}.per_topic must be a boolean")
        kwargs["per_topic"] = obj["per_topic"]
    return PolicyParams(**kwargs)


def _coefficients(obj: Optional[Mapping], where: str) -> UtilityCoefficients:
    if obj is None:
        return UtilityCoefficients()
    _check_keys(obj, where, required=(), optional=("alpha", "beta", "gamma"))
    return UtilityCoefficients(
        alpha=_number(obj.get("alpha", 1.0), f"{where}.alpha"),
        beta=_number(obj.get("beta", 0.0), f"{where}.beta"),
        gamma=_number(obj.get("gamma", 0.0), f"{where}.gamma"),
    )


def _parse_pool(obj: Mapping, base_dir: Optional[Path]) -> tuple[QueryPool, list]:
    _check_keys(obj, "pool", required=(), optional=("items", "file"))
    if ("items" in obj) == ("file" in obj):
        raise ConfigInvalid("pool must have exactly one of 'items' or 'file'")
    if "file" in obj:
        pool_path = Path(obj["file"])
        if base_dir is not None and not pool_path.is_absolute():
            pool_path = base_dir / pool_path
        if not pool_path.is_file():
            raise ConfigInvalid(f"pool file {pool_path} does not exist")
        try:
            raw_items = json.loads(pool_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"pool file {pool_path} is not valid JSON: {exc}") from None
        if isinstance(raw_items, Mapping) and "items" in raw_items:
            raw_items = raw_items["items"]
    else:
        raw_items = obj["items"]
    if not isinstance(raw_items, list) or not raw_items:
        raise ConfigInvalid("pool items must be a non-empty list")
    items = []
    resolved = []
    for i, entry in enumerate(raw_items):
        if isinstance(entry, str):
            items.append(QueryItem(id=entry))
            resolved.append(entry)
        elif isinstance(entry, Mapping):
            _check_keys(entry, f"pool.items[{i}]", required=("id",), optional=("topic", "payload"))
            items.append(
                QueryItem(id=entry["id"], topic=entry.get("topic"), payload=entry.get("payload"))
            )
            resolved.append(dict(entry))
        else:
            raise ConfigInvalid(f"pool.items[{i}] must be a string or object")
    try:
        pool = QueryPool(items=tuple(items))
    except ValueError as exc:
        raise ConfigInvalid(f"pool: {exc}") from None
    return pool, resolved


def _parse_oracle(
    obj: Mapping,
    base_dir: Optional[Path],
    quality_agents: Sequence[AgentId],
    pool: QueryPool,
    paired_stakeholders: Optional[tuple[list[AgentId], list[AgentId]]],
) -> tuple[dict[AgentId, OracleBinding], dict]:
    """Build per-agent bindings and the resolved oracle section."""
    _check_keys(obj, "oracle", required=("kind",), optional=("p", "q", "path", "sha256"))
    kind = obj["kind"]
    allowed = {"constant": ("q",), "bernoulli": ("p",), "cached_table": ("path", "sha256")}
    for key in obj:
        if key != "kind" and key not in allowed.get(kind, ()):
            raise ConfigInvalid(f"oracle: key {key!r} is not valid for kind {kind!r}")
    if kind == "constant":
        if "q" not in obj:
            raise ConfigInvalid("oracle: constant binding requires 'q'")
        binding = OracleBinding(kind="constant", q=_number(obj["q"], "oracle.q"))
        return {a: binding for a in quality_agents}, dict(obj)
    if kind == "bernoulli":
        if "p" not in obj:
            raise ConfigInvalid("oracle: bernoulli binding requires 'p'")
        p = obj["p"]
        bindings: dict[AgentId, OracleBinding] = {}
        if isinstance(p, Mapping):
            for key in p:
                if key not in quality_agents:
                    raise ConfigInvalid(f"oracle.p names unknown agent {key!r}")
            for agent in quality_agents:
                if agent not in p:
                    raise ConfigInvalid(f"oracle.p is missing an entry for agent {agent!r}")
                value = p[agent]
                if isinstance(value, Mapping):
                    rates = {t: _number(v, f"oracle.p.{agent}.{t}") for t, v in value.items()}
                    bindings[agent] = OracleBinding(kind="bernoulli", p=rates)
                else:
                    bindings[agent] = OracleBinding(
                        kind="bernoulli", p=_number(value, f"oracle.p.{agent}")
                    )
        else:
            rate = _number(p, "oracle.p")
            bindings = {a: OracleBinding(kind="bernoulli", p=rate) for a in quality_agents}
        return bindings, dict(obj)
    if kind == "cached_table":
        if "path" not in obj:
            raise ConfigInvalid("oracle: cached_table binding requires 'path'")
        table_path = Path(obj["path"])
        if base_dir is not None and not table_path.is_absolute():
            table_path = base_dir / table_path
        if not table_path.is_file():
            raise ConfigInvalid(f"oracle score table {table_path} does not exist")
        content_hash = hashlib.sha256(table_path.read_bytes()).hexdigest()
        if "sha256" in obj and obj["sha256"] != content_hash:
            raise ConfigInvalid(
                f"oracle score table {table_path} content changed "
                f"(sha256 {content_hash} != pinned {obj['sha256']})"
            )
        table = load_score_table(table_path)
        if table.paired:
            if paired_stakeholders is None:
                raise ConfigInvalid(
                    "oracle: paired score table requires both generator and retriever stakeholders"
                )
            generators, retrievers = paired_stakeholders
            for item in pool.items:
                for g in generators:
                    for r in retrievers:
                        if (item.id, g, r) not in table.scores:
                            raise ConfigInvalid(
                                f"oracle score table missing entry for "
                                f"({item.id!r}, {g!r}, {r!r})"
                            )
        else:
            for item in pool.items:
                for agent in quality_agents:
                    if (item.id, agent) not in table.scores:
                        raise ConfigInvalid(
                            f"oracle score table missing entry for ({item.id!r}, {agent!r})"
                        )
        binding = OracleBinding(kind="cached_table", table=table)
        resolved = {"kind": "cached_table", "path": str(table_path), "sha256": content_hash}
        return {a: binding for a in quality_agents}, resolved
    raise ConfigInvalid(f"oracle.kind must be one of {('cached_table', 'bernoulli', 'constant')}")


def parse_document(doc: Mapping, base_dir: Optional[Path] = None) -> ScenarioConfig:
    """Parse, validate, and resolve a scenario document."""
    try:
        return _parse_document(doc, base_dir)
    except DomainError as exc:
        raise ConfigInvalid(str(exc)) from None


def _parse_document(doc: Mapping, base_dir: Optional[Path]) -> ScenarioConfig:
    _check_keys(
        doc, "config",
        required=("marketplace", "agents", "users", "pool", "oracle", "simulation", "metrics"),
        optional=("schedule",),
    )

    # --- marketplace ---
    mp = doc["marketplace"]
    _check_keys(mp, "marketplace", required=("stakeholders", "edges"))
    if not isinstance(mp["stakeholders"], list) or not mp["stakeholders"]:
        raise ConfigInvalid("marketplace.stakeholders must be a non-empty list")
    stakeholder_entries = []
    policies: dict[StakeholderId, PolicyParams] = {}
    for i, entry in enumerate(mp["stakeholders"]):
        _check_keys(entry, f"marketplace.stakeholders[{i}]", required=("id", "kind"), optional=("policy",))
        stakeholder_entries.append((entry["id"], entry["kind"]))
        policies[entry["id"]] = _policy_params(
            entry.get("policy"), f"marketplace.stakeholders[{i}].policy"
        )
    edges = []
    if not isinstance(mp["edges"], list):
        raise ConfigInvalid("marketplace.edges must be a list")
    for i, edge in enumerate(mp["edges"]):
        if not isinstance(edge, list) or len(edge) != 2:
            raise ConfigInvalid(f"marketplace.edges[{i}] must be a [from, to] pair")
        edges.append((edge[0], edge[1]))

    # --- users ---
    users_obj = doc["users"]
    _check_keys(users_obj, "users", required=("count",), optional=("coefficients", "policy"))
    user_count = _pos_int(users_obj["count"], "users.count")
    user_ids = tuple(f"user_{i}" for i in range(user_count))

    # --- agents ---
    if not isinstance(doc["agents"], list):
        raise ConfigInvalid("agents must be a list")
    agent_entries = []
    for i, entry in enumerate(doc["agents"]):
        _check_keys(
            entry, f"agents[{i}]", required=("id", "stakeholder"),
            optional=("unit_cost", "latency", "entry_step", "exit_step"),
        )
        agent_entries.append(entry)

    # --- schedule (merged into agent profiles; schedule wins over inline) ---
    schedule = {}
    if "schedule" in doc and not isinstance(doc["schedule"], list):
        raise ConfigInvalid("schedule must be a list")
    for i, entry in enumerate(doc.get("schedule", [])):
        _check_keys(entry, f"schedule[{i}]", required=("agent",), optional=("entry_step", "exit_step"))
        agent = entry["agent"]
        if agent in schedule:
            raise ConfigInvalid(f"schedule: duplicate entry for agent {agent!r}")
        schedule[agent] = entry
    known_agent_ids = {e["id"] for e in agent_entries}
    for agent in schedule:
        if agent not in known_agent_ids:
            raise ConfigInvalid(f"schedule references unknown agent {agent!r}")

    # --- stakeholder/agent assembly ---
    stakeholder_ids = [sid for sid, _ in stakeholder_entries]
    user_kind_ids = [sid for sid, kind in stakeholder_entries if kind == "user"]
    profiles: dict[AgentId, AgentProfile] = {}
    agents_by_stakeholder: dict[StakeholderId, list[AgentId]] = {sid: [] for sid in stakeholder_ids}
    for entry in agent_entries:
        sid = entry["stakeholder"]
        if sid not in agents_by_stakeholder:
            raise ConfigInvalid(f"agent {entry['id']!r} references unknown stakeholder {sid!r}")
        if sid in user_kind_ids:
            raise ConfigInvalid(
                f"agent {entry['id']!r} declared under the user stakeholder; "
                f"users are generated from users.count"
            )
        sched = schedule.get(entry["id"], {})
        entry_step = sched.get("entry_step", entry.get("entry_step", 1))
        exit_step = sched.get("exit_step", entry.get("exit_step"))
        entry_step = _pos_int(entry_step, f"agent {entry['id']!r} entry_step")
        if exit_step is not None:
            exit_step = _pos_int(exit_step, f"agent {entry['id']!r} exit_step")
            if not entry_step < exit_step:
                raise ConfigInvalid(
                    f"agent {entry['id']!r}: entry_step must precede exit_step"
                )
        unit_cost = _number(entry.get("unit_cost", 0.0), f"agent {entry['id']!r} unit_cost")
        latency = _number(entry.get("latency", 0.0), f"agent {entry['id']!r} latency")
        if unit_cost < 0 or latency < 0:
            raise ConfigInvalid(f"agent {entry['id']!r}: unit_cost and latency must be >= 0")
        if entry["id"] in profiles:
            raise ConfigInvalid(f"duplicate agent id {entry['id']!r}")
        profiles[entry["id"]] = AgentProfile(
            id=entry["id"], stakeholder=sid, unit_cost=unit_cost, latency=latency,
            entry_step=entry_step, exit_step=exit_step,
        )
        agents_by_stakeholder[sid].append(entry["id"])

    if len(user_kind_ids) == 1:
        agents_by_stakeholder[user_kind_ids[0]] = list(user_ids)
        for uid in user_ids:
            profiles[uid] = AgentProfile(id=uid, stakeholder=user_kind_ids[0])

    stakeholders = [
        Stakeholder(id=sid, kind=kind, agents=tuple(agents_by_stakeholder[sid]))
        for sid, kind in stakeholder_entries
    ]
    graph = build_graph(stakeholders, edges, profiles=profiles)

    # --- user policy + coefficients ---
    user_sid = graph.user_stakeholder.id
    if "policy" in users_obj:
        policies[user_sid] = _policy_params(users_obj["policy"], "users.policy")
    coeff_obj = users_obj.get("coefficients")
    coefficients: dict[AgentId, UtilityCoefficients] = {}
    if isinstance(coeff_obj, list):
        if len(coeff_obj) != user_count:
            raise ConfigInvalid(
                f"users.coefficients list must have users.count={user_count} entries"
            )
        for uid, obj in zip(user_ids, coeff_obj):
            coefficients[uid] = _coefficients(obj, f"users.coefficients[{uid}]")
    else:
        shared = _coefficients(coeff_obj, "users.coefficients")
        coefficients = {uid: shared for uid in user_ids}

    # --- simulation ---
    sim = doc["simulation"]
    _check_keys(
        sim, "simulation", required=("horizon", "batch_size", "seed"),
        optional=("sampling", "sync_mode"),
    )
    horizon = _pos_int(sim["horizon"], "simulation.horizon")
    batch_size = _pos_int(sim["batch_size"], "simulation.batch_size")
    seed = sim["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool) or not (0 <= seed <= MAX_SEED):
        raise ConfigInvalid(f"simulation.seed must be an integer in [0, 2**64), got {seed!r}")
    sampling = sim.get("sampling", "without_replacement")
    if sampling not in SAMPLING_MODES:
        raise ConfigInvalid(f"simulation.sampling must be one of {SAMPLING_MODES}")
    sync_mode = sim.get("sync_mode", "async")
    if sync_mode not in SYNC_MODES:
        raise ConfigInvalid(f"simulation.sync_mode must be one of {SYNC_MODES}")

    # --- pool ---
    pool, resolved_pool_items = _parse_pool(doc["pool"], base_dir)

    # --- metrics ---
    met = doc["metrics"]
    _check_keys(met, "metrics", required=("window", "retention_m"), optional=("target_exposure",))
    window = _pos_int(met["window"], "metrics.window")
    retention_m = _pos_int(met["retention_m"], "metrics.retention_m")
    target_spec = met.get("target_exposure", "uniform")
    merit_scores: Optional[dict[AgentId, float]] = None
    if isinstance(target_spec, str):
        target_mode = target_spec
        if target_mode not in ("uniform", "merit_windowed"):
            raise ConfigInvalid(
                "metrics.target_exposure must be 'uniform', 'merit_windowed', "
                "or an object {mode: 'merit_static', scores: {...}}"
            )
    else:
        _check_keys(target_spec, "metrics.target_exposure", required=("mode",), optional=("scores",))
        target_mode = target_spec["mode"]
        if target_mode not in TARGET_MODES:
            raise ConfigInvalid(f"metrics.target_exposure.mode must be one of {TARGET_MODES}")
        if target_mode == "merit_static":
            if "scores" not in target_spec:
                raise ConfigInvalid("metrics.target_exposure: merit_static requires 'scores'")
            merit_scores = {
                a: _number(v, f"metrics.target_exposure.scores.{a}")
                for a, v in target_spec["scores"].items()
            }

    # --- cross-section constraints, in documented order ---
    if batch_size > user_count:
        raise ConfigInvalid(
            f"simulation.batch_size ({batch_size}) exceeds users.count ({user_count})"
        )
    if sampling == "without_replacement" and len(pool) < horizon * batch_size:
        raise ConfigInvalid(
            f"pool has {len(pool)} queries but without_replacement sampling over "
            f"horizon {horizon} with batch_size {batch_size} needs {horizon * batch_size}"
        )
    if window > horizon:
        raise ConfigInvalid(f"metrics.window ({window}) exceeds simulation.horizon ({horizon})")
    market_sids = graph.successors(user_sid)
    if not market_sids:
        raise ConfigInvalid("user stakeholder has no outgoing edges: users have nothing to select")
    for t in range(1, horizon + 1):
        if any(
            graph.profile(a).active_at(t)
            for sid in market_sids
            for a in graph.stakeholder(sid).agents
        ):
            continue
        raise ConfigInvalid(f"no agent selectable by users is active at step {t}")
    if merit_scores is not None:
        for sid in market_sids:
            for a in graph.stakeholder(sid).agents:
                if a not in merit_scores:
                    raise ConfigInvalid(
                        f"metrics.target_exposure.scores is missing market agent {a!r}"
                    )
        if any(v < 0 for v in merit_scores.values()):
            raise ConfigInvalid("metrics.target_exposure.scores must be >= 0")
        if not any(v > 0 for v in merit_scores.values()):
            raise ConfigInvalid("metrics.target_exposure.scores must contain a positive value")

    # --- oracle ---
    quality_agents = [
        a
        for s in graph.stakeholders
        if s.kind not in ("user", "router")
        for a in s.agents
    ]
    if not quality_agents:
        raise ConfigInvalid("scenario declares no quality-bearing (non-user, non-router) agents")
    generator_agents = [a for s in graph.stakeholders if s.kind == "generator" for a in s.agents]
    retriever_agents = [a for s in graph.stakeholders if s.kind == "retriever" for a in s.agents]
    paired = (generator_agents, retriever_agents) if generator_agents and retriever_agents else None
    bindings, resolved_oracle = _parse_oracle(doc["oracle"], base_dir, quality_agents, pool, paired)

    # --- resolved document (idempotent: parsing it again yields the same config) ---
    resolved = {
        "marketplace": {
            "stakeholders": [
                {
                    "id": sid,
                    "kind": kind,
                    "policy": {
                        "epsilon": policies[sid].epsilon,
                        "temperature": policies[sid].temperature,
                        "learning_rate": policies[sid].learning_rate,
                        "init_preference": policies[sid].init_preference,
                        "per_topic": policies[sid].per_topic,
                    },
                }
                for sid, kind in stakeholder_entries
            ],
            "edges": [[x, y] for x, y in edges],
        },
        "agents": [
            {
                "id": prof.id,
                "stakeholder": prof.stakeholder,
                "unit_cost": prof.unit_cost,
                "latency": prof.latency,
                "entry_step": prof.entry_step,
                **({"exit_step": prof.exit_step} if prof.exit_step is not None else {}),
            }
            for prof in (profiles[entry["id"]] for entry in agent_entries)
        ],
        "users": {
            "count": user_count,
            "coefficients": [
                {
                    "alpha": coefficients[uid].alpha,
                    "beta": coefficients[uid].beta,
                    "gamma": coefficients[uid].gamma,
                }
                for uid in user_ids
            ],
            "policy": {
                "epsilon": policies[user_sid].epsilon,
                "temperature": policies[user_sid].temperature,
                "learning_rate": policies[user_sid].learning_rate,
                "init_preference": policies[user_sid].init_preference,
                "per_topic": policies[user_sid].per_topic,
            },
        },
        "pool": {"items": resolved_pool_items},
        "oracle": resolved_oracle,
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
            "target_exposure": (
                {"mode": "merit_static", "scores": merit_scores}
                if target_mode == "merit_static"
                else target_mode
            ),
        },
    }

    return ScenarioConfig(
        graph=graph,
        pool=pool,
        users=user_ids,
        coefficients=coefficients,
        policies=policies,
        bindings=bindings,
        horizon=horizon,
        batch_size=batch_size,
        seed=seed,
        sampling=sampling,
        sync_mode=sync_mode,
        window=window,
        retention_m=retention_m,
        target_mode=target_mode,
        merit_scores=merit_scores,
        document=resolved,
        digest=document_digest(resolved),
    )


def write_resolved(config: ScenarioConfig, path) -> None:
    Path(path).write_text(
        json.dumps(config.document, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
