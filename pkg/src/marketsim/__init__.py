"""Deterministic marketplace simulator and metrics toolkit for competing
information-access services: seedable interaction dynamics over a
governance graph, plus market share, retention, concentration, and
exposure metrics with validation tooling."""

__version__ = "0.1.0"

from . import errors
from .config import ScenarioConfig, load_config, parse_document
from .core import (
    AgentProfile,
    GovernanceGraph,
    QueryItem,
    QueryPool,
    Stakeholder,
    active_agents,
    adjacency,
    build_graph,
)
from .engine import (
    Engine,
    InteractionRecord,
    SimulationLog,
    load_log,
    replay,
    run,
    write_log,
)
from .metrics import (
    MetricsReport,
    TargetExposure,
    compute_report,
    dominance_gap,
    dominance_gap_max,
    expected_exposure,
    exposure_disparity,
    fair_share,
    fair_share_delta,
    hhi,
    market_share,
    market_share_series,
    retention_agent,
    retention_user,
    write_report,
)
from .oracle import (
    OracleBinding,
    Perturbation,
    UtilityCoefficients,
    UtilityOutcome,
    evaluate,
    load_score_table,
    score_quality,
    trajectory_utility,
)
from .policies import (
    PolicyParams,
    SelectionDistribution,
    SelectorState,
    init_entrant,
    select,
    selection_distribution,
    update,
)
from .validation import (
    BootstrapResult,
    bootstrap_asl,
    perturb_and_compare,
    rank_correlation,
)
