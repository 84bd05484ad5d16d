"""Command-line interface.

Subcommands: simulate, metrics, sweep, validate, replay. Exit codes are a
stable contract: 0 success, 1 runtime failure, 2 usage or configuration
error. Sweep parallelism is capped by the MARKET_SIM_THREADS environment
variable (default: available cores).

Scenario arguments accept either a filesystem path or the name of a
bundled scenario (see ``marketsim.cli.builtin_scenarios``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig, load_config, parse_document, write_resolved
from .engine import load_log, replay, run, write_log
from .errors import ConfigError, ConfigInvalid, DigestMismatch, MarketSimError
from .metrics import compute_report, top_agent, write_report
from .oracle import Perturbation
from .validation import bootstrap_asl, perturb_and_compare, rank_correlation


def builtin_scenarios() -> dict[str, Path]:
    """Names and paths of the scenario files shipped with the package."""
    root = resources.files("marketsim") / "scenarios"
    return {p.name[: -len(".json")]: Path(str(p)) for p in root.iterdir() if p.name.endswith(".json")}


def _resolve_config_path(spec: str) -> Path:
    path = Path(spec)
    if path.is_file():
        return path
    bundled = builtin_scenarios()
    name = spec[: -len(".json")] if spec.endswith(".json") else spec
    if name in bundled:
        return bundled[name]
    raise ConfigInvalid(f"config file {spec} does not exist (bundled: {', '.join(sorted(bundled))})")


def _load(args) -> ScenarioConfig:
    overrides = list(getattr(args, "override", None) or [])
    if getattr(args, "seed_override", None) is not None:
        overrides.append(f"simulation.seed={args.seed_override}")
    return load_config(_resolve_config_path(args.config), overrides)


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


# -- subcommands ------------------------------------------------------


def cmd_simulate(args) -> int:
    scenario = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log = run(scenario)
    write_log(log, out / "log.jsonl")
    write_resolved(scenario, out / "config.resolved.json")
    _say(args, f"simulate: {len(log.records)} records over {scenario.horizon} steps -> {out}")
    return 0


def cmd_metrics(args) -> int:
    scenario = load_config(_resolve_config_path(args.config))
    log = load_log(args.log)
    if log.config_digest != scenario.digest:
        raise DigestMismatch(
            f"log digest {log.config_digest[:12]}... does not match config digest "
            f"{scenario.digest[:12]}..."
        )
    log.scenario = scenario
    report = compute_report(log, scenario)
    out = Path(args.out)
    write_report(report, out)
    _say(args, f"metrics: wrote market_share/concentration/retention/fair_share CSVs -> {out}")
    return 0


def _parse_seeds(spec: str) -> list[int]:
    if ":" in spec:
        lo_s, hi_s = spec.split(":", 1)
        try:
            lo, hi = int(lo_s), int(hi_s)
        except ValueError:
            raise ConfigInvalid(f"bad seed range {spec!r}; expected START:END") from None
        if hi <= lo:
            raise ConfigInvalid(f"seed range {spec!r} is empty")
        return list(range(lo, hi))
    try:
        seeds = [int(s) for s in spec.split(",")]
    except ValueError:
        raise ConfigInvalid(f"bad seed list {spec!r}; expected comma-separated integers") from None
    if len(set(seeds)) != len(seeds):
        raise ConfigInvalid(f"seed list {spec!r} contains duplicates")
    return seeds


def _sweep_worker(document_json: str, seed: int, out_dir: str) -> dict:
    scenario = parse_document(json.loads(document_json)).with_seed(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log = run(scenario)
    write_log(log, out / "log.jsonl")
    write_resolved(scenario, out / "config.resolved.json")
    report = compute_report(log, scenario)
    write_report(report, out)

    final_t = scenario.horizon
    shares = report.shares[final_t]
    top = top_agent(shares)
    entrants = scenario.entrants()
    entrant = entrants[0] if entrants else None
    entry = {
        "seed": seed,
        "out_dir": str(out),
        "final_hhi": report.hhi_series[final_t],
        "top_agent": top,
        "entrant": entrant,
        "entrant_share": shares.get(entrant) if entrant else None,
    }
    if entrant is not None:
        entry_step = scenario.graph.profile(entrant).entry_step
        post = [r for r in log.records if r.t >= entry_step]
        entry["entrant_post_entry_share"] = (
            sum(1 for r in post if entrant in r.trajectory) / len(post) if post else None
        )
        # pre-entry vs post-entry concentration, both over a final window
        entry["pre_entry_hhi"] = report.hhi_series.get(entry_step - 1)
    return entry


def cmd_sweep(args) -> int:
    scenario = _load(args)
    seeds = _parse_seeds(args.seeds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    threads = os.environ.get("MARKET_SIM_THREADS")
    max_workers = int(threads) if threads else (os.cpu_count() or 1)
    max_workers = max(1, min(max_workers, len(seeds)))
    document_json = json.dumps(scenario.document)

    runs = []
    failures = []
    jobs = {}
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        for seed in seeds:
            jobs[seed] = pool.submit(_sweep_worker, document_json, seed, str(out / f"seed_{seed}"))
        for seed in seeds:
            try:
                runs.append(jobs[seed].result())
            except Exception as exc:  # per-seed failures recorded, not fatal mid-sweep
                failures.append({"seed": seed, "error": str(exc)})
    summary = {"seeds": seeds, "runs": runs, "failures": failures}
    (out / "sweep_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _say(args, f"sweep: {len(runs)} runs ok, {len(failures)} failed -> {out}")
    return 1 if failures else 0


def _read_ranking(path) -> list[str]:
    lines = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()]
    return [line for line in lines if line]


def _read_samples(path) -> list[float]:
    values = []
    for i, line in enumerate(_read_ranking(path), start=1):
        try:
            values.append(float(line))
        except ValueError:
            raise ConfigInvalid(f"{path}: line {i}: {line!r} is not a number") from None
    return values


def _write_validation_report(args, kind: str, payload: dict) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = {
        "statistic": None,
        "observed": None,
        "asl": None,
        "ci_low": None,
        "ci_high": None,
        "resamples": None,
        "seeds": None,
    }
    base.update(payload)
    path = out / f"validation_{kind}.json"
    path.write_text(json.dumps(base, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def cmd_validate(args) -> int:
    if args.kind == "rankcorr":
        tau = rank_correlation(_read_ranking(args.ranking_a), _read_ranking(args.ranking_b))
        path = _write_validation_report(args, "rankcorr", {"statistic": "kendall_tau", "observed": tau})
        _say(args, f"rankcorr: tau={tau:.6f} -> {path}")
        return 0

    if args.kind == "bootstrap":
        if args.resamples < 1000:
            raise ConfigInvalid(f"--resamples must be >= 1000, got {args.resamples}")
        result = bootstrap_asl(
            _read_samples(args.samples_a),
            _read_samples(args.samples_b),
            args.resamples,
            np.random.default_rng(args.seed),
            paired=not args.unpaired,
        )
        path = _write_validation_report(
            args,
            "bootstrap",
            {
                "statistic": result.statistic,
                "observed": result.observed,
                "asl": result.asl,
                "ci_low": result.ci_low,
                "ci_high": result.ci_high,
                "resamples": result.resamples,
                "paired": result.paired,
            },
        )
        _say(args, f"bootstrap: observed={result.observed:.6f} asl={result.asl:.4f} -> {path}")
        return 0

    # perturb
    scenario = _load(args)
    perturbation = Perturbation(
        target=args.target, knob=args.knob, magnitude=args.magnitude, active_from=args.active_from
    )
    seeds = _parse_seeds(args.seeds)
    comparison = perturb_and_compare(scenario, perturbation, seeds)
    deltas = comparison.share_deltas
    observed = sum(deltas) / len(deltas)
    if any(d != 0.0 for d in deltas):
        boot = bootstrap_asl(
            comparison.perturbed_share,
            comparison.baseline_share,
            args.resamples,
            np.random.default_rng(args.seed),
            paired=True,
            statistic="mean_windowed_share_delta",
        )
        asl, ci_low, ci_high = boot.asl, boot.ci_low, boot.ci_high
    else:  # exact replay: no spread to bootstrap
        asl, ci_low, ci_high = 0.5, 0.0, 0.0
    retention_deltas = comparison.retention_deltas
    path = _write_validation_report(
        args,
        "perturb",
        {
            "statistic": "mean_windowed_share_delta",
            "observed": observed,
            "asl": asl,
            "ci_low": ci_low,
            "ci_high": ci_high,
            "resamples": args.resamples,
            "seeds": seeds,
            "target": args.target,
            "knob": args.knob,
            "magnitude": args.magnitude,
            "share_deltas": deltas,
            "retention_deltas": retention_deltas,
            "mean_retention_delta": (
                sum(retention_deltas) / len(retention_deltas) if retention_deltas else None
            ),
        },
    )
    _say(args, f"perturb: mean share delta {observed:+.6f} over {len(seeds)} seeds -> {path}")
    return 0


def cmd_replay(args) -> int:
    scenario = load_config(_resolve_config_path(args.config))
    if getattr(args, "seed_override", None) is not None:
        scenario = scenario.with_seed(args.seed_override)
    log = load_log(args.log)
    fresh = replay(log, scenario)
    _say(args, f"replay: ok, {len(fresh.records)} records match")
    return 0


# -- parser -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="marketsim",
        description="Deterministic marketplace simulator and metrics toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--quiet", action="store_true", help="suppress status output")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="run a scenario, write log.jsonl")
    p.add_argument("config", help="scenario config path or bundled scenario name")
    p.add_argument("--override", action="append", metavar="PATH=VALUE",
                   help="config override, e.g. simulation.seed=7 (repeatable)")
    p.add_argument("--seed-override", type=int, default=None, help="shorthand for simulation.seed=N")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("metrics", parents=[common], help="compute metric CSVs from a log")
    p.add_argument("log", help="path to log.jsonl")
    p.add_argument("config", help="config that produced the log")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("sweep", parents=[common], help="run one simulation per seed, in parallel")
    p.add_argument("config", help="scenario config path or bundled scenario name")
    p.add_argument("--seeds", required=True, help="seed range START:END or comma list")
    p.add_argument("--seed-override", type=int, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="validation procedures")
    kinds = p.add_subparsers(dest="kind", required=True)

    k = kinds.add_parser("perturb", parents=[common], help="paired perturbation comparison")
    k.add_argument("--config", required=True)
    k.add_argument("--target", required=True, help="agent to perturb")
    k.add_argument("--knob", required=True,
                   choices=["latency_multiplier", "quality_delta", "cost_multiplier"])
    k.add_argument("--magnitude", type=float, required=True)
    k.add_argument("--active-from", type=int, default=1)
    k.add_argument("--seeds", default="0:10", help="seed range START:END or comma list")
    k.add_argument("--resamples", type=int, default=2000)
    k.add_argument("--seed", type=int, default=0, help="bootstrap rng seed")
    k.add_argument("--seed-override", type=int, default=None, help=argparse.SUPPRESS)
    k.set_defaults(func=cmd_validate, kind="perturb")

    k = kinds.add_parser("bootstrap", parents=[common], help="bootstrap a mean difference")
    k.add_argument("--samples-a", required=True)
    k.add_argument("--samples-b", required=True)
    k.add_argument("--resamples", type=int, default=2000)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--unpaired", action="store_true")
    k.set_defaults(func=cmd_validate, kind="bootstrap")

    k = kinds.add_parser("rankcorr", parents=[common], help="Kendall tau between two rankings")
    k.add_argument("ranking_a")
    k.add_argument("ranking_b")
    k.set_defaults(func=cmd_validate, kind="rankcorr")

    p = sub.add_parser("replay", parents=[common], help="verify a log reproduces from its config")
    p.add_argument("log")
    p.add_argument("config")
    p.add_argument("--seed-override", type=int, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DigestMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MarketSimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
