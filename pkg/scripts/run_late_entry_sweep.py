#!/usr/bin/env python3
"""Multi-seed sweep of the two bundled late-entry scenarios.

For each seed: run the full horizon, then report pre- vs post-entry
concentration, the final market leader, and how the entrant's realized
traffic compares with its merit-proportional fair share. Summarizes how
often the strong entrant ends up on top and how often concentration rises
after entry.

Usage: python scripts/run_late_entry_sweep.py [n_seeds]
"""

import sys

from marketsim.cli import builtin_scenarios
from marketsim.config import load_config
from marketsim.engine import run
from marketsim.metrics import fair_share, hhi, market_share_series, top_agent


def sweep(name: str, n_seeds: int):
    cfg0 = load_config(builtin_scenarios()[name])
    entrant = cfg0.entrants()[0]
    entry_step = cfg0.graph.profile(entrant).entry_step
    fair = fair_share(cfg0.merit_scores).shares[entrant]

    print(f"\n=== {name} (entrant: {entrant}, entry at t={entry_step}, "
          f"fair share {fair:.1%}) ===")
    print(f"{'seed':>4} {'hhi@pre':>8} {'hhi@end':>8} {'top agent':>14} "
          f"{'entrant share':>13} {'post-entry':>10}")

    hhi_up = top_entrant = below_fair = 0
    for seed in range(n_seeds):
        cfg = cfg0.with_seed(seed)
        log = run(cfg)
        series = market_share_series(log, list(cfg.market_agents()), cfg.window,
                                     horizon=cfg.horizon)
        h_pre = hhi(series[entry_step - 1])
        h_end = hhi(series[cfg.horizon])
        top = top_agent(series[cfg.horizon])
        post = [r for r in log.records if r.t >= entry_step]
        post_share = sum(1 for r in post if entrant in r.trajectory) / len(post)

        hhi_up += h_end > h_pre
        top_entrant += top == entrant
        below_fair += post_share < fair
        print(f"{seed:>4} {h_pre:>8.0f} {h_end:>8.0f} {top:>14} "
              f"{series[cfg.horizon][entrant]:>12.1%} {post_share:>9.1%}")

    print(f"---- concentration rose in {hhi_up}/{n_seeds} seeds; "
          f"entrant on top in {top_entrant}/{n_seeds}; "
          f"entrant below fair share in {below_fair}/{n_seeds}")


def main():
    n_seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    for name in ("qwen_late_entry", "deepseek_late_entry"):
        sweep(name, n_seeds)


if __name__ == "__main__":
    main()
