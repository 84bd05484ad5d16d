#!/usr/bin/env python3
"""Regenerate the bundled late-entry scenario files.

Seven public models compete for ten users' traffic over 200 steps; one
model (the entrant) joins the warm market at step 101. Per-model answer
accuracy is synthetic: a Bernoulli oracle whose rate is the model's
published SimpleQA F1 score divided by 100, so the quality ordering of
the real systems is preserved without any live model calls. Target
exposure is merit-static on the same F1 scores.
"""

import json
from pathlib import Path

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "src" / "marketsim" / "scenarios"

F1 = {
    "qwen3": 60.24,
    "kimi_k2_5": 42.51,
    "llama_3_3": 27.74,
    "deepseek_v3_2": 27.59,
    "grok_4_1": 19.21,
    "gemini_2_5": 16.83,
    "gpt_oss": 14.42,
}

POLICY = {
    "epsilon": 0.05,
    "temperature": 0.1,
    "learning_rate": 0.1,
    "init_preference": 0.5,
    "per_topic": False,
}


def scenario(entrant: str) -> dict:
    return {
        "marketplace": {
            "stakeholders": [
                {"id": "users", "kind": "user"},
                {"id": "generators", "kind": "generator", "policy": POLICY},
            ],
            "edges": [["users", "generators"]],
        },
        "agents": [
            {"id": model, "stakeholder": "generators", "unit_cost": 0.0, "latency": 0.0}
            for model in F1
        ],
        "users": {
            "count": 10,
            "coefficients": {"alpha": 1.0, "beta": 0.0, "gamma": 0.0},
            "policy": POLICY,
        },
        "pool": {"items": [f"q{i:04d}" for i in range(1000)]},
        "oracle": {"kind": "bernoulli", "p": {model: f1 / 100.0 for model, f1 in F1.items()}},
        "simulation": {
            "horizon": 200,
            "batch_size": 5,
            "seed": 0,
            "sampling": "without_replacement",
            "sync_mode": "async",
        },
        "metrics": {
            "window": 10,
            "retention_m": 10,
            "target_exposure": {"mode": "merit_static", "scores": dict(F1)},
        },
        "schedule": [{"agent": entrant, "entry_step": 101}],
    }


def main():
    SCENARIO_DIR.mkdir(parents=True, exist_ok=True)
    for name, entrant in (("qwen_late_entry", "qwen3"), ("deepseek_late_entry", "deepseek_v3_2")):
        path = SCENARIO_DIR / f"{name}.json"
        path.write_text(json.dumps(scenario(entrant), indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
