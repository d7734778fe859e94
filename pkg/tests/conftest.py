"""Shared fixtures: a small synthetic corpus and a full pipeline run."""

import json

import pytest

from burnout_pipeline import cli

# Small corpus settings keep the CLI tests fast while still exercising every
# stage, including at least one provider above the labeling thresholds.
SMALL_CONFIG = {
    "seed": 7,
    "synth": {"n_providers": 30, "notes_max": 8, "burnout_rate": 0.1},
    "topics": {"iterations": 60, "vocab_top_k": 400, "min_df": 2},
}


def write_config(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.fixture(scope="session")
def small_run(tmp_path_factory):
    """One complete pipeline run on the small corpus, shared by CLI tests."""
    out = tmp_path_factory.mktemp("small_run")
    cfg_path = out / "config.json"
    write_config(cfg_path, SMALL_CONFIG)
    rc = cli.main(["all", "--config", str(cfg_path), "--out", str(out / "art"),
                   "--emit-sentences"])
    assert rc == 0
    return {"out": out / "art", "config": cfg_path}
