import json

import pytest

from genvar import harness


def test_preset_defaults_and_overrides():
    cfg = harness.ExperimentConfig.preset("INCLUSION_SUITE", cases=3, seed=None)
    assert cfg.cases == 3 and cfg.seed == 0
    assert cfg.grid == (5, 5)
    assert cfg.digest() == harness.ExperimentConfig.from_dict(cfg.to_dict()).digest()
    assert cfg.digest() != harness.ExperimentConfig.preset("INCLUSION_SUITE", cases=4).digest()


def test_config_rejects_unknown():
    with pytest.raises(ValueError):
        harness.ExperimentConfig.from_dict({"experiment": "NOPE"})
    with pytest.raises(ValueError):
        harness.ExperimentConfig.from_dict({"experiment": "INCLUSION_SUITE", "colour": 1})


def test_config_from_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"experiment": "ORACLE_EQUIVALENCE", "cases": 2, "seed": 7}))
    cfg = harness.ExperimentConfig.from_json(path)
    assert cfg.seed == 7 and cfg.lambdas[0] == "harmonic"


def test_case_streams_are_independent_of_order():
    a = harness._case_rng(42, 5).uniform(size=3)
    harness._case_rng(42, 4).uniform(size=100)
    b = harness._case_rng(42, 5).uniform(size=3)
    assert (a == b).all()


def test_oracle_rows_and_thread_determinism():
    cfg = harness.ExperimentConfig.preset("ORACLE_EQUIVALENCE", cases=4, seed=3)
    r1 = harness.run_experiment(cfg, threads=1)
    r4 = harness.run_experiment(cfg, threads=4)
    assert r1.summary == "PASS"
    assert [r.case_id for r in r1.rows] == ["case0000", "case0001", "case0002", "case0003"]
    for fmt, render in harness.RENDERERS.items():
        assert render(r1) == render(r4), fmt


def test_inclusion_small():
    rep = harness.run_experiment(harness.ExperimentConfig.preset("INCLUSION_SUITE", cases=2, seed=1))
    assert rep.summary == "PASS"
    row = rep.rows[0].values
    assert row["homogeneous_ok"] == row["homogeneous_total"] > 0


def test_trace_experiment_and_plot_blocks():
    rep = harness.run_experiment(harness.ExperimentConfig.preset("THEOREM_S_DESK", degrees="16:128"))
    assert rep.summary == "CONVERGING"
    plot = harness.render_plot_data(rep)
    assert plot.count("# p0") == 2
    assert "\n\n" in plot


def test_exploratory_flag():
    cfg = harness.ExperimentConfig.preset("GOGINAVA_PBV_REGIME", degrees="16:128", orders=[[-0.2, -0.3]])
    rep = harness.run_experiment(cfg)
    assert rep.exploratory
    assert rep.rows[0].values["regime"] == "sum<1"
    assert json.loads(harness.render_json(rep))["exploratory"] is True
    assert harness.render_plot_data(rep).startswith("# GOGINAVA_PBV_REGIME EXPLORATORY")


def test_refused_case_becomes_aborted_row():
    cfg = harness.ExperimentConfig.preset("THEOREM_S_DESK", function="sign_diag", points=[["1", "1"]], degrees="16:128")
    rep = harness.run_experiment(cfg)
    assert rep.rows[0].status == "ABORTED"
    assert "regular" in rep.rows[0].error
    assert rep.summary == "ABORTED"


def test_empty_suite_is_skipped():
    rep = harness.run_experiment(harness.ExperimentConfig.preset("ORACLE_EQUIVALENCE", cases=0))
    assert rep.summary == "SKIPPED"
    assert harness.render_plot_data(rep) == "# ORACLE_EQUIVALENCE summary=SKIPPED\n"


def test_summary_rules():
    row = lambda v: harness.CaseRow("x", {}, {}, v)
    assert harness._summary("ORACLE_EQUIVALENCE", [row("PASS"), row("FAIL")])[0] == "FAIL"
    assert harness._summary("THEOREM_S_DESK", [row("CONVERGING"), row("STALLING")])[0] == "MIXED"


def test_json_rounding_and_provenance(tmp_path):
    rep = harness.run_experiment(harness.ExperimentConfig.preset("SERIES_PROBE_SUITE", series=[{"condition": "TERMS", "p": 2.0}]))
    data = json.loads(harness.render_json(rep))
    assert data["provenance"]["config_hash"] == rep.config.digest()
    assert data["rows"][0]["verdict"] == "CONVERGENT"
    paths = harness.render_report(rep, tmp_path, ["csv", "json"])
    assert [p.name for p in paths] == ["series_probe_suite.csv", "series_probe_suite.json"]
    with pytest.raises(ValueError):
        harness.render_report(rep, tmp_path, ["xml"])


def test_rounded():
    assert harness._rounded({"a": 0.1 + 0.2, "b": (1, float("nan"))}) == {"a": 0.3, "b": [1, "nan"]}
