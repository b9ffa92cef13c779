import json

import pytest

from elastic_l2.experiments.cli import main
from elastic_l2.experiments.config import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    HypothesisError,
    check_hypotheses,
    default_config,
    validate_config,
)
from elastic_l2.experiments.runner import REPORT_VERSION, run_experiment, write_report


@pytest.mark.parametrize("exp", EXPERIMENTS)
def test_defaults_validate(exp):
    cfg = ExperimentConfig.from_dict(default_config(exp))
    assert cfg.experiment == exp
    check_hypotheses(cfg)


def test_missing_beta_named():
    cfg = default_config("E3")
    del cfg["beta"]
    with pytest.raises(ConfigError, match="beta"):
        validate_config(cfg)


def test_bad_field_named():
    cfg = default_config("E3")
    cfg["t_grid"] = {"t_min": -1.0, "t_max": 10.0}
    with pytest.raises(ConfigError, match="t_grid"):
        validate_config(cfg)


@pytest.mark.parametrize(
    "exp, mutate, text",
    [
        ("E3", lambda c: c["data"].update(f1=[[], []]), "M_1"),
        ("E5", lambda c: c["data"].update(f1=[[{"coeff": 1.0, "gamma": [0, 0]}], []]), "zero-mean"),
        ("E5", lambda c: c["data"].update(f1=[[{"coeff": 1.0, "gamma": [1, 1]}], []]), "dipole"),
        ("E7", lambda c: c.update(lame={"lambda": 1.0, "mu": 1.0}), "scalar reduction"),
    ],
)
def test_hypothesis_violations_named(exp, mutate, text):
    raw = default_config(exp)
    mutate(raw)
    with pytest.raises(HypothesisError, match=text):
        run_experiment(raw)


def test_report_is_deterministic(tmp_path):
    raw = default_config("E1")
    a = run_experiment(raw, threads=1)
    b = run_experiment(raw, threads=3)
    assert a.to_json() == b.to_json()
    j1, c1 = write_report(a, tmp_path / "a")
    j2, c2 = write_report(b, tmp_path / "b")
    assert j1.read_bytes() == j2.read_bytes() and c1.read_bytes() == c2.read_bytes()
    doc = json.loads(j1.read_text())
    assert doc["report_version"] == REPORT_VERSION
    assert doc["verdict"] == "pass"


def test_report_embeds_moments():
    rep = run_experiment(default_config("E7"))
    doc = json.loads(rep.to_json())
    assert doc["moments"]["M_abs"][1] == pytest.approx(3.141592653589793)
    assert doc["hypotheses_checked"]


def test_cli_list_and_config(capsys):
    assert main(["list-experiments"]) == 0
    out = capsys.readouterr().out
    assert all(e in out for e in EXPERIMENTS)
    assert main(["config", "E4"]) == 0
    assert json.loads(capsys.readouterr().out)["experiment"] == "E4"


def test_cli_run_and_fit(tmp_path, capsys):
    cfg = default_config("E7")
    cfg["output"] = {"dir": str(tmp_path), "stem": "wave"}
    path = tmp_path / "e7.json"
    path.write_text(json.dumps(cfg))
    assert main(["run", str(path), "--threads", "2"]) == 0
    assert (tmp_path / "wave.json").exists()
    capsys.readouterr()
    csv_path = tmp_path / "series.csv"
    rows = ["t,norm"] + [f"{t},{(2.0 * t + 1.0) ** 0.5}" for t in range(1, 12)]
    csv_path.write_text("\n".join(rows) + "\n")
    assert main(["fit", str(csv_path), "--model", "sqrt_t"]) == 0
    fit = json.loads(capsys.readouterr().out)
    assert fit["coefficient"] == pytest.approx(2.0)
    assert fit["column"] == "norm"


def test_cli_exit_codes(tmp_path):
    bad = default_config("E3")
    del bad["beta"]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    assert main(["run", str(p)]) == 2
    assert main(["run", "E8", "--out", str(tmp_path)]) == 1  # the 3-D exponent part does not hold
