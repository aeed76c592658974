import json
import os

import numpy as np
import pytest

from swaptest.core import ValidationError
from swaptest.harness import (
    WORKERS_ENV,
    ExperimentConfig,
    RejectionMatrix,
    default_workers,
    mc_slack,
    run_experiment,
)

SMALL = {
    "size-quadratic": dict(n=200, alphas=[0.1, 0.2]),
    "power-linear-grid": dict(n=200),
    "power-gmm": dict(params={"ns": [200, 400]}),
    "datamodel-synthetic": dict(n=200),
    "pvalue-uniformity": dict(n=200, alphas=[0.05, 0.1]),
    "fdr-check": dict(params={"m": 20, "n_per_test": 100}),
}


def _cfg(exp, out=None, replicates=6, **extra):
    return ExperimentConfig.from_dict(
        {"experiment": exp, "replicates": replicates, "root_seed": 3, "output": out, **SMALL[exp], **extra}
    )


def _read_all(d):
    return {name: (d / name).read_bytes() for name in sorted(os.listdir(d))}


@pytest.mark.parametrize("exp", sorted(SMALL))
def test_artifacts_independent_of_workers(exp, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_experiment(_cfg(exp, str(a)), workers=1)
    run_experiment(_cfg(exp, str(b)), workers=2)
    files = _read_all(a)
    assert files == _read_all(b)
    assert "summary.json" in files
    summary = json.loads(files["summary.json"])
    assert summary["experiment"] == exp


def test_rejection_matrix_files(tmp_path):
    res = run_experiment(_cfg("power-linear-grid", str(tmp_path)), workers=1)
    assert len(res.matrices) == 3
    m = res.matrix(setting=2.0, alpha=0.1)
    assert m.d == 10 and m.replicates == 6 and m.seed == 3
    text = (tmp_path / "rejection_setting2_alpha0.1.csv").read_text().splitlines()
    assert text[0] == "feature," + ",".join(str(k) for k in range(1, 11))
    assert len(text) == 11
    meta = json.loads((tmp_path / "summary.json").read_text())["matrices"]["setting2_alpha0.1"]
    assert meta["mc_slack"] == pytest.approx(mc_slack(0.1, 6))
    assert meta["diagonal"] == "degenerate"


def test_pvalues_file(tmp_path):
    res = run_experiment(_cfg("pvalue-uniformity", str(tmp_path)), workers=1)
    lines = (tmp_path / "pvalues.csv").read_text().splitlines()
    assert lines[0] == "replicate,p_value" and len(lines) == 7
    assert np.all((res.pvalues > 0) & (res.pvalues <= 1))


def test_seed_changes_results():
    a = run_experiment(_cfg("pvalue-uniformity"), workers=1, write=False)
    b = run_experiment(_cfg("pvalue-uniformity", root_seed=4), workers=1, write=False)
    assert not np.array_equal(a.pvalues, b.pvalues)


def test_results_extend_with_replicates():
    # replicate r draws the same data whatever the total count
    a = run_experiment(_cfg("pvalue-uniformity", replicates=4), workers=1, write=False)
    b = run_experiment(_cfg("pvalue-uniformity", replicates=8), workers=1, write=False)
    np.testing.assert_array_equal(a.pvalues, b.pvalues[:4])


def test_config_parsing(tmp_path):
    f = tmp_path / "c.json"
    f.write_text(json.dumps({"experiment": "size-quadratic", "replicates": 3, "alpha": 0.2}))
    cfg = ExperimentConfig.from_json(str(f))
    assert cfg.alphas == (0.2,) and cfg.params["d"] == 10
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    f.write_text("{bad")
    with pytest.raises(ValidationError):
        ExperimentConfig.from_json(str(f))


@pytest.mark.parametrize(
    "obj",
    [
        {"experiment": "nope", "replicates": 1},
        {"experiment": "size-quadratic", "replicates": 0},
        {"experiment": "size-quadratic"},
        {"experiment": "size-quadratic", "replicates": 1, "extra": 1},
        {"experiment": "size-quadratic", "replicates": 1, "alphas": [1.5]},
        {"experiment": "power-gmm", "replicates": 1, "params": {"ns": []}},
        {"experiment": "datamodel-synthetic", "replicates": 1, "params": {"m": 12}},
        {"experiment": "pvalue-uniformity", "replicates": 1, "params": {"pair": [0, 2]}},
        {"experiment": "fdr-check", "replicates": 1, "params": {"q": 2}},
        [],
    ],
)
def test_config_errors(obj):
    with pytest.raises(ValidationError):
        ExperimentConfig.from_dict(obj)


def test_rejection_matrix_validation():
    with pytest.raises(ValidationError):
        RejectionMatrix(np.array([[0, 0.1], [0.2, 0]]), 0.1, 10, 5, 0)
    with pytest.raises(ValidationError):
        RejectionMatrix(np.array([[0, 1.5], [1.5, 0]]), 0.1, 10, 5, 0)
    m = RejectionMatrix(np.array([[0.1, 0.3], [0.3, 0.0]]), 0.1, 10, 5, 0)
    assert m.rate(1, 2) == 0.3 and m.off_diagonal().tolist() == [0.3]


def test_default_workers(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert default_workers() == 3
    monkeypatch.setenv(WORKERS_ENV, "junk")
    assert default_workers() == 1
    monkeypatch.delenv(WORKERS_ENV)
    assert default_workers() == 1


def test_mc_slack():
    assert mc_slack(0.1, 500) == pytest.approx(3 * np.sqrt(0.09 / 500))
