import json
import math

import numpy as np
import pytest

from dlab.harness import cli
from dlab.harness.config import ConfigError, ExperimentConfig, load_config
from dlab.harness.ledger import CSV_HEADER, ledgers_to_csv, read_csv
from dlab.harness.registry import REGISTRY, UnknownAlgorithm
from dlab.harness.run import run_experiment
from dlab.harness.sweep import growth_exponent, summarize, sweep

MEANS = [0.9, 0.7, 0.6, 0.5, 0.5, 0.4, 0.4, 0.3, 0.2, 0.1]


def bandit_config(algo="ucb", T=200, seeds=(0, 1), **kw):
    return ExperimentConfig(env={"type": "bandit", "means": MEANS, "noise": "gaussian"},
                            algo={"name": algo}, T=T, seeds=list(seeds), **kw)


def write_config(path, cfg: ExperimentConfig):
    path.write_text(cfg.to_json())
    return path


@pytest.mark.parametrize("env", [
    {"type": "bandit", "means": [0.2, 0.8]},
    {"type": "contextual", "means": [[0.1, 0.5], [0.7, 0.2]]},
    {"type": "combination_lock", "H": 3},
])
def test_optimal_algorithm_has_zero_regret(env):
    cfg = ExperimentConfig(env=env, algo={"name": "optimal"}, T=50, seeds=[0, 1])
    for led in run_experiment(cfg, write=False):
        assert led.total == 0.0 and not any(led.inst)


def test_rerun_gives_byte_identical_csv(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_experiment(bandit_config(out=str(a)))
    run_experiment(bandit_config(out=str(b)))
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER) == "t,inst_regret,cum_regret,reward,seed,algo,env"
    assert len(lines) == 1 + 2 * 200


def test_csv_round_trip_is_exact(tmp_path):
    ledgers = run_experiment(bandit_config(out=str(tmp_path / "r.csv")))
    back = read_csv(tmp_path / "r.csv")
    for led in ledgers:
        assert back[led.seed].inst == led.inst and back[led.seed].reward == led.reward
    cum = np.array([float(r.split(",")[2]) for r in (tmp_path / "r.csv").read_text().splitlines()[1:201]])
    np.testing.assert_array_equal(cum, ledgers[0].cum)


def test_seed_offset_shifts_streams(monkeypatch):
    base = run_experiment(bandit_config(seeds=[3]), write=False)[0]
    monkeypatch.setenv("DLAB_SEED_OFFSET", "2")
    shifted = run_experiment(bandit_config(seeds=[1]), write=False)[0]
    assert shifted.seed == 3 and shifted.reward == base.reward


def test_growth_exponent_on_analytic_curves():
    t = np.arange(1, 10001, dtype=float)
    assert 0.4 <= growth_exponent(np.sqrt(t)) <= 0.6
    assert 0.57 <= growth_exponent(t ** (2 / 3)) <= 0.77
    assert math.isnan(growth_exponent(np.zeros(100)))


def test_single_config_sweep_matches_run():
    cfg = bandit_config(seeds=(0, 1, 2, 3))
    [row] = sweep([cfg])
    direct = summarize(cfg.key, run_experiment(cfg, write=False))
    assert row == direct and row.status == "ok"


def test_sweep_reports_failures_and_carries_on():
    bad = ExperimentConfig(env={"type": "bandit", "means": [0.1, 0.2]}, algo={"name": "ucbvi"}, T=10)
    rows = sweep([bad, bandit_config(T=50)])
    assert [r.status for r in rows] == ["failed", "ok"]
    assert "episodic" in rows[0].error


def test_unknown_algorithm_lists_registered_ids():
    with pytest.raises(UnknownAlgorithm) as info:
        run_experiment(bandit_config(algo="nope"), write=False)
    for name in ("ucb", "eps_greedy", "squarecb", "ucbvi", "lsvi_ucb"):
        assert name in str(info.value)
    assert set(REGISTRY) >= {"ucb", "ucbvi", "pcigw", "e2d", "optimal"}


@pytest.mark.parametrize("raw,msg", [
    ({"env": {"type": "bandit", "means": [0.5]}, "algo": "ucb", "T": 0}, "T must"),
    ({"env": {"type": "bandit", "means": [0.5]}, "algo": "ucb", "T": 5, "seeds": [1, 1]}, "distinct"),
    ({"env": {"means": [0.5]}, "algo": "ucb", "T": 5}, "type"),
    ({"env": {"type": "bandit", "means": [0.5]}, "algo": "ucb", "T": 5, "version": 9}, "version"),
    ({"env": {"type": "bandit", "means": [0.5]}, "algo": "ucb", "T": 5, "colour": 1}, "unknown fields"),
])
def test_config_validation(tmp_path, raw, msg):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(raw))
    with pytest.raises(ConfigError, match=msg):
        load_config(p)


def test_convention_mismatch_rejected():
    cfg = ExperimentConfig(env={"type": "combination_lock", "H": 2}, algo={"name": "ucbvi"}, T=5,
                           convention="per-step")
    with pytest.raises(ConfigError, match="convention"):
        run_experiment(cfg, write=False)


def test_cli_run_and_sweep_exit_codes(tmp_path, capsys):
    good = write_config(tmp_path / "good.json", bandit_config(T=30))
    out = tmp_path / "good.csv"
    assert cli.main(["run", "--config", str(good), "--out", str(out)]) == 0
    assert out.read_text().startswith("t,inst_regret")
    assert cli.main(["run", "--config", str(good)]) == 2

    assert cli.main(["sweep", "--dir", str(tmp_path)]) == 0
    assert (tmp_path / "summary.csv").exists()
    bad = ExperimentConfig(env={"type": "bandit", "means": [0.1, 0.2]}, algo={"name": "ucbvi"}, T=5)
    write_config(tmp_path / "bad.json", bad)
    capsys.readouterr()
    assert cli.main(["sweep", "--dir", str(tmp_path)]) == 1
    assert "failed: bad" in capsys.readouterr().err
    assert cli.main(["sweep", "--dir", str(tmp_path / "empty")]) == 2


def test_cli_dec_eluder_design(tmp_path, capsys):
    prob = tmp_path / "p.json"
    prob.write_text(json.dumps({"means": [[0.2, 0.8], [0.8, 0.2]], "ref_means": [0.5, 0.5], "gamma": 1.0}))
    assert cli.main(["dec", "--problem", str(prob)]) == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["gap"] <= 1e-3 and abs(sum(cert["p"]) - 1) <= 1e-9

    cls = tmp_path / "f.json"
    cls.write_text(json.dumps({"values": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]}))
    assert cli.main(["eluder", "--class", str(cls), "--eps", "0.5"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == 2

    pts = tmp_path / "x.json"
    pts.write_text(json.dumps({"points": np.eye(3).tolist()}))
    assert cli.main(["design", "--points", str(pts)]) == 0
    res = json.loads(capsys.readouterr().out)
    np.testing.assert_allclose(res["design"], 1 / 3, atol=1e-3)

    assert cli.main(["dec", "--problem", str(tmp_path / "missing.json")]) == 2


def test_ucb_beats_eps_greedy_on_ten_arms():
    finals = {}
    for algo in ("ucb", "eps_greedy"):
        ledgers = run_experiment(bandit_config(algo, T=20000, seeds=range(20)), write=False)
        finals[algo] = np.median([led.total for led in ledgers])
    assert finals["ucb"] < finals["eps_greedy"]
