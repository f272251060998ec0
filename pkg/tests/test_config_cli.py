import csv
import json

import numpy as np
import pytest

from bayesloss import config as cfgmod
from bayesloss.cli import main
from bayesloss.config import AnalysisConfig
from bayesloss.errors import ValidationError
from bayesloss.ingest import write_dataset
from bayesloss.posterior import PosteriorDraws, export_draws, import_draws
from bayesloss.synthetic import CONFLICT_OVERRIDES, conflict_dataset

QUICK = ["--n-iter", "3000", "--n-warmup", "500"]


@pytest.fixture(scope="module")
def analog_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "analog.csv"
    write_dataset(conflict_dataset(seed=3), path)
    return path


@pytest.fixture(scope="module")
def fitted(analog_csv, tmp_path_factory):
    out = tmp_path_factory.mktemp("fit")
    code = main(["fit", "--data", str(analog_csv), "--outcome", "recurrence", "--treatment", "pko",
                 "--confirm-coding", "--seed", "5", "--out-dir", str(out), *QUICK])
    assert code == 0
    return out


@pytest.fixture(scope="module")
def normal_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("normal") / "draws.csv"
    x = np.random.default_rng(2020).normal(-0.5, 0.5, 10_000)
    export_draws(PosteriorDraws.from_array(x, "theta", n_chains=4), path)
    return path


def test_config_roundtrip(tmp_path):
    cfg = AnalysisConfig(data="a b.csv", drop=["x"], theta_md_or=[0.5, 0.1],
                         baseline_override={"g": 0.0}, seed=2**63 + 5, grid_step=0.1 + 0.2)
    cfgmod.save(cfg, tmp_path / "c.cfg")
    assert cfgmod.load(tmp_path / "c.cfg") == cfg


def test_config_errors():
    with pytest.raises(ValidationError, match="unknown"):
        cfgmod.loads("nope = 1\n")
    with pytest.raises(ValidationError, match="line 2"):
        cfgmod.loads("# c\nseed 3\n")
    with pytest.raises(ValidationError, match="duplicate"):
        cfgmod.loads("seed = 1\nseed = 2\n")


def test_flags_override_file(tmp_path, normal_csv):
    (tmp_path / "c.cfg").write_text(f'draws = "{normal_csv}"\nparam = "theta"\ntheta_mu_log = 0.5\n'
                                    f'out_dir = "{tmp_path / "o"}"\n')
    assert main(["summarize", "--config", str(tmp_path / "c.cfg"), "--theta-mu-log", "0.0",
                 "--no-plots"]) == 0
    report = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert report["config"]["theta_mu_log"] == 0.0
    assert report["config"]["param"] == "theta"


def test_fit_outputs(fitted):
    report = json.loads((fitted / "fit_report.json").read_text())
    assert report["version"] == "0.1.0" and report["config"]["seed"] == 5
    pko = report["parameters"]["pko"]
    assert set(pko) >= {"mean", "sd", "q2.5", "q97.5", "rhat", "ess_bulk"}
    assert pko["q2.5"] < pko["mean"] < pko["q97.5"]
    assert report["converged"] is True
    draws = import_draws(fitted / "draws.csv")
    assert draws.parameter_names == ("(Intercept)", "pko", "gov_victory", "rebel_victory",
                                     "log_deaths")
    assert draws.n_chains == 4 and draws.n_kept == 2500


def test_fit_requires_confirmation(analog_csv, tmp_path, capsys):
    code = main(["fit", "--data", str(analog_csv), "--outcome", "recurrence", "--treatment",
                 "pko", "--out-dir", str(tmp_path), *QUICK])
    assert code == 2
    assert "--confirm-coding" in capsys.readouterr().err


def test_fit_single_chain_rejected(analog_csv, tmp_path):
    assert main(["fit", "--data", str(analog_csv), "--outcome", "recurrence", "--treatment",
                 "pko", "--confirm-coding", "--n-chains", "1", "--out-dir", str(tmp_path)]) == 2


def test_fit_nonconvergence_exit_3(analog_csv, tmp_path):
    code = main(["fit", "--data", str(analog_csv), "--outcome", "recurrence", "--treatment",
                 "pko", "--confirm-coding", "--n-iter", "12", "--n-warmup", "2",
                 "--out-dir", str(tmp_path)])
    assert code == 3
    assert json.loads((tmp_path / "fit_report.json").read_text())["converged"] is False


def test_missing_file_exit_4(tmp_path):
    assert main(["fit", "--data", str(tmp_path / "nope.csv"), "--outcome", "y",
                 "--confirm-coding", "--out-dir", str(tmp_path)]) == 4
    assert main(["summarize", "--draws", str(tmp_path / "nope.csv")]) == 4


def test_summarize_null_band(normal_csv, tmp_path):
    assert main(["summarize", "--draws", str(normal_csv), "--theta-md-log", "-0.5",
                 "--theta-mu-log", "0.5", "--out-dir", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "summary.json").read_text())
    s = report["results"][0]["summary"]
    assert s["p_theta_int"] == pytest.approx(-0.46, abs=0.02)
    assert s["q_theta_unint"] == pytest.approx(0.02, abs=0.01)
    svg = (tmp_path / "summary.svg").read_text()
    assert svg.startswith("<svg") and 'fill="#000000"' in svg


def test_summarize_default_thresholds(normal_csv, tmp_path):
    assert main(["summarize", "--draws", str(normal_csv), "--out-dir", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "summary.json").read_text())
    mi = report["mean_identity"]
    assert mi["p_theta_int_plus_q_theta_unint"] == pytest.approx(mi["sample_mean"], rel=1e-12)
    s = report["results"][0]["summary"]
    assert s["p_theta_int"] + s["q_theta_unint"] == pytest.approx(mi["sample_mean"], rel=1e-12)
    assert 'fill="#000000"' not in (tmp_path / "summary.svg").read_text()


def test_summarize_bad_threshold(normal_csv, tmp_path):
    assert main(["summarize", "--draws", str(normal_csv), "--theta-md-log", "0.2",
                 "--out-dir", str(tmp_path)]) == 2
    assert main(["summarize", "--draws", str(normal_csv), "--theta-mu-log", "-0.2",
                 "--out-dir", str(tmp_path)]) == 2


def read_sweep(path):
    lines = path.read_text().splitlines()
    assert lines[0] == "ratio,loss_implement,loss_not_implement"
    assert lines[-1].startswith("# crossover_ratio=")
    rows = [list(map(float, r)) for r in csv.reader(lines[1:-1])]
    return np.array(rows), lines[-1].split("=")[1]


def test_sweep_four_panels(fitted, analog_csv):
    code = main(["sweep", "--out-dir", str(fitted), "--data", str(analog_csv), "--outcome",
                 "recurrence", "--treatment", "pko",
                 *sum((["--baseline-override", f"{k}={v}"] for k, v in CONFLICT_OVERRIDES.items()), [])])
    assert code == 0
    report = json.loads((fitted / "sweep.json").read_text())
    crossings = [c["crossover_ratio"] for c in report["curves"]]
    assert [c["label"] for c in report["curves"]] == ["OR 0.5", "OR 0.25", "OR 0.1", "OR 0.05"]
    assert all(a > b for a, b in zip(crossings, crossings[1:]))
    for c in report["curves"]:
        rows, footer = read_sweep(fitted / c["file"])
        assert float(footer) == c["crossover_ratio"]
        assert abs(c["crossover_ratio"] - c["critical_ratio"]) <= 0.01
        assert rows.shape == (99, 3)
    svg = (fitted / "sweep.svg").read_text()
    assert "#9a9a9a" in svg and 'fill="#000000"' in svg


def test_sweep_null_effect(tmp_path):
    x = np.random.default_rng(0).normal(0.0, 1e-3, 400) + 0.5
    export_draws(PosteriorDraws.from_array(x, "theta", n_chains=2), tmp_path / "d.csv")
    assert main(["sweep", "--draws", str(tmp_path / "d.csv"), "--baseline-logodds", "-1",
                 "--theta-md-log", "-0.5", "--out-dir", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "sweep.json").read_text())
    assert report["curves"][0]["crossover_ratio"] is None
    assert read_sweep(tmp_path / "sweep_1.csv")[1] == "none"


def test_sweep_needs_baseline(fitted, tmp_path):
    assert main(["sweep", "--draws", str(fitted / "draws.csv"), "--param", "pko",
                 "--out-dir", str(tmp_path)]) == 2


def test_prob_curve_cli(normal_csv, tmp_path):
    assert main(["prob-curve", "--draws", str(normal_csv), "--baseline-logodds", "-1.0459",
                 "--out-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "prob_curve.csv").read_text().splitlines()
    assert lines[0] == "threshold,revised_likelihood,probability"
    rows = list(csv.reader(lines[1:]))
    assert rows[0][0] == "strict_neg"
    probs = [float(r[2]) for r in rows]
    assert probs == sorted(probs, reverse=True)
    t05 = next(r for r in rows if r[0] == "-0.5")
    assert float(t05[1]) == pytest.approx(0.125, abs=0.005)
    assert (tmp_path / "prob_curve.svg").read_text().startswith("<svg")


def test_prob_curve_threshold_mode(normal_csv, tmp_path):
    assert main(["prob-curve", "--draws", str(normal_csv), "--baseline-logodds", "0",
                 "--curve-mode", "threshold", "--out-dir", str(tmp_path), "--no-plots"]) == 0
    rows = list(csv.reader((tmp_path / "prob_curve.csv").read_text().splitlines()[1:]))
    t1 = next(r for r in rows if r[0] == "-1.0")
    assert float(t1[1]) == pytest.approx(1 / (1 + np.e))


def test_prob_curve_point_mass_steps(tmp_path):
    export_draws(PosteriorDraws.from_array(np.full(20, -1.0), "b", n_chains=2), tmp_path / "d.csv")
    assert main(["prob-curve", "--draws", str(tmp_path / "d.csv"), "--baseline-logodds", "0",
                 "--allow-unconverged", "--out-dir", str(tmp_path), "--no-plots"]) == 0
    rows = list(csv.reader((tmp_path / "prob_curve.csv").read_text().splitlines()[1:]))
    probs = {r[0]: float(r[2]) for r in rows}
    assert probs["-1.0"] == 1.0 and probs["-1.1"] == 0.0
    assert set(probs.values()) == {0.0, 1.0}


def test_check_command(analog_csv, capsys):
    assert main(["check", "--data", str(analog_csv), "--outcome", "recurrence",
                 "--treatment", "pko"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["outcome_ok"] is True


def test_check_single_class(tmp_path):
    (tmp_path / "d.csv").write_text("y,d\n1,0\n1,1\n1,0\n")
    assert main(["check", "--data", str(tmp_path / "d.csv"), "--outcome", "y",
                 "--treatment", "d"]) == 2


def test_selftest_command(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 5
