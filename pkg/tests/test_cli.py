"""Tests for the command-line interface."""
import csv
import io
import itertools
import json
import math

import pytest

from src.bounds.certificate import TheoremId
from src.cli.commands import CSV_COLUMNS, cmd_certify, cmd_mc_risk
from src.cli.config import ExperimentConfig
from src.cli.main import EXIT_BUDGET, EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION, main
from src.utils.errors import BudgetExceededError
from src.verify.lemmas import CHECKS, Trial


CONCRETE_AT_100 = 4.0 * math.log(1.0 + 4.0 * math.sqrt(8.0)) / 100


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestCertify:
    """Test the certify command."""

    def test_writes_certificates(self, experiment_payload, write_config, tmp_path):
        """Test the concrete and minimax values for the Gaussian example."""
        out = tmp_path / "out"
        assert main(["certify", "--config", str(write_config(experiment_payload)), "--out", str(out)]) == EXIT_OK
        report = read_json(out / "certificates.json")
        values = {c["theorem_id"]: c["value"] for c in report["results"][0]["certificates"]}
        assert values["gaussian-decay-concrete"] == pytest.approx(0.100431, abs=1e-5)
        assert values["gaussian-decay-concrete"] == pytest.approx(CONCRETE_AT_100, rel=1e-12)
        assert values["minimax"] == pytest.approx(0.105431, abs=1e-5)
        assert report["results"][0]["minimum"] == "gaussian-decay-concrete"
        assert report["config"]["family"] == "gaussian"
        assert "version" in report

    def test_sample_gate_inapplicable(self, experiment_payload):
        """Test that mixed-regime at n = 1 is listed with the failing hypothesis."""
        experiment_payload.update(n=[1], certificates=["mixed-regime"])
        report = cmd_certify(ExperimentConfig.model_validate(experiment_payload))
        result = report.results[0]
        assert result.certificates == []
        assert result.inapplicable[0].theorem_id == TheoremId.MIXED_REGIME
        assert result.inapplicable[0].hypothesis == "n >= 2(d+1)/b"
        assert result.minimum is None

    def test_sample_path_without_theta_star(self, experiment_payload, tmp_path):
        """Test that an observed sample yields an estimate and drops theta*-dependent bounds."""
        (tmp_path / "sample.csv").write_text("0.1\n-0.2\n0.05\n", encoding="utf-8")
        del experiment_payload["theta_star"]
        experiment_payload.update(sample_path="sample.csv", certificates=["minimax", "general"])
        report = cmd_certify(ExperimentConfig.model_validate(experiment_payload), base_dir=tmp_path)
        result = report.results[0]
        assert result.resolvability is None
        assert [c.theorem_id for c in result.certificates] == [TheoremId.MINIMAX]
        assert result.inapplicable[0].hypothesis == "theta_star supplied"
        assert report.estimate.n == 3
        assert report.estimate.eps == pytest.approx(math.sqrt(2.0 / 3.0))

    def test_resolvability_reported(self, experiment_payload):
        """Test that an on-grid theta* has zero resolvability."""
        report = cmd_certify(ExperimentConfig.model_validate(experiment_payload))
        assert report.results[0].resolvability == pytest.approx(0.0, abs=1e-15)
        assert report.results[0].grid_points == 43

    def test_tail_bound(self, experiment_payload):
        """Test the tail bound exp(-n t/2) times the Kraft sum."""
        experiment_payload["t"] = 0.2
        tail = cmd_certify(ExperimentConfig.model_validate(experiment_payload)).results[0].tail
        assert tail.kraft_sum == pytest.approx(43.0)
        assert tail.bound == pytest.approx(43.0 * math.exp(-10.0), rel=1e-10)


class TestConfigErrors:
    """Test configuration failures."""

    def test_empty_certificate_list(self, experiment_payload, write_config, tmp_path, capsys):
        """Test that an empty certificate list exits 2 with the field path."""
        experiment_payload["certificates"] = []
        status = main(["certify", "--config", str(write_config(experiment_payload)), "--out", str(tmp_path)])
        assert status == EXIT_CONFIG
        assert "certificates" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        """Test that an unreadable config exits 2."""
        status = main(["certify", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)])
        assert status == EXIT_CONFIG
        assert "cannot read config" in capsys.readouterr().err

    def test_unknown_family(self, experiment_payload, write_config, tmp_path):
        """Test that an unknown family is a config error."""
        experiment_payload["family"] = "cauchy"
        status = main(["certify", "--config", str(write_config(experiment_payload)), "--out", str(tmp_path)])
        assert status == EXIT_CONFIG

    def test_theta_star_length(self, experiment_payload, write_config, tmp_path, capsys):
        """Test that theta_star must match dim."""
        experiment_payload["theta_star"] = [0.0, 1.0]
        status = main(["certify", "--config", str(write_config(experiment_payload)), "--out", str(tmp_path)])
        assert status == EXIT_CONFIG
        assert "theta_star must have 1 entries" in capsys.readouterr().err

    def test_mc_risk_needs_theta_star(self, experiment_payload, write_config, tmp_path):
        """Test that mc-risk without theta* is a config error."""
        (tmp_path / "sample.csv").write_text("0.1\n", encoding="utf-8")
        del experiment_payload["theta_star"]
        experiment_payload["sample_path"] = "sample.csv"
        status = main(["mc-risk", "--config", str(write_config(experiment_payload)), "--out", str(tmp_path)])
        assert status == EXIT_CONFIG

    def test_zero_trials(self, tmp_path):
        """Test that verify-lemmas rejects --trials 0."""
        assert main(["verify-lemmas", "--trials", "0", "--out", str(tmp_path)]) == EXIT_CONFIG


class TestMcRisk:
    """Test the mc-risk command."""

    def run(self, payload, write_config, out, *extra):
        return main(["mc-risk", "--config", str(write_config(payload)), "--out", str(out), *extra])

    def test_csv_output(self, experiment_payload, write_config, tmp_path):
        """Test the CSV header, CRLF line endings and the concrete comparison."""
        status = self.run(experiment_payload, write_config, tmp_path)
        assert status in (EXIT_OK, EXIT_VIOLATION)
        raw = (tmp_path / "mc_risk.csv").read_bytes()
        assert raw.startswith(",".join(CSV_COLUMNS).encode() + b"\r\n")
        rows = list(csv.DictReader(io.StringIO(raw.decode("utf-8"))))
        concrete = [r for r in rows if r["certificate_id"] == "gaussian-decay-concrete"]
        assert concrete[0]["satisfied"] == "true"
        assert concrete[0]["seed"] == "7"
        assert {r["n"] for r in rows} == {"100"}

    def test_same_seed_same_output(self, experiment_payload, write_config, tmp_path):
        """Test that two runs with one seed write identical CSV files."""
        self.run(experiment_payload, write_config, tmp_path / "a", "--seed", "11")
        self.run(experiment_payload, write_config, tmp_path / "b", "--seed", "11")
        assert (tmp_path / "a" / "mc_risk.csv").read_bytes() == (tmp_path / "b" / "mc_risk.csv").read_bytes()

    def test_singleton_grid(self, experiment_payload, write_config, tmp_path):
        """Test that a one-point grid containing theta* has zero risk."""
        experiment_payload["grid"] = {"eps": 0.1, "lower": [0.0], "upper": [0.0]}
        experiment_payload["certificates"] = ["general"]
        assert self.run(experiment_payload, write_config, tmp_path) == EXIT_OK
        risk = read_json(tmp_path / "mc_risk.json")["runs"][0]["risk"]
        assert risk["mc_risk"] == 0.0
        assert risk["stderr"] == 0.0
        assert risk["entropy_hat"] == 0.0

    def test_budget_exceeded(self, experiment_payload, write_config, tmp_path, mocker):
        """Test that a budget overrun exits 3 and still writes a partial report."""
        mocker.patch("src.cli.commands.budget_deadline", return_value=-1.0)
        status = self.run(experiment_payload, write_config, tmp_path, "--budget-seconds", "1")
        assert status == EXIT_BUDGET
        report = read_json(tmp_path / "mc_risk.json")
        assert report["partial"] is True
        assert report["runs"] == []
        assert (tmp_path / "mc_risk.csv").read_text(encoding="utf-8").strip() == ",".join(CSV_COLUMNS)

    def test_budget_spans_sample_sizes(self, experiment_payload, mocker):
        """Test that one budget covers every sample size and the tail checks."""
        # each replicate advances the clock by one tick: 5 risk + 5 tail ticks per n
        mocker.patch("src.verify.risk._clock", side_effect=itertools.count())
        experiment_payload.update(n=[25, 50], t=0.2)
        config = ExperimentConfig.model_validate(experiment_payload)
        with pytest.raises(BudgetExceededError) as info:
            cmd_mc_risk(config, seed=7, reps=5, budget_seconds=12, threads=1)
        partial = info.value.partial
        assert partial.partial is True
        assert [run.risk.n for run in partial.runs] == [25]
        assert partial.runs[0].tail is not None

    def test_budget_covers_tail_check(self, experiment_payload, mocker):
        """Test that the tail frequency run is stopped by the command budget."""
        mocker.patch("src.verify.risk._clock", side_effect=itertools.count())
        experiment_payload.update(n=[25], t=0.2)
        config = ExperimentConfig.model_validate(experiment_payload)
        with pytest.raises(BudgetExceededError) as info:
            cmd_mc_risk(config, seed=7, reps=5, budget_seconds=7, threads=1)
        assert info.value.partial.runs == []

    def test_budget_not_reached(self, experiment_payload, mocker):
        """Test that a sweep finishing inside its budget returns every run."""
        mocker.patch("src.verify.risk._clock", side_effect=itertools.count())
        experiment_payload.update(n=[25, 50], t=0.2)
        config = ExperimentConfig.model_validate(experiment_payload)
        report = cmd_mc_risk(config, seed=7, reps=5, budget_seconds=20, threads=1)
        assert [run.risk.n for run in report.runs] == [25, 50]
        assert report.partial is False


class TestVerifyLemmas:
    """Test the verify-lemmas command."""

    def test_writes_ledger(self, tmp_path):
        """Test that a short run passes and writes no replay files."""
        assert main(["verify-lemmas", "--seed", "3", "--trials", "2", "--out", str(tmp_path)]) == EXIT_OK
        report = read_json(tmp_path / "lemma_ledger.json")
        assert report["seed"] == 3
        assert all(r["failures"] == 0 for r in report["ledger"]["records"])
        assert not (tmp_path / "replay").exists()

    def test_ledger_reports_capped_trials(self, tmp_path, mocker):
        """Test that a capped check shows both the trials run and the trials requested."""
        mocker.patch.dict(CHECKS, {"capped": (lambda rng: Trial(1.0, 1.0, {}), 2)}, clear=True)
        assert main(["verify-lemmas", "--seed", "3", "--trials", "5", "--out", str(tmp_path)]) == EXIT_OK
        record = read_json(tmp_path / "lemma_ledger.json")["ledger"]["records"][0]
        assert record["check_id"] == "capped"
        assert record["trials"] == 2
        assert record["requested_trials"] == 5
