"""solver_config.json, 시나리오 로더, main() 종료 코드와 출력 파일 시험"""
import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pytest

from main import main
from src.energy.measure import DiscreteMeasure
from src.errors import (GeometryError, InfeasibleProblemError, NonConvergenceError, ScenarioError, VerificationError,
                        exit_code_for)
from src.report.template import format_timestamp
from src.scenario.builder import build_scenario
from src.scenario.config import SolverConfig, load_scenario, scenario_from_dict
from src.solver.options import Solution, StepRule

SCENARIOS = Path(__file__).resolve().parent / "scenarios"
TOY = SCENARIOS / "two_point_toy.json"


def _write(path: Path, data) -> Path:
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def _run(tmp_path: Path, *args: str, out: str = "out") -> int:
    return main([*args, "--out", str(tmp_path / out), "--config", str(tmp_path / "solver_config.json")])


def _toy(tmp_path: Path, **overrides) -> Path:
    data = json.loads(TOY.read_text(encoding="utf-8"))
    data.update(overrides)
    return _write(tmp_path / "scenario.json", data)


class TestExitCodes:
    @pytest.mark.parametrize("error, code", [
        (GeometryError("bad cloud"), 1),
        (InfeasibleProblemError("no mass"), 1),
        (NonConvergenceError("slow"), 2),
        (VerificationError("ineq1"), 3),
        (RuntimeError("other"), 1),
    ])
    def test_exit_code_for(self, error, code):
        assert exit_code_for(error) == code


class TestReportText:
    def test_timestamp_is_seoul_time(self):
        assert format_timestamp(datetime(2026, 1, 1, 0, 0, tzinfo=timezone.utc)) == "2026-01-01 09:00:00"

    def test_timestamp_crosses_the_date_line(self):
        assert format_timestamp(datetime(2026, 6, 30, 20, 30, 15, tzinfo=timezone.utc)) == "2026-07-01 05:30:15"


class TestSolverConfig:
    def test_missing_file_writes_defaults(self, tmp_path):
        path = tmp_path / "solver_config.json"
        config = SolverConfig(path)
        assert path.exists()
        saved = json.loads(path.read_text(encoding="utf-8"))
        assert saved["solver"]["gap_tol"] == config.options.gap_tol
        assert config.eps_supp_rel == pytest.approx(1e-8)
        assert config.eps_ineq_rel == pytest.approx(1e-6)

    def test_partial_file_is_completed(self, tmp_path):
        path = _write(tmp_path / "solver_config.json", {"solver": {"gap_tol": 1e-6, "step_rule": "fixed_decay"}})
        options = SolverConfig(path).options
        assert options.gap_tol == pytest.approx(1e-6)
        assert options.step_rule is StepRule.FIXED_DECAY

    @pytest.mark.parametrize("content", [
        '{"solver": {"max_iters": 0}}',
        '{"solver": {"algorithm": "newton"}}',
        '{"verifier": {"eps_ineq_rel": -1}}',
        '{"solver": ',
        '[1, 2]',
    ])
    def test_invalid_file_reverts_to_defaults(self, tmp_path, content):
        path = tmp_path / "solver_config.json"
        path.write_text(content, encoding="utf-8")
        config = SolverConfig(path)
        defaults = SolverConfig(tmp_path / "fresh.json")
        assert config.options == defaults.options
        assert json.loads(path.read_text(encoding="utf-8")) == json.loads(
            (tmp_path / "fresh.json").read_text(encoding="utf-8"))


class TestScenarioLoader:
    def test_toy_scenario(self):
        scenario = load_scenario(TOY)
        assert scenario.name == "two_point_toy"
        assert scenario.block("g") == {"kind": "constant", "value": 1.0}
        problem = build_scenario(scenario).problem
        assert problem.size == 2
        np.testing.assert_array_equal(problem.sigma.weights, [1.0, 1.0])

    @pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
    def test_shipped_scenarios_load(self, path):
        assert load_scenario(path).name == path.stem

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError):
            load_scenario(tmp_path / "nope.json")

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ScenarioError):
            load_scenario(path)

    @pytest.mark.parametrize("data", [
        {"kernel": {"kind": "matrix", "entries": [[1.0]]}, "colour": "blue"},
        {"sigma": {"kind": "values", "values": [1.0]}},
        {"kernel": {"kind": "riesz", "alpha": 1.0}},
        {"kernel": {"kind": "matrix", "entries": [[1.0]]}, "family": {"kind": "spiral"}},
        {"kernel": {"kind": "matrix", "entries": [[1.0]]}, "normalization": 0},
        [],
    ])
    def test_invalid_documents(self, data):
        with pytest.raises(ScenarioError):
            scenario_from_dict(data)


class TestMain:
    def test_solve_toy(self, tmp_path):
        assert _run(tmp_path, "solve", "--scenario", str(TOY)) == 0
        out = tmp_path / "out"
        solution = Solution.from_dict(json.loads((out / "solution.json").read_text(encoding="utf-8")))
        assert solution.converged
        assert solution.value == pytest.approx(1.5, abs=1e-9)
        np.testing.assert_allclose(solution.weights, [0.5, 0.5], atol=1e-6)
        assert (out / "profile.csv").exists()
        assert (out / "equilibrium.log").exists()
        records = [json.loads(line) for line in (out / "run_log.jsonl").read_text(encoding="utf-8").splitlines()]
        assert records and all(r["run_id"] == records[0]["run_id"] for r in records)
        assert (tmp_path / "solver_config.json").exists()

    def test_lambda_csv_reingests_exactly(self, tmp_path):
        assert _run(tmp_path, "solve", "--scenario", str(TOY)) == 0
        out = tmp_path / "out"
        solution = Solution.from_dict(json.loads((out / "solution.json").read_text(encoding="utf-8")))
        reread = DiscreteMeasure.from_csv(out / "lambda.csv")
        assert np.array_equal(reread.weights, solution.weights)

    def test_deterministic(self, tmp_path):
        assert _run(tmp_path, "solve", "--scenario", str(TOY), out="a") == 0
        assert _run(tmp_path, "solve", "--scenario", str(TOY), out="b") == 0
        first = (tmp_path / "a" / "solution.json").read_bytes()
        assert first == (tmp_path / "b" / "solution.json").read_bytes()

    def test_verify_passes(self, tmp_path):
        assert _run(tmp_path, "verify", "--scenario", str(TOY)) == 0
        report = json.loads((tmp_path / "out" / "report.json").read_text(encoding="utf-8"))
        assert report["passed"] is True
        assert report["w"] == pytest.approx(1.5, abs=1e-6)

    def test_verify_with_bad_w_exits_3(self, tmp_path):
        assert _run(tmp_path, "verify", "--scenario", str(TOY), "--w", "10") == 3
        report = json.loads((tmp_path / "out" / "report.json").read_text(encoding="utf-8"))
        assert report["passed"] is False

    def test_infeasible_exits_1(self, tmp_path):
        path = _toy(tmp_path, sigma={"kind": "values", "values": [0.3, 0.3]})
        assert _run(tmp_path, "solve", "--scenario", str(path)) == 1

    def test_non_convergence_exits_2(self, tmp_path):
        path = _toy(tmp_path, solver={"step_rule": "fixed_decay", "max_iters": 1})
        assert _run(tmp_path, "solve", "--scenario", str(path)) == 2
        solution = json.loads((tmp_path / "out" / "solution.json").read_text(encoding="utf-8"))
        assert solution["converged"] is False

    def test_gap_tol_flag_overrides_scenario(self, tmp_path):
        assert _run(tmp_path, "solve", "--scenario", str(TOY), "--gap-tol", "1e-3", "--algorithm", "pg") == 0
        solution = json.loads((tmp_path / "out" / "solution.json").read_text(encoding="utf-8"))
        options = solution["provenance"]["options"]
        assert options["gap_tol"] == pytest.approx(1e-3)
        assert options["algorithm"] == "projected_gradient"

    def test_capacity(self, tmp_path):
        assert _run(tmp_path, "capacity", "--scenario", str(TOY)) == 0
        data = json.loads((tmp_path / "out" / "capacity.json").read_text(encoding="utf-8"))
        assert data["capacity"] == pytest.approx(2.0 / 3.0, rel=1e-9)
        assert data["subset"] == [0, 1]
        assert data["identities_ok"] is True
        assert data["min_potential"] == pytest.approx(1.0, rel=1e-9)
        assert data["identity_error"] <= 1e-8
        theta = DiscreteMeasure.from_csv(tmp_path / "out" / "theta.csv")
        np.testing.assert_allclose(theta.weights, [1.0 / 3.0, 1.0 / 3.0], rtol=1e-6)

    def test_converge(self, tmp_path):
        path = _toy(tmp_path, family={"kind": "decreasing", "sigma_scale": [1.5, 1.2, 1.0]},
                    solver={"gap_tol": 1e-13})
        assert _run(tmp_path, "converge", "--scenario", str(path)) == 0
        data = json.loads((tmp_path / "out" / "family.json").read_text(encoding="utf-8"))
        assert data["passed"] is True
        assert len(data["stages"]) == 3
        assert (tmp_path / "out" / "family.csv").exists()

    def test_dump_matrix(self, tmp_path):
        assert _run(tmp_path, "solve", "--scenario", str(TOY), "--dump-matrix") == 0
        entries = np.loadtxt(tmp_path / "out" / "matrix.csv", delimiter=",")
        np.testing.assert_array_equal(entries, [[2.0, 1.0], [1.0, 2.0]])

    def test_missing_scenario_argument(self, tmp_path):
        assert _run(tmp_path, "solve") == 1

    def test_unknown_scenario_file(self, tmp_path):
        assert _run(tmp_path, "solve", "--scenario", str(tmp_path / "missing.json")) == 1

    def test_unknown_example(self, tmp_path):
        assert _run(tmp_path, "example", "example9") == 1
