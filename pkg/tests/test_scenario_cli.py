import json
from pathlib import Path

import pytest

import deferral as d
from deferral.cli import main
from deferral.reproduce import load_bundled_scenario, run_case


def _write(tmp_path: Path, name: str, data) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def _single_agent_scenario(**overrides):
    data = {
        "mode": "single_agent",
        "x_max": 8.0,
        "steps": 800,
        "x_s": 4.0,
        "agent": {
            "utility": {"variant": "quadratic", "a": 2.0, "b": 4.0, "k": 5.0},
            "c1": {"variant": "linear", "d": 7.0},
            "c2": {"variant": "linear", "d": 4.0},
            "beliefs": [[[10.0, 1.0]]],
        },
    }
    data.update(overrides)
    return data


class TestLoader:
    def test_bundled_scenarios_load(self):
        for name in ("akerlof", "example42", "trap", "singleton"):
            scenario = load_bundled_scenario(name)
            assert scenario.mode in ("game", "single_agent")

    def test_single_agent_round_trip(self, tmp_path):
        path = _write(tmp_path, "s.json", _single_agent_scenario())
        scenario = d.load_scenario(path)
        assert scenario.x_social == 4.0
        assert scenario.grid == d.Grid(8.0, 800)
        assert scenario.agent.c1 == d.LinearCost(7.0)

    def test_default_steps(self, tmp_path):
        data = _single_agent_scenario()
        del data["steps"]
        scenario = d.load_scenario(_write(tmp_path, "s.json", data))
        assert scenario.grid.steps == 4000

    def test_bad_json_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(d.ScenarioError):
            d.load_scenario(path)

    def test_invalid_agent_reports_code(self, tmp_path):
        data = _single_agent_scenario()
        data["agent"]["utility"]["a"] = 0.0
        with pytest.raises(d.ScenarioError, match="NonPositiveCurvature"):
            d.load_scenario(_write(tmp_path, "s.json", data))

    def test_missing_key_rejected(self, tmp_path):
        data = _single_agent_scenario()
        del data["x_s"]
        with pytest.raises(d.ScenarioError, match="x_s"):
            d.load_scenario(_write(tmp_path, "s.json", data))

    def test_game_scenario(self, tmp_path):
        game = load_bundled_scenario("akerlof").game
        assert game.n == 2
        assert game.agents[0].c1 == d.LinearCost(4.0)

    def test_profile_loader(self, tmp_path):
        path = _write(tmp_path, "p.json", {"profile": [1.0, 2.0]})
        assert d.load_profile(path) == (1.0, 2.0)
        with pytest.raises(d.ScenarioError):
            d.load_profile(_write(tmp_path, "q.json", {"profile": []}))


class TestCliExitCodes:
    def test_choose_succeeds(self, tmp_path, capsys):
        scenario = _write(tmp_path, "s.json", _single_agent_scenario())
        code = main(["choose", scenario, "--output-dir", str(tmp_path / "out")])
        assert code == 0
        out = capsys.readouterr().out
        assert "chosen" in out

    def test_validation_failure_is_2(self, tmp_path, capsys):
        data = _single_agent_scenario()
        data["agent"]["utility"]["a"] = -1.0
        scenario = _write(tmp_path, "s.json", data)
        assert main(["choose", scenario, "--output-dir", str(tmp_path / "out")]) == 2
        assert "NonPositiveCurvature" in capsys.readouterr().err

    def test_precondition_failure_is_3(self, tmp_path, capsys):
        data = _single_agent_scenario()
        data["agent"]["c1"] = {"variant": "zero"}
        scenario = _write(tmp_path, "s.json", data)
        assert main(["consider", scenario, "--output-dir", str(tmp_path / "out")]) == 3
        assert capsys.readouterr().err.startswith("error:")

    def test_io_failure_is_4(self, tmp_path, capsys):
        assert main(["choose", str(tmp_path / "missing.json")]) == 4

    def test_wrong_mode_is_2(self, tmp_path):
        scenario = _write(tmp_path, "s.json", _single_agent_scenario())
        assert main(["equilibria", scenario, "--output-dir", str(tmp_path / "out")]) == 2


class TestCliOutputs:
    def test_consider_writes_points(self, tmp_path):
        scenario = _write(tmp_path, "s.json", _single_agent_scenario())
        out = tmp_path / "out"
        assert main(["consider", scenario, "--output-dir", str(out)]) == 0
        lines = (out / "consideration.csv").read_text().splitlines()
        assert lines[0] == "x"
        values = [float(v) for v in lines[1:]]
        assert values[0] == 1.0 and values[-1] == 4.0

    def test_choose_csv_round_trips(self, tmp_path):
        scenario = _write(tmp_path, "s.json", _single_agent_scenario())
        out = tmp_path / "out"
        assert main(["choose", scenario, "--output-dir", str(out)]) == 0
        header, row = (out / "choose.csv").read_text().splitlines()
        cells = dict(zip(header.split(","), row.split(",")))
        assert float(cells["chosen"]) == 3.75
        assert float(cells["trapped"]) == 0.0

    def test_singleton_scenario_chooses_peak(self, tmp_path):
        out = tmp_path / "out"
        bundled = Path(__file__).resolve().parents[1] / "src/deferral/scenarios/singleton.json"
        assert main(["choose", str(bundled), "--output-dir", str(out)]) == 0
        header, row = (out / "choose.csv").read_text().splitlines()
        cells = dict(zip(header.split(","), row.split(",")))
        assert float(cells["chosen"]) == 1.0
        assert float(cells["trapped"]) == 0.0

    def test_certify_csv(self, tmp_path):
        scenario = _write(tmp_path, "s.json", _single_agent_scenario())
        out = tmp_path / "out"
        assert main(["certify", scenario, "--output-dir", str(out)]) == 0
        header, row = (out / "certify.csv").read_text().splitlines()
        assert header == "holds,selection_size,stage1_size"
        assert row.split(",")[0] == "1"

    def test_equilibria_csv_span(self, tmp_path):
        bundled = Path(__file__).resolve().parents[1] / "src/deferral/scenarios/akerlof.json"
        out = tmp_path / "out"
        assert main(["equilibria", str(bundled), "--steps", "400",
                     "--output-dir", str(out)]) == 0
        lines = (out / "equilibria.csv").read_text().splitlines()
        assert lines[0] == "x_1,x_2,kind,max_regret"
        rows = [line.split(",") for line in lines[1:]]
        xs = [float(r[0]) for r in rows]
        assert min(xs) == 0.0 and max(xs) == 2.0
        assert all(r[0] == r[1] for r in rows)

    def test_equilibria_deferral_flag(self, tmp_path):
        bundled = Path(__file__).resolve().parents[1] / "src/deferral/scenarios/akerlof.json"
        out = tmp_path / "out"
        assert main(["equilibria", str(bundled), "--steps", "400", "--deferral",
                     "--output-dir", str(out)]) == 0
        assert (out / "deferral_equilibria.csv").exists()

    def test_best_response_sweep(self, tmp_path):
        bundled = Path(__file__).resolve().parents[1] / "src/deferral/scenarios/akerlof.json"
        out = tmp_path / "out"
        assert main(["best-response", str(bundled), "--steps", "800", "--agent", "1",
                     "--sweep", "0:8:17", "--output-dir", str(out)]) == 0
        lines = (out / "best_response_agent1.csv").read_text().splitlines()
        assert lines[0] == "opponent,best_response,tie_count"
        curve = {float(r.split(",")[0]): float(r.split(",")[1]) for r in lines[1:]}
        assert curve[0.0] == 0.0 and curve[1.0] == 1.0 and curve[8.0] == 2.0

    def test_loss_command(self, tmp_path):
        game_data = {
            "mode": "game",
            "x_max": 40.0,
            "steps": 800,
            "agents": [
                {
                    "utility": {"variant": "quadratic", "a": 2.0, "b": 4.0, "k": 5.0},
                    "c1": {"variant": "linear", "d": 4.0},
                    "c2": {"variant": "linear", "d": 7.0},
                    "beliefs": [[[40.0, 1.0]]],
                },
                {
                    "utility": {"variant": "quadratic", "a": 2.0, "b": 4.0, "k": 5.0},
                    "c1": {"variant": "linear", "d": 4.0},
                    "c2": {"variant": "linear", "d": 16.0},
                    "beliefs": [[[40.0, 1.0]]],
                },
            ],
        }
        scenario = _write(tmp_path, "g.json", game_data)
        standard = _write(tmp_path, "standard.json", {"profile": [3.75, 4.0]})
        deferred = _write(tmp_path, "deferred.json", {"profile": [1.0, 1.0]})
        out = tmp_path / "out"
        assert main(["loss", scenario, "--standard", standard, "--deferred", deferred,
                     "--output-dir", str(out)]) == 0
        header, row = (out / "loss.csv").read_text().splitlines()
        cells = dict(zip(header.split(","), row.split(",")))
        assert float(cells["total"]) == 32.125

    def test_loss_gate_failure_is_3(self, tmp_path):
        bundled = Path(__file__).resolve().parents[1] / "src/deferral/scenarios/akerlof.json"
        standard = _write(tmp_path, "standard.json", {"profile": [1.0, 1.0]})
        deferred = _write(tmp_path, "deferred.json", {"profile": [1.5, 1.5]})
        assert main(["loss", str(bundled), "--steps", "400", "--standard", standard,
                     "--deferred", deferred, "--output-dir", str(tmp_path / "out")]) == 3


class TestReproduce:
    def test_trap_case(self, tmp_path):
        result = run_case("trap", tmp_path / "trap")
        quantities = {r.quantity: r for r in result.rows}
        assert quantities["x_hat"].oracle == 3.25
        assert quantities["trapped"].oracle == 1.0
        assert (tmp_path / "trap" / "discrepancy.csv").exists()
        assert (tmp_path / "trap" / "trap_report.csv").exists()

    def test_example42_report_rows(self, tmp_path):
        result = run_case("example42", tmp_path / "e42")
        quantities = {r.quantity: r for r in result.rows}
        # oracle-vs-reference columns for the constants under comparison
        assert quantities["b1_low_plateau"].reference == 1.75
        assert quantities["b2_low_plateau"].reference == 4.0
        assert quantities["welfare_gap_total_vs_1_1"].reference == 32.125
        assert quantities["welfare_gap_total_vs_1.5_1.5"].reference == 21.625
        assert quantities["deferral_diagonal_min"].reference == 1.0
        assert quantities["deferral_diagonal_max"].reference == 3.75
        # agreement recorded where the readings coincide
        assert quantities["b1_high_plateau"].oracle == 3.75
        assert quantities["reference_pair_is_after_deferral"].oracle == 0.0
        csv_text = (tmp_path / "e42" / "discrepancy.csv").read_text()
        assert csv_text.startswith("quantity,oracle_value,reference_value,note")

    def test_reproduce_cli(self, tmp_path, capsys):
        assert main(["reproduce", "--case", "trap", "--output-dir", str(tmp_path / "out")]) == 0
        out = capsys.readouterr().out
        assert "oracle" in out and "reference" in out
