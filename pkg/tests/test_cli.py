"""End-to-end runs of the command-line front end via ``main``."""

import json
from pathlib import Path

import jsonschema
import pytest

from qgame.cli import main

DOCS = Path(__file__).resolve().parents[1] / "docs"
SCHEMA = json.loads((DOCS / "report.schema.json").read_text())
GAUSSIAN = str(DOCS / "examples" / "gaussian.json")
AUTOMATON = str(DOCS / "examples" / "flip_automaton.json")


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, _ = run(capsys, argv + ["--output", "json"])
    return code, json.loads(out)


class TestExitCodes:
    def test_verify_clean_build_passes(self, capsys):
        code, out, err = run(capsys, ["verify"])
        assert code == 0
        assert "[FAIL]" not in out

    def test_verify_corrupted_switch_fails(self, capsys):
        code, out, err = run(capsys, ["verify", "--corrupt", "1e-6"])
        assert code == 1
        assert "hnh" in out

    def test_gamble_rejects_probability_above_one(self, capsys):
        code, out, err = run(capsys, ["gamble", "--p-verify", "1.5"])
        assert code == 2
        assert "p_verify" in err

    def test_walk_rejects_zero_trials(self, capsys):
        code, out, err = run(capsys, ["walk", "--trials", "0"])
        assert code == 2

    def test_market_malformed_file_reports_line(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{\n  "kind": "gaussian",\n  oops\n}')
        code, out, err = run(capsys, ["market", str(bad)])
        assert code == 2
        assert "line 3" in err

    def test_market_missing_file(self, capsys, tmp_path):
        code, out, err = run(capsys, ["market", str(tmp_path / "absent.json")])
        assert code == 2
        assert "absent.json" in err

    def test_unknown_command(self, capsys):
        code, _, _ = run(capsys, ["conjure"])
        assert code == 2

    def test_unknown_check_name(self, capsys):
        code, out, err = run(capsys, ["verify", "--only", "nonsense"])
        assert code == 2
        assert "nonsense" in err


class TestSchema:
    @pytest.mark.parametrize("argv", [
        ["verify", "--only", "hnh"],
        ["newcomb"],
        ["gamble", "--trials", "400"],
        ["walk", "--trials", "1000", "--n-max", "4"],
        ["market", GAUSSIAN],
        ["qfa", AUTOMATON, "--word", "a"],
    ], ids=lambda argv: argv[0])
    def test_json_payload_validates(self, capsys, argv):
        code, payload = run_json(capsys, argv)
        jsonschema.validate(payload, SCHEMA)
        assert payload["tool"] == "qgame"
        assert payload["command"] == argv[0]

    def test_timing_key_is_opt_in(self, capsys):
        _, bare = run_json(capsys, ["newcomb"])
        assert "wall_time_s" not in bare
        _, timed = run_json(capsys, ["newcomb", "--timing"])
        assert timed["wall_time_s"] >= 0.0
        jsonschema.validate(timed, SCHEMA)


class TestDeterminism:
    def test_same_seed_identical_bytes(self, capsys):
        argv = ["gamble", "--trials", "3000", "--seed", "11",
                "--output", "json"]
        _, first, _ = run(capsys, argv)
        _, second, _ = run(capsys, argv)
        assert first == second

    def test_market_output_is_seed_free(self, capsys):
        _, first, _ = run(capsys, ["market", GAUSSIAN, "--output", "json",
                                   "--seed", "1"])
        _, second, _ = run(capsys, ["market", GAUSSIAN, "--output", "json",
                                    "--seed", "99"])
        assert first == second

    def test_out_file_matches_stdout_rendering(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, ["newcomb", "--output", "json",
                                    "--out", str(target)])
        assert code == 0
        assert out == ""
        _, streamed, _ = run(capsys, ["newcomb", "--output", "json"])
        assert target.read_text() == streamed


class TestVerifyCommand:
    def test_only_filters_to_one_check(self, capsys):
        code, payload = run_json(capsys, ["verify", "--only", "hnh"])
        assert code == 0
        assert [c["name"] for c in payload["checks"]] == ["hnh"]

    def test_byproduct_law_table(self, capsys):
        _, payload = run_json(capsys, ["verify", "--only", "hnh"])
        table = payload["tables"]["byproduct_law"]
        assert table["columns"] == ["word", "probability"]
        assert sorted(row[1] for row in table["rows"]) == [0.25] * 4


class TestNewcombCommand:
    def test_default_run_reads_out_the_control(self, capsys):
        code, payload = run_json(capsys, ["newcomb", "--control", "1"])
        assert code == 0
        rows = payload["tables"]["readout"]["rows"]
        assert rows == [[0, 0.0], [1, 1.0]]

    def test_trojan_inverts_nothing_visible(self, capsys):
        _, payload = run_json(capsys, ["newcomb", "--control", "1",
                                       "--breaker", "qutrojan"])
        rows = dict(payload["tables"]["readout"]["rows"])
        assert rows[0] == pytest.approx(1.0, abs=1e-12)


class TestGambleCommand:
    def test_sweep_emits_101_rows(self, capsys):
        code, payload = run_json(capsys, ["gamble", "--sweep",
                                          "--trials", "400"])
        sweep = payload["tables"]["sweep"]
        assert len(sweep["rows"]) == 101
        assert sweep["rows"][0][0] == 0.0
        names = [c["name"] for c in payload["checks"]]
        assert "sweep_within_half_width" in names

    def test_zero_sum_check_always_passes(self, capsys):
        _, payload = run_json(capsys, ["gamble", "--theta", "0.3",
                                       "--p-verify", "0.8", "--trials", "50"])
        by_name = {c["name"]: c for c in payload["checks"]}
        assert by_name["zero_sum"]["status"] == "pass"
        assert by_name["zero_sum"]["deviation"] == 0.0


class TestWalkCommand:
    def test_single_horizon_model_value(self, capsys):
        code, payload = run_json(capsys, ["walk", "--n-max", "1",
                                          "--trials", "2000"])
        assert code == 0
        rows = payload["tables"]["survival"]["rows"]
        assert rows[0][1] == 1.0
        assert rows[1][1] == 0.75


class TestMarketCommand:
    def test_unit_price_row_is_half_half(self, capsys):
        code, payload = run_json(capsys, ["market", GAUSSIAN])
        assert code == 0
        by_price = {row[0]: row for row in payload["tables"]["cdf"]["rows"]}
        assert by_price[1.0][1] == pytest.approx(0.5, abs=1e-8)
        assert by_price[1.0][2] == pytest.approx(0.5, abs=1e-8)

    def test_wigner_checks_pass(self, capsys):
        _, payload = run_json(capsys, ["market", GAUSSIAN])
        by_name = {c["name"]: c for c in payload["checks"]}
        assert by_name["wigner_normalization"]["status"] == "pass"
        assert by_name["wigner_real"]["status"] == "pass"

    def test_csv_rendering_appends_full_grid(self, capsys):
        code, out, _ = run(capsys, ["market", GAUSSIAN, "--grid", "64",
                                    "--output", "csv"])
        assert code == 0
        assert "# table wigner_grid" in out
        tail = out.split("# table wigner_grid\n", 1)[1]
        assert len(tail.strip().splitlines()) == 65  # header plus 64 p-rows

    def test_grid_override_is_reported(self, capsys):
        _, payload = run_json(capsys, ["market", GAUSSIAN, "--grid", "128"])
        assert payload["config"]["n_points"] == 128

    def test_explicit_samples_payload(self, capsys, tmp_path):
        from qgame.market import GridSpec, make_gaussian_strategy, wave_to_json
        psi = make_gaussian_strategy(0.0, 1.0, GridSpec(-8.0, 8.0, 128))
        wave_file = tmp_path / "wave.json"
        wave_file.write_text(wave_to_json(psi))
        code, payload = run_json(capsys, ["market", str(wave_file)])
        assert code == 0
        assert payload["config"]["n_points"] == 128


class TestQfaCommand:
    def test_flip_word_accepts(self, capsys):
        code, payload = run_json(capsys, ["qfa", AUTOMATON, "--word", "a"])
        assert code == 0
        assert payload["tables"]["acceptance"]["rows"] == [
            ["a", pytest.approx(1.0, abs=1e-12)]]

    def test_default_word_is_empty(self, capsys):
        _, payload = run_json(capsys, ["qfa", AUTOMATON])
        rows = payload["tables"]["acceptance"]["rows"]
        assert rows == [["", pytest.approx(0.0, abs=1e-12)]]
