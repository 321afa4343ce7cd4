import json

import numpy as np
import pytest
from click.testing import CliRunner

from shapefilter.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, list(args), catch_exceptions=False)


class TestPresets:
    def test_listing(self, runner):
        result = invoke(runner, "presets")
        assert result.exit_code == 0
        for name in ("dryden1", "dryden2", "dryden3", "osc"):
            assert name in result.output


class TestSynthesize:
    def test_preset_report(self, runner):
        result = invoke(runner, "synthesize", "--preset", "dryden2")
        assert result.exit_code == 0
        doc = json.loads(result.output)
        np.testing.assert_allclose(doc["realization"]["B"], [0.125, 0.0], atol=1e-12)

    def test_inline_tf(self, runner):
        result = invoke(
            runner, "synthesize", "--tf", '{"num": [1, 2], "den": [1, 3, 4]}'
        )
        assert result.exit_code == 0
        doc = json.loads(result.output)
        np.testing.assert_allclose(doc["realization"]["B"], [0.5, -0.125], atol=1e-12)

    def test_tf_from_file(self, runner, tmp_path):
        path = tmp_path / "tf.json"
        path.write_text('{"num": [1], "den": [1, 3]}')
        result = invoke(runner, "synthesize", "--tf", str(path))
        assert result.exit_code == 0
        assert json.loads(result.output)["poles"][0]["re"] == pytest.approx(-1 / 3)

    def test_improper_exits_2(self, runner):
        result = runner.invoke(main, ["synthesize", "--tf", '{"num": [1], "den": [1]}'])
        assert result.exit_code == 2
        assert "NotProper" in result.output

    def test_both_sources_rejected(self, runner):
        result = runner.invoke(
            main, ["synthesize", "--preset", "dryden1", "--tf", '{"num": [1], "den": [1, 1]}']
        )
        assert result.exit_code == 2


class TestSimulate:
    def test_deterministic_csv(self, runner, tmp_path):
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out_a, out_b):
            result = invoke(
                runner, "simulate", "--preset", "dryden1", "--L", "32",
                "--grid", "50", "--seed", "3", "--out", str(out),
            )
            assert result.exit_code == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_seed_changes_output(self, runner, tmp_path):
        outs = []
        for seed in ("3", "4"):
            out = tmp_path / f"s{seed}.csv"
            invoke(
                runner, "simulate", "--preset", "dryden1", "--L", "16",
                "--grid", "20", "--seed", seed, "--out", str(out),
            )
            outs.append(out.read_bytes())
        assert outs[0] != outs[1]

    def test_stats_format(self, runner):
        result = invoke(
            runner, "simulate", "--preset", "osc", "--L", "16", "--grid", "12",
            "--n", "5", "--format", "stats",
        )
        assert result.exit_code == 0
        assert "t,mean,var,stderr" in result.output

    def test_config_file_with_flag_override(self, runner, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"preset": "dryden1", "order": 16, "grid": 8, "seed": 1}))
        result = invoke(runner, "simulate", "--config", str(config), "--grid", "6")
        assert result.exit_code == 0
        rows = [l for l in result.output.splitlines() if l and not l.startswith("#")]
        assert rows[0] == "t,x"
        assert len(rows) == 7  # --grid flag beats the config value of 8
        assert "# L = 16" in result.output  # config value beats the default


class TestErrorTable:
    def test_small_table(self, runner):
        result = invoke(
            runner, "error-table", "--preset", "dryden1", "--L", "4,8",
        )
        assert result.exit_code == 0
        rows = [l for l in result.output.splitlines() if not l.startswith("#")]
        values = rows[1].split(",")
        assert float(values[1]) == pytest.approx(0.125603, abs=1e-5)

    def test_unsupported_pole_structure_exits_2(self, runner):
        result = runner.invoke(
            main,
            ["error-table", "--tf", '{"num": [0, 1], "den": [1, 2, 4]}', "--L", "4"],
        )
        assert result.exit_code == 2
        assert "UnsupportedPoleStructure" in result.output


class TestOperator:
    def test_p_dump(self, runner):
        result = invoke(runner, "operator", "--operator", "P", "--T", "5", "--L", "4")
        assert result.exit_code == 0
        assert "0,0,0.2" in result.output

    def test_resonant_exits_3(self, runner):
        result = runner.invoke(
            main,
            [
                "operator", "--operator", "exact",
                "--tf", '{"num": [1], "den": [1, 0, 1]}',
                "--T", str(np.pi), "--L", "4",
            ],
        )
        assert result.exit_code == 3
        assert "Resonant" in result.output

    def test_json_format(self, runner):
        result = invoke(
            runner, "operator", "--operator", "Pinv", "--T", "5", "--L", "3",
            "--format", "json",
        )
        doc = json.loads(result.output)
        assert doc["matrix"][0][0] == pytest.approx(2.5)
