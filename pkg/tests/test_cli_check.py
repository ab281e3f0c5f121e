import json

import pytest
from typer.testing import CliRunner

from cli.dbp import app
from dbpsolve.criterion import NOT_SUBSET, CheckOutcome, build_w_system
from dbpsolve.instance import instance_hash

runner = CliRunner(mix_stderr=False)


@pytest.fixture
def tiny_file(write_json, tiny_data):
    return str(write_json("tiny.json", tiny_data))


@pytest.fixture
def pentagon_file(write_json):
    data = {
        "C": [[1, 1]],
        "A": [[1]],
        "a": [1],
        "g": [0],
        "e": [0, 0],
        "D": [[-1, 0], [0, -1], [1, 1], [1, 0], [0, 1]],
        "d": [0, 0, 3, 2, 2],
    }
    return str(write_json("pentagon.json", data))


class TestCheckSubset:
    def test_exits_with_three_on_repaired_certificate(self, tiny_file, tiny, mocker):
        mocker.patch(
            "cli.check.run_check_subset",
            return_value=CheckOutcome(NOT_SUBSET, build_w_system(tiny, 1), repair={"row": 0, "repaired_row": 1}),
        )

        result = runner.invoke(app, ["check-subset", tiny_file, "--h", "1"])

        assert result.exit_code == 3
        assert json.loads(result.stdout)["repair"] == {"row": 0, "repaired_row": 1}

    def test_not_subset_above_optimum(self, tiny_file, tiny):
        result = runner.invoke(app, ["check-subset", tiny_file, "--h", "100/1"])

        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["instance_hash"] == instance_hash(tiny)
        assert report["verdict"] == "NotSubset"
        assert report["h"] == "100"
        assert len(report["certificate"]["values"]) == 5

    def test_subset_below_optimum(self, tiny_file):
        result = runner.invoke(app, ["check-subset", tiny_file, "--h", "-1"])

        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["verdict"] == "Subset"
        assert "certificate" not in report
        assert isinstance(report["evidence"], list)

    def test_writes_report_to_out_dir(self, tiny_file, tiny, out_dir):
        result = runner.invoke(app, ["check-subset", tiny_file, "--h", "1/2", "--out", str(out_dir)])

        assert result.exit_code == 0
        saved = json.loads((out_dir / f"check-subset-{instance_hash(tiny)}.json").read_text())
        assert saved["verdict"] == "NotSubset"

    def test_rejects_malformed_level(self, tiny_file):
        result = runner.invoke(app, ["check-subset", tiny_file, "--h", "0.5"])

        assert result.exit_code == 2
        assert "h has to be an integer or a fraction P/Q" in result.stderr

    def test_requires_level(self, tiny_file):
        result = runner.invoke(app, ["check-subset", tiny_file])

        assert result.exit_code == 2
        assert "--h" in result.stderr

    def test_refuses_polytope_that_is_not_perfect(self, pentagon_file):
        result = runner.invoke(app, ["check-subset", pentagon_file, "--h", "0"])

        assert result.exit_code == 2
        assert result.stdout == ""

    def test_skip_validation_runs_criterion_anyway(self, pentagon_file, mocker):
        mock_check = mocker.patch("cli.check.run_check_subset")
        mock_check.return_value.to_dict.return_value = {"verdict": "Subset"}

        result = runner.invoke(app, ["check-subset", pentagon_file, "--h", "0", "--skip-validation"])

        assert result.exit_code == 0
        assert json.loads(result.stdout)["verdict"] == "Subset"
        assert mock_check.call_args[0][1] == 0

    def test_exits_with_two_for_empty_x(self, write_json, tiny_data):
        tiny_data["a"] = [-1]

        result = runner.invoke(app, ["check-subset", str(write_json("empty.json", tiny_data)), "--h", "0"])

        assert result.exit_code == 2

    def test_exits_with_two_for_affine_instance(self, write_json, tiny_data):
        tiny_data.update(C=[[-1]], a=[2], g=[1])

        result = runner.invoke(app, ["check-subset", str(write_json("affine.json", tiny_data)), "--h", "0"])

        assert result.exit_code == 2


class TestCheckPerfect:
    def test_perfect_polytope(self, tiny_file):
        result = runner.invoke(app, ["check-perfect", tiny_file])

        assert result.exit_code == 0
        report = json.loads(result.stdout)
        assert report["is_perfect"] is True
        assert report["vertices"] == [["0"], ["1"]]
        assert report["violations"] == []

    def test_exits_with_two_and_prints_witnesses(self, pentagon_file):
        result = runner.invoke(app, ["check-perfect", pentagon_file])

        assert result.exit_code == 2
        report = json.loads(result.stdout)
        assert report["is_perfect"] is False
        assert {"kind": "b", "witness": {"rows": [3, 4], "point": ["2", "2"]}} in report["violations"]
