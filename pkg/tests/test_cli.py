"""Command-line interface: subcommands, file outputs, exit codes."""

import csv
import json

import numpy as np
import pytest

from quadisrk import StateSpaceModel, load_samples, rom_from_dict, save_model
from quadisrk.cli import main

from conftest import random_stable_model


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "model.json"
    save_model(random_stable_model(6, seed=10), path)
    return path


@pytest.fixture
def unstable_model_file(tmp_path):
    path = tmp_path / "unstable.json"
    save_model(StateSpaceModel(E=[[1.0]], A=[[1.0]], B=[1.0], C=[1.0]), path)
    return path


class TestValidate:
    def test_stable_model_exits_zero(self, model_file, capsys):
        assert main(["validate", "--model", str(model_file)]) == 0
        out = capsys.readouterr().out
        assert "asymptotically stable" in out

    def test_unstable_model_exits_two(self, unstable_model_file, capsys):
        assert main(["validate", "--model", str(unstable_model_file)]) == 2
        assert "NOT asymptotically stable" in capsys.readouterr().out

    def test_missing_file_exits_one(self, tmp_path):
        assert main(["validate", "--model", str(tmp_path / "nope.json")]) == 1


class TestReduce:
    def test_isrk_writes_rom_and_trace(self, model_file, tmp_path):
        out = tmp_path / "rom.json"
        trace = tmp_path / "trace.csv"
        code = main(
            [
                "reduce",
                "--method",
                "isrk",
                "--r",
                "2",
                "--model",
                str(model_file),
                "--out",
                str(out),
                "--trace",
                str(trace),
            ]
        )
        assert code == 0
        rom = rom_from_dict(json.loads(out.read_text()))
        assert rom.r == 2
        with open(trace, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "iteration"
        assert len(rows) >= 2

    def test_quad_isrk_from_sample_file(self, model_file, tmp_path):
        samples = tmp_path / "samples.csv"
        quad_args = [
            "--omega-min", "1e-2", "--omega-max", "1e2", "--half-count", "60",
        ]
        code = main(
            ["sample-export", "--model", str(model_file), "--r", "2",
             "--out", str(samples), *quad_args]
        )
        assert code == 0
        out = tmp_path / "rom.json"
        code = main(
            ["reduce", "--method", "quad-isrk", "--r", "2",
             "--samples", str(samples), "--out", str(out), *quad_args]
        )
        assert code == 0
        assert rom_from_dict(json.loads(out.read_text())).r == 2

    def test_quad_isrk_missing_adaptive_points_exits_two(
        self, model_file, tmp_path, capsys
    ):
        # Samples recorded for one quadrature setup cannot serve another.
        samples = tmp_path / "samples.csv"
        assert (
            main(
                ["sample-export", "--model", str(model_file), "--r", "2",
                 "--out", str(samples), "--half-count", "20"]
            )
            == 0
        )
        out = tmp_path / "rom.json"
        code = main(
            ["reduce", "--method", "quad-isrk", "--r", "2",
             "--samples", str(samples), "--out", str(out), "--half-count", "50"]
        )
        assert code == 2
        assert "MissingSample" in capsys.readouterr().err

    def test_intrusive_method_with_samples_is_usage_error(self, tmp_path):
        code = main(
            ["reduce", "--method", "isrk", "--r", "2",
             "--samples", "x.csv", "--out", str(tmp_path / "rom.json")]
        )
        assert code == 1


class TestSweep:
    def test_sweep_writes_csv(self, tmp_path):
        spec = {
            "kind": "rc-ladder",
            "n": 6,
            "seed": 2,
            "r_list": [1, 2],
            "quadrature": {"half_count": 40},
        }
        spec_file = tmp_path / "spec.json"
        spec_file.write_text(json.dumps(spec))
        out = tmp_path / "results.csv"
        assert main(["sweep", "--spec", str(spec_file), "--out", str(out)]) == 0
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 6
        assert rows[0][0] == "method"

    def test_bad_spec_exits_two(self, tmp_path):
        spec_file = tmp_path / "spec.json"
        spec_file.write_text(json.dumps({"kind": "bad", "n": 4, "seed": 0, "r_list": [1]}))
        code = main(["sweep", "--spec", str(spec_file), "--out", str(tmp_path / "o.csv")])
        assert code == 2


class TestSampleExport:
    def test_export_readable_by_replay(self, model_file, tmp_path):
        out = tmp_path / "samples.csv"
        code = main(
            ["sample-export", "--model", str(model_file), "--r", "2",
             "--out", str(out), "--half-count", "30"]
        )
        assert code == 0
        records = load_samples(out)
        assert len(records) >= 60  # at least the node samples
        points = np.array([s for s, _ in records])
        assert np.unique(points).size == points.size


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 1
        capsys.readouterr()

    def test_missing_required_argument(self, capsys):
        assert main(["reduce", "--method", "isrk"]) == 1
        capsys.readouterr()

    def test_no_arguments(self, capsys):
        assert main([]) == 1
        capsys.readouterr()
