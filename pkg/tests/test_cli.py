"""End-to-end CLI contract tests through the real interpreter."""

import os
import subprocess
import sys

import numpy as np
import pytest

from expofuse import MultiChannelImage, read_pnm, write_pnm
from expofuse.sampledata import write_desk_stack


def run_cli(args, cwd, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "expofuse", *args],
        cwd=cwd,
        env=env,
        capture_output=True,
        text=True,
        timeout=120,
    )


def write_gray(path, values):
    img = MultiChannelImage(channels=(np.asarray(values, dtype=np.float64),))
    path.write_bytes(write_pnm(img))
    return img


@pytest.fixture()
def small_input(tmp_path):
    rng = np.random.default_rng(61)
    values = rng.integers(0, 256, size=(16, 16)).astype(np.float64) / 255.0
    write_gray(tmp_path / "a.pgm", values)
    return tmp_path / "a.pgm"


@pytest.fixture(scope="module")
def desk_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("desk")
    write_desk_stack(directory)
    return directory


class TestFuse:
    def test_single_input_identity(self, tmp_path, small_input):
        out = tmp_path / "out.pgm"
        proc = run_cli(
            ["fuse", "-o", str(out), "--detail-mode", "user", "--alpha1", "1", str(small_input)],
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout == ""
        original = read_pnm(small_input.read_bytes()).channels[0]
        fused = read_pnm(out.read_bytes()).channels[0]
        assert np.abs(fused - original).max() <= 1.0 / 255.0 + 1e-12

    def test_defaults_on_bracket(self, tmp_path, desk_dir):
        out = tmp_path / "fused.ppm"
        inputs = sorted(str(p) for p in desk_dir.glob("desk_*.ppm"))
        proc = run_cli(["fuse", "-o", str(out)] + inputs, tmp_path)
        assert proc.returncode == 0, proc.stderr
        img = read_pnm(out.read_bytes())
        assert len(img.channels) == 3
        assert (img.width, img.height) == (128, 128)

    def test_dimension_mismatch_exits_3_and_names_file(self, tmp_path, small_input):
        write_gray(tmp_path / "b.pgm", np.zeros((8, 8)))
        proc = run_cli(
            ["fuse", "-o", "x.pgm", str(small_input), str(tmp_path / "b.pgm")], tmp_path
        )
        assert proc.returncode == 3
        assert "b.pgm" in proc.stderr
        assert not (tmp_path / "x.pgm").exists()

    def test_byte_identical_across_runs_and_thread_counts(self, tmp_path, desk_dir):
        inputs = sorted(str(p) for p in desk_dir.glob("desk_*.ppm"))
        outputs = []
        thread_envs = [
            {"OMP_NUM_THREADS": "1", "OPENBLAS_NUM_THREADS": "1", "MKL_NUM_THREADS": "1"},
            {"OMP_NUM_THREADS": "8", "OPENBLAS_NUM_THREADS": "8", "MKL_NUM_THREADS": "8"},
            {"OMP_NUM_THREADS": "1", "OPENBLAS_NUM_THREADS": "1", "MKL_NUM_THREADS": "1"},
        ]
        for i, env_extra in enumerate(thread_envs):
            out = tmp_path / f"out_{i}.ppm"
            proc = run_cli(["fuse", "-o", str(out)] + inputs, tmp_path, env_extra)
            assert proc.returncode == 0, proc.stderr
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_missing_input_exits_2(self, tmp_path):
        proc = run_cli(["fuse", "-o", "out.pgm", "nope.pgm"], tmp_path)
        assert proc.returncode == 2
        assert "nope.pgm" in proc.stderr

    def test_malformed_file_exits_2_with_offset(self, tmp_path):
        bad = tmp_path / "bad.pgm"
        bad.write_bytes(b"P5\n4 4\n255\n\x00\x00")
        proc = run_cli(["fuse", "-o", "out.pgm", str(bad)], tmp_path)
        assert proc.returncode == 2
        assert "byte offset" in proc.stderr

    def test_invalid_lambda_exits_3(self, tmp_path, small_input):
        proc = run_cli(
            ["fuse", "-o", "out.pgm", "--lambda", "1.5", str(small_input)], tmp_path
        )
        assert proc.returncode == 3
        assert "--lambda" in proc.stderr

    def test_infeasible_levels_exits_3(self, tmp_path, small_input):
        proc = run_cli(
            ["fuse", "-o", "out.pgm", "--levels", "6", str(small_input)], tmp_path
        )
        assert proc.returncode == 3

    def test_unwritable_output_exits_2(self, tmp_path, small_input):
        proc = run_cli(
            ["fuse", "-o", "missing_dir/out.pgm", str(small_input)], tmp_path
        )
        assert proc.returncode == 2


class TestUsageErrors:
    def test_no_subcommand(self, tmp_path):
        proc = run_cli([], tmp_path)
        assert proc.returncode == 1

    def test_unknown_flag(self, tmp_path):
        proc = run_cli(["fuse", "-o", "x.pgm", "--bogus", "a.pgm"], tmp_path)
        assert proc.returncode == 1

    def test_missing_required_output(self, tmp_path):
        proc = run_cli(["fuse", "a.pgm"], tmp_path)
        assert proc.returncode == 1

    def test_help_exits_zero(self, tmp_path):
        proc = run_cli(["--help"], tmp_path)
        assert proc.returncode == 0
        assert "fuse" in proc.stdout


class TestDecompose:
    def test_layers_reassemble_to_input(self, tmp_path, small_input):
        base_out = tmp_path / "base.pgm"
        detail_out = tmp_path / "detail.pgm"
        proc = run_cli(
            ["decompose", "--base", str(base_out), "--detail", str(detail_out),
             str(small_input)],
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        base = read_pnm(base_out.read_bytes()).channels[0]
        encoded = read_pnm(detail_out.read_bytes()).channels[0]
        detail = 2.0 * encoded - 1.0
        original = read_pnm(small_input.read_bytes()).channels[0]
        # each written layer carries up to half a gray level of quantization,
        # and the offset encoding doubles the detail's step
        assert np.abs((base + detail) - original).max() <= 2.0 / 255.0

    def test_weight_dump(self, tmp_path, small_input):
        proc = run_cli(
            ["decompose", "--base", "b.pgm", "--detail", "d.pgm",
             "--weights", "w.pgm", str(small_input)],
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        weights = read_pnm((tmp_path / "w.pgm").read_bytes())
        assert len(weights.channels) == 1

    def test_rgb_input_keeps_channels(self, tmp_path, desk_dir):
        proc = run_cli(
            ["decompose", "--base", "b.ppm", "--detail", "d.ppm",
             str(desk_dir / "desk_1.ppm")],
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        assert len(read_pnm((tmp_path / "b.ppm").read_bytes()).channels) == 3


class TestMetrics:
    def test_entropy_only(self, tmp_path):
        write_gray(tmp_path / "c.pgm", np.full((8, 8), 0.5))
        proc = run_cli(["metrics", "--entropy", "c.pgm"], tmp_path)
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.strip() == "0.000000,,"

    def test_mse_only(self, tmp_path):
        write_gray(tmp_path / "r.pgm", np.full((4, 4), 100.0 / 255.0))
        write_gray(tmp_path / "t.pgm", np.full((4, 4), 110.0 / 255.0))
        proc = run_cli(["metrics", "--mse", "t.pgm", "r.pgm"], tmp_path)
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.strip() == ",1.000000,"

    def test_both_fields(self, tmp_path):
        write_gray(tmp_path / "c.pgm", np.full((8, 8), 0.5))
        proc = run_cli(["metrics", "--entropy", "c.pgm", "--mse", "c.pgm", "c.pgm"], tmp_path)
        assert proc.stdout.strip() == "0.000000,0.000000,"

    def test_no_flags_prints_empty_fields(self, tmp_path):
        proc = run_cli(["metrics"], tmp_path)
        assert proc.returncode == 0
        assert proc.stdout.strip() == ",,"

    def test_mse_dimension_mismatch_exits_3(self, tmp_path):
        write_gray(tmp_path / "r.pgm", np.zeros((4, 4)))
        write_gray(tmp_path / "t.pgm", np.zeros((5, 4)))
        proc = run_cli(["metrics", "--mse", "t.pgm", "r.pgm"], tmp_path)
        assert proc.returncode == 3


class TestReport:
    def test_writes_csv_and_figures(self, tmp_path, desk_dir):
        inputs = sorted(str(p) for p in desk_dir.glob("desk_*.ppm"))
        proc = run_cli(
            ["report", "-o", "sweep", "--t-values", "1,2", "--timing-runs", "1"] + inputs,
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        out = tmp_path / "sweep"
        assert (out / "sweep.csv").exists()
        for name in ("entropy_vs_iterations.png", "mse_vs_iterations.png",
                     "time_vs_iterations.png"):
            assert (out / name).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        lines = (out / "sweep.csv").read_text().strip().splitlines()
        assert lines[0] == "iterations,entropy_bits,relative_mse_pct,elapsed_ms"
        assert len(lines) == 3
