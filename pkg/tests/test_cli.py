import dataclasses
import json
import subprocess
import sys

import numpy as np
import pytest

from mrdft import cli
from mrdft.core import apply_gamma, make_plan
from mrdft.signal_io import read_spectrum, write_signal


@pytest.fixture
def impulse_csv(tmp_path):
    p = tmp_path / "impulse.csv"
    p.write_text("1\n0\n0\n0\n")
    return p


def test_transform_impulse(impulse_csv, tmp_path, capsys):
    out = tmp_path / "y.json"
    assert cli.main(["transform", "--input", str(impulse_csv), "--output", str(out)]) == 0
    record = json.loads(out.read_text())
    levels = [[z for frame in lvl["frames"] for z in frame] for lvl in record["levels"]]
    assert levels == [[[1, 0], [1, 0], [0, 0], [0, 0]], [[1, 0]] * 4]
    err = capsys.readouterr().err
    assert "m=2 n=4" in err
    assert "iter 2: mults=3 nontrivial=0 adds=6" in err


def test_transform_stdout(impulse_csv, capsys):
    assert cli.main(["transform", "--input", str(impulse_csv), "--out-format", "csv"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "level,frame,bin,re,im"
    assert len(out) == 1 + 2 * 4


def test_transform_bitrev_layout(tmp_path, rng):
    x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    sig = tmp_path / "x.csv"
    write_signal(x, sig)
    nat, rev = tmp_path / "nat.json", tmp_path / "rev.json"
    assert cli.main(["transform", "--input", str(sig), "--output", str(nat)]) == 0
    assert cli.main(["transform", "--input", str(sig), "--output", str(rev), "--layout", "bitrev"]) == 0
    spec = read_spectrum(rev)
    assert spec.layout.value == "bitreversed"
    apply_gamma(spec, make_plan(4))
    np.testing.assert_array_equal(spec.data, read_spectrum(nat).data)


def test_transform_non_power_of_two(tmp_path, capsys):
    p = tmp_path / "x.csv"
    p.write_text("1\n2\n3\n4\n5\n")
    assert cli.main(["transform", "--input", str(p)]) == 1
    assert "length 5" in capsys.readouterr().err


def test_transform_pad_zeros(tmp_path, capsys):
    p = tmp_path / "x.csv"
    p.write_text("1\n2\n3\n")
    assert cli.main(["transform", "--input", str(p), "--pad-zeros"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["n"] == 4


def test_transform_missing_file(tmp_path):
    assert cli.main(["transform", "--input", str(tmp_path / "nope.csv")]) == 1


def test_transform_raw64(tmp_path, capsys):
    p = tmp_path / "x.raw"
    write_signal([1, 1, 1, 1], p, "raw64")
    assert cli.main(["transform", "--input", str(p), "--format", "raw64"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["levels"][1]["frames"] == [[[4.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]]


def test_verify_passes(capsys):
    assert cli.main(["verify", "--m", "3", "--trials", "100", "--seed", "42"]) == 0
    out = capsys.readouterr().out
    errors = [float(line.rsplit(" ", 1)[1]) for line in out.splitlines() if line.startswith("level")]
    assert len(errors) == 3 and max(errors) <= 1e-12
    assert "counts match" in out


def test_verify_m1(capsys):
    assert cli.main(["verify", "--m", "1", "--trials", "1"]) == 0


def test_verify_negative_control(monkeypatch, capsys):
    def corrupted_plan(m):
        plan = make_plan(m)
        tw = list(plan.twiddles)
        bad = tw[m].copy()
        bad[1] = -bad[1]
        tw[m] = bad
        return dataclasses.replace(plan, twiddles=tuple(tw))

    monkeypatch.setattr(cli, "make_plan", corrupted_plan)
    assert cli.main(["verify", "--m", "3", "--trials", "5"]) == 2
    out = capsys.readouterr().out
    assert "FAIL: trial 0, level 3" in out


def test_verify_refuses_large_m(capsys):
    assert cli.main(["verify", "--m", "13"]) == 1


def test_count_m3(capsys):
    assert cli.main(["count", "--m", "3", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert [(r["mults"], r["nontrivial"], r["adds"]) for r in rep["rows"]] == [(4, 0, 8), (6, 0, 12), (8, 2, 16)]
    assert (rep["total_mults"], rep["total_nontrivial"], rep["total_adds"]) == (18, 2, 36)
    assert cli.main(["count", "--m", "3"]) == 0
    table = capsys.readouterr().out
    assert " sum           18            2           36" in table


def test_count_max_m(capsys):
    assert cli.main(["count", "--max-m", "10"]) == 0
    last = capsys.readouterr().out.strip().splitlines()[-1].split()
    assert last[0] == "10" and last[-1] == "13/22"


def test_count_m1(capsys):
    assert cli.main(["count", "--m", "1", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["rows"] == [{"i": 1, "mults": 1, "nontrivial": 0, "adds": 2}]


def test_count_flags_exclusive(capsys):
    assert cli.main(["count", "--m", "3", "--max-m", "4"]) == 1
    assert cli.main(["count", "--m", "31"]) == 1


def test_bench(capsys):
    assert cli.main(["bench", "--m", "6", "--reps", "2"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert set(record["median_seconds"]) == {"fast", "plf", "direct"}


def test_bench_method_filter(capsys):
    assert cli.main(["bench", "--m", "5", "--reps", "1", "--methods", "fast,plf"]) == 0
    assert set(json.loads(capsys.readouterr().out)["median_seconds"]) == {"fast", "plf"}


def test_bench_guards(capsys):
    assert cli.main(["bench", "--m", "20", "--methods", "direct"]) == 1
    assert "refused" in capsys.readouterr().err
    assert cli.main(["bench", "--m", "4", "--methods", "fast,fftw"]) == 1
    assert "fftw" in capsys.readouterr().err


def test_spectrogram_constant(tmp_path):
    sig = tmp_path / "c.csv"
    sig.write_text("1\n" * 8)
    out = tmp_path / "c.pgm"
    assert cli.main(["spectrogram", "--input", str(sig), "--level", "2", "--output", str(out)]) == 0
    assert out.read_bytes() == b"P5\n2 4\n255\n" + bytes([255, 255]) + bytes(6)


def test_spectrogram_zero(tmp_path):
    sig = tmp_path / "z.csv"
    sig.write_text("0\n" * 8)
    out = tmp_path / "z.pgm"
    assert cli.main(["spectrogram", "--input", str(sig), "--level", "3", "--scale", "log", "--output", str(out)]) == 0
    assert out.read_bytes() == b"P5\n1 8\n255\n" + bytes(8)


def test_spectrogram_level_range(tmp_path, capsys):
    sig = tmp_path / "c.csv"
    sig.write_text("1\n" * 8)
    assert cli.main(["spectrogram", "--input", str(sig), "--level", "0", "--output", str(tmp_path / "x")]) == 1
    assert "level out of range" in capsys.readouterr().err


def test_bad_usage_is_exit_1(capsys):
    assert cli.main(["frobnicate"]) == 1
    assert cli.main(["transform", "--input", "x", "--layout", "sideways"]) == 1
    assert cli.main(["verify"]) == 1
    assert cli.main(["transform", "--input", "x", "--threads", "0"]) == 1


def test_help_is_exit_0(capsys):
    assert cli.main(["--help"]) == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mrdft", "count", "--m", "3"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert "ratio 3/4" in proc.stdout
