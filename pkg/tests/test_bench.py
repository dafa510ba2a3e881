"""CLI contract: exit codes, CSV schema, config layering, determinism."""

import csv
import re

import pytest

import fedvr.bench as bench
from fedvr.bench import main, points_at_accuracy
from fedvr.errors import NumericalError

_INT_CELL = re.compile(r"^-?\d+$")


def _read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_phase_prints_both_estimates(capsys):
    assert main(["phase", "--potential", "morse", "--n", "20"]) == 0
    out = capsys.readouterr().out
    assert "tan(delta) match" in out
    assert "tan(delta) integral" in out
    assert "error vs reference" in out
    assert "2.69947025" in out


def test_phase_rejects_small_order(capsys):
    assert main(["phase", "--n", "3"]) == 2
    assert "at least 4" in capsys.readouterr().err


def test_unknown_potential_is_config_error(capsys):
    assert main(["phase", "--potential", "gaussian_well"]) == 2
    assert "unknown potential" in capsys.readouterr().err


def test_empty_scan_range_is_config_error(capsys):
    assert main(["scan-n", "--n", ""]) == 2
    assert "empty" in capsys.readouterr().err


def test_non_dividing_partition_length_is_config_error(capsys):
    assert main(["phase", "--plen", "3"]) == 2
    assert "does not divide" in capsys.readouterr().err


def test_solver_failure_exits_1(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise NumericalError("synthetic failure")

    monkeypatch.setattr(bench, "phase_shift_local", boom)
    assert main(["phase", "--potential", "morse", "--n", "8"]) == 1
    assert "synthetic failure" in capsys.readouterr().err


def test_scan_n_csv_round_trips(tmp_path):
    out = tmp_path / "scan.csv"
    assert main(["scan-n", "--potential", "morse", "--n", "8,10", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    header = lines[0].split(",")
    assert header[:2] == ["n", "points"]
    assert "error" in header and "status" in header
    # Parsing and re-formatting every numeric cell reproduces the file.
    for line in lines[1:]:
        for cell in line.split(","):
            if cell in ("", "ok") or cell.startswith("error:"):
                continue
            if _INT_CELL.match(cell):
                assert str(int(cell)) == cell
            else:
                assert "%.11E" % float(cell) == cell


def test_scan_numeric_columns_deterministic(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert main(["scan-n", "--potential", "morse", "--n", "8,10", "--out", str(path)]) == 0
    rows_a, rows_b = _read_rows(paths[0]), _read_rows(paths[1])
    for row_a, row_b in zip(rows_a, rows_b):
        row_a.pop("time_s"), row_b.pop("time_s")
        assert row_a == row_b


def test_scan_partition_tags_bad_rows(tmp_path):
    out = tmp_path / "plen.csv"
    code = main(
        ["scan-partition", "--potential", "morse", "--rmax", "10", "--n", "8",
         "--plen", "1,3", "--out", str(out)]
    )
    assert code == 0
    rows = _read_rows(out)
    assert rows[0]["status"] == "ok"
    assert rows[1]["status"].startswith("error:")
    assert rows[1]["tan_delta_match"] == ""


def test_scan_h_schema(tmp_path):
    out = tmp_path / "h.csv"
    assert main(["scan-h", "--potential", "free", "--rmax", "20", "--points", "400,800", "--out", str(out)]) == 0
    rows = _read_rows(out)
    assert [row["points"] for row in rows] == ["400", "800"]
    assert float(rows[0]["h"]) == pytest.approx(0.05)
    # Free particle against reference 0; the end-derivative stencil leaves
    # an O(h^4) residual of a few 1e-8 at h = 0.05.
    assert float(rows[0]["error"]) < 1e-5


def test_config_file_layering(tmp_path, capsys):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text("potential = woods_saxon\nn = 14\n# comment line\nk = 0.5\n")
    assert main(["phase", "--config", str(cfg)]) == 0
    assert "14 points" in capsys.readouterr().out
    # Flags override the file.
    assert main(["phase", "--config", str(cfg), "--n", "20"]) == 0
    assert "20 points" in capsys.readouterr().out


def test_config_file_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("meshes = 3\n")
    assert main(["phase", "--config", str(cfg)]) == 2
    assert "unknown config key" in capsys.readouterr().err


def test_compare_reports_ratios(capsys):
    code = main(["compare", "--potential", "morse", "--n", "8,10,12", "--points", "800,1600"])
    assert code == 0
    out = capsys.readouterr().out
    assert "points to reach error 1e-06" in out
    assert "points to reach error 1e-08" in out
    assert out.lstrip().startswith("method")  # aligned table pads the header


def test_compare_without_reference_is_config_error(capsys):
    assert main(["compare", "--potential", "morse", "--k", "0.7"]) == 2
    assert "reference" in capsys.readouterr().err


def test_points_at_accuracy_interpolates_log_log():
    points = [100, 200, 400]
    errors = [1e-4, 1e-6, 1e-8]
    # Halfway in log-error between 200 and 400.
    assert points_at_accuracy(points, errors, 1e-7) == pytest.approx(200 * 2**0.5, rel=1e-12)
    assert points_at_accuracy(points, errors, 1e-4) == 100
    assert points_at_accuracy(points, errors, 1e-12) is None


def test_nonlocal_phase_runs(capsys):
    code = main(
        ["phase", "--potential", "woods_saxon", "--rmax", "15", "--n", "60",
         "--kernel", "gaussian", "--beta", "0.9"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "gaussian kernel" in out


def test_kernel_needs_width(capsys):
    assert main(["phase", "--kernel", "gaussian"]) == 2
    assert "--beta" in capsys.readouterr().err
