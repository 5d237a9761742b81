"""Command-line interface: files, manifests, exit codes, reproducibility."""

import math
import os
from pathlib import Path

import numpy as np
import pytest

import ersraman.cli as cli
from ersraman.cli import main
from ersraman.errors import NumericalError

GOLDEN = Path(__file__).parent / "golden"


def read_csv(path):
    lines = Path(path).read_text(encoding="ascii").splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def column(rows, idx):
    return np.array([float(r[idx]) for r in rows])


def assert_matches_golden(path, name, rel=1e-10):
    # cell-wise with a tight relative tolerance so both arithmetic backends
    # compare against the same stored files
    header, rows = read_csv(path)
    golden_header, golden_rows = read_csv(GOLDEN / name)
    assert header == golden_header
    assert len(rows) == len(golden_rows)
    for row, golden_row in zip(rows, golden_rows):
        assert len(row) == len(golden_row)
        for cell, golden_cell in zip(row, golden_row):
            try:
                want = float(golden_cell)
            except ValueError:
                assert cell == golden_cell
            else:
                assert float(cell) == pytest.approx(want, rel=rel, abs=1e-300)


def manifest_dict(out_dir):
    text = (Path(out_dir) / "run_manifest.txt").read_text(encoding="ascii")
    out = {}
    for line in text.splitlines():
        key, value = line.split(" = ", 1)
        out[key] = value
    return out


def test_fig2_outputs_and_manifest(tmp_path):
    out = tmp_path / "o"
    assert main(["fig2", "--out", str(out), "--z-points", "21"]) == 0
    header, rows = read_csv(out / "fig2_flipped_density.csv")
    assert header == ["z_norm", "n_zeta6", "n_zeta8"]
    assert len(rows) == 21
    n6, n8 = column(rows, 1), column(rows, 2)
    assert n6[0] == pytest.approx((1.0 - math.exp(-1.2)) / 0.2, rel=1e-9)
    assert np.all(np.diff(n6) > 0.0) and np.all(n8 > n6)
    man = manifest_dict(out)
    assert man["scenario"] == "fig2"
    assert man["output.0"] == "fig2_flipped_density.csv"
    assert float(man["elapsed_seconds"]) >= 0.0
    assert not [p for p in os.listdir(out) if p.startswith(".manifest-")]


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["fig2", "--out", str(out), "--z-points", "21"]) == 0
    assert (a / "fig2_flipped_density.csv").read_bytes() == (
        b / "fig2_flipped_density.csv"
    ).read_bytes()


def test_fig2_golden(tmp_path):
    out = tmp_path / "o"
    assert main(["fig2", "--out", str(out), "--z-points", "21"]) == 0
    assert_matches_golden(out / "fig2_flipped_density.csv", "fig2_flipped_density.csv")


def test_fig3_golden_and_columns(tmp_path):
    out = tmp_path / "o"
    assert main(["fig3", "--out", str(out), "--strengths", "0.5,1.5,3.0"]) == 0
    header, rows = read_csv(out / "fig3_enhancement_ratio.csv")
    assert header == ["strength", "ratio_zeta6", "ratio_zeta8"]
    r6, r8 = column(rows, 1), column(rows, 2)
    assert np.all(r6 > 1.0) and np.all(r8 > r6)
    assert_matches_golden(out / "fig3_enhancement_ratio.csv", "fig3_enhancement_ratio.csv")


def test_fig3_swap_gives_reciprocal(tmp_path):
    plain, swapped = tmp_path / "p", tmp_path / "s"
    assert main(["fig3", "--out", str(plain), "--strengths", "1.0", "--zeta1", "6"]) == 0
    assert (
        main(["fig3", "--out", str(swapped), "--strengths", "1.0", "--zeta1", "6", "--swap"])
        == 0
    )
    _, rows_p = read_csv(plain / "fig3_enhancement_ratio.csv")
    _, rows_s = read_csv(swapped / "fig3_enhancement_ratio.csv")
    assert float(rows_p[0][1]) * float(rows_s[0][1]) == pytest.approx(1.0, rel=1e-12)
    assert manifest_dict(swapped)["config.swap"] == "True"


def test_fig3_drops_failing_rows_with_warning(tmp_path, monkeypatch):
    real = cli.enhancement_ratio

    def flaky(strength, zeta1, a, **kw):
        if strength < 1.0:
            raise NumericalError("synthetic readout failure")
        return real(strength, zeta1, a, **kw)

    monkeypatch.setattr(cli, "enhancement_ratio", flaky)
    out = tmp_path / "o"
    with pytest.warns(RuntimeWarning, match="dropping strength 0.5"):
        assert main(["fig3", "--out", str(out), "--strengths", "0.5,2.0"]) == 0
    _, rows = read_csv(out / "fig3_enhancement_ratio.csv")
    assert len(rows) == 1
    assert float(rows[0][0]) == 2.0


def test_run_urs_trace(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "--out", str(out), "--geometry", "urs", "--time-points", "9"]) == 0
    header, rows = read_csv(out / "trace.csv")
    assert header == ["t_norm", "total", "vacuum_part", "seed_part", "geometry"]
    assert len(rows) == 9
    assert all(r[4] == "urs" for r in rows)
    np.testing.assert_array_equal(column(rows, 3), np.zeros(9))
    np.testing.assert_array_equal(column(rows, 1), column(rows, 2))
    man = manifest_dict(out)
    assert man["scenario"] == "run-urs"
    assert man["config.w0"] == "0.99"  # default built-in config is echoed
    assert_matches_golden(out / "trace.csv", "run_urs_trace.csv")


def test_fig4_writes_both_geometries(tmp_path):
    out = tmp_path / "o"
    assert main(["fig4", "--out", str(out), "--time-points", "5"]) == 0
    man = manifest_dict(out)
    assert man["output.0"] == "fig4_trace_co.csv"
    assert man["output.1"] == "fig4_trace_counter.csv"
    hc, rows_co = read_csv(out / "fig4_trace_co.csv")
    _, rows_ct = read_csv(out / "fig4_trace_counter.csv")
    assert hc == ["t_norm", "urs", "ers_total", "vacuum_part", "seed_part"]
    # the unseeded reference column is shared, the seeded totals are ordered
    np.testing.assert_array_equal(column(rows_co, 1), column(rows_ct, 1))
    assert np.all(column(rows_ct, 2) >= column(rows_co, 2))
    assert np.all(column(rows_co, 2) >= column(rows_co, 1))
    mid = len(rows_co) // 2
    assert float(rows_ct[mid][2]) > float(rows_co[mid][2]) > float(rows_co[mid][1])


def test_verify_passes_at_moderate_resolution(tmp_path):
    out = tmp_path / "o"
    assert main(["verify", "--out", str(out), "--grid-cells", "64", "--time-steps", "1000"]) == 0
    report = (out / "verify_report.txt").read_text(encoding="ascii").splitlines()
    scen = [line for line in report if line.startswith("scenario ")]
    assert len(scen) == 4
    assert all(line.endswith(" ok") for line in scen)
    assert any(line.startswith("convergence order") for line in report)
    assert manifest_dict(out)["scenario"] == "verify"


def test_verify_reports_failure_with_exit_code(tmp_path, monkeypatch):
    def too_far(*args, **kwargs):
        return {"max_rel_dev": 0.5}

    monkeypatch.setattr(cli, "compare_with_analytic", too_far)
    monkeypatch.setattr(
        cli,
        "convergence_study",
        lambda *a, **k: {
            "m_cells": [32, 64, 128],
            "max_rel_dev": [0.5, 0.5, 0.5],
            "orders": [0.0, 0.0],
            "order": 0.0,
            "monotone": False,
        },
    )
    out = tmp_path / "o"
    assert main(["verify", "--out", str(out)]) == 4
    report = (out / "verify_report.txt").read_text(encoding="ascii")
    assert "FAIL" in report
    assert (out / "run_manifest.txt").exists()  # report is still written


def test_config_error_exit_codes(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("flux_capacitance = 1\n", encoding="ascii")
    assert main(["fig4", "--out", str(tmp_path / "a"), "--config", str(bad)]) == 2
    assert main(["fig2", "--out", str(tmp_path / "b"), "--z-points", "1"]) == 2
    assert main(["fig3", "--out", str(tmp_path / "c"), "--strengths", "a,b"]) == 2
    assert main(["run", "--out", str(tmp_path / "d"), "--time-points", "1"]) == 2


def test_io_error_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="ascii")
    assert main(["fig2", "--out", str(blocker), "--z-points", "21"]) == 3


def test_sample_config_round_trips(tmp_path):
    sample = Path(__file__).parent.parent / "configs" / "fig4.cfg"
    out = tmp_path / "o"
    assert main(["run", "--out", str(out), "--config", str(sample), "--geometry", "urs",
                 "--time-points", "9"]) == 0
    # the shipped sample equals the built-in default set
    assert_matches_golden(out / "trace.csv", "run_urs_trace.csv")


def test_quad_tol_flag_is_recorded(tmp_path):
    out = tmp_path / "o"
    assert main(["fig2", "--out", str(out), "--z-points", "21", "--quad-tol", "10"]) == 0
    man = manifest_dict(out)
    assert float(man["quad.time_tol"]) == pytest.approx(1e-9)
    assert float(man["quad.identity_rel"]) == pytest.approx(1e-6)


def test_argparse_surface():
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["run", "--geometry", "diagonal"])
    assert info.value.code == 2
