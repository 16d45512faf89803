import csv
import math
import xml.etree.ElementTree as ET

import pytest

from diracbounds import bounds as B
from diracbounds.cli import main
from diracbounds.geometry import Lattice2, SpinStructure
from diracbounds.quadrature import QuadratureError
from diracbounds.sweep import (
    BoundCurve,
    Family,
    OrderingViolation,
    SeriesRequest,
    SweepSpec,
    check_curve_ordering,
    emit_csv,
    emit_svg,
    figure_specs,
    parse_grid,
    run_sweep,
)

K = B.BoundKind
GENUS0 = tuple(SeriesRequest.parse(s) for s in ("LOWER_LB", "UPPER_H2", "UPPER_T1@1", "UPPER_T2"))


def test_parse_helpers():
    assert parse_grid("0.1:0.5:5") == pytest.approx((0.1, 0.2, 0.3, 0.4, 0.5))
    assert parse_grid("1,2.5") == (1.0, 2.5)
    assert SeriesRequest.parse("UPPER_T1@0.75") == SeriesRequest(K.UPPER_T1, 0.75)
    assert SeriesRequest(K.UPPER_T1, 0.75).label == "UPPER_T1@0.75"
    for bad in ("1:2", "a,b", ""):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(Family.TUBE, (1.2,), (SeriesRequest(K.TUBE_STAR),), SpinStructure(1, 0))
    with pytest.raises(ValueError):
        SweepSpec(Family.TUBE, (0.5,), (SeriesRequest(K.TUBE_H2),), SpinStructure(1, 0))
    with pytest.raises(ValueError):
        SweepSpec(Family.ELLIPSOID, (0.5,), (SeriesRequest(K.TUBE_STAR),))
    with pytest.raises(ValueError):
        SweepSpec(Family.TORUS, (0.1,), (SeriesRequest(K.UPPER_T4_STAR),), SpinStructure(1, 0))
    with pytest.raises(ValueError):
        SweepSpec(Family.ELLIPSOID, (), GENUS0)


def test_single_point_sweep_matches_direct_calls():
    curve = run_sweep(SweepSpec(Family.ELLIPSOID, (0.5,), GENUS0, tol=1e-10))
    assert len(curve) == 1 and not curve.failures
    assert curve.values["UPPER_T1@1"][0] == pytest.approx(B.ellipsoid_beta_bound(0.5, 1).value, rel=1e-12)
    assert curve.values["UPPER_T2"][0] == pytest.approx(B.ellipsoid_intrinsic_bound(0.5).value, rel=1e-9)
    assert check_curve_ordering(curve) == []


def test_beta_half_goes_through_generic_quotient():
    curve = run_sweep(SweepSpec(Family.ELLIPSOID, (0.3, 3.0), (SeriesRequest(K.UPPER_T1, 0.5),)))
    assert not curve.failures
    assert all(math.isfinite(v) and v > 0 for v in curve.values["UPPER_T1@0.5"])


def test_failures_recorded_as_nan(monkeypatch, tmp_path):
    def boom(*args, **kwargs):
        raise QuadratureError("forced", 0.0, 1.0, (0.0, 1.0))

    monkeypatch.setattr(B, "ellipsoid_intrinsic_bound", boom)
    curve = run_sweep(SweepSpec(Family.ELLIPSOID, (0.5, 2.0), GENUS0))
    assert [(i, label) for i, label, _ in curve.failures] == [(0, "UPPER_T2"), (1, "UPPER_T2")]
    assert all(math.isnan(v) for v in curve.values["UPPER_T2"])
    emit_csv(curve, tmp_path / "c.csv")
    rows = list(csv.DictReader(open(tmp_path / "c.csv")))
    assert rows[0]["UPPER_T2"] == "nan"


def test_empty_curve_header_only(tmp_path):
    curve = BoundCurve.empty(("LOWER_LB", "UPPER_H2"))
    emit_csv(curve, tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text() == "param,LOWER_LB,LOWER_LB_err,UPPER_H2,UPPER_H2_err\n"
    emit_svg(curve, tmp_path / "e.svg")
    ET.parse(tmp_path / "e.svg")


def test_csv_refuses_ordering_violation(tmp_path):
    curve = BoundCurve((1.0,), ("LOWER_LB", "UPPER_H2"), {"LOWER_LB": [1.0], "UPPER_H2": [0.5]},
                       {"LOWER_LB": [0.0], "UPPER_H2": [1e-3]}, Family.ELLIPSOID)
    assert check_curve_ordering(curve) == [(0, "UPPER_H2")]
    with pytest.raises(OrderingViolation):
        emit_csv(curve, tmp_path / "bad.csv")


def test_csv_and_svg_deterministic(tmp_path):
    spec = figure_specs(points=7)["fig5_tube_spin11"]
    for name in ("a", "b"):
        curve = run_sweep(spec)
        emit_csv(curve, tmp_path / f"{name}.csv")
        emit_svg(curve, tmp_path / f"{name}.svg")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
    assert b"\r" not in (tmp_path / "a.csv").read_bytes()
    root = ET.parse(tmp_path / "a.svg").getroot()
    lines = root.findall("{http://www.w3.org/2000/svg}polyline")
    assert len(lines) == 3


def test_csv_round_trips_full_precision(tmp_path):
    curve = run_sweep(SweepSpec(Family.TUBE, (0.3, 0.6), (SeriesRequest(K.TUBE_STAR),), SpinStructure(0, 1),
                                normalized=True))
    emit_csv(curve, tmp_path / "t.csv")
    rows = list(csv.DictReader(open(tmp_path / "t.csv")))
    assert [float(r["TUBE_STAR"]) for r in rows] == curve.values["TUBE_STAR"]


def test_torus_sweep():
    lat = Lattice2.rectangular(1.0, 1.3)
    spec = SweepSpec(Family.TORUS, (0.0, 0.2), (SeriesRequest(K.UPPER_T4_DSTAR), SeriesRequest(K.UPPER_T4_CURV)),
                     SpinStructure(1, 0), lattice=lat, normalized=True)
    curve = run_sweep(spec)
    assert not curve.failures
    assert curve.values["UPPER_T4_DSTAR"][0] == pytest.approx(B.flat_torus_constant(lat, SpinStructure(1, 0)))
    assert curve.values["UPPER_T4_CURV"][1] == pytest.approx(curve.values["UPPER_T4_DSTAR"][1], rel=1e-7)


# ---------------------------------------------------------------- CLI


def test_cli_ellipsoid(capsys, tmp_path):
    assert main(["ellipsoid", "--a", "0.5", "--beta", "2", "--csv", str(tmp_path / "o.csv")]) == 0
    out = capsys.readouterr().out
    assert "UPPER_T1_BETA1_CLOSED" in out and "UPPER_T1@2" in out
    assert (tmp_path / "o.csv").read_text().startswith("param,LOWER_LB")


def test_cli_tube_spin_defaults(capsys):
    assert main(["tube", "--r", "0.5", "--spin", "1,0"]) == 0
    out = capsys.readouterr().out
    assert "TUBE_STAR" in out and "TUBE_H2" not in out
    assert main(["tube", "--r", "0.5", "--spin", "0,0", "--factor", "lattice"]) == 0
    assert "TUBE_TRIVIAL" in capsys.readouterr().out


def test_cli_torus_spectrum_optimize(capsys):
    assert main(["torus", "--lattice", "1,0,0,1", "--spin", "1,0", "--amplitude", "0.2"]) == 0
    assert "UPPER_T4_CURV" in capsys.readouterr().out
    assert main(["spectrum", "--lattice", "1,0,0,1", "--spin", "0,0", "--count", "4"]) == 0
    assert "kernel dimension: 2" in capsys.readouterr().out
    assert main(["optimize-beta", "--a", "0.5"]) == 0
    assert "beta* =" in capsys.readouterr().out


def test_cli_torus_grid_file(capsys, tmp_path):
    path = tmp_path / "h.grid"
    path.write_text("4 4\n" + " ".join(["1"] * 16) + "\n")
    assert main(["torus", "--lattice", "1,0,0,1", "--spin", "0,0", "--hgrid", str(path)]) == 0
    assert "UPPER_T3" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["ellipsoid", "--a", "-1"],
    ["tube", "--r", "2.0"],
    ["torus", "--lattice", "1,0,2,0"],
    ["spectrum", "--lattice", "1,0,0,1", "--spin", "3,0"],
    ["ellipsoid", "--grid", "1:2", "--kinds", "LOWER_LB"],
])
def test_cli_invalid_input_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_cli_nonconvergence_exit_3(capsys):
    assert main(["optimize-beta", "--a", "2", "--tol", "1e-300"]) == 3
    assert "nonconvergence" in capsys.readouterr().err


def test_cli_failed_sweep_point_exit_3(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise QuadratureError("forced", 0.0, 1.0, (0.0, 1.0))

    monkeypatch.setattr(B, "classical_H2_bound", boom)
    assert main(["ellipsoid", "--a", "0.5", "--kinds", "LOWER_LB,UPPER_H2"]) == 3


def test_cli_io_error_exit_4(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["ellipsoid", "--a", "0.5", "--csv", str(blocker / "o.csv")]) == 4
    assert main(["figures", "--outdir", str(blocker / "sub"), "--points", "3"]) == 4
    missing = tmp_path / "missing.grid"
    assert main(["torus", "--lattice", "1,0,0,1", "--hgrid", str(missing)]) == 4


def test_cli_figures(tmp_path, capsys):
    assert main(["figures", "--outdir", str(tmp_path), "--points", "5", "--svg"]) == 0
    names = sorted(p.name for p in tmp_path.glob("*.csv"))
    assert len(names) == 5 and names[0].startswith("fig1")
    assert len(list(tmp_path.glob("*.svg"))) == 5
