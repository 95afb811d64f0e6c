import xml.etree.ElementTree as ET

import numpy as np
import pytest

from tifu_fp import MeanState, emit_trace, iterate_mean, read_trace, render_svg, run_tifu, solve_equilibrium
from tifu_fp.traces import CSV_COLUMNS, HEIGHT, TOP, BOTTOM, TraceIOError

SVG = "{http://www.w3.org/2000/svg}"


def _polyline_y(path, column):
    """Recover data-space y values of a plotted column (y axis spans [0, 1])."""
    root = ET.parse(path).getroot()
    for el in root.iter(SVG + "polyline"):
        if el.get("data-column") == column:
            ys = [float(p.split(",")[1]) for p in el.get("points").split()]
            h = HEIGHT - TOP - BOTTOM
            return 1.0 - (np.array(ys) - TOP) / h
    raise AssertionError(f"no polyline for {column}")


def test_csv_layout_and_row_count(game, tmp_path):
    res = run_tifu(game, 0.1, 10, seed=0)
    path = tmp_path / "t.csv"
    assert emit_trace(res, path) == 10
    lines = path.read_bytes().split(b"\n")
    assert lines[0] == b"k,action1,action2,r1_1,r2_1,q1_1,q2_1,beta1_1,beta2_1,eta"
    assert len([ln for ln in lines if ln]) == 11
    assert b"\r" not in path.read_bytes()


def test_csv_is_byte_deterministic(game, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_trace(run_tifu(game, 0.1, 200, seed=3), a)
    emit_trace(run_tifu(game, 0.1, 200, seed=3), b)
    assert a.read_bytes() == b.read_bytes()


def test_csv_round_trip_refolds_empirical(game, tmp_path):
    res = run_tifu(game, 0.05, 500, seed=12)
    path = tmp_path / "t.csv"
    emit_trace(res, path)
    cols = read_trace(path)
    for act, q in (("action1", "q1_1"), ("action2", "q2_1")):
        refold = np.cumsum(cols[act] == 1) / (cols["k"] + 1)
        assert np.abs(refold - cols[q]).max() <= 1e-9
    assert np.abs(cols["r1_1"] - res.r1).max() <= 1e-11


def test_csv_empty_fields_for_mean_trace(game, tmp_path):
    run = iterate_mean(game, MeanState.uniform(), 0.25, max_steps=5, tol=1e-300)
    path = tmp_path / "m.csv"
    emit_trace(run.trajectory, path)
    row = path.read_text().splitlines()[1].split(",")
    assert row[1] == "" and row[2] == ""
    assert len(row) == len(CSV_COLUMNS)


def test_csv_io_error(game, tmp_path):
    res = run_tifu(game, 0.1, 5, seed=0)
    with pytest.raises(TraceIOError, match="missing"):
        emit_trace(res, tmp_path / "missing" / "t.csv")


def test_svg_converging_trace(game, tmp_path):
    rep = solve_equilibrium(game)
    run = iterate_mean(game, MeanState.uniform(), 0.25)
    path = tmp_path / "fig.svg"
    refs = {"r1": rep.rbar1.first, "r2": rep.rbar2.first}
    render_svg(run.trajectory, path, references=refs)
    root = ET.parse(path).getroot()
    assert root.tag == SVG + "svg"
    assert len(root.findall(f".//{SVG}line[@class='reference']")) == 2
    assert abs(_polyline_y(path, "r1_1")[-1] - rep.rbar1.first) <= 1e-3
    assert abs(_polyline_y(path, "r2_1")[-1] - rep.rbar2.first) <= 1e-3


def test_svg_oscillating_trace(game, tmp_path):
    rep = solve_equilibrium(game)
    run = iterate_mean(game, MeanState.uniform(), 0.26, max_steps=20_000)
    path = tmp_path / "fig.svg"
    render_svg(run.trajectory, path)
    tail = _polyline_y(path, "r1_1")[-100:]
    assert not np.all(np.abs(tail - rep.rbar1.first) <= 0.01)


def test_svg_single_point_and_empty(tmp_path):
    cols = {"k": [0], "r1_1": [0.4]}
    path = tmp_path / "one.svg"
    render_svg(cols, path, columns=("r1_1",))
    root = ET.parse(path).getroot()
    assert len(root.findall(f".//{SVG}circle")) == 1
    with pytest.raises(ValueError):
        render_svg({"k": [], "r1_1": []}, tmp_path / "e.svg", columns=("r1_1",))
    with pytest.raises(ValueError):
        render_svg(cols, tmp_path / "e.svg", columns=())


def test_svg_from_csv_file(game, tmp_path):
    csv_path, svg_path = tmp_path / "t.csv", tmp_path / "t.svg"
    emit_trace(run_tifu(game, 0.1, 50, seed=0), csv_path)
    render_svg(csv_path, svg_path, columns=("q1_1", "q2_1"))
    ET.parse(svg_path)
