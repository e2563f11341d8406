"""Spec parsing, CSV loading, grid pivoting, and each renderer."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from plotview import FigureSpec, SpecError, grid_pivot, load_table, render
from plotview.cli import main


def write_csv(path, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(str(v) for v in row) + "\n")
    return str(path)


@pytest.fixture
def trace_csv(tmp_path):
    rows = [(t / 10, (t / 10) ** 2, -t / 10) for t in range(11)]
    return write_csv(tmp_path / "run.csv", ["tau", "eps", "rho"], rows)


@pytest.fixture
def grid_csv(tmp_path):
    rows = []
    for e in (0.5, 1.0, 1.5):
        for de in (-1.0, 0.0, 1.0):
            k3 = 12 * de / e
            rows.append((e, de, max(k3, 0.0)))
    return write_csv(tmp_path / "grid.csv", ["eps", "deps", "k3p"], rows)


class TestFigureSpec:
    def test_accepts_minimal_mapping(self):
        spec = FigureSpec.from_mapping({
            "kind": "trace", "inputs": ["a.csv"], "columns": ["eps"],
            "output": "a.png"})
        assert spec.x == "tau"
        assert spec.scales == {}

    def test_rejects_unknown_kind(self):
        with pytest.raises(SpecError):
            FigureSpec.from_mapping({"kind": "pie", "inputs": ["a.csv"],
                                     "columns": ["eps"], "output": "a.png"})

    def test_rejects_empty_inputs(self):
        with pytest.raises(SpecError):
            FigureSpec.from_mapping({"kind": "trace", "inputs": [],
                                     "columns": ["eps"], "output": "a.png"})

    def test_rejects_unknown_scale(self):
        with pytest.raises(SpecError):
            FigureSpec.from_mapping({
                "kind": "trace", "inputs": ["a.csv"], "columns": ["eps"],
                "output": "a.png", "scales": {"y": "loglog"}})

    def test_rejects_unknown_keys(self):
        with pytest.raises(SpecError):
            FigureSpec.from_mapping({
                "kind": "trace", "inputs": ["a.csv"], "columns": ["eps"],
                "output": "a.png", "interpolate": True})


class TestLoadTable:
    def test_reads_columns(self, trace_csv):
        table = load_table(trace_csv)
        assert set(table) == {"tau", "eps", "rho"}
        assert table["tau"][0] == 0.0
        assert table["eps"][-1] == pytest.approx(1.0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpecError):
            load_table(tmp_path / "nope.csv")


class TestGridPivot:
    def test_reshapes_and_orients(self, grid_csv):
        xs, ys, Z = grid_pivot(load_table(grid_csv), "eps", "deps", "k3p")
        assert list(xs) == [0.5, 1.0, 1.5]
        assert list(ys) == [-1.0, 0.0, 1.0]
        assert Z.shape == (3, 3)
        # positive part vanishes identically on the deps < 0 half
        assert np.all(Z[ys < 0] == 0.0)
        assert np.all(Z[ys > 0] > 0.0)
        assert Z[2, 0] == pytest.approx(24.0)

    def test_rejects_ragged_grid(self, grid_csv, tmp_path):
        table = load_table(grid_csv)
        table["k3p"] = table["k3p"][:-1]
        with pytest.raises(SpecError):
            grid_pivot(table, "eps", "deps", "k3p")


class TestRender:
    def _check(self, out):
        assert out.exists()
        assert out.stat().st_size > 1000

    def test_trace(self, trace_csv, tmp_path):
        out = render(FigureSpec(kind="trace", inputs=(trace_csv,),
                                columns=("eps", "rho"),
                                output=str(tmp_path / "t.png"),
                                scales={"y": "symlog"}))
        self._check(out)

    def test_panel(self, trace_csv, tmp_path):
        out = render(FigureSpec(kind="panel", inputs=(trace_csv,),
                                columns=("eps", "rho"),
                                output=str(tmp_path / "p.png")))
        self._check(out)

    def test_sweep_overlay(self, trace_csv, tmp_path):
        out = render(FigureSpec(kind="sweep-overlay",
                                inputs=(trace_csv, trace_csv),
                                columns=("eps",),
                                output=str(tmp_path / "s.png")))
        self._check(out)

    def test_eigen_trace(self, tmp_path):
        header = ["tau"] + [f"re{i}" for i in range(6)]
        rows = [[t / 5] + [(-1) ** i * (i + t / 5) for i in range(6)]
                for t in range(6)]
        csv_path = write_csv(tmp_path / "eig.csv", header, rows)
        out = render(FigureSpec(kind="eigen-trace", inputs=(csv_path,),
                                columns=("*",),
                                output=str(tmp_path / "e.png")))
        self._check(out)

    def test_kplus_surface(self, grid_csv, tmp_path):
        out = render(FigureSpec(kind="kplus-surface", inputs=(grid_csv,),
                                columns=("k3p",), x="eps",
                                output=str(tmp_path / "k.png")))
        self._check(out)

    def test_missing_column_diagnostic(self, trace_csv, tmp_path):
        spec = FigureSpec(kind="trace", inputs=(trace_csv,),
                          columns=("nonexistent",),
                          output=str(tmp_path / "x.png"))
        with pytest.raises(SpecError, match="nonexistent"):
            render(spec)


class TestCli:
    def test_renders_spec_list(self, trace_csv, tmp_path):
        spec_file = tmp_path / "figs.json"
        spec_file.write_text(json.dumps([
            {"kind": "trace", "inputs": ["run.csv"], "columns": ["eps"],
             "output": "out/fig1.png"},
            {"kind": "panel", "inputs": ["run.csv"], "columns": ["eps", "rho"],
             "output": "out/fig2.png"},
        ]))
        res = CliRunner().invoke(main, ["render", "--spec", str(spec_file)])
        assert res.exit_code == 0, res.output
        assert (tmp_path / "out" / "fig1.png").exists()
        assert (tmp_path / "out" / "fig2.png").exists()

    def test_missing_column_exits_nonzero(self, trace_csv, tmp_path):
        spec_file = tmp_path / "figs.json"
        spec_file.write_text(json.dumps(
            {"kind": "trace", "inputs": ["run.csv"], "columns": ["ghost"],
             "output": "fig.png"}))
        res = CliRunner().invoke(main, ["render", "--spec", str(spec_file)])
        assert res.exit_code == 2
        assert "ghost" in res.output

    def test_missing_spec_file_exits_nonzero(self, tmp_path):
        res = CliRunner().invoke(main, ["render", "--spec",
                                        str(tmp_path / "none.json")])
        assert res.exit_code == 2

    def test_bad_json_exits_nonzero(self, tmp_path):
        spec_file = tmp_path / "bad.json"
        spec_file.write_text("{oops")
        res = CliRunner().invoke(main, ["render", "--spec", str(spec_file)])
        assert res.exit_code == 2
