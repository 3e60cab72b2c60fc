import csv
import hashlib
import math
import zlib

import numpy as np
import pytest

from mibound import bounds, counterexample, unlearning
from mibound.figures import (
    FIGURE_IDS,
    FigureSpec,
    GridMismatchError,
    build_figure,
    default_grid,
    write_csv,
    write_svg,
)
from mibound.series import CurveSeries


def _pointwise(fid, label, x):
    """Independent per-point recomputation for each figure/series."""
    if fid == "mi_bounds":
        return {"ours": math.exp(x) / (1 + math.exp(x)),
                "erlingsson": 1 - math.exp(-x) / 2,
                "sablayrolles": 0.5 + x / 4}[label]
    if fid == "mi_bound_prob":
        e = float(label.split("=")[1])
        return 1 / (1 + math.exp(-e) * (1 - x) / x)
    if fid == "sab_comparison":
        return {"ours": 1 / (1 + math.exp(-1) * (1 - x) / x), "sablayrolles": x + 0.25}[label]
    if fid == "mi_adv":
        e = float(label.split("=")[1])
        return 2 * (1 / (1 + math.exp(-e) * (1 - x) / x) - x)
    if fid == "priv_amp_comp":
        return {"batch": math.exp(-x), "dataset": (1 - x) / x}[label]
    if fid == "threshold_pos_acc":
        return counterexample.positive_accuracy(x)
    if fid == "threshold_acc":
        return counterexample.overall_accuracy(x)
    if fid == "del_capacity":
        if label == "linear":
            return x
        return unlearning.deletion_capacity(unlearning.UnlearningPolicy(0.8, 1.0, 10_000, x)).capacity
    raise AssertionError(fid)


@pytest.mark.parametrize("fid", FIGURE_IDS)
def test_series_match_scalar_formulas(fid):
    rng = np.random.default_rng(zlib.crc32(fid.encode()))
    for s in build_figure(FigureSpec(fid)):
        idx = rng.choice(len(s), size=min(100, len(s)), replace=False)
        for j in idx:
            x, y = s.points[j]
            assert y == pytest.approx(_pointwise(fid, s.label, x), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("fid", FIGURE_IDS)
def test_grids_and_csv_shape(fid, tmp_path):
    series = build_figure(FigureSpec(fid))
    grid = default_grid(fid)
    assert all(s.xs == [float(x) for x in grid] for s in series)
    (path,) = write_csv(series, tmp_path / f"{fid}.csv")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x"] + [s.label for s in series]
    assert len(rows) == len(grid) + 1
    assert all(len(r) == len(series) + 1 for r in rows)
    # repr formatting round-trips exactly
    assert [float(r[1]) for r in rows[1:]] == series[0].ys


def test_grid_sizes():
    assert len(default_grid("mi_bounds")) == 501
    assert default_grid("mi_bounds")[-1] == 5.0
    assert len(default_grid("priv_amp_comp")) == 99
    assert len(default_grid("threshold_acc")) == 1000
    assert default_grid("del_capacity", 100)[-1] == 99.0


def test_overrides():
    s = build_figure(FigureSpec("mi_adv", {"eps_list": [3.0], "grid": [0.1, 0.5]}))
    assert [x.label for x in s] == ["eps=3"]
    assert s[0].ys[1] == pytest.approx(bounds.mi_advantage_upper(3.0, 0.5), abs=0)
    clamped = build_figure(FigureSpec("mi_bounds", {"clamp": True}))
    assert max(clamped[2].ys) == 1.0
    raw = build_figure(FigureSpec("mi_bounds"))
    assert raw[2].ys[-1] == pytest.approx(1.75)


def test_spec_rejects():
    with pytest.raises(ValueError):
        FigureSpec("nope")
    with pytest.raises(ValueError):
        FigureSpec("mi_adv", {"grid": []})


def test_deterministic_bytes(tmp_path):
    digests = []
    for sub in ("a", "b"):
        d = tmp_path / sub
        d.mkdir()
        s = build_figure(FigureSpec("mi_bound_prob"))
        write_csv(s, d / "f.csv")
        write_svg(s, d / "f.svg", "title", logx=True)
        digests.append([hashlib.sha256((d / n).read_bytes()).hexdigest() for n in ("f.csv", "f.svg")])
    assert digests[0] == digests[1]


class TestMismatch:
    a = CurveSeries.from_xy("a", "x", "y", [0, 1], [1, 2])
    b = CurveSeries.from_xy("b/c", "x", "y", [0, 2], [3, 4])

    def test_split(self, tmp_path):
        paths = write_csv([self.a, self.b], tmp_path / "m.csv")
        assert [p.name for p in paths] == ["m_a.csv", "m_b_c.csv"]
        assert paths[1].read_text() == "x,b/c\n0.0,3.0\n2.0,4.0\n"

    def test_error(self, tmp_path):
        with pytest.raises(GridMismatchError):
            write_csv([self.a, self.b], tmp_path / "m.csv", on_mismatch="error")
        assert not (tmp_path / "m.csv").exists()

    def test_bad_mode_and_empty(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv([self.a], tmp_path / "m.csv", on_mismatch="merge")
        with pytest.raises(ValueError):
            write_csv([], tmp_path / "m.csv")


class TestSvg:
    def test_one_polyline_per_series(self, tmp_path):
        series = build_figure(FigureSpec("mi_adv"))
        text = write_svg(series, tmp_path / "f.svg", "adv").read_text()
        assert text.startswith("<?xml")
        assert text.count("<polyline") == len(series)
        assert 'width="800"' in text and text.rstrip().endswith("</svg>")

    def test_single_series(self, tmp_path):
        s = CurveSeries.from_xy("only", "x", "y", [1, 2, 3], [5, 5, 5])
        assert write_svg([s], tmp_path / "f.svg").read_text().count("<polyline") == 1

    def test_escapes_labels(self, tmp_path):
        s = CurveSeries.from_xy("a<b&c", "x", "y", [1, 2], [1, 2])
        text = write_svg([s], tmp_path / "f.svg", "t<1>").read_text()
        assert "a&lt;b&amp;c" in text and "t&lt;1&gt;" in text

    def test_rejects(self, tmp_path):
        with pytest.raises(ValueError):
            write_svg([], tmp_path / "f.svg")
        s = CurveSeries.from_xy("neg", "x", "y", [1, 2], [-1, 1])
        with pytest.raises(ValueError):
            write_svg([s], tmp_path / "f.svg", logy=True)


class TestCurveSeries:
    def test_rejects(self):
        with pytest.raises(ValueError):
            CurveSeries.from_xy("s", "x", "y", [0, 0], [1, 2])
        with pytest.raises(ValueError):
            CurveSeries.from_xy("s", "x", "y", [0, 1], [1, math.nan])

    def test_accessors(self):
        s = CurveSeries.from_xy("s", "x", "y", [0, 1], [2, 3])
        assert len(s) == 2 and s.xs == [0.0, 1.0] and s.ys == [2.0, 3.0]
