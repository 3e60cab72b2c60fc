"""Data series behind each figure, plus CSV and SVG writers.

Every y value is produced by calling the scalar operation of the owning
module, so a plotted point always equals what the library returns at that x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import bounds, counterexample, unlearning
from .series import CurveSeries

__all__ = [
    "FIGURE_IDS",
    "FigureSpec",
    "GridMismatchError",
    "build_figure",
    "write_csv",
    "write_svg",
]

FIGURE_IDS = (
    "mi_bounds",
    "mi_bound_prob",
    "priv_amp_comp",
    "threshold_pos_acc",
    "threshold_acc",
    "sab_comparison",
    "mi_adv",
    "del_capacity",
)

EPS_LIST = (0.5, 1.0, 2.0, 4.0)


class GridMismatchError(ValueError):
    """Series passed to a single CSV do not share an x grid."""


@dataclass(frozen=True)
class FigureSpec:
    """Figure id plus optional overrides.

    Recognized overrides: ``grid`` (x values), ``eps_list``, ``eps``,
    ``config`` (a :class:`CounterexampleConfig`), ``n``, ``b``, ``slope``,
    ``clamp`` (clamp baselines to 1 in ``mi_bounds``).
    """

    figure_id: str
    overrides: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure_id!r}; expected one of {FIGURE_IDS}")
        grid = self.overrides.get("grid")
        if grid is not None and len(grid) == 0:
            raise ValueError("grid override must be non-empty")

    def get(self, key, default):
        return self.overrides.get(key, default)


def default_grid(figure_id: str, n: int = 10_000) -> np.ndarray:
    if figure_id == "mi_bounds":
        return np.round(np.arange(501) * 0.01, 10)
    if figure_id in ("mi_bound_prob", "sab_comparison", "mi_adv"):
        return np.geomspace(1e-3, 1 - 1e-3, 500)
    if figure_id == "priv_amp_comp":
        return np.round(np.arange(1, 100) * 0.01, 10)
    if figure_id in ("threshold_pos_acc", "threshold_acc"):
        return np.linspace(-40.0, 10.0, 1000)
    if figure_id == "del_capacity":
        return np.linspace(1.0, n - 1.0, 500)
    raise ValueError(f"unknown figure id {figure_id!r}")


def _series(label, x_name, y_name, xs, fn):
    xs = [float(x) for x in xs]
    return CurveSeries.from_xy(label, x_name, y_name, xs, [fn(x) for x in xs])


def build_figure(spec: FigureSpec) -> list[CurveSeries]:
    fid = spec.figure_id
    n = int(spec.get("n", 10_000))
    grid = spec.get("grid", None)
    xs = default_grid(fid, n) if grid is None else np.asarray(grid, dtype=float)

    if fid == "mi_bounds":
        clamp = bool(spec.get("clamp", False))
        sab = bounds.baseline_sablayrolles if clamp else bounds.baseline_sablayrolles_raw
        return [
            _series("ours", "eps", "accuracy", xs, lambda e: bounds.attack_accuracy_bound(e).upper),
            _series("erlingsson", "eps", "accuracy", xs, bounds.baseline_erlingsson),
            _series("sablayrolles", "eps", "accuracy", xs, lambda e: sab(e, 0.5)),
        ]
    if fid == "mi_bound_prob":
        return [
            _series(f"eps={e:g}", "p", "positive_accuracy", xs,
                    lambda p, e=e: bounds.positive_accuracy_bounds(e, p).upper)
            for e in spec.get("eps_list", EPS_LIST)
        ]
    if fid == "sab_comparison":
        e = float(spec.get("eps", 1.0))
        return [
            _series("ours", "p", "positive_accuracy", xs,
                    lambda p: bounds.positive_accuracy_bounds(e, p).upper),
            _series("sablayrolles", "p", "positive_accuracy", xs,
                    lambda p: bounds.baseline_sablayrolles_raw(e, p)),
        ]
    if fid == "mi_adv":
        return [
            _series(f"eps={e:g}", "p", "advantage", xs,
                    lambda p, e=e: bounds.mi_advantage_upper(e, p))
            for e in spec.get("eps_list", EPS_LIST)
        ]
    if fid == "priv_amp_comp":
        return [
            _series("batch", "t", "factor", xs, lambda t: bounds.amplification_factors(t)[0]),
            _series("dataset", "t", "factor", xs, lambda t: bounds.amplification_factors(t)[1]),
        ]
    if fid in ("threshold_pos_acc", "threshold_acc"):
        cfg = spec.get("config", counterexample.CounterexampleConfig())
        if fid == "threshold_pos_acc":
            return [_series("positive_accuracy", "alpha_offset", "accuracy", xs,
                            lambda a: counterexample.positive_accuracy(a, cfg))]
        return [_series("accuracy", "alpha_offset", "accuracy", xs,
                        lambda a: counterexample.overall_accuracy(a, cfg))]
    # del_capacity
    capacity, linear = unlearning.capacity_curve(
        float(spec.get("eps", 1.0)), n, float(spec.get("b", 0.8)), xs,
        linear_slope=float(spec.get("slope", 1.0)))
    return [capacity, linear]


def _fmt(v: float) -> str:
    return repr(float(v))


def write_csv(series: Sequence[CurveSeries], path, on_mismatch: str = "split") -> list[Path]:
    """Write series as UTF-8 CSV with header ``x,<label1>,<label2>,...``.

    Series sharing an identical x grid go into one file.  Otherwise
    ``on_mismatch="split"`` writes ``<stem>_<label>.csv`` per series and
    ``on_mismatch="error"`` raises :class:`GridMismatchError`.  Returns the
    paths written.
    """
    series = list(series)
    if not series:
        raise ValueError("nothing to write")
    if on_mismatch not in ("split", "error"):
        raise ValueError(f"on_mismatch must be 'split' or 'error', got {on_mismatch!r}")
    path = Path(path)
    grid = series[0].xs
    if all(s.xs == grid for s in series):
        _write_table(path, grid, series)
        return [path]
    if on_mismatch == "error":
        raise GridMismatchError("series do not share an x grid")
    written = []
    for s in series:
        out = path.with_name(f"{path.stem}_{_slug(s.label)}{path.suffix or '.csv'}")
        _write_table(out, s.xs, [s])
        written.append(out)
    return written


def _slug(label: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in label)


def _write_table(path: Path, grid, series) -> None:
    lines = [",".join(["x"] + [_csv_cell(s.label) for s in series])]
    columns = [s.ys for s in series]
    for j, x in enumerate(grid):
        lines.append(",".join([_fmt(x)] + [_fmt(col[j]) for col in columns]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _csv_cell(text: str) -> str:
    if any(c in text for c in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


WIDTH, HEIGHT = 800, 600
_MARGIN = dict(left=80, right=170, top=50, bottom=60)
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(count - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v = start + len(ticks) * step
    return ticks


def write_svg(series: Sequence[CurveSeries], path, title: str = "",
              logx: bool = False, logy: bool = False) -> Path:
    """Standalone 800x600 SVG line chart with axes, ticks and a legend.

    Axes are linear unless ``logx``/``logy`` is set (those need positive data).
    """
    series = list(series)
    if not series:
        raise ValueError("write_svg needs at least one series")
    tx = math.log10 if logx else (lambda v: v)
    ty = math.log10 if logy else (lambda v: v)
    try:
        xs = [tx(x) for s in series for x in s.xs]
        ys = [ty(y) for s in series for y in s.ys]
    except ValueError:
        raise ValueError("log axes need strictly positive values") from None
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.03 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    left, top = _MARGIN["left"], _MARGIN["top"]
    pw = WIDTH - _MARGIN["left"] - _MARGIN["right"]
    ph = HEIGHT - _MARGIN["top"] - _MARGIN["bottom"]

    def px(v):
        return left + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return top + ph - (v - y_lo) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in _nice_ticks(x_lo, x_hi):
        x = px(v)
        label = f"{10 ** v:.3g}" if logx else f"{v:.6g}"
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 20}" text-anchor="middle">{label}</text>')
    for v in _nice_ticks(y_lo, y_hi):
        y = py(v)
        label = f"{10 ** v:.3g}" if logy else f"{v:.6g}"
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{label}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">'
               f'{escape(series[0].x_name)}</text>')
    out.append(f'<text x="20" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {top + ph / 2:.1f})">{escape(series[0].y_name)}</text>')
    for j, s in enumerate(series):
        color = _PALETTE[j % len(_PALETTE)]
        pts = " ".join(f"{px(tx(x)):.2f},{py(ty(y)):.2f}" for x, y in s.points)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 10 + 20 * j
        lx = left + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(s.label)}</text>')
    out.append("</svg>")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
    return path
