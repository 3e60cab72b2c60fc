from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class CurveSeries:
    """A labeled curve with strictly increasing, finite x values."""

    label: str
    x_name: str
    y_name: str
    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)
        for x, y in pts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"series {self.label!r} has a non-finite point ({x!r}, {y!r})")
        for (x0, _), (x1, _) in zip(pts, pts[1:]):
            if not x1 > x0:
                raise ValueError(f"series {self.label!r}: x must be strictly increasing")

    @classmethod
    def from_xy(cls, label: str, x_name: str, y_name: str,
                xs: Iterable[float], ys: Iterable[float]) -> "CurveSeries":
        return cls(label, x_name, y_name, tuple(zip(xs, ys)))

    @property
    def xs(self) -> list[float]:
        return [x for x, _ in self.points]

    @property
    def ys(self) -> list[float]:
        return [y for _, y in self.points]

    def __len__(self):
        return len(self.points)
