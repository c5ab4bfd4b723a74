"""Rectangular workspace partitioning and boundary-distance queries.

The global workspace is split into vertical strips, one per robot in index
order, with a fixed safety gap between adjacent non-empty strips.  Strip
areas are proportional to the workload shares; robots with zero share get
an empty region and surrender their gap so survivors stay contiguous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError, EmptyRegionError
from .team import WorkloadVector


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle: origin corner plus positive width/height (m)."""

    x: float
    y: float
    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ConfigurationError("rectangle must have positive width and height")

    @property
    def x_max(self) -> float:
        return self.x + self.width

    @property
    def y_max(self) -> float:
        return self.y + self.height

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.width / 2.0, self.y + self.height / 2.0)

    def corners(self) -> tuple[tuple[float, float], ...]:
        """Corners counterclockwise from the bottom-left."""
        return (
            (self.x, self.y),
            (self.x_max, self.y),
            (self.x_max, self.y_max),
            (self.x, self.y_max),
        )

    def contains(self, point: Sequence[float]) -> bool:
        px, py = float(point[0]), float(point[1])
        return self.x <= px <= self.x_max and self.y <= py <= self.y_max


def perimeter(region: Rect) -> float:
    """Perimeter length in meters; errors on an empty region."""
    if region is None:
        raise EmptyRegionError("perimeter of an empty region is undefined")
    return 2.0 * (region.width + region.height)


def boundary_distance(point: Sequence[float], region: Optional[Rect]) -> float:
    """Shortest Euclidean distance from ``point`` to the rectangle perimeter.

    Zero on the perimeter, positive both inside and outside.
    """
    if region is None:
        raise EmptyRegionError("boundary distance to an empty region is undefined")
    px, py = float(point[0]), float(point[1])
    dx = max(region.x - px, 0.0, px - region.x_max)
    dy = max(region.y - py, 0.0, py - region.y_max)
    if dx > 0.0 or dy > 0.0:
        return math.hypot(dx, dy)
    # Inside (or on) the rectangle: nearest side.
    return min(px - region.x, region.x_max - px, py - region.y, region.y_max - py)


def nearest_boundary_point(
    point: Sequence[float], region: Rect
) -> tuple[float, float]:
    """Closest point on the rectangle perimeter to ``point``."""
    px, py = float(point[0]), float(point[1])
    inside_x = region.x < px < region.x_max
    inside_y = region.y < py < region.y_max
    if not (inside_x and inside_y):
        # Outside or on the boundary: clamp onto the rectangle.
        return (
            min(max(px, region.x), region.x_max),
            min(max(py, region.y), region.y_max),
        )
    # Strictly inside: project onto the nearest side.
    candidates = (
        (px - region.x, (region.x, py)),
        (region.x_max - px, (region.x_max, py)),
        (py - region.y, (px, region.y)),
        (region.y_max - py, (px, region.y_max)),
    )
    return min(candidates, key=lambda c: c[0])[1]


@dataclass(frozen=True)
class GlobalWorkspace:
    """The full mission area: an axis-aligned rectangle plus a safety gap
    mandated between adjacent allocated regions."""

    origin: tuple[float, float]
    width: float
    height: float
    safety_gap: float = 0.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ConfigurationError("workspace must have positive extent")
        if self.safety_gap < 0:
            raise ConfigurationError("safety gap must be non-negative")

    @property
    def bounds(self) -> Rect:
        return Rect(self.origin[0], self.origin[1], self.width, self.height)


@dataclass(frozen=True)
class WorkspacePartition:
    """Per-robot strips inside the parent workspace; ``None`` marks an empty
    region for a robot with zero workload."""

    regions: tuple[Optional[Rect], ...]
    parent: GlobalWorkspace

    def __len__(self) -> int:
        return len(self.regions)

    @property
    def active_indices(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.regions) if r is not None)

    def area_fractions(self) -> np.ndarray:
        areas = np.array([0.0 if r is None else r.area for r in self.regions])
        total = math.fsum(areas.tolist())
        return areas / total


def partition_from_workload(
    workspace: GlobalWorkspace, sigma: WorkloadVector
) -> WorkspacePartition:
    """Vertical strips spanning the full workspace height, left to right in
    robot index order, widths proportional to the workload shares.

    The safety gap is inserted only between adjacent non-empty strips, so
    share fractions apply to the usable width (total minus gaps).
    """
    shares = sigma.shares
    nonzero = int(np.count_nonzero(shares))
    if nonzero == 0:
        raise ConfigurationError("cannot partition: all workload shares are zero")
    gaps = nonzero - 1
    usable = workspace.width - gaps * workspace.safety_gap
    if usable <= 0:
        raise ConfigurationError(
            f"infeasible partition: {gaps} gaps of {workspace.safety_gap} m "
            f"exceed workspace width {workspace.width} m"
        )
    regions: list[Optional[Rect]] = []
    cursor = workspace.origin[0]
    placed = 0
    for share in shares:
        if share == 0.0:
            regions.append(None)
            continue
        strip_width = share * usable
        regions.append(Rect(cursor, workspace.origin[1], strip_width, workspace.height))
        placed += 1
        cursor += strip_width
        if placed < nonzero:
            cursor += workspace.safety_gap
    return WorkspacePartition(regions=tuple(regions), parent=workspace)
