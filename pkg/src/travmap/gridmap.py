"""2D traversability grid maps: transforms, rasterization, priority fusion, PGM I/O.

Cells live on a metric grid anchored at ``origin`` (lower-left corner, meters)
with square cells of side ``resolution``.  Cell index ``(i, j)`` counts columns
from the left (x) and rows from the bottom (y); the flat layout is row-major
with row 0 at the bottom.  PGM export flips rows so image row 0 is the top of
the map, matching the y-down convention of common robot map tooling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "CellState",
    "LayerPriority",
    "DEFAULT_PRIORITY",
    "OutOfBoundsError",
    "TraversabilityMap",
    "new_map",
    "empty_like",
    "fuse",
    "export_pgm",
    "import_pgm",
]

# Tolerance absorbing float noise in extent/resolution ratios (3.0/0.1 style).
_EXTENT_EPS = 1e-9


class CellState(IntEnum):
    """Ternary traversability value of a single grid cell."""

    UNKNOWN = 0
    TRAVERSABLE = 1
    UNTRAVERSABLE = 2


#: Gray levels used by standard occupancy-map servers (free / occupied / unknown).
STATE_TO_GRAY = {
    CellState.TRAVERSABLE: 254,
    CellState.UNTRAVERSABLE: 0,
    CellState.UNKNOWN: 205,
}
GRAY_TO_STATE = {gray: state for state, gray in STATE_TO_GRAY.items()}

_GRAY_LUT = np.zeros(3, dtype=np.uint8)
for _state, _gray in STATE_TO_GRAY.items():
    _GRAY_LUT[int(_state)] = _gray


class OutOfBoundsError(IndexError):
    """World point or cell index outside the grid."""


class LayerPriority:
    """Total order over layer ids; later entries override earlier ones."""

    def __init__(self, order: Iterable[str]):
        order = tuple(order)
        if len(set(order)) != len(order):
            raise ValueError(f"duplicate layer ids in priority {order!r}")
        self.order = order

    def rank(self, layer_id: str) -> int:
        try:
            return self.order.index(layer_id)
        except ValueError:
            raise ValueError(f"layer {layer_id!r} not covered by priority {self.order!r}") from None

    def __repr__(self) -> str:
        return f"LayerPriority({self.order!r})"


#: Direct human-trail evidence outranks occlusion inference outranks feature obstacles.
DEFAULT_PRIORITY = LayerPriority(("sfm", "ho3", "pfh"))


@dataclass(eq=False)
class TraversabilityMap:
    """Metric grid of :class:`CellState` values.

    ``cells`` has shape ``(height, width)`` and is indexed ``[j, i]``.
    """

    origin: tuple[float, float]
    resolution: float
    width: int
    height: int
    cells: np.ndarray

    def copy(self) -> "TraversabilityMap":
        return TraversabilityMap(self.origin, self.resolution, self.width, self.height, self.cells.copy())

    def in_bounds(self, i: int, j: int) -> bool:
        return 0 <= i < self.width and 0 <= j < self.height

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        """Cell index containing world point ``(x, y)``; raises when outside the grid."""
        i = math.floor((x - self.origin[0]) / self.resolution)
        j = math.floor((y - self.origin[1]) / self.resolution)
        if not self.in_bounds(i, j):
            raise OutOfBoundsError(f"point ({x}, {y}) maps to cell ({i}, {j}) outside {self.width}x{self.height} grid")
        return i, j

    def cell_to_world(self, i: int, j: int) -> tuple[float, float]:
        """Center of cell ``(i, j)`` in world coordinates (right-inverse of world_to_cell)."""
        if not self.in_bounds(i, j):
            raise OutOfBoundsError(f"cell ({i}, {j}) outside {self.width}x{self.height} grid")
        return (
            self.origin[0] + (i + 0.5) * self.resolution,
            self.origin[1] + (j + 0.5) * self.resolution,
        )

    def state(self, i: int, j: int) -> CellState:
        if not self.in_bounds(i, j):
            raise OutOfBoundsError(f"cell ({i}, {j}) outside {self.width}x{self.height} grid")
        return CellState(self.cells[j, i])

    def set_cell(self, i: int, j: int, state: CellState) -> None:
        """Set one cell, last writer wins."""
        if not self.in_bounds(i, j):
            raise OutOfBoundsError(f"cell ({i}, {j}) outside {self.width}x{self.height} grid")
        self.cells[j, i] = int(state)

    def mark_band(
        self,
        a: tuple[float, float],
        b: tuple[float, float],
        half_width: float,
        state: CellState,
    ) -> None:
        """Set every cell whose center lies within ``half_width`` of segment ``ab``.

        Capsule rasterization: ``a == b`` marks a disk.  Out-of-bounds portions
        are clipped silently.
        """
        if half_width < 0:
            raise ValueError("half_width must be >= 0")
        ax, ay = float(a[0]), float(a[1])
        bx, by = float(b[0]), float(b[1])
        res = self.resolution
        ox, oy = self.origin
        pad = half_width + res
        i0 = max(0, math.floor((min(ax, bx) - pad - ox) / res))
        i1 = min(self.width, math.ceil((max(ax, bx) + pad - ox) / res) + 1)
        j0 = max(0, math.floor((min(ay, by) - pad - oy) / res))
        j1 = min(self.height, math.ceil((max(ay, by) + pad - oy) / res) + 1)
        if i0 >= i1 or j0 >= j1:
            return
        xs = ox + (np.arange(i0, i1) + 0.5) * res
        ys = oy + (np.arange(j0, j1) + 0.5) * res
        px = xs[None, :] - ax
        py = ys[:, None] - ay
        dx = bx - ax
        dy = by - ay
        seg_len2 = dx * dx + dy * dy
        if seg_len2 == 0.0:
            d2 = px * px + py * py
        else:
            t = np.clip((px * dx + py * dy) / seg_len2, 0.0, 1.0)
            d2 = (px - t * dx) ** 2 + (py - t * dy) ** 2
        mask = d2 <= half_width * half_width
        block = self.cells[j0:j1, i0:i1]
        block[mask] = int(state)

    def counts(self) -> dict[CellState, int]:
        return {s: int(np.count_nonzero(self.cells == int(s))) for s in CellState}

    def same_geometry(self, other: "TraversabilityMap") -> bool:
        return (
            self.origin == other.origin
            and self.resolution == other.resolution
            and self.width == other.width
            and self.height == other.height
        )


def new_map(x_min: float, y_min: float, x_max: float, y_max: float, resolution: float = 0.10) -> TraversabilityMap:
    """Fresh all-UNKNOWN map covering ``[x_min, x_max] x [y_min, y_max]``."""
    if resolution <= 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    if x_max <= x_min or y_max <= y_min:
        raise ValueError(f"empty extent ({x_min}, {y_min}) .. ({x_max}, {y_max})")
    width = max(1, math.ceil((x_max - x_min) / resolution - _EXTENT_EPS))
    height = max(1, math.ceil((y_max - y_min) / resolution - _EXTENT_EPS))
    cells = np.full((height, width), int(CellState.UNKNOWN), dtype=np.uint8)
    return TraversabilityMap((x_min, y_min), resolution, width, height, cells)


def empty_like(m: TraversabilityMap) -> TraversabilityMap:
    cells = np.full((m.height, m.width), int(CellState.UNKNOWN), dtype=np.uint8)
    return TraversabilityMap(m.origin, m.resolution, m.width, m.height, cells)


def fuse(
    layers: Sequence[tuple[TraversabilityMap, str]],
    priority: LayerPriority = DEFAULT_PRIORITY,
) -> TraversabilityMap:
    """Cell-wise fusion: the highest-priority non-UNKNOWN layer wins.

    Result is independent of the order layers are listed in; only the
    priority order matters.
    """
    if not layers:
        raise ValueError("need at least one layer")
    ids = [layer_id for _, layer_id in layers]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate layer ids {ids!r}")
    base = layers[0][0]
    for m, layer_id in layers:
        if not m.same_geometry(base):
            raise ValueError(f"layer {layer_id!r} geometry differs from {ids[0]!r}")
    out = empty_like(base)
    for m, _ in sorted(layers, key=lambda pair: priority.rank(pair[1])):
        known = m.cells != int(CellState.UNKNOWN)
        out.cells[known] = m.cells[known]
    return out


def export_pgm(m: TraversabilityMap) -> bytes:
    """Binary PGM (P5, maxval 255), image row 0 = top of the map."""
    header = f"P5\n{m.width} {m.height}\n255\n".encode("ascii")
    pixels = _GRAY_LUT[np.flipud(m.cells)]
    return header + pixels.tobytes()


def import_pgm(data: bytes, origin: tuple[float, float] = (0.0, 0.0), resolution: float = 0.10) -> TraversabilityMap:
    """Parse a P5 PGM produced by :func:`export_pgm` back into a map.

    The PGM itself carries no georeference, so ``origin`` and ``resolution``
    must be supplied by the caller.
    """
    if not data.startswith(b"P5"):
        raise ValueError("not a binary (P5) PGM")
    fields: list[int] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace byte after maxval
    width, height, maxval = fields
    if maxval != 255:
        raise ValueError(f"expected maxval 255, got {maxval}")
    pixels = np.frombuffer(data, dtype=np.uint8, offset=pos)
    if pixels.size != width * height:
        raise ValueError(f"expected {width * height} pixels, got {pixels.size}")
    cells = np.zeros((height, width), dtype=np.uint8)
    grays = pixels.reshape(height, width)
    known_grays = np.zeros(256, dtype=bool)
    state_of_gray = np.zeros(256, dtype=np.uint8)
    for gray, state in GRAY_TO_STATE.items():
        known_grays[gray] = True
        state_of_gray[gray] = int(state)
    if not known_grays[grays].all():
        bad = int(grays[~known_grays[grays]][0])
        raise ValueError(f"gray level {bad} has no cell-state meaning")
    cells[:, :] = state_of_gray[np.flipud(grays)]
    return TraversabilityMap(origin, resolution, width, height, cells)
