"""Basin-of-attraction rasterizer over a square grid of starting points.

Each grid cell center seeds one optimizer run; the cell is labeled by the
first attractor within classify_tol of the endpoint, else left unresolved.
Cells are independent, so rows can be fanned out across worker processes;
results are assembled in row order, making the output byte-identical for
any worker count.
"""

import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .optimizers import OptimizerConfig, backtracking_gd, bnqn, gradient_descent

__all__ = [
    "UNRESOLVED",
    "Attractor",
    "BasinGrid",
    "LabelField",
    "rasterize",
    "basin_stats",
    "write_ppm",
    "write_label_csv",
]

UNRESOLVED = -1


@dataclass(frozen=True)
class Attractor:
    point: tuple
    label: str
    color: tuple  # 8-bit RGB


@dataclass
class BasinGrid:
    """Square grid: resolution x resolution cell centers, mathematical
    orientation (row 0 holds the largest y)."""

    center: tuple
    half_width: float
    resolution: int
    attractors: list
    classify_tol: float = 1e-5
    unresolved_color: tuple = (0, 0, 0)

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")
        labels = [a.label for a in self.attractors]
        if len(set(labels)) != len(labels):
            raise ValueError("attractor labels must be unique")

    def cell_center(self, row, col):
        cx, cy = self.center
        w = 2.0 * self.half_width / self.resolution
        x = cx - self.half_width + (col + 0.5) * w
        y = cy + self.half_width - (row + 0.5) * w
        return np.array([x, y])


@dataclass
class LabelField:
    labels: np.ndarray  # (res, res) int, UNRESOLVED or attractor index
    iterations: np.ndarray  # (res, res) int
    attractor_labels: list = field(default_factory=list)


_RUNNERS = {
    "gd": gradient_descent,
    "bgd": backtracking_gd,
    "bnqn": bnqn,
}

# worker context inherited through fork(); objectives hold closures, so they
# cannot be pickled across a spawn boundary
_CTX = {}


def _classify(end, attractors, tol):
    for i, a in enumerate(attractors):
        d = 0.0
        for c, p in zip(end, a.point):
            d += (c - p) * (c - p)
        if d <= tol * tol:
            return i
    return UNRESOLVED


def _raster_row(row):
    obj, cfg, grid, runner = (
        _CTX["obj"],
        _CTX["cfg"],
        _CTX["grid"],
        _CTX["runner"],
    )
    res = grid.resolution
    labels = np.full(res, UNRESOLVED, dtype=np.int32)
    iters = np.zeros(res, dtype=np.int32)
    for col in range(res):
        trace = runner(obj, grid.cell_center(row, col), cfg)
        iters[col] = len(trace) - 1
        labels[col] = _classify(
            trace.end_point, grid.attractors, grid.classify_tol
        )
    return labels, iters


def rasterize(obj, cfg: OptimizerConfig, grid: BasinGrid, workers: int = 1):
    """Run the configured optimizer from every cell center and label cells.

    Deterministic for a fixed grid and config, independent of workers.
    """
    if obj.dim != 2:
        raise ValueError("the rasterizer needs a 2-d objective")
    runner = _RUNNERS.get(cfg.method)
    if runner is None:
        raise ValueError(f"unsupported rasterizer method: {cfg.method!r}")
    res = grid.resolution
    _CTX.update(obj=obj, cfg=cfg, grid=grid, runner=runner)
    try:
        if workers <= 1:
            rows = [_raster_row(r) for r in range(res)]
        else:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(workers) as pool:
                rows = pool.map(_raster_row, range(res))
    finally:
        _CTX.clear()
    labels = np.stack([r[0] for r in rows])
    iters = np.stack([r[1] for r in rows])
    return LabelField(labels, iters, [a.label for a in grid.attractors])


def basin_stats(field: LabelField) -> dict:
    """Cell counts and fractions per label (including 'unresolved')."""
    total = field.labels.size
    out = {}
    for i, label in enumerate(field.attractor_labels):
        n = int(np.sum(field.labels == i))
        out[label] = {"cells": n, "fraction": n / total}
    n = int(np.sum(field.labels == UNRESOLVED))
    out["unresolved"] = {"cells": n, "fraction": n / total}
    return out


def write_ppm(field: LabelField, grid: BasinGrid, path):
    """Binary PPM (P6), 8-bit RGB, row 0 = maximum y."""
    res = grid.resolution
    palette = np.zeros((len(grid.attractors) + 1, 3), dtype=np.uint8)
    palette[0] = grid.unresolved_color
    for i, a in enumerate(grid.attractors):
        palette[i + 1] = a.color
    pixels = palette[field.labels + 1]  # UNRESOLVED = -1 maps to slot 0
    with open(path, "wb") as fh:
        fh.write(f"P6\n{res} {res}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def write_label_csv(field: LabelField, path):
    """Row-major integer label matrix (unresolved cells are -1)."""
    np.savetxt(path, field.labels, fmt="%d", delimiter=",")
