"""Node grids on boxes, conformal metrics and the discrete boundary/volume measures.

Nodes are indexed lexicographically (C order over ``counts``).  A node is
*interior* when every axis index lies strictly inside, and *boundary* when
exactly one axis index sits on an end.  In 2D the four corners are neither:
the 5-point stencil never couples them to an interior node.

The metric is ``g = c(x) * diag(b_1, ..., b_d)`` with a positive conformal
factor ``c`` and constant positive base coefficients ``b_a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np


class GridError(ValueError):
    """Invalid grid or metric parameters."""


@dataclass(frozen=True)
class Grid:
    dim: int
    extents: tuple[float, ...]
    counts: tuple[int, ...]
    spacing: tuple[float, ...]
    interior_ids: np.ndarray = field(repr=False)
    boundary_ids: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.counts

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.counts))

    @property
    def n_interior(self) -> int:
        return len(self.interior_ids)

    @property
    def n_boundary(self) -> int:
        return len(self.boundary_ids)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis_coordinates(self) -> list[np.ndarray]:
        return [np.arange(n) * h for n, h in zip(self.counts, self.spacing)]

    def coordinates(self) -> np.ndarray:
        """Node coordinates, shape ``(n_nodes, dim)``, in node-index order."""
        mesh = np.meshgrid(*self.axis_coordinates(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def multi_index(self, ids: np.ndarray) -> tuple[np.ndarray, ...]:
        return np.unravel_index(np.asarray(ids), self.counts)

    def boundary_normal_axis(self) -> np.ndarray:
        """Axis along which each boundary node's outward normal points."""
        idx = np.stack(self.multi_index(self.boundary_ids), axis=1)
        counts = np.asarray(self.counts)
        on_end = (idx == 0) | (idx == counts - 1)
        return np.argmax(on_end, axis=1)

    def interior_field(self, values: np.ndarray) -> np.ndarray:
        """Restrict a node field (flat or shaped) to interior nodes."""
        return np.asarray(values).reshape(-1)[self.interior_ids]


def build_grid(dim: int, extents: Sequence[float], counts: Sequence[int]) -> Grid:
    extents = tuple(float(e) for e in np.atleast_1d(extents))
    counts = tuple(int(n) for n in np.atleast_1d(counts))
    if dim not in (1, 2, 3):
        raise GridError(f"unsupported dimension {dim}")
    if len(extents) != dim or len(counts) != dim:
        raise GridError(f"need {dim} extents and counts, got {extents}, {counts}")
    if any(e <= 0 for e in extents):
        raise GridError(f"extents must be positive, got {extents}")
    if any(n < 3 for n in counts):
        raise GridError(f"every axis needs at least 3 nodes, got {counts}")

    spacing = tuple(e / (n - 1) for e, n in zip(extents, counts))
    idx = np.indices(counts).reshape(dim, -1)
    ends = (idx == 0) | (idx == np.asarray(counts)[:, None] - 1)
    n_ends = ends.sum(axis=0)
    interior = np.flatnonzero(n_ends == 0)
    boundary = np.flatnonzero(n_ends == 1)
    return Grid(dim, extents, counts, spacing, interior, boundary)


@dataclass(frozen=True)
class Metric:
    """Conformal factor sampled at every node plus per-axis base coefficients."""

    conformal_factor: np.ndarray
    base: tuple[float, ...]

    def __post_init__(self):
        c = np.asarray(self.conformal_factor, dtype=float).reshape(-1)
        if not np.all(np.isfinite(c)) or np.any(c <= 0):
            raise GridError("conformal factor must be finite and strictly positive")
        if any(b <= 0 for b in self.base):
            raise GridError("base metric coefficients must be positive")
        object.__setattr__(self, "conformal_factor", c)

    @property
    def dim(self) -> int:
        return len(self.base)

    def density(self) -> np.ndarray:
        """Riemannian volume density sqrt|g| at each node."""
        d = self.dim
        return self.conformal_factor ** (d / 2) * np.sqrt(np.prod(self.base))

    def flux_coefficient(self, axis: int) -> np.ndarray:
        """sqrt|g| * g^{axis,axis} at each node."""
        return self.density() / (self.conformal_factor * self.base[axis])

    def surface_density(self, normal_axis: np.ndarray) -> np.ndarray:
        """Induced surface density on faces orthogonal to ``normal_axis``."""
        d = self.dim
        c = self.conformal_factor
        tangential = np.prod(self.base) / np.asarray(self.base)[normal_axis]
        return c ** ((d - 1) / 2) * np.sqrt(tangential)


def euclidean_metric(grid: Grid) -> Metric:
    return Metric(np.ones(grid.n_nodes), (1.0,) * grid.dim)


def conformal_metric(grid: Grid, spec: Mapping | None = None) -> Metric:
    """Build a metric from a config mapping.

    Recognised forms::

        {"family": "constant", "value": 2.0}
        {"family": "gaussian-bump", "center": [...], "width": w, "amplitude": a, "value": 1.0}
        {"values": [... row-major node values ...]}

    Each may carry ``"base": [b_1, ..., b_d]`` (default all ones).
    """
    spec = dict(spec or {})
    base = tuple(float(b) for b in spec.get("base", (1.0,) * grid.dim))
    if len(base) != grid.dim:
        raise GridError(f"base metric needs {grid.dim} coefficients")
    if "values" in spec:
        c = np.asarray(spec["values"], dtype=float).reshape(-1)
        if c.size != grid.n_nodes:
            raise GridError(f"conformal factor array has {c.size} values, grid has {grid.n_nodes} nodes")
        return Metric(c, base)

    family = spec.get("family", "constant")
    value = float(spec.get("value", 1.0))
    if family == "constant":
        return Metric(np.full(grid.n_nodes, value), base)
    if family == "gaussian-bump":
        x = grid.coordinates()
        center = np.asarray(spec.get("center", [e / 2 for e in grid.extents]), dtype=float)
        width = float(spec.get("width", 0.2))
        amp = float(spec.get("amplitude", 0.5))
        r2 = np.sum((x - center) ** 2, axis=1)
        return Metric(value + amp * np.exp(-r2 / (2 * width**2)), base)
    raise GridError(f"unknown conformal factor family {family!r}")


@dataclass(frozen=True)
class QuadratureWeights:
    mass: np.ndarray
    boundary: np.ndarray


def compute_weights(grid: Grid, metric: Metric) -> QuadratureWeights:
    """Interior mass weights sqrt|g| * prod(h) and boundary surface weights.

    In 1D the boundary is two points, each carrying weight 1.
    """
    if metric.conformal_factor.size != grid.n_nodes or metric.dim != grid.dim:
        raise GridError("metric is not sampled on this grid")
    mass = metric.density()[grid.interior_ids] * grid.cell_volume
    if grid.dim == 1:
        boundary = np.ones(grid.n_boundary)
    else:
        normal = grid.boundary_normal_axis()
        h = np.asarray(grid.spacing)
        tangential_cell = grid.cell_volume / h[normal]
        dens = _boundary_surface_density(grid, metric, normal)
        boundary = dens * tangential_cell
    return QuadratureWeights(mass, boundary)


def _boundary_surface_density(grid: Grid, metric: Metric, normal: np.ndarray) -> np.ndarray:
    full = Metric(metric.conformal_factor[grid.boundary_ids], metric.base)
    return full.surface_density(normal)
