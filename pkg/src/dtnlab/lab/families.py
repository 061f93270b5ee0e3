"""Potential families evaluated on grid coordinates.

Every family is a function of physical coordinates, so one spec gives the
same continuum field on every grid of a refinement study.
"""

from __future__ import annotations

import numpy as np

from ..assembly import Potential
from ..grid import Grid
from .config import ConfigError


def gaussian(x: np.ndarray, center, width: float, amplitude: float) -> np.ndarray:
    r2 = np.sum((x - np.asarray(center, dtype=float)) ** 2, axis=1)
    return amplitude * np.exp(-r2 / (2 * width**2))


def random_smooth(grid: Grid, seed: int, amplitude: float, modes: int = 3) -> np.ndarray:
    """Low-pass random field with values in [0, amplitude]: a few cosine modes per axis."""
    rng = np.random.default_rng(seed)
    x = grid.coordinates()
    freqs = np.array(np.meshgrid(*[np.arange(modes + 1)] * grid.dim, indexing="ij")).reshape(grid.dim, -1).T
    freqs = freqs[1:]
    coef = rng.normal(size=len(freqs)) / (1.0 + np.sum(freqs**2, axis=1))
    phase = rng.uniform(0, 2 * np.pi, size=len(freqs))
    ext = np.asarray(grid.extents)
    arg = np.pi * (x / ext) @ freqs.T + phase
    series = np.cos(arg) @ coef / np.sum(np.abs(coef))
    return amplitude * 0.5 * (1.0 + series)


def evaluate(spec: dict, grid: Grid, aleph: float) -> np.ndarray:
    """Node values of a potential spec, clamped to [0, aleph]."""
    return np.clip(_raw(spec, grid, aleph), 0.0, aleph)


def _raw(spec: dict, grid: Grid, aleph: float) -> np.ndarray:
    if "values" in spec:
        v = np.asarray(spec["values"], dtype=float).reshape(-1)
        if v.size != grid.n_nodes:
            raise ConfigError(f"potential array has {v.size} values; grid has {grid.n_nodes} nodes")
        return v
    family = spec.get("family", "constant")
    x = grid.coordinates()
    ext = np.asarray(grid.extents)
    if family == "constant":
        v = np.full(grid.n_nodes, float(spec.get("value", 0.0)))
    elif family == "bumps":
        # centers and widths are in units of the box extents
        v = np.full(grid.n_nodes, float(spec.get("base", 0.0)))
        for b in spec.get("bumps", []):
            v = v + gaussian(x / ext, b["center"], b["width"], b["amplitude"])
    elif family == "composite":
        v = sum(_raw(t, grid, aleph) for t in spec["terms"])
    elif family == "random-smooth":
        v = float(spec.get("offset", 0.0)) + random_smooth(
            grid, int(spec.get("seed", 0)), float(spec.get("amplitude", aleph)), int(spec.get("modes", 3)))
    else:
        raise ConfigError(f"unknown potential family {family!r}")
    return v


def collar_mask(grid: Grid, width: int = 1) -> np.ndarray:
    """1 on nodes at least ``width`` + 1 cells from the boundary, 0 on the collar."""
    idx = np.indices(grid.counts).reshape(grid.dim, -1)
    n = np.asarray(grid.counts)[:, None]
    keep = np.all((idx > width) & (idx < n - 1 - width), axis=0)
    return keep.astype(float)


def make_potential(spec: dict, grid: Grid, aleph: float, collar: bool = False) -> Potential:
    v = evaluate(spec, grid, aleph)
    if collar:
        v = v * collar_mask(grid)
    return Potential(v, aleph)


def pair_specs(n_pairs: int, seed: int, aleph: float, dim: int = 2, kinds=None) -> list[tuple[str, dict, dict]]:
    """Deterministic cycle of (kind, q spec, q̃ spec) pairs.

    Kinds: ``identical``, ``shift`` (constant offset), ``bump-1e-3`` /
    ``bump-1e-2`` / ``bump-1e-1`` (q + δ·bump) and ``independent``.
    """
    kinds = kinds or ["identical", "shift", "bump-1e-3", "bump-1e-2", "bump-1e-1", "independent"]
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_pairs):
        kind = kinds[i % len(kinds)]
        amp = 0.5 * aleph
        q = {"family": "random-smooth", "seed": int(rng.integers(2**31)), "amplitude": amp}
        if kind == "identical":
            qt = dict(q)
        elif kind == "shift":
            qt = dict(q, offset=float(rng.uniform(0.1, 0.4) * aleph))
        elif kind.startswith("bump-"):
            delta = float(kind.split("-", 1)[1])
            center = rng.uniform(0.3, 0.7, size=dim).tolist()
            qt = {"family": "composite", "terms": [q, {"family": "bumps", "bumps": [
                {"center": center, "width": 0.1, "amplitude": delta * aleph}]}]}
        elif kind == "independent":
            qt = {"family": "random-smooth", "seed": int(rng.integers(2**31)), "amplitude": amp}
        else:
            raise ConfigError(f"unknown pair kind {kind!r}")
        out.append((kind, q, qt))
    return out
