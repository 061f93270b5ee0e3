"""Block assembly of the discrete Schrödinger operator -Δ_g + q (- λ).

The discrete operator is the energy form of the divergence-form stencil,

    E(u) = Σ_edges a_face * (Πh / h_axis²) * (u_i - u_j)²  +  Σ_i q_i ρ_i Πh u_i²,

partitioned into interior (I) and boundary (B) nodes.  ``A_II φ = λ M φ`` is
then the Dirichlet eigenproblem with ``M = diag(ρ Πh)``.  Boundary-boundary
couplings along a face are dropped and ``A_BB`` keeps only the diagonal sum of
interior couplings, so ``A_BB`` does not depend on q.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .grid import Grid, Metric, QuadratureWeights, compute_weights


class NumericalError(RuntimeError):
    """A linear-algebra step failed."""


class SingularSystemError(NumericalError):
    """The (shifted) interior operator is singular: the shift lies on the spectrum."""


class IllConditionedError(NumericalError):
    """A solve went through but missed its residual target."""


class PotentialError(ValueError):
    pass


@dataclass(frozen=True)
class Potential:
    values: np.ndarray
    bound: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise PotentialError("potential has non-finite samples")
        slack = 1e-12 * max(self.bound, 1.0)
        if v.min(initial=0.0) < -slack or v.max(initial=0.0) > self.bound + slack:
            raise PotentialError(f"potential leaves [0, {self.bound}]: range [{v.min()}, {v.max()}]")
        object.__setattr__(self, "values", v)

    def interior(self, grid: Grid) -> np.ndarray:
        if self.values.size == grid.n_nodes:
            return self.values[grid.interior_ids]
        if self.values.size == grid.n_interior:
            return self.values
        raise PotentialError(f"potential has {self.values.size} samples; grid has {grid.n_nodes} nodes")


@dataclass(frozen=True, eq=False)
class BlockOperator:
    grid: Grid
    weights: QuadratureWeights
    a_ii: np.ndarray
    a_ib: np.ndarray
    a_bb: np.ndarray  # diagonal of A_BB
    mass: np.ndarray  # diagonal of M
    q: np.ndarray  # interior potential samples
    shift: complex | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def a_bi(self) -> np.ndarray:
        return self.a_ib.T

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.a_ii)

    def with_shift(self, shift: complex) -> BlockOperator:
        """Operator for q - shift sharing every other block with ``self``."""
        if self.shift is not None:
            raise ValueError("operator is already shifted")
        shift = complex(shift)
        if shift.imag == 0.0:
            a_ii = self.a_ii - shift.real * np.diag(self.mass)
        else:
            a_ii = self.a_ii - shift * np.diag(self.mass)
        op = BlockOperator(self.grid, self.weights, a_ii, self.a_ib, self.a_bb, self.mass, self.q, shift)
        op._cache["unshifted"] = self
        return op

    def unshifted(self) -> BlockOperator:
        return self._cache.get("unshifted", self) if self.shift is not None else self


def assemble(grid: Grid, metric: Metric, potential: Potential, shift: complex | None = None,
             weights: QuadratureWeights | None = None) -> BlockOperator:
    weights = weights if weights is not None else compute_weights(grid, metric)
    n_i, n_b = grid.n_interior, grid.n_boundary
    pos_i = np.full(grid.n_nodes, -1)
    pos_i[grid.interior_ids] = np.arange(n_i)
    pos_b = np.full(grid.n_nodes, -1)
    pos_b[grid.boundary_ids] = np.arange(n_b)

    a_ii = np.zeros((n_i, n_i))
    a_ib = np.zeros((n_i, n_b))
    a_bb = np.zeros(n_b)
    nodes = np.arange(grid.n_nodes).reshape(grid.counts)
    for axis in range(grid.dim):
        k = metric.flux_coefficient(axis).reshape(grid.counts)
        lo = [slice(None)] * grid.dim
        hi = [slice(None)] * grid.dim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        left = nodes[tuple(lo)].ravel()
        right = nodes[tuple(hi)].ravel()
        face = 0.5 * (k[tuple(lo)] + k[tuple(hi)]).ravel()
        w = face * grid.cell_volume / grid.spacing[axis] ** 2

        for a, b in ((left, right), (right, left)):
            ia, ib = pos_i[a], pos_i[b]
            both = (ia >= 0) & (ib >= 0)
            np.add.at(a_ii, (ia[both], ib[both]), -w[both])
            np.add.at(a_ii, (ia[both], ia[both]), w[both])
            jb = pos_b[b]
            cross = (ia >= 0) & (jb >= 0)
            np.add.at(a_ib, (ia[cross], jb[cross]), -w[cross])
            np.add.at(a_ii, (ia[cross], ia[cross]), w[cross])
            np.add.at(a_bb, jb[cross], w[cross])

    q = potential.interior(grid)
    mass = weights.mass
    a_ii[np.diag_indices(n_i)] += q * mass
    op = BlockOperator(grid, weights, a_ii, a_ib, a_bb, mass, q)
    return op.with_shift(shift) if shift is not None else op


def _generalized_eigvals(op: BlockOperator) -> np.ndarray:
    base = op.unshifted()
    if "eigvals" not in base._cache:
        s = 1.0 / np.sqrt(base.mass)
        base._cache["eigvals"] = sla.eigvalsh(s[:, None] * base.a_ii * s[None, :])
    return base._cache["eigvals"]


def factorize(op: BlockOperator):
    """Cached factorization of ``A_II``; raises on a singular shift."""
    if "factor" in op._cache:
        return op._cache["factor"]
    if op.shift is None:
        try:
            fac = ("cho", sla.cho_factor(op.a_ii))
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError("interior operator is not positive definite") from exc
    else:
        lam = op.shift
        if abs(lam.imag) <= 1e-12 * max(abs(lam), 1.0):
            ev = _generalized_eigvals(op)
            gap = np.min(np.abs(ev - lam.real))
            if gap <= 1e-12 * max(abs(lam), 1.0):
                raise SingularSystemError(f"shift {lam} coincides with eigenvalue (gap {gap:.3e})")
        with warnings.catch_warnings():
            warnings.simplefilter("error", sla.LinAlgWarning)
            try:
                fac = ("lu", sla.lu_factor(op.a_ii))
            except (sla.LinAlgWarning, np.linalg.LinAlgError) as exc:
                raise SingularSystemError(f"shifted operator singular at {lam}") from exc
    op._cache["factor"] = fac
    return fac


def solve_interior(op: BlockOperator, rhs: np.ndarray) -> np.ndarray:
    kind, fac = factorize(op)
    if kind == "cho":
        return sla.cho_solve(fac, rhs)
    return sla.lu_solve(fac, rhs)


def apply_dirichlet_solve(op: BlockOperator, f: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Interior values of the discrete solution with boundary data ``f``.

    ``f`` may be a single boundary vector or a matrix of column vectors.
    """
    f = np.asarray(f)
    if f.shape[0] != op.grid.n_boundary:
        raise ValueError(f"boundary data has length {f.shape[0]}, expected {op.grid.n_boundary}")
    rhs = -(op.a_ib @ f)
    u = solve_interior(op, rhs)
    resid = np.linalg.norm(op.a_ii @ u - rhs)
    scale = np.linalg.norm(op.a_ii) * np.linalg.norm(u) + np.linalg.norm(rhs)
    if resid > rtol * scale:
        raise IllConditionedError(f"Dirichlet solve residual {resid:.3e} exceeds {rtol:.0e} x {scale:.3e}")
    return u


def export_coo(matrix: np.ndarray, path: str | Path) -> None:
    """Write nonzero entries as ``row col value`` lines."""
    m = np.asarray(matrix)
    rows, cols = np.nonzero(m)
    with open(path, "w") as fh:
        fh.write(f"% {m.shape[0]} {m.shape[1]} {len(rows)}\n")
        for r, c in zip(rows, cols):
            v = complex(m[r, c])
            fh.write(f"{r} {c} {v.real!r}\n" if np.isrealobj(m) else f"{r} {c} {v.real!r} {v.imag!r}\n")
