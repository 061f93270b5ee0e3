"""Dirichlet-to-Neumann maps: Schur complement, spectral series, and difference splittings.

The discrete map is ``Λ = W^{-1} (A_BB - A_BI A_II^{-1} A_IB)``.  Expanding
``A_II^{-1}`` in the M-orthonormal eigenbasis gives

    Λ f = W^{-1} A_BB f - Σ_k <f|ψ_k> ψ_k / λ_k,

where the local term ``W^{-1} A_BB`` is the same for every potential.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .assembly import BlockOperator, apply_dirichlet_solve, solve_interior
from .spectral import SpectralBoundaryData


@dataclass(frozen=True, eq=False)
class DtnMatrix:
    entries: np.ndarray
    weights: np.ndarray
    shift: complex | None = None
    provenance: str = "direct"

    def __sub__(self, other: DtnMatrix) -> DtnMatrix:
        if not np.array_equal(self.weights, other.weights):
            raise ValueError("DtN maps live on different boundary measures")
        shift = self.shift if self.shift == other.shift else None
        return DtnMatrix(self.entries - other.entries, self.weights, shift, "difference")

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.entries @ f

    def norm(self) -> float:
        return operator_norm(self)


def dtn_direct(op: BlockOperator, weights=None) -> DtnMatrix:
    w = op.weights.boundary if weights is None else np.asarray(getattr(weights, "boundary", weights))
    x = solve_interior(op, op.a_ib)
    schur = np.diag(op.a_bb) - op.a_bi @ x
    return DtnMatrix(schur / w[:, None], w, op.shift, "direct")


def dtn_difference(op: BlockOperator, op_tilde: BlockOperator) -> DtnMatrix:
    """Λ(q) - Λ(q̃) through the resolvent identity.

    Λ - Λ̃ = -W^{-1} X^T (Ã_II - A_II) X̃ with X = A_II^{-1} A_IB, which avoids
    subtracting two large Schur complements and is exactly zero for q = q̃.
    Both operators must share grid, weights and shift.
    """
    if op.grid is not op_tilde.grid and op.grid.counts != op_tilde.grid.counts:
        raise ValueError("operators live on different grids")
    if op.shift != op_tilde.shift:
        raise ValueError("operators carry different shifts")
    w = op.weights.boundary
    dq = (op_tilde.q - op.q) * op.mass
    if not np.any(dq):
        dtype = complex if op.is_complex else float
        return DtnMatrix(np.zeros((len(w), len(w)), dtype), w, op.shift, "difference")
    x = solve_interior(op, op.a_ib)
    x_t = solve_interior(op_tilde, op_tilde.a_ib)
    entries = -(x.T @ (dq[:, None] * x_t)) / w[:, None]
    return DtnMatrix(entries, w, op.shift, "difference")


def local_part(data: SpectralBoundaryData) -> np.ndarray:
    return np.diag(data.eigensystem.op.a_bb / data.weights)


def _check_k(data: SpectralBoundaryData, K: int | None) -> int:
    K = data.size if K is None else int(K)
    if not 0 <= K <= data.size:
        raise ValueError(f"truncation K={K} outside [0, {data.size}]")
    return K


def dtn_series(data: SpectralBoundaryData, K: int | None = None, include_local: bool = True) -> DtnMatrix:
    """Truncated spectral representation of Λ(q) using the first K modes."""
    K = _check_k(data, K)
    psi = data.psis[:K]
    spectral = -(psi.T / data.lambdas[:K]) @ (psi * data.weights[None, :])
    entries = spectral + local_part(data) if include_local else spectral
    return DtnMatrix(entries, data.weights, None, f"series({K})")


@dataclass(frozen=True)
class SeriesSolution:
    u: np.ndarray
    pairings: np.ndarray  # <f|ψ_k>
    coefficients: np.ndarray  # -<f|ψ_k>/λ_k
    parseval: float


def solve_bvp_series(data: SpectralBoundaryData, f: np.ndarray, K: int | None = None) -> SeriesSolution:
    """u_K = -Σ_{k<=K} <f|ψ_k>/λ_k φ_k together with Σ_{k<=K} |<f|ψ_k>|²/λ_k²."""
    K = _check_k(data, K)
    pair = data.pair(f)[:K]
    coef = -pair / data.lambdas[:K]
    u = data.phis[:, :K] @ coef
    return SeriesSolution(u, pair, coef, float(np.sum(np.abs(coef) ** 2)))


@dataclass(frozen=True)
class Splitting:
    """Three-term splitting; ``partial`` holds cumulative sums over k when requested."""

    parts: tuple[np.ndarray, np.ndarray, np.ndarray]
    partial: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    @property
    def total(self) -> np.ndarray:
        return self.parts[0] + self.parts[1] + self.parts[2]


def _terms(data, data_tilde, f):
    if data.size != data_tilde.size:
        raise ValueError("datasets have different lengths")
    lam, lam_t = data.lambdas, data_tilde.lambdas
    p, p_t = data.pair(f), data_tilde.pair(f)
    c1 = (1.0 / lam_t - 1.0 / lam) * p_t
    c2 = (p_t - p) / lam
    c3 = p / lam
    return c1, c2, c3


def _assemble(c1, c2, c3, x_t, dx, partial):
    # x_t / dx carry the per-k vectors as rows
    terms = (c1[:, None] * x_t, c2[:, None] * x_t, c3[:, None] * dx)
    parts = tuple(t.sum(axis=0) for t in terms)
    cums = tuple(np.cumsum(t, axis=0) for t in terms) if partial else None
    return Splitting(parts, cums)


def difference_decomposition(data: SpectralBoundaryData, data_tilde: SpectralBoundaryData,
                             f: np.ndarray, partial: bool = False) -> Splitting:
    """Boundary splitting A1 + A2 + A3 = (Λ(q) - Λ(q̃)) f.

    A1 = Σ (1/λ̃_k - 1/λ_k) <f|ψ̃_k> ψ̃_k
    A2 = Σ (<f|ψ̃_k> - <f|ψ_k>) / λ_k  ψ̃_k
    A3 = Σ <f|ψ_k> / λ_k  (ψ̃_k - ψ_k)
    """
    c1, c2, c3 = _terms(data, data_tilde, f)
    return _assemble(c1, c2, c3, data_tilde.psis, data_tilde.psis - data.psis, partial)


def difference_decomposition_interior(data: SpectralBoundaryData, data_tilde: SpectralBoundaryData,
                                      f: np.ndarray, partial: bool = False) -> Splitting:
    """Interior splitting w¹ + w² + w³ with φ̃_k, φ̃_k - φ_k in place of the traces.

    The sum equals u(q) - u(q̃); applying the flux trace W^{-1} A_BI to each
    piece recovers the boundary splitting.
    """
    c1, c2, c3 = _terms(data, data_tilde, f)
    return _assemble(c1, c2, c3, data_tilde.phis.T, (data_tilde.phis - data.phis).T, partial)


def flux_trace(data: SpectralBoundaryData, w: np.ndarray) -> np.ndarray:
    """Discrete outward flux of an interior field vanishing on the boundary."""
    return (data.eigensystem.op.a_bi @ w) / data.weights


def resolvent_shift_series(data: SpectralBoundaryData, f: np.ndarray, mu: float) -> np.ndarray:
    """τu - τu(mu) = -Σ mu <f|ψ_k> / (λ_k (mu + λ_k)) ψ_k, for u(mu) the solution with q + mu."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    lam = data.lambdas
    coef = -mu * data.pair(f) / (lam * (mu + lam))
    return coef @ data.psis


def resolvent_shift_direct(op: BlockOperator, f: np.ndarray, mu: float) -> np.ndarray:
    """Two-solve counterpart of :func:`resolvent_shift_series`."""
    u = apply_dirichlet_solve(op, f)
    u_mu = apply_dirichlet_solve(op.with_shift(-mu), f)
    return (op.a_bi @ (u - u_mu)) / op.weights.boundary


def resolvent_remainder(data: SpectralBoundaryData, data_tilde: SpectralBoundaryData,
                        f: np.ndarray, mu: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Remainder Σ[(m_k - 1) a_k - (m̃_k - 1) ã_k] with m_k = mu/(mu+λ_k), and its two pieces.

    Returns ``(total, dominated, eigen_gap)`` where ``dominated`` is
    Σ (m_k - 1)(a_k - ã_k) and ``eigen_gap`` is Σ (m_k - m̃_k) ã_k.
    """
    lam, lam_t = data.lambdas, data_tilde.lambdas
    a = (-data.pair(f) / lam)[:, None] * data.psis
    a_t = (-data_tilde.pair(f) / lam_t)[:, None] * data_tilde.psis
    m = mu / (mu + lam)
    m_t = mu / (mu + lam_t)
    dominated = ((m - 1.0)[:, None] * (a - a_t)).sum(axis=0)
    eigen_gap = ((m - m_t)[:, None] * a_t).sum(axis=0)
    total = ((m - 1.0)[:, None] * a - (m_t - 1.0)[:, None] * a_t).sum(axis=0)
    return total, dominated, eigen_gap


def operator_norm(T, weights: np.ndarray | None = None) -> float:
    """L²(∂M) operator norm: largest singular value of W^{1/2} T W^{-1/2}."""
    if isinstance(T, DtnMatrix):
        entries, w = T.entries, T.weights
    else:
        entries = np.asarray(T)
        w = np.ones(entries.shape[0]) if weights is None else np.asarray(weights)
    if not np.all(np.isfinite(entries)):
        raise ValueError("operator has non-finite entries")
    sw = np.sqrt(w)
    return float(np.linalg.svd(sw[:, None] * entries / sw[None, :], compute_uv=False)[0])


def export_dtn(dtn: DtnMatrix, stem: str | Path) -> tuple[Path, Path]:
    """Dense row-major CSV plus a JSON sidecar with shift, provenance and weights."""
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    meta_path = stem.with_suffix(".json")
    e = dtn.entries
    if np.iscomplexobj(e):
        rows = [",".join(f"{float(v.real)!r}{float(v.imag):+.17g}j" for v in row) for row in e]
    else:
        rows = [",".join(repr(float(v)) for v in row) for row in e]
    csv_path.write_text("\n".join(rows) + "\n")
    shift = None if dtn.shift is None else [dtn.shift.real, dtn.shift.imag]
    meta = {"shift": shift, "provenance": dtn.provenance, "weights": dtn.weights.tolist(),
            "shape": list(e.shape), "dtype": "complex" if np.iscomplexobj(e) else "real"}
    meta_path.write_text(json.dumps(meta, indent=2))
    return csv_path, meta_path
