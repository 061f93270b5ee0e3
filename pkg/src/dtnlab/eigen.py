"""Dense generalized eigensolver for the interior Dirichlet operator."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .assembly import BlockOperator, NumericalError

DEFAULT_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending eigenvalues and M-orthonormal eigenvectors (columns of ``phis``)."""

    lambdas: np.ndarray
    phis: np.ndarray
    clusters: list[np.ndarray]
    op: BlockOperator = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.lambdas)

    def coefficients(self, v: np.ndarray) -> np.ndarray:
        """Mass inner products (v | φ_k)_M for every k."""
        return self.phis.T @ (self.op.mass * np.asarray(v))


def solve_eigensystem(op: BlockOperator, rel_tol: float = DEFAULT_DEGENERACY_TOL,
                      order: np.ndarray | None = None) -> EigenSystem:
    """Full spectrum of ``A_II φ = λ M φ`` via the symmetric reduction M^{-1/2} A M^{-1/2}.

    ``order`` optionally permutes the interior unknowns before the eigensolve;
    eigenvectors are mapped back to the operator's own node order.  Inside a
    degenerate eigenspace the returned basis depends on that ordering.
    """
    if op.shift is not None:
        raise ValueError("eigensystem requires an unshifted operator")
    n = op.a_ii.shape[0]
    perm = np.arange(n) if order is None else np.asarray(order)
    a = op.a_ii[np.ix_(perm, perm)]
    s = 1.0 / np.sqrt(op.mass[perm])
    try:
        lam, v = sla.eigh(s[:, None] * a * s[None, :], driver="evd")
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    if len(lam) != n or not np.all(np.isfinite(lam)):
        raise NumericalError("eigensolver returned an incomplete spectrum")
    idx = np.argsort(lam, kind="stable")
    lam, v = lam[idx], v[:, idx]
    phis = np.empty_like(v)
    phis[perm] = s[:, None] * v
    clusters = group_degeneracies(lam, rel_tol)
    return EigenSystem(lam, phis, clusters, op)


def group_degeneracies(lambdas, rel_tol: float = DEFAULT_DEGENERACY_TOL) -> list[np.ndarray]:
    if isinstance(lambdas, EigenSystem):
        lambdas = lambdas.lambdas
    if not 0 < rel_tol <= 1e-4:
        raise ValueError(f"rel_tol must lie in (0, 1e-4], got {rel_tol}")
    lam = np.asarray(lambdas)
    if lam.size == 0:
        return []
    gaps = np.abs(np.diff(lam)) > rel_tol * np.maximum(np.abs(lam[:-1]), 1.0)
    starts = np.concatenate([[0], np.flatnonzero(gaps) + 1])
    return np.split(np.arange(lam.size), starts[1:])


def default_window(n: int) -> tuple[int, int]:
    """1-based inclusive index window [max(10, N/50), N/3]."""
    return max(10, n // 50), n // 3


def loglog_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope), float(intercept)


def _window_indices(n: int, window: tuple[int, int] | None) -> np.ndarray:
    lo, hi = default_window(n) if window is None else window
    if hi > n:
        raise ValueError(f"window upper end {hi} exceeds spectrum size {n}")
    k = np.arange(lo, hi + 1)
    if k.size < 10:
        raise ValueError(f"fit window [{lo}, {hi}] has fewer than 10 points")
    return k


def weyl_fit(eigensystem: EigenSystem, window: tuple[int, int] | None = None) -> tuple[float, float]:
    """Least-squares slope and intercept of log λ_k against log k over ``window``."""
    lam = eigensystem.lambdas
    k = _window_indices(len(lam), window)
    return loglog_fit(k, lam[k - 1])


def weyl_bound_constant(eigensystem: EigenSystem, dim: int,
                        window: tuple[int, int] | None = None) -> float:
    """Smallest c with c^{-1} k^{2/d} <= λ_k <= c k^{2/d} over the window."""
    lam = eigensystem.lambdas
    k = _window_indices(len(lam), window)
    ratio = lam[k - 1] / k ** (2.0 / dim)
    return float(max(ratio.max(), 1.0 / ratio.min()))
