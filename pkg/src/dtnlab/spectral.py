"""Boundary spectral data (λ_k, ψ_k), gauge alignment and the weighted distances.

ψ_k is the discrete outward flux of φ_k, ``(A_BI φ_k) / w`` with boundary
weights ``w``.  With that choice the Green coefficient identity

    (u | φ_k)_M = -<f | ψ_k> / λ_k

holds exactly for the discrete Dirichlet solution ``u`` with data ``f``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .eigen import EigenSystem, _window_indices, loglog_fit

DEFAULT_EPSILON = 0.1


@dataclass(frozen=True, eq=False)
class SpectralBoundaryData:
    """Rows of ``psis`` are the boundary fluxes ψ_k; columns of ``phis`` the eigenvectors."""

    lambdas: np.ndarray
    psis: np.ndarray
    phis: np.ndarray
    weights: np.ndarray
    clusters: list[np.ndarray]
    epsilon: float = DEFAULT_EPSILON
    dim: int = 2
    eigensystem: EigenSystem | None = field(default=None, repr=False)
    gauge_flags: tuple = ()

    @property
    def size(self) -> int:
        return len(self.lambdas)

    def pair(self, f: np.ndarray) -> np.ndarray:
        """<f | ψ_k> for every k (``f`` a vector or a matrix of columns)."""
        return self.psis @ (self.weights[:, None] * f if np.ndim(f) == 2 else self.weights * f)

    def boundary_norm(self, g: np.ndarray, axis: int = -1) -> np.ndarray:
        return np.sqrt(np.sum(self.weights * np.abs(g) ** 2, axis=axis))

    def psi_norms(self) -> np.ndarray:
        return self.boundary_norm(self.psis)


def boundary_flux(op, eigensystem: EigenSystem, weights=None,
                  epsilon: float = DEFAULT_EPSILON) -> SpectralBoundaryData:
    if eigensystem.op is not op:
        raise ValueError("eigensystem was not computed from this operator")
    if weights is None:
        weights = op.weights
    w = np.asarray(getattr(weights, "boundary", weights), dtype=float)
    if w.shape != (op.grid.n_boundary,):
        raise ValueError("boundary weights do not match the operator's grid")
    psis = (op.a_bi @ eigensystem.phis).T / w[None, :]
    return SpectralBoundaryData(
        lambdas=eigensystem.lambdas,
        psis=psis,
        phis=eigensystem.phis,
        weights=w,
        clusters=eigensystem.clusters,
        epsilon=epsilon,
        dim=op.grid.dim,
        eigensystem=eigensystem,
    )


def _components(clusters_a, clusters_b, n):
    """Smallest index ranges that no cluster of either partition straddles."""
    starts_a = np.zeros(n + 1, bool)
    starts_b = np.zeros(n + 1, bool)
    for c in clusters_a:
        starts_a[c[0]] = True
    for c in clusters_b:
        starts_b[c[0]] = True
    starts_a[n] = starts_b[n] = True
    cuts = np.flatnonzero(starts_a & starts_b)
    return [np.arange(s, e) for s, e in zip(cuts[:-1], cuts[1:])]


def _procrustes(target: np.ndarray, source: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Orthogonal R minimising ||target - R^T source||_W for row blocks of traces."""
    sw = np.sqrt(w)
    x = (target * sw).T
    y = (source * sw).T
    u, _, vt = np.linalg.svd(y.T @ x)
    return u @ vt


def _rotate(data: SpectralBoundaryData, block: np.ndarray, r: np.ndarray):
    data.psis[block] = r.T @ data.psis[block]
    data.phis[:, block] = data.phis[:, block] @ r


def _canonical_pair_basis(a: SpectralBoundaryData, b: SpectralBoundaryData, block: np.ndarray, w: np.ndarray):
    """Rotate both blocks jointly so the trace differences are mutually orthogonal.

    When both sides are degenerate the solver's basis is arbitrary; in this
    basis Σ_k ‖ψ̃_k - ψ_k‖ equals the nuclear norm of the difference block and
    no longer depends on it.
    """
    diff = (b.psis[block] - a.psis[block]) * np.sqrt(w)
    u, _, _ = np.linalg.svd(diff, full_matrices=False)
    _rotate(a, block, u)
    _rotate(b, block, u)


def align_gauge(data: SpectralBoundaryData, data_tilde: SpectralBoundaryData):
    """Match eigenbasis gauges of two datasets; returns aligned copies.

    Index ranges are split into the smallest components that no degeneracy
    cluster of either dataset straddles.  A singleton component gets a sign
    flip of ψ̃_k.  A component that is a single cluster of ``data_tilde`` is
    rotated onto ``data`` by weighted orthogonal Procrustes; if instead only
    ``data`` is degenerate there, ``data``'s block is rotated onto
    ``data_tilde``.  When both sides are degenerate, both blocks are then
    turned jointly into the basis of orthogonal differences.  Components where both sides are split differently are
    left untouched and reported in ``gauge_flags`` of the returned tilde copy.
    """
    if data.size != data_tilde.size:
        raise ValueError("datasets have different lengths")
    if np.array_equal(data.psis, data_tilde.psis) and np.array_equal(data.lambdas, data_tilde.lambdas):
        return data, data_tilde
    a = replace(data, psis=data.psis.copy(), phis=data.phis.copy())
    b = replace(data_tilde, psis=data_tilde.psis.copy(), phis=data_tilde.phis.copy())
    w = data.weights
    flags = []
    single_a = {int(c[0]): len(c) for c in data.clusters}
    single_b = {int(c[0]): len(c) for c in data_tilde.clusters}
    for comp in _components(data.clusters, data_tilde.clusters, data.size):
        start, m = int(comp[0]), len(comp)
        if m == 1:
            if np.dot(w * a.psis[start], b.psis[start]) < 0:
                b.psis[start] *= -1
                b.phis[:, start] *= -1
            continue
        a_whole = single_a.get(start) == m
        b_whole = single_b.get(start) == m
        if b_whole:
            _rotate(b, comp, _procrustes(a.psis[comp], b.psis[comp], w))
            if a_whole:
                _canonical_pair_basis(a, b, comp, w)
            else:
                flags.append(("rotated-tilde", start, m))
        elif a_whole:
            _rotate(a, comp, _procrustes(b.psis[comp], a.psis[comp], w))
            flags.append(("rotated-reference", start, m))
        else:
            flags.append(("mismatched", start, m))
    b = replace(b, gauge_flags=tuple(flags))
    return a, b


def weights_alpha_beta(k, epsilon: float = DEFAULT_EPSILON, dim: int = 2):
    """α_k = k^{-(1-2ε)/(2d)} and β_k = k^{(1+2ε)/d}."""
    k = np.asarray(k, dtype=float)
    if np.any(k < 1):
        raise ValueError("k must be >= 1")
    if not 0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    alpha = k ** (-(1 - 2 * epsilon) / (2 * dim))
    beta = k ** ((1 + 2 * epsilon) / dim)
    if alpha.ndim == 0:
        return float(alpha), float(beta)
    return alpha, beta


@dataclass(frozen=True)
class DistanceReport:
    D: float
    D_plus: float
    D_unweighted: float
    tail_from: int | None
    per_k: np.ndarray  # columns: k, α²|Δλ|, α‖Δψ‖, β|Δλ|

    PER_K_COLUMNS = ("k", "alpha2_dlambda", "alpha_dpsi", "beta_dlambda")

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "D_plus": self.D_plus,
            "D_unweighted": self.D_unweighted,
            "tail_from": self.tail_from,
            "per_k": [dict(zip(self.PER_K_COLUMNS, [int(r[0]), *map(float, r[1:])])) for r in self.per_k],
        }


def distance(data: SpectralBoundaryData, data_tilde: SpectralBoundaryData,
             tail_from: int | None = None) -> DistanceReport:
    """Weighted spectral distances; inputs are expected to be gauge aligned."""
    if data.size != data_tilde.size or data.psis.shape != data_tilde.psis.shape:
        raise ValueError("datasets have different lengths")
    k = np.arange(1, data.size + 1)
    alpha, beta = weights_alpha_beta(k, data.epsilon, data.dim)
    dlam = np.abs(data.lambdas - data_tilde.lambdas)
    dpsi = data.boundary_norm(data_tilde.psis - data.psis)
    if tail_from is not None:
        if tail_from < 1:
            raise ValueError("tail_from must be >= 1")
        keep = k >= tail_from
        k, alpha, beta, dlam, dpsi = k[keep], alpha[keep], beta[keep], dlam[keep], dpsi[keep]
    per_k = np.column_stack([k, alpha**2 * dlam, alpha * dpsi, beta * dlam])
    return DistanceReport(
        D=float(per_k[:, 1].sum() + per_k[:, 2].sum()),
        D_plus=float(per_k[:, 3].sum() + per_k[:, 2].sum()),
        D_unweighted=float(dlam.sum() + dpsi.sum()),
        tail_from=tail_from,
        per_k=per_k,
    )


def spectral_sobolev_norm(v: np.ndarray, eigensystem: EigenSystem, s: float) -> float:
    """(Σ_k (1+λ_k)^s |(v|φ_k)_M|²)^{1/2}."""
    c = eigensystem.coefficients(v)
    return float(np.sqrt(np.sum((1.0 + eigensystem.lambdas) ** s * np.abs(c) ** 2)))


def interpolation_gap(v: np.ndarray, eigensystem: EigenSystem, epsilon: float = DEFAULT_EPSILON) -> float:
    """Relative excess of ‖v‖_{H^{3/2+ε}} over ‖v‖_{H²}^θ ‖v‖_{L²}^{1-θ}, θ = (3+2ε)/4.

    Hölder's inequality on the spectral sums makes this nonpositive up to rounding.
    """
    theta = (3 + 2 * epsilon) / 4
    lhs = spectral_sobolev_norm(v, eigensystem, 1.5 + epsilon)
    rhs = spectral_sobolev_norm(v, eigensystem, 2.0) ** theta * spectral_sobolev_norm(v, eigensystem, 0.0) ** (1 - theta)
    return (lhs - rhs) / rhs if rhs > 0 else lhs


def growth_diagnostics(data: SpectralBoundaryData, eigensystem: EigenSystem | None = None,
                       epsilon: float | None = None, window: tuple[int, int] | None = None) -> dict:
    """Log-log growth slopes of ‖ψ_k‖ vs k and of ‖φ_k‖_{H^s} vs λ_k.

    Returned alongside the reference exponents: (3+2ε)/(2d) for the traces,
    1 for H², and (3+2ε)/4 for H^{3/2+ε}.
    """
    eigensystem = eigensystem or data.eigensystem
    eps = data.epsilon if epsilon is None else epsilon
    k = _window_indices(data.size, window)
    lam = eigensystem.lambdas[k - 1]
    psi_slope, _ = loglog_fit(k, data.psi_norms()[k - 1])
    # φ_k is a single spectral mode, so its spectral H^s norm is (1+λ_k)^{s/2}.
    h2 = np.array([spectral_sobolev_norm(eigensystem.phis[:, j - 1], eigensystem, 2.0) for j in k])
    hs = np.array([spectral_sobolev_norm(eigensystem.phis[:, j - 1], eigensystem, 1.5 + eps) for j in k])
    h2_slope, _ = loglog_fit(lam, h2)
    hs_slope, _ = loglog_fit(lam, hs)
    d = data.dim
    return {
        "window": [int(k[0]), int(k[-1])],
        "psi_slope": psi_slope,
        "psi_exponent": (3 + 2 * eps) / (2 * d),
        "h2_slope": h2_slope,
        "h2_exponent": 1.0,
        "h32_slope": hs_slope,
        "h32_exponent": (3 + 2 * eps) / 4,
    }
