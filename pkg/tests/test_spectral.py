from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtnlab.assembly import apply_dirichlet_solve
from dtnlab.eigen import solve_eigensystem
from dtnlab.grid import build_grid
from dtnlab.spectral import (
    align_gauge,
    boundary_flux,
    distance,
    growth_diagnostics,
    interpolation_gap,
    spectral_sobolev_norm,
    weights_alpha_beta,
)

from .conftest import bump, make_data, make_op, smooth_q


def _negated(data, ks):
    psis, phis = data.psis.copy(), data.phis.copy()
    psis[ks] *= -1
    phis[:, ks] *= -1
    return replace(data, psis=psis, phis=phis)


def test_1d_flux_by_hand():
    data = make_data(make_op(build_grid(1, [1.0], [3])))
    # A_BI phi / w with phi = sqrt(2), coupling 2, unit endpoint weights
    np.testing.assert_allclose(np.abs(data.psis), [[2 * np.sqrt(2), 2 * np.sqrt(2)]], rtol=1e-14)


def test_green_coefficient_identity(square17, rng):
    op = make_op(square17, smooth_q(square17, 11))
    data = make_data(op)
    for _ in range(3):
        f = rng.normal(size=square17.n_boundary)
        u = apply_dirichlet_solve(op, f)
        c = data.eigensystem.coefficients(u)
        np.testing.assert_allclose(c, -data.pair(f) / data.lambdas, atol=1e-12 * np.abs(c).max())


def test_zero_data_pairs_to_zero(square17):
    data = make_data(make_op(square17))
    np.testing.assert_array_equal(data.pair(np.zeros(square17.n_boundary)), 0.0)


def test_flux_of_ground_state_converges():
    errors = []
    for n in (9, 17, 33):
        g = build_grid(2, [1.0, 1.0], [n, n])
        data = make_data(make_op(g))
        idx = np.stack(g.multi_index(g.boundary_ids), axis=1)
        side = idx[:, 1] == 0
        x = g.coordinates()[g.boundary_ids][side, 0]
        psi = data.psis[0, side]
        exact = -2 * np.pi * np.sin(np.pi * x) * np.sign(psi @ -np.sin(np.pi * x))
        h = g.spacing[0]
        errors.append(np.sqrt(h * np.sum((psi - exact) ** 2)))
    assert errors[0] / errors[1] > 1.7 and errors[1] / errors[2] > 1.7
    assert errors[-1] < 0.2


def test_provenance_check(square17):
    op, other = make_op(square17), make_op(square17, 1.0)
    with pytest.raises(ValueError):
        boundary_flux(op, solve_eigensystem(other))


def test_alpha_beta_values():
    assert weights_alpha_beta(1, 0.1, 2) == (1.0, 1.0)
    assert weights_alpha_beta(1, 0.3, 3) == (1.0, 1.0)
    alpha, beta = weights_alpha_beta(16, 0.25, 2)
    assert alpha == pytest.approx(2**-0.5, rel=1e-15)
    assert beta == pytest.approx(8.0, rel=1e-15)
    with pytest.raises(ValueError):
        weights_alpha_beta(3, 0.5, 2)
    with pytest.raises(ValueError):
        weights_alpha_beta(0, 0.1, 2)


@given(st.integers(1, 10**6), st.floats(0.01, 0.49), st.integers(1, 3))
def test_alpha_at_most_one_at_most_beta(k, eps, dim):
    alpha, beta = weights_alpha_beta(k, eps, dim)
    assert 0 < alpha**2 <= alpha <= 1 <= beta


def test_sign_flip_alignment(square17):
    data = make_data(make_op(square17, smooth_q(square17, 2)))
    flipped = _negated(data, [0, 3, 7, 100])
    a, b = align_gauge(data, flipped)
    np.testing.assert_array_equal(b.psis, data.psis)
    r = distance(a, b)
    assert r.D == 0.0 and r.D_plus == 0.0


def test_self_distance_is_zero(square17):
    data = make_data(make_op(square17, 1.0))
    r = distance(*align_gauge(data, data))
    assert (r.D, r.D_plus, r.D_unweighted) == (0.0, 0.0, 0.0)


def test_degenerate_square_two_independent_solves(square17, rng):
    op = make_op(square17)
    a, b = align_gauge(make_data(op), make_data(op, order=rng.permutation(square17.n_interior)))
    assert np.sum(a.boundary_norm(a.psis - b.psis)) <= 1e-8
    assert not any(flag[0] == "mismatched" for flag in b.gauge_flags)


def test_alignment_never_increases_terms(rect17):
    q = smooth_q(rect17, 4, 2.0)
    data = make_data(make_op(rect17, q))
    tilde = make_data(make_op(rect17, q + bump(rect17, [0.5, 0.7], 0.1, 0.05)))
    raw = distance(data, tilde).per_k
    aligned = distance(*align_gauge(data, tilde)).per_k
    assert np.all(aligned[:, 2] <= raw[:, 2] * (1 + 1e-12))


def test_constant_shift_distance(rect17):
    # on the unit square smooth potentials leave eigenvalue gaps near 1e-4, where
    # rounding alone mixes eigenvectors at the 1e-7 level
    q = smooth_q(rect17, 8, 1.5)
    a, b = align_gauge(make_data(make_op(rect17, q)), make_data(make_op(rect17, q + 3.0)))
    r = distance(a, b)
    k = np.arange(1, a.size + 1)
    alpha, beta = weights_alpha_beta(k, a.epsilon, 2)
    np.testing.assert_allclose(r.per_k[:, 1], 3 * alpha**2, rtol=1e-9)
    np.testing.assert_allclose(r.per_k[:, 3], 3 * beta, rtol=1e-9)
    assert r.per_k[:, 2].sum() <= 1e-8


def test_distance_invariants(rect17):
    q = smooth_q(rect17, 21, 2.0)
    qt = smooth_q(rect17, 22, 2.0)
    d, dt = make_data(make_op(rect17, q)), make_data(make_op(rect17, qt))
    forward = distance(*align_gauge(d, dt))
    backward = distance(*align_gauge(dt, d))
    assert backward.D == pytest.approx(forward.D, rel=1e-12)
    # shifting both potentials by a constant leaves the distance unchanged
    s, st_ = make_data(make_op(rect17, q + 1.0)), make_data(make_op(rect17, qt + 1.0))
    assert distance(*align_gauge(s, st_)).D == pytest.approx(forward.D, rel=1e-8)
    # sign flips on either side do not change the aligned distance
    flipped = distance(*align_gauge(_negated(d, [1, 4]), _negated(dt, [2, 9]))).D
    assert flipped == pytest.approx(forward.D, rel=1e-12)
    assert forward.D <= forward.D_plus


def test_tail_distance_drops_leading_terms(rect17):
    a, b = align_gauge(make_data(make_op(rect17, 1.0)), make_data(make_op(rect17, 2.0)))
    full, tail = distance(a, b), distance(a, b, 5)
    np.testing.assert_array_equal(tail.per_k, full.per_k[4:])
    with pytest.raises(ValueError):
        distance(a, b, 0)


def test_sobolev_norm_modes(square17, rng):
    op = make_op(square17, 2.0)
    es = solve_eigensystem(op)
    v = rng.normal(size=es.size)
    assert spectral_sobolev_norm(v, es, 0.0) == pytest.approx(np.sqrt(np.sum(op.mass * v**2)), rel=1e-12)
    for j in (0, 17, 200):
        for s in (0.5, 1.6, 2.0):
            assert spectral_sobolev_norm(es.phis[:, j], es, s) == pytest.approx(
                (1 + es.lambdas[j]) ** (s / 2), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.49))
def test_interpolation_inequality(seed, eps):
    g = build_grid(2, [1.0, 1.0], [9, 9])
    es = solve_eigensystem(make_op(g, 1.0))
    v = np.random.default_rng(seed).normal(size=es.size)
    assert interpolation_gap(v, es, eps) <= 1e-12


def test_growth_diagnostics_square():
    g = build_grid(2, [1.0, 1.0], [33, 33])
    fits = growth_diagnostics(make_data(make_op(g)))
    assert fits["h2_slope"] == pytest.approx(1.0, abs=0.01)
    assert fits["psi_slope"] <= fits["psi_exponent"] + 0.2


def test_growth_diagnostics_1d():
    fits = growth_diagnostics(make_data(make_op(build_grid(1, [1.0], [201]))), window=(10, 60))
    assert np.isfinite(fits["psi_slope"])
    assert fits["psi_slope"] <= (3 + 2 * 0.1) / 2 + 0.3
    assert fits["psi_slope"] == pytest.approx(1.0, abs=0.1)  # |φ_k'(0)| ~ k


def test_doubly_degenerate_blocks_are_basis_independent(square17, rng):
    a0, b0 = make_data(make_op(square17)), make_data(make_op(square17, 2.0))
    ref = distance(*align_gauge(a0, b0)).D
    # re-express one degenerate eigenspace of the reference in a random basis
    block = next(c for c in a0.clusters if len(c) == 2)
    r, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    psis, phis = a0.psis.copy(), a0.phis.copy()
    psis[block] = r.T @ psis[block]
    phis[:, block] = phis[:, block] @ r
    turned = distance(*align_gauge(replace(a0, psis=psis, phis=phis), b0)).D
    assert turned == pytest.approx(ref, abs=1e-10)
