import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtnlab.assembly import (
    Potential,
    PotentialError,
    SingularSystemError,
    apply_dirichlet_solve,
    assemble,
    export_coo,
    factorize,
)
from dtnlab.eigen import solve_eigensystem
from dtnlab.grid import build_grid, conformal_metric, euclidean_metric

from .conftest import ALEPH, bump, make_op


def test_1d_three_point_blocks():
    g = build_grid(1, [1.0], [3])
    op = make_op(g)
    # energy scaling: edge weight 1 * h / h^2 = 2 per edge
    np.testing.assert_allclose(op.a_ii, [[4.0]])
    np.testing.assert_allclose(op.mass, [0.5])
    np.testing.assert_allclose(op.a_ib, [[-2.0, -2.0]])
    np.testing.assert_allclose(op.a_bb, [2.0, 2.0])


def test_reaction_term_is_mass_times_q(square17):
    op0 = make_op(square17)
    op5 = make_op(square17, 5.0)
    np.testing.assert_array_equal(op5.a_ii - op0.a_ii, np.diag(5.0 * op0.mass))
    np.testing.assert_array_equal(op5.a_ib, op0.a_ib)
    np.testing.assert_array_equal(op5.a_bb, op0.a_bb)


def test_lowest_eigenvalue_4x4_square():
    g = build_grid(2, [1.0, 1.0], [4, 4])
    lam = solve_eigensystem(make_op(g)).lambdas
    h = 1 / 3
    assert lam[0] == pytest.approx(4 / h**2 * 2 * np.sin(np.pi * h / 2) ** 2, rel=1e-13)
    assert lam[0] == pytest.approx(18.0, rel=1e-13)


def test_zero_data_gives_zero_solution(square17):
    u = apply_dirichlet_solve(make_op(square17, 2.0), np.zeros(square17.n_boundary))
    np.testing.assert_array_equal(u, 0.0)


def test_1d_harmonic_is_linear():
    g = build_grid(1, [1.0], [11])
    u = apply_dirichlet_solve(make_op(g), np.array([0.0, 1.0]))
    np.testing.assert_allclose(u, g.coordinates()[g.interior_ids, 0], atol=1e-14)


def test_constants_are_harmonic_with_variable_metric(square17):
    metric = conformal_metric(square17, {"family": "gaussian-bump", "center": [0.3, 0.6], "width": 0.2,
                                         "amplitude": 0.7, "base": [1.0, 2.0]})
    op = assemble(square17, metric, Potential(np.zeros(square17.n_nodes), ALEPH))
    u = apply_dirichlet_solve(op, np.ones(square17.n_boundary))
    np.testing.assert_allclose(u, 1.0, atol=1e-13)


def test_blocks_are_symmetric_positive(square17):
    q = bump(square17, [0.4, 0.5], 0.15, 3.0)
    op = make_op(square17, q)
    np.testing.assert_array_equal(op.a_ii, op.a_ii.T)
    assert np.all(op.a_bb > 0)
    assert np.all(op.a_ib <= 0)
    assert np.linalg.eigvalsh(op.a_ii)[0] > 0


def test_potential_bounds():
    with pytest.raises(PotentialError):
        Potential(np.array([0.0, 5.5]), ALEPH)
    with pytest.raises(PotentialError):
        Potential(np.array([-0.1, 1.0]), ALEPH)
    with pytest.raises(PotentialError):
        Potential(np.array([np.nan]), ALEPH)
    g = build_grid(2, [1.0, 1.0], [5, 5])
    with pytest.raises(PotentialError):
        Potential(np.zeros(7), ALEPH).interior(g)


def test_shift_on_eigenvalue_is_singular(square17):
    op = make_op(square17)
    lam1 = solve_eigensystem(op).lambdas[0]
    with pytest.raises(SingularSystemError):
        factorize(op.with_shift(lam1))
    # a complex shift is always solvable
    u = apply_dirichlet_solve(op.with_shift(lam1 + 1j), np.ones(square17.n_boundary))
    assert np.iscomplexobj(u)


def test_shifted_operator_is_q_minus_shift(square17):
    op = make_op(square17, 1.0)
    np.testing.assert_allclose(op.with_shift(-2.0).a_ii, make_op(square17, 3.0).a_ii, rtol=0, atol=1e-12)
    with pytest.raises(ValueError):
        op.with_shift(1.0).with_shift(1.0)


def test_export_coo_roundtrip(tmp_path):
    m = np.array([[1.5, 0.0], [0.0, -2.25]])
    export_coo(m, tmp_path / "m.coo")
    lines = (tmp_path / "m.coo").read_text().splitlines()
    assert lines[0] == "% 2 2 2"
    assert lines[1:] == ["0 0 1.5", "1 1 -2.25"]
    c = np.array([[0.0, 1 + 2j]])
    export_coo(c, tmp_path / "c.coo")
    assert (tmp_path / "c.coo").read_text().splitlines()[1] == "0 1 1.0 2.0"


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 9), st.integers(3, 9), st.floats(0.3, 3.0), st.floats(0.0, ALEPH))
def test_row_sums_equal_reaction(nx, ny, length, qval):
    g = build_grid(2, [1.0, length], [nx, ny])
    op = make_op(g, qval)
    rows = op.a_ii.sum(axis=1) + op.a_ib.sum(axis=1)
    np.testing.assert_allclose(rows, qval * op.mass, atol=1e-10 * np.abs(op.a_ii).max())
    # A_BB collects exactly the couplings into the interior
    np.testing.assert_allclose(op.a_bb, -op.a_ib.sum(axis=0), rtol=1e-14)
    assert euclidean_metric(g).dim == 2
