import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtnlab.grid import GridError, Metric, build_grid, compute_weights, conformal_metric, euclidean_metric


def test_smallest_1d_grid():
    g = build_grid(1, [1.0], [3])
    assert g.n_interior == 1 and g.n_boundary == 2
    assert g.coordinates()[g.interior_ids, 0] == pytest.approx([0.5])


def test_2d_counts_exclude_corners():
    g = build_grid(2, [1.0, 1.0], [5, 5])
    assert g.n_interior == 9
    assert g.n_boundary == 12
    corners = {0, 4, 20, 24}
    assert corners.isdisjoint(g.boundary_ids) and corners.isdisjoint(g.interior_ids)


@pytest.mark.parametrize("dim, extents, counts", [
    (2, [1.0, 1.0], [2, 5]),
    (2, [1.0, 0.0], [5, 5]),
    (2, [1.0], [5]),
    (4, [1.0] * 4, [3] * 4),
])
def test_invalid_grids(dim, extents, counts):
    with pytest.raises(GridError):
        build_grid(dim, extents, counts)


def test_boundary_normal_axis():
    g = build_grid(2, [1.0, 2.0], [4, 5])
    idx = np.stack(g.multi_index(g.boundary_ids), axis=1)
    axis = g.boundary_normal_axis()
    for (i, j), a in zip(idx, axis):
        assert (a == 0) == (i in (0, 3))


def test_mass_sum_unit_square():
    g = build_grid(2, [1.0, 1.0], [33, 33])
    w = compute_weights(g, euclidean_metric(g))
    assert w.mass.sum() == pytest.approx((31 / 32) ** 2, rel=1e-14)
    # boundary weights are h per side node: 4 sides x 31 nodes x 1/32
    assert w.boundary.sum() == pytest.approx(4 * 31 / 32, rel=1e-14)


def test_conformal_homogeneity_2d():
    g = build_grid(2, [1.0, 1.0], [9, 9])
    w1 = compute_weights(g, euclidean_metric(g))
    w4 = compute_weights(g, conformal_metric(g, {"family": "constant", "value": 4.0}))
    np.testing.assert_allclose(w4.mass, 4 * w1.mass, rtol=1e-15)
    np.testing.assert_allclose(w4.boundary, 2 * w1.boundary, rtol=1e-15)


def test_1d_boundary_weights_are_one():
    g = build_grid(1, [1.0], [11])
    w = compute_weights(g, conformal_metric(g, {"family": "constant", "value": 3.0}))
    np.testing.assert_array_equal(w.boundary, [1.0, 1.0])


def test_metric_rejects_nonpositive():
    with pytest.raises(GridError):
        Metric(np.array([1.0, 0.0, 2.0]), (1.0,))
    g = build_grid(2, [1.0, 1.0], [5, 5])
    with pytest.raises(GridError):
        conformal_metric(g, {"family": "spaghetti"})
    with pytest.raises(GridError):
        conformal_metric(g, {"values": [1.0, 2.0]})


def test_base_metric_densities():
    g = build_grid(2, [1.0, 1.0], [5, 5])
    m = conformal_metric(g, {"family": "constant", "value": 2.0, "base": [1.0, 4.0]})
    np.testing.assert_allclose(m.density(), 2.0 * 2.0)
    np.testing.assert_allclose(m.flux_coefficient(0), 4.0 / 2.0)
    np.testing.assert_allclose(m.flux_coefficient(1), 4.0 / 8.0)
    # faces normal to axis 0 are measured along axis 1 with sqrt(c * 4)
    two = Metric(np.full(2, 2.0), (1.0, 4.0))
    np.testing.assert_allclose(two.surface_density(np.array([0, 1])), [np.sqrt(2) * 2, np.sqrt(2)])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.data())
def test_weight_totals(dim, data):
    counts = data.draw(st.lists(st.integers(3, 8 if dim < 3 else 5), min_size=dim, max_size=dim))
    extents = data.draw(st.lists(st.floats(0.2, 5.0), min_size=dim, max_size=dim))
    c = data.draw(st.floats(0.1, 10.0))
    g = build_grid(dim, extents, counts)
    w = compute_weights(g, conformal_metric(g, {"family": "constant", "value": c}))
    h = np.asarray(g.spacing)
    inner = np.prod([e - hh for e, hh in zip(extents, h)])
    assert w.mass.sum() == pytest.approx(c ** (dim / 2) * inner, rel=1e-12)
    assert np.all(w.boundary > 0)
    assert g.n_interior == np.prod([n - 2 for n in counts])
