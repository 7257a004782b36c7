import numpy as np
import pytest

from jitterkde.data import Bandwidths, DataError, GridSpec, MixedDataset, check_point


def test_dataset_shapes_and_names():
    d = MixedDataset.from_arrays(z=[0, 1, 1], x=[0.5, -0.2, 1.0])
    assert (d.n, d.p, d.q) == (3, 1, 1)
    assert d.names == ("z1", "x1")
    with pytest.raises(ValueError):
        d.z[0, 0] = 5


def test_from_matrix_splits_columns():
    X = np.array([[0.1, 2, 3.5], [0.2, 1, 4.5]])
    d = MixedDataset.from_matrix(X, discrete=[1], names=["a", "b", "c"])
    np.testing.assert_array_equal(d.z, [[2], [1]])
    assert d.z_names == ("b",) and d.x_names == ("a", "c")


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(z=[0.5, 1.0]),
        dict(z=[0, 1], x=[0.1]),
        dict(x=[0.0, np.nan]),
        dict(x=[0.0, np.inf]),
    ],
)
def test_invalid_datasets(kwargs):
    with pytest.raises(DataError):
        MixedDataset.from_arrays(**kwargs)


def test_from_matrix_rejects_non_integer_discrete():
    with pytest.raises(DataError):
        MixedDataset.from_matrix(np.array([[0.5, 1.0]]), discrete=[0])
    with pytest.raises(DataError):
        MixedDataset.from_matrix(np.array([[0.0, 1.0]]), discrete=[0, 0])


def test_take_subsets_rows():
    d = MixedDataset.from_arrays(z=[0, 1, 2], x=[0.0, 1.0, 2.0])
    sub = d.take([2, 0])
    np.testing.assert_array_equal(sub.z.ravel(), [2, 0])
    assert sub.names == d.names


def test_bandwidths():
    bw = Bandwidths([0.5], [0.3, 0.2])
    np.testing.assert_array_equal(bw.vector, [0.5, 0.3, 0.2])
    assert Bandwidths.from_vector(bw.vector, 1).to_dict() == bw.to_dict()
    assert Bandwidths.from_dict(bw.to_dict()).to_dict() == bw.to_dict()
    bw.check_dims(1, 2)
    with pytest.raises(DataError):
        bw.check_dims(2, 1)
    for bad in ([0.0], [-1.0], [np.nan], [np.inf]):
        with pytest.raises(ValueError):
            Bandwidths(bad)


def test_grid_points_order():
    g = GridSpec((np.array([0, 1]),), (np.array([-1.0, 0.0, 1.0]),))
    assert g.shape == (2, 3)
    z, x = g.points()
    np.testing.assert_array_equal(z.ravel(), [0, 0, 0, 1, 1, 1])
    np.testing.assert_array_equal(x.ravel(), [-1, 0, 1, -1, 0, 1])
    with pytest.raises(DataError):
        GridSpec()
    with pytest.raises(DataError):
        GridSpec((np.array([], dtype=int),))


def test_check_point_shapes():
    z, x = check_point([1], [0.5], 1, 1)
    assert z.shape == (1, 1) and x.shape == (1, 1)
    z, x = check_point(None, [[0.5], [1.0]], 0, 1)
    assert z.shape == (2, 0) and x.shape == (2, 1)
    with pytest.raises(DataError):
        check_point([1, 2], [0.5], 1, 1)
