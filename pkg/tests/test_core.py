import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from swaptest.core import (
    Dataset,
    FeaturePair,
    InsufficientDataError,
    ValidationError,
    all_pairs,
    format_csv,
    load_vector,
    parse_csv,
    read_csv,
    split_pairs,
    swap_coordinates,
    write_csv,
)


def test_swap_examples():
    np.testing.assert_array_equal(swap_coordinates([1, 2, 3], 0, 2), [3, 2, 1])
    np.testing.assert_array_equal(swap_coordinates([5, 7], 1, 1), [5, 7])


def test_swap_out_of_range():
    with pytest.raises(ValidationError):
        swap_coordinates([1, 2, 3], 0, 3)
    with pytest.raises(ValidationError):
        swap_coordinates([1, 2, 3], -1, 0)


def test_swap_does_not_mutate_input():
    x = np.array([1.0, 2.0, 3.0])
    swap_coordinates(x, 0, 1)
    np.testing.assert_array_equal(x, [1, 2, 3])


@given(
    arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(2, 6)), elements=st.floats(-1e6, 1e6)),
    st.data(),
)
def test_swap_is_involution(X, data):
    d = X.shape[1]
    i = data.draw(st.integers(0, d - 1))
    j = data.draw(st.integers(0, d - 1))
    once = swap_coordinates(X, i, j)
    np.testing.assert_array_equal(swap_coordinates(once, i, j), X)
    np.testing.assert_array_equal(once, swap_coordinates(X, j, i))
    np.testing.assert_array_equal(np.sort(once, axis=1), np.sort(X, axis=1))


def _rows(n, d=2):
    X = np.arange(n * d, dtype=float).reshape(n, d)
    return Dataset(X, np.arange(n, dtype=float) * 10)


def test_split_pairs_construction():
    data = _rows(4)
    p = split_pairs(data, (0, 1))
    np.testing.assert_array_equal(p.original_features, [[0, 1], [2, 3]])
    np.testing.assert_array_equal(p.swapped_features, [[5, 4], [7, 6]])
    np.testing.assert_array_equal(p.swapped_responses, [20, 30])
    assert p.n_used == 4 and p.n_dropped == 0


def test_split_pairs_drops_odd_record():
    p5, p4 = split_pairs(_rows(5), (0, 1)), split_pairs(_rows(5).take(slice(0, 4)), (0, 1))
    assert p5.n_dropped == 1 and p5.n_used == 4
    np.testing.assert_array_equal(p5.swapped_features, p4.swapped_features)


def test_split_pairs_identity_swap():
    data = _rows(6, 3)
    p = split_pairs(data, (1, 1))
    np.testing.assert_array_equal(p.swapped_features, data.features[3:])


def test_split_pairs_errors():
    with pytest.raises(InsufficientDataError):
        split_pairs(_rows(1), (0, 1))
    with pytest.raises(ValidationError):
        split_pairs(_rows(4), (0, 2))


def test_split_pairs_shuffle_is_seeded():
    data = _rows(10)
    a, b = split_pairs(data, (0, 1), 3), split_pairs(data, (0, 1), 3)
    np.testing.assert_array_equal(a.original_features, b.original_features)
    assert not np.array_equal(a.original_features, split_pairs(data, (0, 1)).original_features)


def test_dataset_is_immutable_copy():
    X = np.ones((3, 2))
    data = Dataset(X, np.zeros(3))
    X[0, 0] = 5
    assert data.features[0, 0] == 1
    with pytest.raises(ValueError):
        data.features[0, 0] = 2


@pytest.mark.parametrize(
    "X, y",
    [
        (np.ones((3, 1)), np.ones(3)),
        (np.ones((3, 2)), np.ones(2)),
        (np.array([[1.0, np.nan]]), np.ones(1)),
        (np.ones(3), np.ones(3)),
    ],
)
def test_dataset_validation(X, y):
    with pytest.raises(ValidationError):
        Dataset(X, y)


def test_feature_pair():
    p = FeaturePair.from_one_based(1, 10)
    assert (p.i, p.j) == (0, 9) and not p.degenerate
    assert FeaturePair(3, 1).ordered() == (1, 3)
    assert FeaturePair(2, 2).degenerate
    for bad in [(-1, 0), (0.5, 1), (True, 1)]:
        with pytest.raises(ValidationError):
            FeaturePair(*bad)
    with pytest.raises(ValidationError):
        FeaturePair.from_one_based(0, 1)


def test_all_pairs():
    assert len(all_pairs(10)) == 45
    assert len(all_pairs(10, include_diagonal=True)) == 55
    assert all(p.i < p.j for p in all_pairs(5))


def test_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    data = Dataset(rng.standard_normal((7, 3)), rng.standard_normal(7))
    path = tmp_path / "sub" / "d.csv"
    write_csv(data, path)
    back = read_csv(path)
    np.testing.assert_array_equal(back.features, data.features)
    np.testing.assert_array_equal(back.responses, data.responses)
    assert format_csv(back) == path.read_text()


@pytest.mark.parametrize(
    "text, line",
    [
        ("a,b,y\n1,2,3\n", 1),
        ("x1,x2,y\n1,2,3\n1,2\n", 3),
        ("x1,x2,y\n1,2,3\n4,foo,6\n", 3),
        ("x1,x2,y\n1,inf,3\n", 2),
        ("x1,y\n1,2\n", 1),
        ("", 1),
    ],
)
def test_csv_errors_name_line(text, line):
    with pytest.raises(ValidationError, match=f"line {line}"):
        parse_csv(text.splitlines(keepends=True))


def test_csv_header_only():
    with pytest.raises(InsufficientDataError):
        parse_csv(["x1,x2,y\n"])


def test_load_vector(tmp_path):
    np.testing.assert_array_equal(load_vector("[1, 2.5]"), [1, 2.5])
    np.testing.assert_array_equal(load_vector([3, 4]), [3, 4])
    f = tmp_path / "t.csv"
    f.write_text("theta\n1\n2\n\n3\n")
    np.testing.assert_array_equal(load_vector(str(f)), [1, 2, 3])
    f.write_text("1,2\n")
    with pytest.raises(ValidationError, match="line 1"):
        load_vector(str(f))
    f.write_text("1\nx\n")
    with pytest.raises(ValidationError, match="line 2"):
        load_vector(str(f))
    for bad in ["[1, NaN]", "[]", "[[1, 2]]", "[1,"]:
        with pytest.raises(ValidationError):
            load_vector(bad)
