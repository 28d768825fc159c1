import math

import numpy as np
import pytest

from helpers import brute_force_component_variance, central_difference_gradient
from varbatch import (
    DatasetFormatError,
    Scheme,
    batch_gradient,
    component_gradient_variance,
    full_gradient,
    gradient_matrix,
    gradient_stats,
    load_dataset,
    make_batch,
    make_least_squares,
    make_logistic,
    objective_value,
)

X0 = np.array([0.0])


def test_full_gradient_worked_value(ls5):
    assert full_gradient(ls5, X0) == pytest.approx([-3.0], abs=1e-15)


def test_full_gradient_single_component():
    problem = make_least_squares(np.array([[2.0]]), np.array([5.0]))
    x = np.array([1.0])
    expected = problem.component_gradient(0, x)
    assert np.array_equal(full_gradient(problem, x), expected)


def test_full_gradient_matches_population_batch_exactly(ls5):
    batch = make_batch(range(5), Scheme.WITHOUT_REPLACEMENT)
    x = np.array([0.7])
    assert np.array_equal(full_gradient(ls5, x), batch_gradient(ls5, x, batch))


def test_full_gradient_dimension_mismatch(ls5):
    with pytest.raises(ValueError):
        full_gradient(ls5, np.zeros(2))


def test_batch_gradient_pair(ls5):
    batch = make_batch([0, 4], Scheme.WITHOUT_REPLACEMENT)
    assert batch_gradient(ls5, X0, batch) == pytest.approx([-3.0], abs=1e-15)


def test_batch_gradient_counts_multiplicity(ls5):
    batch = make_batch([2, 2], Scheme.WITH_REPLACEMENT)
    assert batch_gradient(ls5, X0, batch) == pytest.approx([-3.0], abs=1e-15)


def test_batch_gradient_rejects_out_of_range(ls5):
    batch = make_batch([0, 7], Scheme.WITHOUT_REPLACEMENT)
    with pytest.raises(ValueError, match="out of range"):
        batch_gradient(ls5, X0, batch)


def test_batch_gradient_matches_gradient_matrix_mean(random_ls):
    problem = random_ls(9, d=3, seed=5)
    x = np.linspace(-1.0, 1.0, 3)
    grads = gradient_matrix(problem, x)
    for indices in ([0, 3, 8], [2, 2, 5], [4]):
        scheme = (
            Scheme.WITH_REPLACEMENT
            if len(set(indices)) < len(indices)
            else Scheme.WITHOUT_REPLACEMENT
        )
        batch = make_batch(indices, scheme)
        direct = batch_gradient(problem, x, batch)
        cached = grads[list(batch.indices)].mean(axis=0)
        assert np.max(np.abs(direct - cached)) < 1e-14


@pytest.mark.parametrize("x", [0.0, -2.5, 11.0])
def test_component_variance_constant_for_unit_features(ls5, x):
    # Deviations are 3 - a_i regardless of x: squares 4, 1, 0, 1, 4.
    assert component_gradient_variance(ls5, np.array([x])) == pytest.approx(2.0, abs=1e-14)


def test_component_variance_zero_for_identical_components():
    problem = make_least_squares(np.ones((4, 1)), np.full(4, 2.0))
    assert component_gradient_variance(problem, np.array([0.3])) == 0.0


def test_component_variance_matches_brute_force(random_ls):
    problem = random_ls(7, d=1, seed=11)
    x = np.array([0.37])
    expected = brute_force_component_variance(problem, x)
    assert component_gradient_variance(problem, x) == pytest.approx(expected, abs=1e-12)


def test_gradient_stats_consistent_with_separate_ops(random_ls):
    problem = random_ls(6, d=2, seed=2)
    x = np.array([0.5, -1.0])
    stats = gradient_stats(problem, x)
    assert np.array_equal(stats.full_gradient, full_gradient(problem, x))
    assert stats.component_variance == component_gradient_variance(problem, x)


def test_least_squares_unit_feature_variance_everywhere():
    problem = make_least_squares(np.ones((5, 1)), np.arange(1.0, 6.0))
    for x in (np.array([-4.0]), np.array([0.0]), np.array([9.5])):
        assert component_gradient_variance(problem, x) == pytest.approx(2.0, abs=1e-14)


def test_least_squares_zero_targets_zero_gradient():
    problem = make_least_squares(np.eye(3), np.zeros(3))
    assert np.array_equal(full_gradient(problem, np.zeros(3)), np.zeros(3))


def test_least_squares_gradient_matches_finite_differences(random_ls):
    problem = random_ls(6, d=3, seed=7)
    rng = np.random.default_rng(123)
    for _ in range(10):
        x = rng.normal(size=3)
        i = int(rng.integers(6))
        fd = central_difference_gradient(lambda z, i=i: problem.component_value(i, z), x)
        assert np.max(np.abs(problem.component_gradient(i, x) - fd)) < 1e-6


def test_least_squares_shape_mismatch():
    with pytest.raises(ValueError):
        make_least_squares(np.ones((3, 2)), np.ones(4))
    with pytest.raises(ValueError):
        make_least_squares(np.ones(3), np.ones(3))


def test_logistic_value_at_origin_is_log_two():
    rng = np.random.default_rng(0)
    matrix = rng.normal(size=(6, 2))
    labels = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
    problem = make_logistic(matrix, labels)
    for i in range(6):
        assert problem.component_value(i, np.zeros(2)) == pytest.approx(math.log(2.0))


def test_logistic_gradient_matches_finite_differences():
    rng = np.random.default_rng(21)
    matrix = rng.normal(size=(8, 3))
    labels = np.where(rng.normal(size=8) >= 0, 1.0, -1.0)
    problem = make_logistic(matrix, labels)
    for _ in range(10):
        x = rng.normal(size=3)
        i = int(rng.integers(8))
        fd = central_difference_gradient(lambda z, i=i: problem.component_value(i, z), x)
        grad = problem.component_gradient(i, x)
        assert np.max(np.abs(grad - fd)) < 1e-5 * max(1.0, float(np.max(np.abs(fd))))


def test_logistic_label_flip_negates_gradient_at_origin():
    rng = np.random.default_rng(3)
    matrix = rng.normal(size=(5, 2))
    labels = np.ones(5)
    flipped = make_logistic(matrix, -labels)
    original = make_logistic(matrix, labels)
    x = np.zeros(2)
    assert np.allclose(
        full_gradient(original, x), -full_gradient(flipped, x), atol=1e-15
    )


def test_logistic_rejects_bad_labels():
    with pytest.raises(ValueError, match="-1 or \\+1"):
        make_logistic(np.ones((2, 1)), np.array([0.5, 1.0]))


def test_logistic_stable_at_extreme_margins():
    problem = make_logistic(np.array([[1.0]]), np.array([1.0]))
    assert problem.component_value(0, np.array([800.0])) == 0.0
    assert problem.component_value(0, np.array([-800.0])) == pytest.approx(800.0)
    assert np.isfinite(problem.component_gradient(0, np.array([-800.0]))).all()


def test_objective_value_is_component_mean(ls5):
    x = np.array([1.5])
    expected = sum(ls5.component_value(i, x) for i in range(5)) / 5
    assert objective_value(ls5, x) == pytest.approx(expected, abs=1e-15)


def test_load_dataset_round_trip(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("1,2,1\n0,1,-1\n2,0,1\n")
    matrix, labels = load_dataset(path)
    assert matrix.shape == (3, 2)
    assert np.array_equal(labels, [1.0, -1.0, 1.0])


def test_load_dataset_whitespace_and_comments(tmp_path):
    path = tmp_path / "data.txt"
    path.write_text("# header comment\n1 2 1\n\n0 1 -1\n")
    matrix, labels = load_dataset(path)
    assert matrix.shape == (2, 2)
    assert labels.tolist() == [1.0, -1.0]


def test_load_dataset_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("# only a comment\n")
    with pytest.raises(DatasetFormatError, match="no data rows"):
        load_dataset(path)


def test_load_dataset_ragged_row_names_line(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2,1\n0,1\n")
    with pytest.raises(DatasetFormatError, match="line 2"):
        load_dataset(path)


def test_load_dataset_non_numeric_names_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2,1\nx,1,1\n")
    with pytest.raises(DatasetFormatError, match="line 2"):
        load_dataset(path)


def test_load_dataset_needs_label_column(tmp_path):
    path = tmp_path / "narrow.csv"
    path.write_text("1\n2\n")
    with pytest.raises(DatasetFormatError, match="label column"):
        load_dataset(path)
