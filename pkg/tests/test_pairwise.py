import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from metric_bounds.norms import NormKind, matrix_norm
from metric_bounds.pairwise import (Dataset, Model, Task, block_risk, empirical_risk,
                                    load_csv, pair_loss, relation, risk_estimate, save_csv,
                                    score)
from metric_bounds.rademacher import x_star, UnitBox
from conftest import random_dataset, random_sym

TASKS = list(Task)


def brute_risk(task, model, data):
    """Double loop over ordered pairs, written independently of the vectorized path."""
    total, count = 0.0, 0
    for i in range(data.n):
        for j in range(data.n):
            if i == j:
                continue
            xi, xj = data.X[i], data.X[j]
            r = 1.0 if data.y[i] == data.y[j] else -1.0
            if task is Task.METRIC:
                diff = xi - xj
                s = sum(diff[a] * model.M[a, c] * diff[c] for a in range(len(diff)) for c in range(len(diff)))
                arg = 1.0 + r * (s - model.b)
            else:
                s = sum(xi[a] * model.M[a, c] * xj[c] for a in range(len(xi)) for c in range(len(xi)))
                arg = 1.0 - r * (s - model.b)
            total += max(arg, 0.0)
            count += 1
    return total / count


def test_relation():
    assert relation(2, 2) == 1
    assert relation(0, 1) == -1
    assert relation(7, 7) == 1


def test_score_examples():
    assert score(Task.METRIC, np.eye(2), [1, 0], [0, 1]) == 2.0
    assert score(Task.SIMILARITY, np.eye(2), [1, 0], [0, 1]) == 0.0
    assert score(Task.METRIC, np.zeros((3, 3)), [1, 2, 3], [0, 5, 1]) == 0.0


def test_score_equals_inner_product(rng):
    M = random_sym(rng, 4)
    x, t = rng.normal(size=4), rng.normal(size=4)
    X = np.outer(x - t, x - t)
    assert score(Task.METRIC, M, x, t) == pytest.approx(np.sum(X * M))
    Xs = (np.outer(x, t) + np.outer(t, x)) / 2
    assert score(Task.SIMILARITY, M, x, t) == pytest.approx(np.sum(Xs * M))


def test_score_dimension_mismatch():
    with pytest.raises(ValueError):
        score(Task.METRIC, np.eye(2), [1, 0, 0], [0, 1, 0])


@pytest.mark.parametrize("task", TASKS)
def test_pair_loss_zero_model(task):
    z, z2 = (np.array([0.1, 0.9]), 0), (np.array([0.3, 0.2]), 1)
    assert pair_loss(task, Model.zero(2), z, z2) == 1.0


def test_pair_loss_constant_models():
    z, z2, z3 = (np.array([0.1, 0.9]), 0), (np.array([0.3, 0.2]), 1), (np.array([0.7, 0.2]), 0)
    assert pair_loss(Task.METRIC, Model.zero(2, -1.0), z, z2) == 0.0
    assert pair_loss(Task.METRIC, Model.zero(2, 1.0), z, z3) == 0.0


@given(st.integers(2, 12), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_zero_model_risk_is_one(n, d, seed):
    rng = np.random.default_rng(seed)
    data = random_dataset(rng, n, d)
    for task in TASKS:
        assert empirical_risk(task, Model.zero(d), data) == 1.0
        assert block_risk(task, Model.zero(d), data) == 1.0


def test_constant_model_two_point_risk():
    data = Dataset([[0.0, 0.0], [1.0, 1.0]], [0, 1])
    assert empirical_risk(Task.METRIC, Model.zero(2, -1.0), data) == 0.0


def test_empirical_risk_three_points():
    data = Dataset([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]], [0, 0, 1])
    model = Model(np.eye(2), 1.0)
    # scores: d01 = 1 (same), d02 = 4, d12 = 5 (different)
    # losses: 1 + (1 - 1) = 1;  (1 - (4 - 1))_+ = 0;  (1 - (5 - 1))_+ = 0
    assert empirical_risk(Task.METRIC, model, data) == pytest.approx(brute_risk(Task.METRIC, model, data))
    assert empirical_risk(Task.METRIC, model, data) == pytest.approx(1.0 / 3.0)


@pytest.mark.parametrize("task", TASKS)
def test_risk_estimate_matches_brute_force(task, rng):
    test = random_dataset(rng, 6, 3)
    model = Model(random_sym(rng, 3), 0.3)
    assert abs(risk_estimate(task, model, test) - brute_risk(task, model, test)) <= 1e-12


def test_risk_estimate_separable_is_zero():
    # same class within 0.1 of each other, classes 3 apart; b = 5 puts every margin beyond 1
    X = np.array([[0.0, 0.0], [0.1, 0.0], [3.0, 3.0], [3.0, 3.1]])
    test = Dataset(X, [0, 0, 1, 1])
    assert risk_estimate(Task.METRIC, Model(np.eye(2), 5.0), test) == 0.0


@pytest.mark.parametrize("task", TASKS)
def test_pair_loss_symmetric(task, rng):
    model = Model(random_sym(rng, 3), 0.2)
    for _ in range(50):
        z = (rng.normal(size=3), int(rng.integers(0, 2)))
        z2 = (rng.normal(size=3), int(rng.integers(0, 2)))
        assert pair_loss(task, model, z, z2) == pytest.approx(pair_loss(task, model, z2, z), abs=1e-12)


@pytest.mark.parametrize("task", TASKS)
def test_block_risk_pairs_first_and_second_half(task):
    data = Dataset([[0.0], [1.0], [3.0], [0.5], [9.0]], [0, 1, 0, 0, 1])
    model = Model([[1.0]], 0.5)
    expected = np.mean([pair_loss(task, model, (data.X[i], data.y[i]), (data.X[2 + i], data.y[2 + i]))
                        for i in range(2)])
    assert block_risk(task, model, data) == pytest.approx(expected)


def test_block_risk_constant_pairs():
    # all four points coincide, same label: every pair loss is (1 + (0 - b))_+ = 1 - b
    data = Dataset(np.ones((4, 2)), [1, 1, 1, 1])
    assert block_risk(Task.METRIC, Model.zero(2, 0.25), data) == pytest.approx(0.75)


@pytest.mark.parametrize("n", [4, 6])
@pytest.mark.parametrize("task", TASKS)
def test_permutation_averaged_block_risk_is_u_statistic(task, n, rng):
    data = random_dataset(rng, n, 2)
    model = Model(random_sym(rng, 2), 0.4)
    vals = [block_risk(task, model, data.permuted(p)) for p in itertools.permutations(range(n))]
    assert np.mean(vals) == pytest.approx(empirical_risk(task, model, data), abs=1e-12)


@pytest.mark.parametrize("task", TASKS)
def test_empirical_risk_permutation_invariant(task, rng):
    data = random_dataset(rng, 9, 3)
    model = Model(random_sym(rng, 3), -0.1)
    base = empirical_risk(task, model, data)
    for _ in range(10):
        assert empirical_risk(task, model, data.permuted(rng.permutation(9))) == pytest.approx(base, abs=1e-12)


def test_loss_bounded_by_b_lambda(rng):
    # ||M|| <= 1/sqrt(lam), |b| <= 1 + X ||M||, data in the unit box
    lam, d = 0.25, 3
    for kind in (NormKind.FROBENIUS, NormKind.L1, NormKind.L21, NormKind.TRACE):
        X = x_star(Task.METRIC, kind, UnitBox(d))
        bound = 2 * (1 + X / np.sqrt(lam))
        for _ in range(200):
            M = random_sym(rng, d)
            M *= rng.uniform(0, 1) / np.sqrt(lam) / matrix_norm(M, kind)
            b = rng.uniform(-1, 1) * (1 + X * matrix_norm(M, kind))
            data = random_dataset(rng, 5, d)
            for task in TASKS:
                losses = [pair_loss(task, Model(M, b), (data.X[i], data.y[i]), (data.X[j], data.y[j]))
                          for i in range(5) for j in range(5) if i != j]
                assert max(losses) <= bound + 1e-9


def test_risk_needs_two_points():
    data = Dataset([[0.0, 1.0]], [0])
    with pytest.raises(ValueError):
        empirical_risk(Task.METRIC, Model.zero(2), data)
    with pytest.raises(ValueError):
        block_risk(Task.METRIC, Model.zero(2), data)


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset([[0.0, np.nan]], [0])
    with pytest.raises(ValueError):
        Dataset([[0.0, 1.0]], [0, 1])
    with pytest.raises(ValueError):
        Dataset([[0.0]], [0.5])


def test_model_is_symmetrized():
    m = Model([[1.0, 2.0], [0.0, 1.0]], 0.0)
    np.testing.assert_array_equal(m.M, [[1.0, 1.0], [1.0, 1.0]])


class TestCsv:
    def test_roundtrip(self, tmp_path, rng):
        data = random_dataset(rng, 7, 3)
        path = tmp_path / "d.csv"
        save_csv(data, path)
        assert path.read_text().splitlines()[0] == "x1,x2,x3,label"
        back = load_csv(path)
        np.testing.assert_array_equal(back.X, data.X)
        np.testing.assert_array_equal(back.y, data.y)

    @pytest.mark.parametrize("text", [
        "a,b,label\n1,2,0\n",
        "x1,x2,label\n1,2\n",
        "x1,label\n1.0,abc\n",
        "x1,x2\n1,2\n",
        "",
    ])
    def test_rejects_malformed(self, tmp_path, text):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(ValueError):
            load_csv(path)

    @given(arrays(np.float64, (4, 2), elements=st.floats(-1e6, 1e6, allow_nan=False)))
    def test_roundtrip_exact_floats(self, X):
        import tempfile, os
        data = Dataset(X, [0, 1, 0, 1])
        with tempfile.TemporaryDirectory() as tmp:
            p = os.path.join(tmp, "x.csv")
            save_csv(data, p)
            np.testing.assert_array_equal(load_csv(p).X, X)
