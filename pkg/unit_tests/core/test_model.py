"""Unit tests for the federated regression model (`model` module).

These tests exercise:
- instance generation (shapes, determinism, noiseless outputs, statistics),
- the squared-error loss and the gradient-descent local update,
- significance norms in scalar and batch form,
- aggregation modes and the error norm, including dimension checks.
"""

import numpy as np
import pytest

from federated_aloha import model


def _dataset(x, y) -> model.UserDataset:
    return model.UserDataset(x=np.asarray(x, dtype=float), y=float(y))


def test_generate_instance_shapes_and_outputs() -> None:
    """Instance with K=100, L=10 has 100 datasets, each y_k = x_k . w_true."""
    instance = model.generate_instance(100, 10, np.random.default_rng(3))

    assert instance.x.shape == (100, 10)
    assert instance.y.shape == (100,)
    assert instance.w_true.shape == (10,)
    assert len(instance.datasets) == 100
    np.testing.assert_allclose(instance.y, instance.x @ instance.w_true, rtol=1e-12, atol=1e-12)


def test_generate_instance_single_user_scalar() -> None:
    """K=1, L=1: y is the product of two scalars."""
    instance = model.generate_instance(1, 1, np.random.default_rng(11))

    assert instance.y[0] == instance.x[0, 0] * instance.w_true[0]


def test_generate_instance_is_deterministic() -> None:
    """Same (K, L, seed) twice gives bit-identical instances."""
    a = model.generate_instance(50, 4, np.random.default_rng(42))
    b = model.generate_instance(50, 4, np.random.default_rng(42))

    np.testing.assert_array_equal(a.w_true, b.w_true)
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)


@pytest.mark.parametrize("K, L", [(0, 10), (10, 0)])
def test_generate_instance_rejects_empty(K: int, L: int) -> None:
    """K = 0 or L = 0 is rejected."""
    with pytest.raises(model.ModelError):
        model.generate_instance(K, L, np.random.default_rng(0))


def test_generate_instance_entries_are_standard_normal() -> None:
    """Mean and variance of 10^4 entries are within 5 sigma of (0, 1)."""
    instance = model.generate_instance(1000, 10, np.random.default_rng(5))
    entries = instance.x.ravel()
    n = entries.size

    assert abs(entries.mean()) < 5.0 / np.sqrt(n)
    assert abs(entries.var() - 1.0) < 5.0 * np.sqrt(2.0 / n)


def test_loss_hand_evaluation() -> None:
    """x = (1,0), y = 0, w = (2,5) gives 1/2 * 2^2 = 2."""
    assert model.loss(np.array([2.0, 5.0]), _dataset([1.0, 0.0], 0.0)) == 2.0


def test_loss_is_zero_at_true_weights() -> None:
    """Generated data is noiseless, so every user's loss at w_true is exactly 0."""
    instance = model.generate_instance(200, 10, np.random.default_rng(8))

    for d in instance.datasets:
        assert model.loss(instance.w_true, d) == 0.0


def test_loss_dimension_mismatch() -> None:
    """Loss rejects vectors of different length."""
    with pytest.raises(model.DimensionMismatchError):
        model.loss(np.zeros(3), _dataset([1.0, 2.0], 1.0))


def test_local_update_hand_evaluation() -> None:
    """w=(1,1), x=(1,2), y=0, h=0.1 gives (0.7, 0.4)."""
    result = model.local_update(np.array([1.0, 1.0]), _dataset([1.0, 2.0], 0.0), 0.1)

    np.testing.assert_allclose(result, [0.7, 0.4], rtol=1e-12)


def test_local_update_from_zero() -> None:
    """From w = 0 the update is h y x."""
    d = _dataset([0.5, -1.5, 2.0], 3.0)
    result = model.local_update(np.zeros(3), d, 0.2)

    np.testing.assert_allclose(result, 0.2 * 3.0 * d.x, rtol=1e-12)


def test_local_update_zero_gradient_keeps_weights() -> None:
    """When x . w = y the weights do not move."""
    w = np.array([1.0, 2.0])
    d = _dataset([3.0, 1.0], 5.0)

    np.testing.assert_array_equal(model.local_update(w, d, 0.5), w)


@pytest.mark.parametrize("h", [0.0, -0.1])
def test_local_update_rejects_nonpositive_step(h: float) -> None:
    """Step size must be positive."""
    with pytest.raises(model.ModelError):
        model.local_update(np.zeros(2), _dataset([1.0, 1.0], 1.0), h)


def test_local_update_dimension_mismatch() -> None:
    """Local update rejects mismatched lengths."""
    with pytest.raises(model.DimensionMismatchError):
        model.local_update(np.zeros(2), _dataset([1.0, 1.0, 1.0], 1.0), 0.1)


def test_local_update_never_increases_loss_for_small_steps() -> None:
    """For 0 < h < 1/||x||^2 one step does not increase the user's loss."""
    rng = np.random.default_rng(21)
    for _ in range(500):
        L = int(rng.integers(1, 12))
        d = _dataset(rng.standard_normal(L), rng.standard_normal())
        w = rng.standard_normal(L) * 3.0
        h = rng.uniform(0.0, 1.0) / float(d.x @ d.x)
        if h == 0.0:
            continue

        before = model.loss(w, d)
        after = model.loss(model.local_update(w, d, h), d)
        assert after <= before + 1e-12 * max(1.0, before)


def test_local_update_matches_finite_difference_gradient() -> None:
    """(w - update)/h equals the central-difference gradient of the loss to 1e-6."""
    rng = np.random.default_rng(1234)
    eps = 1e-3
    for _ in range(1000):
        L = int(rng.integers(1, 11))
        d = _dataset(rng.standard_normal(L), rng.standard_normal() * 3.0)
        w = rng.standard_normal(L) * 2.0
        h = rng.uniform(0.01, 1.0)

        implied = (w - model.local_update(w, d, h)) / h
        numeric = np.array([
            (model.loss(w + eps * e, d) - model.loss(w - eps * e, d)) / (2 * eps)
            for e in np.eye(L)
        ])
        scale = max(np.linalg.norm(numeric), 1e-12)
        assert np.linalg.norm(implied - numeric) / scale <= 1e-6


def test_significance_delta_norm_zero_displacement() -> None:
    """Identical old and new weights have delta-norm 0."""
    w = np.array([1.0, -2.0])

    assert model.significance(w, w.copy(), model.SignificanceMode.DELTA_NORM) == 0.0


def test_significance_weight_norm() -> None:
    """Weight-norm of (3,4) is 5."""
    value = model.significance(np.zeros(2), np.array([3.0, 4.0]), model.SignificanceMode.WEIGHT_NORM)

    assert value == pytest.approx(5.0)


def test_significance_default_is_delta_norm() -> None:
    """Without a mode the displacement norm is returned."""
    assert model.significance(np.array([1.0, 1.0]), np.array([4.0, 5.0])) == pytest.approx(5.0)


@pytest.mark.parametrize("mode", list(model.SignificanceMode))
def test_significance_unavailable_user_is_zero(mode: model.SignificanceMode) -> None:
    """A user that could not compute reports 0 whatever the vectors."""
    value = model.significance(
        np.array([1.0, 2.0]), np.array([7.0, -3.0]), mode, available=False, step_size=0.1
    )

    assert value == 0.0


def test_significance_gradient_norm_divides_by_step() -> None:
    """Gradient-norm is delta-norm over the step size."""
    w = np.array([0.5, -0.5, 1.0])
    d = _dataset([1.0, 2.0, -1.0], 4.0)
    w_new = model.local_update(w, d, 0.05)

    delta = model.significance(w, w_new, model.SignificanceMode.DELTA_NORM)
    gradient = model.significance(w, w_new, model.SignificanceMode.GRADIENT_NORM, step_size=0.05)

    assert gradient == pytest.approx(delta / 0.05)
    residual = float(d.x @ w) - d.y
    assert gradient == pytest.approx(abs(residual) * np.linalg.norm(d.x), rel=1e-9)


def test_significance_gradient_norm_needs_step() -> None:
    """Gradient-norm without a step size is rejected."""
    with pytest.raises(model.ModelError):
        model.significance(np.zeros(2), np.ones(2), model.SignificanceMode.GRADIENT_NORM)


@pytest.mark.parametrize("mode", list(model.SignificanceMode))
def test_significances_batch_matches_scalar(mode: model.SignificanceMode) -> None:
    """The batch form agrees with the scalar form user by user."""
    rng = np.random.default_rng(17)
    instance = model.generate_instance(40, 6, rng)
    w = rng.standard_normal(6)
    available = rng.random(40) < 0.7
    h = 0.01

    batch = model.significances(w, instance.x, instance.y, h, mode, available)

    for k, d in enumerate(instance.datasets):
        expected = model.significance(
            w, model.local_update(w, d, h), mode, available=bool(available[k]), step_size=h
        )
        assert batch[k] == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_aggregate_singleton_is_the_update() -> None:
    """Mean of one received update is that update, bit for bit."""
    w_prev = np.array([0.3, -0.2])
    v = model.local_update(w_prev, _dataset([1.0, 2.0], 1.0), 0.01)

    np.testing.assert_array_equal(model.aggregate(w_prev, [v]), v)


def test_aggregate_empty_keeps_previous() -> None:
    """Nothing received leaves the global weights unchanged."""
    w_prev = np.array([1.0, 2.0, 3.0])

    np.testing.assert_array_equal(model.aggregate(w_prev, []), w_prev)


def test_aggregate_mean() -> None:
    """Mean of (1,1) and (3,3) is (2,2)."""
    result = model.aggregate(np.zeros(2), [np.array([1.0, 1.0]), np.array([3.0, 3.0])])

    np.testing.assert_allclose(result, [2.0, 2.0])


def test_aggregate_sum_gradient() -> None:
    """Sum-gradient adds every displacement to the previous weights."""
    w_prev = np.array([1.0, 1.0])
    received = [np.array([2.0, 1.0]), np.array([1.0, 0.0])]

    result = model.aggregate(w_prev, received, model.AggregationMode.SUM_GRADIENT)

    np.testing.assert_allclose(result, [2.0, 0.0])


def test_aggregate_mean_permutation_invariant_and_idempotent() -> None:
    """Reordering inputs does not matter; identical inputs return themselves."""
    rng = np.random.default_rng(9)
    vectors = [rng.standard_normal(5) for _ in range(6)]
    w_prev = np.zeros(5)

    forward = model.aggregate(w_prev, vectors)
    backward = model.aggregate(w_prev, vectors[::-1])
    np.testing.assert_allclose(forward, backward, rtol=1e-12, atol=1e-15)

    v = vectors[0]
    np.testing.assert_allclose(model.aggregate(w_prev, [v, v, v]), v, rtol=1e-15)


def test_aggregate_dimension_mismatch() -> None:
    """Aggregation rejects received vectors of the wrong length."""
    with pytest.raises(model.DimensionMismatchError):
        model.aggregate(np.zeros(2), [np.zeros(3)])


@pytest.mark.parametrize(
    "w, w_true, expected",
    [
        ([1.0, 2.0], [1.0, 2.0], 0.0),
        ([1.0, 0.0], [0.0, 0.0], 1.0),
        ([3.0, 4.0], [0.0, 0.0], 5.0),
    ],
)
def test_error_norm(w, w_true, expected: float) -> None:
    """Euclidean distance to the true weights."""
    assert model.error_norm(np.array(w), np.array(w_true)) == pytest.approx(expected)


def test_error_norm_dimension_mismatch() -> None:
    """Error norm rejects vectors of different length."""
    with pytest.raises(model.DimensionMismatchError):
        model.error_norm(np.zeros(2), np.zeros(4))
