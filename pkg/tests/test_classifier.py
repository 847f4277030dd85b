import numpy as np
import pytest

from dctpipe.classifier import (SoftmaxModel, TrainConfig, forward,
                                loss_and_grad, predict_topk, train)


def make_model(k, d, rng=None):
    if rng is None:
        return SoftmaxModel(weights=np.zeros((k, d)), biases=np.zeros(k),
                            feature_mean=np.zeros(d), feature_std=np.ones(d))
    return SoftmaxModel(weights=rng.normal(size=(k, d)),
                        biases=rng.normal(size=k),
                        feature_mean=np.zeros(d), feature_std=np.ones(d))


def test_zero_model_is_uniform():
    model = make_model(5, 3)
    probs = forward(model, np.ones(3))
    assert np.allclose(probs, 0.2, atol=1e-12)


def test_bias_dominates():
    model = make_model(32, 4)
    model.biases[0] = 20.0
    probs = forward(model, np.zeros(4))
    assert probs[0] >= 0.999


def test_probabilities_normalize():
    rng = np.random.default_rng(107)
    model = make_model(7, 11, rng)
    x = rng.normal(size=(20, 11))
    probs = forward(model, x)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
    assert (probs > 0).all()


def test_logit_shift_invariance():
    rng = np.random.default_rng(109)
    model = make_model(6, 5, rng)
    x = rng.normal(size=5)
    base = forward(model, x)
    model.biases += 123.456
    assert np.allclose(forward(model, x), base, atol=1e-12)


def test_uniform_loss_is_log_k():
    model = make_model(8, 4)
    x = np.random.default_rng(113).normal(size=(10, 4))
    y = np.arange(10) % 8
    loss, _, _ = loss_and_grad(model, x, y)
    assert loss == pytest.approx(np.log(8), abs=1e-12)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(127)
    for trial in range(5):
        k, d, n = 3, 5, 8
        model = make_model(k, d, rng)
        x = rng.normal(size=(n, d))
        y = rng.integers(0, k, n)
        l2 = 0.01
        loss, grad_w, grad_b = loss_and_grad(model, x, y, l2=l2)
        h = 1e-5
        for _ in range(10):
            i, j = rng.integers(0, k), rng.integers(0, d)
            model.weights[i, j] += h
            up, _, _ = loss_and_grad(model, x, y, l2=l2)
            model.weights[i, j] -= 2 * h
            down, _, _ = loss_and_grad(model, x, y, l2=l2)
            model.weights[i, j] += h
            numeric = (up - down) / (2 * h)
            denom = max(abs(numeric), abs(grad_w[i, j]), 1e-8)
            assert abs(grad_w[i, j] - numeric) / denom < 1e-5
        for i in range(k):
            model.biases[i] += h
            up, _, _ = loss_and_grad(model, x, y, l2=l2)
            model.biases[i] -= 2 * h
            down, _, _ = loss_and_grad(model, x, y, l2=l2)
            model.biases[i] += h
            numeric = (up - down) / (2 * h)
            denom = max(abs(numeric), abs(grad_b[i]), 1e-8)
            assert abs(grad_b[i] - numeric) / denom < 1e-5


def test_loss_and_grad_validation():
    model = make_model(3, 4)
    with pytest.raises(ValueError):
        loss_and_grad(model, np.empty((0, 4)), [])
    with pytest.raises(ValueError):
        loss_and_grad(model, np.ones((2, 4)), [0, 5])


def test_separable_data_converges():
    rng = np.random.default_rng(131)
    n = 50
    x0 = rng.normal(loc=-3.0, size=(n, 2))
    x1 = rng.normal(loc=3.0, size=(n, 2))
    features = np.vstack([x0, x1])
    labels = np.array([0] * n + [1] * n)
    config = TrainConfig(learning_rate=0.5, batch_size=16, epochs=50, seed=1)
    model, history = train(features, labels, 2, config)
    assert history[-1]["accuracy"] == 1.0
    assert len(history) == 50


def test_training_deterministic():
    rng = np.random.default_rng(137)
    features = rng.normal(size=(60, 6))
    labels = rng.integers(0, 3, 60)
    config = TrainConfig(learning_rate=0.1, batch_size=8, epochs=5, seed=9)
    m1, h1 = train(features, labels, 3, config)
    m2, h2 = train(features, labels, 3, config)
    assert np.array_equal(m1.weights, m2.weights)
    assert np.array_equal(m1.biases, m2.biases)
    assert h1 == h2


def test_loss_decreases_on_average():
    rng = np.random.default_rng(139)
    features = rng.normal(size=(120, 4))
    labels = (features[:, 0] + features[:, 1] > 0).astype(int)
    config = TrainConfig(learning_rate=0.05, batch_size=16, epochs=30, seed=3)
    _, history = train(features, labels, 2, config)
    losses = np.array([h["loss"] for h in history])
    smoothed = np.convolve(losses, np.ones(3) / 3, mode="valid")
    assert smoothed[-1] < smoothed[0]
    assert np.all(np.diff(smoothed) < 1e-3)


def test_topk_contract():
    model = make_model(5, 2)
    ranking = predict_topk(model, np.zeros(2), 5)
    assert [c for c, _ in ranking] == [0, 1, 2, 3, 4]   # uniform ties by index
    top1 = predict_topk(model, np.zeros(2), 1)
    assert top1[0][0] == 0
    with pytest.raises(ValueError):
        predict_topk(model, np.zeros(2), 6)
    with pytest.raises(ValueError):
        predict_topk(model, np.zeros(2), 0)


def test_topk_matches_argmax():
    rng = np.random.default_rng(149)
    model = make_model(4, 3, rng)
    x = rng.normal(size=3)
    probs = forward(model, x)
    assert predict_topk(model, x, 1)[0][0] == int(np.argmax(probs))


def test_model_serialization_roundtrip(tmp_path):
    rng = np.random.default_rng(151)
    model = make_model(3, 7, rng)
    model.feature_mean = rng.normal(size=7)
    model.feature_std = np.abs(rng.normal(size=7)) + 0.1
    path = tmp_path / "model.smx"
    model.save(path)
    loaded = SoftmaxModel.load(path)
    for a, b in ((model.weights, loaded.weights), (model.biases, loaded.biases),
                 (model.feature_mean, loaded.feature_mean),
                 (model.feature_std, loaded.feature_std)):
        assert np.array_equal(a, b)
    with pytest.raises(ValueError, match="not a model file"):
        bad = tmp_path / "bad.smx"
        bad.write_bytes(b"XXXX" + b"\x00" * 16)
        SoftmaxModel.load(bad)
