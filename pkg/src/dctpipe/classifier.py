"""Multinomial softmax classifier over flattened dataset records.

Zero-initialized, mini-batch gradient descent, fully deterministic given the
seed.  Features are standardized with training-split statistics only.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

MODEL_MAGIC = b"SMX1"
_STD_FLOOR = 1e-6


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    batch_size: int = 64
    epochs: int = 50
    seed: int = 0
    l2: float = 0.0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size <= 0 or self.epochs <= 0:
            raise ValueError("learning rate, batch size, epochs must be positive")
        if self.l2 < 0:
            raise ValueError("L2 coefficient must be non-negative")
        if self.seed is None:
            raise ValueError("seed is mandatory")


@dataclass
class SoftmaxModel:
    weights: np.ndarray        # (K, D)
    biases: np.ndarray         # (K,)
    feature_mean: np.ndarray   # (D,)
    feature_std: np.ndarray    # (D,), floored at 1e-6

    @property
    def class_count(self):
        return self.weights.shape[0]

    @property
    def feature_dim(self):
        return self.weights.shape[1]

    def standardize(self, x):
        return (x - self.feature_mean) / self.feature_std

    def logits(self, x):
        return self.standardize(np.atleast_2d(x)) @ self.weights.T + self.biases

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(MODEL_MAGIC)
            fh.write(struct.pack("<II", self.class_count, self.feature_dim))
            for arr in (self.feature_mean, self.feature_std, self.weights, self.biases):
                fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            if fh.read(4) != MODEL_MAGIC:
                raise ValueError("not a model file")
            k, d = struct.unpack("<II", fh.read(8))
            mean = np.frombuffer(fh.read(8 * d), dtype="<f8")
            std = np.frombuffer(fh.read(8 * d), dtype="<f8")
            weights = np.frombuffer(fh.read(8 * k * d), dtype="<f8").reshape(k, d)
            biases = np.frombuffer(fh.read(8 * k), dtype="<f8")
        return cls(weights=weights.copy(), biases=biases.copy(),
                   feature_mean=mean.copy(), feature_std=std.copy())


def _softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def forward(model, x):
    """Feature vector(s) -> class probabilities, rows summing to 1."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != model.feature_dim:
        raise ValueError(f"expected {model.feature_dim} features, got {x.shape[1]}")
    probs = _softmax(model.logits(x))
    return probs[0] if single else probs


def loss_and_grad(model, x, y, l2=0.0):
    """Mean cross-entropy (+ L2 on W) and analytic gradients for W and b."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64).reshape(-1)
    if x.shape[0] == 0:
        raise ValueError("empty batch")
    if x.shape[0] != y.shape[0]:
        raise ValueError("batch size mismatch")
    if (y < 0).any() or (y >= model.class_count).any():
        raise ValueError("label out of range")
    n = x.shape[0]
    xs = model.standardize(x)
    probs = _softmax(xs @ model.weights.T + model.biases)
    loss = -np.mean(np.log(probs[np.arange(n), y] + 1e-300))
    loss += 0.5 * l2 * np.sum(model.weights ** 2)
    delta = probs
    delta[np.arange(n), y] -= 1.0
    grad_w = delta.T @ xs / n + l2 * model.weights
    grad_b = delta.sum(axis=0) / n
    return loss, grad_w, grad_b


def train(features, labels, class_count, config):
    """Mini-batch gradient descent -> (model, per-epoch history).

    History entries: {"epoch", "loss", "accuracy"} measured on the training
    split after each epoch.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.shape[0] == 0:
        raise ValueError("empty training split")
    mean = features.mean(axis=0)
    std = np.maximum(features.std(axis=0), _STD_FLOOR)
    model = SoftmaxModel(
        weights=np.zeros((class_count, features.shape[1])),
        biases=np.zeros(class_count),
        feature_mean=mean, feature_std=std)

    rng = np.random.default_rng(config.seed)
    n = features.shape[0]
    history = []
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            _, grad_w, grad_b = loss_and_grad(model, features[idx], labels[idx],
                                              l2=config.l2)
            model.weights -= config.learning_rate * grad_w
            model.biases -= config.learning_rate * grad_b
        loss, _, _ = loss_and_grad(model, features, labels, l2=config.l2)
        preds = np.argmax(model.logits(features), axis=1)
        history.append({"epoch": epoch, "loss": float(loss),
                        "accuracy": float(np.mean(preds == labels))})
    return model, history


def predict_topk(model, x, k):
    """Top-k classes by probability, descending; ties break on class index."""
    if not 1 <= k <= model.class_count:
        raise ValueError(f"k must be in [1, {model.class_count}]")
    probs = np.asarray(forward(model, x), dtype=np.float64).reshape(-1)
    # Stable sort on (-probability, class index).
    order = np.lexsort((np.arange(probs.size), -probs))
    return [(int(c), float(probs[c])) for c in order[:k]]
