"""Visual regressor: maps image feature vectors into the joint text space.

A small feedforward network (rectified hidden layers, linear output) is
trained with SGD + momentum so that its output ψ(I) matches the caption
embedding φ(x) under a sigmoid cross-entropy loss

    L = -1/(N*D) Σ_n Σ_d [ p log p̂ + (1 - p) log(1 - p̂) ],
    p = σ(φ(x)_d),  p̂ = σ(ψ(I)_d),

which is minimized (but not zeroed) when the prediction equals the target.
The loss is evaluated from logits in softplus form so saturated sigmoids
cannot produce log(0).
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import AllOOVError, DimensionMismatchError
from .textemb.base import sigmoid, softplus


@dataclass
class RegressorConfig:
    input_dim: int = 0
    hidden_dims: tuple[int, ...] = (512,)
    output_dim: int = 0
    batch_size: int = 120
    initial_lr: float = 1e-3
    lr_step_iters: int = 2000  # paper-scale preset uses 100000
    lr_factor: float = 0.1
    momentum: float = 0.9
    max_iters: int = 5000
    loss: str = "sigmoid_xent"  # or "mse"
    aggregation: str = "tfidf_mean"
    seed: int = 0

    def __post_init__(self):
        self.hidden_dims = tuple(self.hidden_dims)
        if not 0.0 < self.lr_factor < 1.0:
            raise ValueError("lr_factor must lie in (0, 1)")
        if any(d <= 0 for d in self.hidden_dims):
            raise ValueError("hidden dimensions must be positive")
        if self.input_dim < 0 or self.output_dim < 0:
            raise ValueError("input_dim and output_dim must not be negative")


PAPER_SCHEDULE = {"lr_step_iters": 100000, "initial_lr": 1e-3, "lr_factor": 0.1}


def learning_rate(cfg: RegressorConfig, iteration: int) -> float:
    return cfg.initial_lr * cfg.lr_factor ** (iteration // cfg.lr_step_iters)


class VisualRegressor:
    """Feedforward ψ(I) with per-parameter momentum buffers."""

    def __init__(self, cfg: RegressorConfig):
        if cfg.input_dim <= 0 or cfg.output_dim <= 0:
            raise ValueError("input_dim and output_dim must be positive")
        self.cfg = cfg
        dims = [cfg.input_dim, *cfg.hidden_dims, cfg.output_dim]
        rng = np.random.default_rng(cfg.seed)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(dims, dims[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))
        self.vel_w = [np.zeros_like(w) for w in self.weights]
        self.vel_b = [np.zeros_like(b) for b in self.biases]
        self.iteration = 0
        self.loss_curve = []

    @property
    def input_dim(self):
        return self.cfg.input_dim

    @property
    def output_dim(self):
        return self.cfg.output_dim

    def forward(self, features: np.ndarray) -> np.ndarray:
        """Map features (F,) or (N, F) to joint-space logits ψ(I)."""
        x = np.asarray(features, dtype=np.float64)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.shape[1] != self.cfg.input_dim:
            raise DimensionMismatchError(
                f"feature dim {x.shape[1]} != configured input dim {self.cfg.input_dim}"
            )
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            x = np.maximum(x @ w + b, 0.0)
        x = x @ self.weights[-1] + self.biases[-1]
        return x[0] if single else x

    def _forward_cached(self, x):
        """Forward pass keeping pre-activations for backprop."""
        acts = [x]
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            x = np.maximum(x @ w + b, 0.0)
            acts.append(x)
        out = x @ self.weights[-1] + self.biases[-1]
        return out, acts

    def backward(self, acts, grad_out):
        """Parameter gradients from layer inputs and the output-logit gradient."""
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        g = grad_out
        for layer in range(len(self.weights) - 1, -1, -1):
            grads_w[layer] = acts[layer].T @ g
            grads_b[layer] = g.sum(axis=0)
            if layer > 0:
                g = (g @ self.weights[layer].T) * (acts[layer] > 0.0)
        return grads_w, grads_b

    def sgd_step(self, grads_w, grads_b):
        lr = learning_rate(self.cfg, self.iteration)
        mom = self.cfg.momentum
        for k in range(len(self.weights)):
            self.vel_w[k] = mom * self.vel_w[k] - lr * grads_w[k]
            self.vel_b[k] = mom * self.vel_b[k] - lr * grads_b[k]
            self.weights[k] += self.vel_w[k]
            self.biases[k] += self.vel_b[k]
        self.iteration += 1


def sigmoid_xent_loss(targets: np.ndarray, predictions: np.ndarray) -> float:
    """Eq. form: mean over N*D of -[p log p̂ + (1-p) log(1-p̂)] with p, p̂ sigmoids.

    Evaluated from the raw logits: with z the prediction logit,
    -[p log σ(z) + (1-p) log(1-σ(z))] = p*softplus(-z) + (1-p)*softplus(z).
    """
    t = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    z = np.atleast_2d(np.asarray(predictions, dtype=np.float64))
    if t.shape != z.shape:
        raise DimensionMismatchError(f"target shape {t.shape} != prediction shape {z.shape}")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(z))):
        raise ValueError("loss inputs must be finite")
    p = sigmoid(t)
    elem = p * softplus(-z) + (1.0 - p) * softplus(z)
    return float(elem.mean())


def sigmoid_xent_grad(targets: np.ndarray, predictions: np.ndarray) -> np.ndarray:
    """dL/dz = (σ(z) - p) / (N*D) for the mean-reduced loss."""
    t = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    z = np.atleast_2d(np.asarray(predictions, dtype=np.float64))
    return (sigmoid(z) - sigmoid(t)) / t.size


def mse_loss(targets: np.ndarray, predictions: np.ndarray) -> float:
    t = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    z = np.atleast_2d(np.asarray(predictions, dtype=np.float64))
    if t.shape != z.shape:
        raise DimensionMismatchError(f"target shape {t.shape} != prediction shape {z.shape}")
    return float(np.mean((z - t) ** 2))


def mse_grad(targets: np.ndarray, predictions: np.ndarray) -> np.ndarray:
    t = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    z = np.atleast_2d(np.asarray(predictions, dtype=np.float64))
    return 2.0 * (z - t) / t.size


LOSSES = {"sigmoid_xent": (sigmoid_xent_loss, sigmoid_xent_grad), "mse": (mse_loss, mse_grad)}


@dataclass
class TrainingResult:
    model: VisualRegressor
    loss_curve: list[float] = field(default_factory=list)
    skipped_docs: list[str] = field(default_factory=list)


def caption_targets(ds, text_model, aggregation: str):
    """Embed every caption once; all-OOV documents are skipped and reported."""
    targets = []
    kept = []
    skipped = []
    for doc in ds.documents:
        try:
            vec = text_model.embed_document(doc.tokens, aggregation, doc_id=doc.id)
        except AllOOVError:
            skipped.append(doc.id)
            continue
        targets.append(np.asarray(vec, dtype=np.float64))
        kept.append(doc.id)
    return kept, targets, skipped


def train_visual(ds, text_model, cfg: RegressorConfig, observer=None) -> TrainingResult:
    """Fit ψ to regress caption embeddings from image features.

    ``observer``, when given, is called as observer(iteration, loss) after
    every step; it must not mutate the model.
    """
    kept, targets, skipped = caption_targets(ds, text_model, cfg.aggregation)
    if not kept:
        raise AllOOVError("every caption in the dataset is fully out of vocabulary")
    feats = np.stack([np.asarray(ds.features[i], dtype=np.float64) for i in kept])
    targs = np.stack(targets)
    if cfg.input_dim and cfg.input_dim != feats.shape[1]:
        raise DimensionMismatchError(
            f"dataset feature dim {feats.shape[1]} != configured input dim {cfg.input_dim}"
        )
    cfg = RegressorConfig(**{**asdict(cfg), "input_dim": feats.shape[1], "output_dim": targs.shape[1]})

    model = VisualRegressor(cfg)
    loss_fn, grad_fn = LOSSES[cfg.loss]
    rng = np.random.default_rng(cfg.seed)
    n = feats.shape[0]
    order = rng.permutation(n)
    cursor = 0
    for _ in range(cfg.max_iters):
        take = min(cfg.batch_size, n)
        if cursor + take > n:
            order = rng.permutation(n)
            cursor = 0
        batch = order[cursor : cursor + take]
        cursor += take
        out, acts = model._forward_cached(feats[batch])
        loss = loss_fn(targs[batch], out)
        grad_out = grad_fn(targs[batch], out)
        grads_w, grads_b = model.backward(acts, grad_out)
        model.sgd_step(grads_w, grads_b)
        model.loss_curve.append(loss)
        if observer is not None:
            observer(model.iteration, loss)
    return TrainingResult(model=model, loss_curve=list(model.loss_curve), skipped_docs=skipped)


def write_loss_curve(path, curve) -> None:
    """Two columns: iteration index and loss value."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, value in enumerate(curve):
            fh.write(f"{i}\t{value:.10g}\n")
