"""GloVe: weighted least squares on windowed co-occurrence counts.

Counts are accumulated symmetrically with 1/distance weighting, then the
factorization minimizes

    sum_ij f(X_ij) (w_i . wt_j + b_i + bt_j - ln X_ij)^2,
    f(x) = (x / x_max)^alpha for x < x_max, else 1,

by per-parameter adaptive (AdaGrad) steps over the nonzero entries in
seeded shuffled order. The final word vector is w + wt.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from ..errors import EmptyVocabularyError
from .base import TextEmbeddingModel, corpus_token_ids, resolve_vocab


@dataclass
class GloveConfig:
    dim: int = 400
    window: int = 5
    x_max: float = 100.0
    alpha: float = 0.75
    epochs: int = 15
    initial_lr: float = 0.05
    min_count: int = 1
    seed: int = 0


class GloveModel(TextEmbeddingModel):
    method = "glove"


def cooccurrence_counts(doc_ids, window: int) -> dict[tuple[int, int], float]:
    """Symmetric windowed co-occurrence with 1/distance weighting."""
    counts: dict[tuple[int, int], float] = {}
    for ids in doc_ids:
        n = len(ids)
        for i in range(n):
            for off in range(1, window + 1):
                j = i + off
                if j >= n:
                    break
                w = 1.0 / off
                a, b = ids[i], ids[j]
                counts[(a, b)] = counts.get((a, b), 0.0) + w
                counts[(b, a)] = counts.get((b, a), 0.0) + w
    return counts


def glove_objective(counts_arrays, w, wt, b, bt, x_max, alpha):
    """Full weighted least-squares objective over the nonzero entries."""
    ii, jj, xx = counts_arrays
    diff = np.einsum("ij,ij->i", w[ii], wt[jj]) + b[ii] + bt[jj] - np.log(xx)
    f = np.minimum(1.0, (xx / x_max) ** alpha)
    return float(np.sum(f * diff * diff))


def train_glove(docs, cfg: GloveConfig | None = None, vocab=None) -> GloveModel:
    cfg = cfg or GloveConfig()
    vocab = resolve_vocab(docs, cfg.min_count, vocab)
    doc_ids = corpus_token_ids(docs, vocab)
    counts = cooccurrence_counts(doc_ids, cfg.window)
    if not counts:
        raise EmptyVocabularyError("empty co-occurrence matrix (no token pair in window)")

    pairs = sorted(counts)
    ii = np.array([p[0] for p in pairs])
    jj = np.array([p[1] for p in pairs])
    xx = np.array([counts[p] for p in pairs])
    log_x = np.log(xx)
    f = np.minimum(1.0, (xx / cfg.x_max) ** cfg.alpha)

    rng = np.random.default_rng(cfg.seed)
    v, dim = len(vocab), cfg.dim
    w = rng.uniform(-0.5, 0.5, size=(v, dim)) / dim
    wt = rng.uniform(-0.5, 0.5, size=(v, dim)) / dim
    b = rng.uniform(-0.5, 0.5, size=v) / dim
    bt = rng.uniform(-0.5, 0.5, size=v) / dim
    acc_w = np.ones((v, dim))
    acc_wt = np.ones((v, dim))
    acc_b = np.ones(v)
    acc_bt = np.ones(v)

    curve = [glove_objective((ii, jj, xx), w, wt, b, bt, cfg.x_max, cfg.alpha)]
    for _ in range(cfg.epochs):
        order = rng.permutation(len(pairs))
        for p in order:
            i, j = ii[p], jj[p]
            diff = float(w[i] @ wt[j]) + b[i] + bt[j] - log_x[p]
            g = 2.0 * f[p] * diff
            grad_wi = g * wt[j]
            grad_wtj = g * w[i]
            w[i] -= cfg.initial_lr * grad_wi / np.sqrt(acc_w[i])
            wt[j] -= cfg.initial_lr * grad_wtj / np.sqrt(acc_wt[j])
            b[i] -= cfg.initial_lr * g / np.sqrt(acc_b[i])
            bt[j] -= cfg.initial_lr * g / np.sqrt(acc_bt[j])
            acc_w[i] += grad_wi * grad_wi
            acc_wt[j] += grad_wtj * grad_wtj
            acc_b[i] += g * g
            acc_bt[j] += g * g
        curve.append(glove_objective((ii, jj, xx), w, wt, b, bt, cfg.x_max, cfg.alpha))

    model = GloveModel(dim, vocab, (w + wt).astype(np.float32), asdict(cfg))
    model.objective_curve = curve
    model.cooccurrence = counts
    return model
