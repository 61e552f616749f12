"""Doc2Vec distributed-memory training (PV-DM with context averaging).

Each document owns an input vector that is averaged together with the
context word vectors to predict the center word through negative sampling.
Training documents keep their learned vectors; unseen documents are
embedded by gradient steps on a fresh vector with the word weights frozen.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from ..errors import AllOOVError
from .base import (
    TextEmbeddingModel,
    corpus_token_ids,
    draw_negatives,
    linear_decay,
    negative_sampling_loss,
    resolve_vocab,
    unigram_noise_cumulative,
)


@dataclass
class Doc2VecConfig:
    dim: int = 400
    window: int = 5
    negatives: int = 5
    epochs: int = 15
    initial_lr: float = 0.025
    infer_steps: int = 50
    min_count: int = 1
    seed: int = 0


class Doc2VecModel(TextEmbeddingModel):
    method = "doc2vec"

    def __init__(self, vocab, vectors, doc_ids, doc_vectors, w_out, cfg):
        super().__init__(vectors.shape[1], vocab, vectors, asdict(cfg))
        self.doc_ids = list(doc_ids)
        self.doc_vectors = doc_vectors  # (n_docs, dim) float32
        self.doc_index = {d: i for i, d in enumerate(self.doc_ids)}
        self.w_out = w_out  # kept for inference after reload
        self.window = cfg.window
        self.negatives = cfg.negatives
        self.initial_lr = cfg.initial_lr
        self.infer_steps = cfg.infer_steps
        self.infer_seed = cfg.seed + 0x1FE2

    def native_document(self, tokens, doc_id=None) -> np.ndarray:
        if doc_id is not None and doc_id in self.doc_index:
            return self.doc_vectors[self.doc_index[doc_id]].astype(np.float64)
        return self.infer_vector(tokens)

    def infer_vector(self, tokens) -> np.ndarray:
        """Train a fresh document vector against frozen word weights."""
        ids = [self.vocab.index[t] for t in tokens if t in self.vocab.index]
        if not ids:
            raise AllOOVError("no in-vocabulary token to infer from")
        rng = np.random.default_rng(self.infer_seed)
        dim = self.dim
        dvec = (rng.random(dim) - 0.5) / dim
        w_in = self.vectors.astype(np.float64)
        w_out = self.w_out.astype(np.float64)
        noise = unigram_noise_cumulative(self.vocab)
        total = self.infer_steps * len(ids)
        pos = 0
        for _ in range(self.infer_steps):
            for t, center in enumerate(ids):
                lr = linear_decay(self.initial_lr, pos, total)
                pos += 1
                lo = max(0, t - self.window)
                ctx = ids[lo:t] + ids[t + 1 : t + 1 + self.window]
                rows = [dvec] + [w_in[c] for c in ctx]
                h = np.mean(rows, axis=0)
                negs = draw_negatives(rng, noise, self.negatives, center)
                targets = np.array([center] + negs)
                labels = np.zeros(len(targets))
                labels[0] = 1.0
                _, grad_h, _ = negative_sampling_loss(h, w_out[targets], labels)
                dvec -= lr * grad_h / len(rows)
        return dvec


def train_doc2vec(docs, cfg: Doc2VecConfig | None = None, vocab=None) -> Doc2VecModel:
    cfg = cfg or Doc2VecConfig()
    vocab = resolve_vocab(docs, cfg.min_count, vocab)
    doc_token_ids = corpus_token_ids(docs, vocab)
    dim = cfg.dim
    rng = np.random.default_rng(cfg.seed)
    w_in = (rng.random((len(vocab), dim)) - 0.5) / dim
    d_in = (rng.random((len(docs), dim)) - 0.5) / dim
    w_out = np.zeros((len(vocab), dim))
    noise = unigram_noise_cumulative(vocab)

    positions_per_epoch = sum(len(ids) for ids in doc_token_ids)
    total = cfg.epochs * positions_per_epoch
    pos = 0
    epoch_losses = []
    for _ in range(cfg.epochs):
        epoch_loss = 0.0
        for d, ids in enumerate(doc_token_ids):
            dvec = d_in[d]
            for t, center in enumerate(ids):
                lr = linear_decay(cfg.initial_lr, pos, total)
                pos += 1
                lo = max(0, t - cfg.window)
                ctx = ids[lo:t] + ids[t + 1 : t + 1 + cfg.window]
                rows = np.empty((1 + len(ctx), dim))
                rows[0] = dvec
                for j, c in enumerate(ctx):
                    rows[j + 1] = w_in[c]
                h = rows.mean(axis=0)
                negs = draw_negatives(rng, noise, cfg.negatives, center)
                targets = np.array([center] + negs)
                labels = np.zeros(len(targets))
                labels[0] = 1.0
                loss, grad_h, grad_t = negative_sampling_loss(h, w_out[targets], labels)
                epoch_loss += loss
                np.subtract.at(w_out, targets, lr * grad_t)
                shared = lr * grad_h / (1 + len(ctx))
                dvec -= shared
                np.subtract.at(w_in, ctx, shared)
        epoch_losses.append(epoch_loss / max(1, positions_per_epoch))

    model = Doc2VecModel(
        vocab,
        w_in.astype(np.float32),
        [doc.id for doc in docs],
        d_in.astype(np.float32),
        w_out.astype(np.float32),
        cfg,
    )
    model.train_loss = epoch_losses
    return model
