"""Latent Dirichlet Allocation via collapsed Gibbs sampling.

Token-topic assignments are resampled with the multinomial parameters
integrated out:

    p(z = k | rest)  ∝  (n_wk + beta) / (n_k + V*beta) * (n_dk + alpha)

Topic-word counts are accumulated over the post-burn-in sweeps; a word's
embedding is its smoothed P(topic | word) row over those statistics, so it
lives on the probability simplex. Documents embed natively by fold-in:
Gibbs sweeps over the document's tokens with the global statistics frozen.

The sweep itself runs over plain Python ints: at desk scale this beats
per-token numpy dispatch and keeps the sampler bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from ..errors import AllOOVError, EmptyVocabularyError
from .base import TextEmbeddingModel, corpus_token_ids, resolve_vocab


@dataclass
class LdaConfig:
    k_topics: int = 200
    alpha: float | None = None  # None -> 50 / k_topics
    beta: float = 0.01
    gibbs_iters: int = 500
    burn_in: int = 200
    fold_in_iters: int = 50
    min_count: int = 1
    seed: int = 0

    def resolved_alpha(self) -> float:
        return 50.0 / self.k_topics if self.alpha is None else self.alpha


class LdaModel(TextEmbeddingModel):
    """LDA word "vectors" are P(topic | word) rows of dimension k_topics."""

    method = "lda"

    def __init__(self, vocab, topic_word_counts, n_sweeps, cfg: LdaConfig):
        self.k_topics = cfg.k_topics
        self.alpha = cfg.resolved_alpha()
        self.beta = cfg.beta
        self.topic_word_counts = topic_word_counts  # (|V|, K) accumulated ints
        self.n_sweeps = n_sweeps
        self.fold_in_iters = cfg.fold_in_iters
        self.fold_in_seed = cfg.seed + 0x5EED
        mean_counts = topic_word_counts / n_sweeps
        probs = (mean_counts + self.beta) / (
            mean_counts.sum(axis=1, keepdims=True) + cfg.k_topics * self.beta
        )
        super().__init__(cfg.k_topics, vocab, probs.astype(np.float32), asdict(cfg))
        self._mean_counts = mean_counts
        self._topic_totals = mean_counts.sum(axis=0)

    def word_vector(self, token):
        idx = self.vocab.index.get(token)
        if idx is None:
            from ..errors import OOVWordError

            raise OOVWordError(f"{token!r} is not in the lda vocabulary")
        row = self._mean_counts[idx] + self.beta
        return row / row.sum()

    def native_document(self, tokens, doc_id=None) -> np.ndarray:
        """Fold-in: Gibbs sweeps over the document with global counts frozen."""
        ids = [self.vocab.index[t] for t in tokens if t in self.vocab.index]
        if not ids:
            raise AllOOVError("no in-vocabulary token to fold in")
        v = len(self.vocab)
        phi = (self._mean_counts + self.beta) / (self._topic_totals + v * self.beta)
        rng = np.random.default_rng(self.fold_in_seed)
        k = self.k_topics
        z = rng.integers(0, k, size=len(ids))
        n_dk = np.bincount(z, minlength=k).astype(np.float64)
        for _ in range(self.fold_in_iters):
            uniforms = rng.random(len(ids))
            for t, w in enumerate(ids):
                n_dk[z[t]] -= 1
                p = phi[w] * (n_dk + self.alpha)
                cum = np.cumsum(p)
                z[t] = int(np.searchsorted(cum, uniforms[t] * cum[-1], side="right"))
                n_dk[z[t]] += 1
        theta = (n_dk + self.alpha) / (len(ids) + k * self.alpha)
        return theta


def train_lda(docs, cfg: LdaConfig | None = None, vocab=None) -> LdaModel:
    cfg = cfg or LdaConfig()
    if cfg.k_topics < 2:
        raise ValueError("k_topics must be >= 2")
    vocab = resolve_vocab(docs, cfg.min_count, vocab)
    doc_ids = corpus_token_ids(docs, vocab)
    word_of = [w for ids in doc_ids for w in ids]
    doc_of = [d for d, ids in enumerate(doc_ids) for _ in ids]
    n_tokens = len(word_of)
    if n_tokens == 0:
        raise EmptyVocabularyError("corpus has no in-vocabulary token")

    k = cfg.k_topics
    v = len(vocab)
    alpha = cfg.resolved_alpha()
    beta = cfg.beta
    v_beta = v * beta
    rng = np.random.default_rng(cfg.seed)
    z = rng.integers(0, k, size=n_tokens).tolist()

    n_wk = [[0] * k for _ in range(v)]
    n_dk = [[0] * k for _ in range(len(doc_ids))]
    n_k = [0] * k
    for t in range(n_tokens):
        n_wk[word_of[t]][z[t]] += 1
        n_dk[doc_of[t]][z[t]] += 1
        n_k[z[t]] += 1

    accumulated = np.zeros((v, k), dtype=np.int64)
    n_sweeps = 0
    topics = range(k)
    for sweep in range(cfg.gibbs_iters):
        uniforms = rng.random(n_tokens).tolist()
        for t in range(n_tokens):
            w = word_of[t]
            d = doc_of[t]
            old = z[t]
            row_w = n_wk[w]
            row_d = n_dk[d]
            row_w[old] -= 1
            row_d[old] -= 1
            n_k[old] -= 1
            total = 0.0
            probs = [0.0] * k
            for kk in topics:
                p = (row_w[kk] + beta) / (n_k[kk] + v_beta) * (row_d[kk] + alpha)
                total += p
                probs[kk] = total
            u = uniforms[t] * total
            new = 0
            while probs[new] <= u and new < k - 1:
                new += 1
            z[t] = new
            row_w[new] += 1
            row_d[new] += 1
            n_k[new] += 1
        if sweep >= cfg.burn_in:
            accumulated += np.asarray(n_wk, dtype=np.int64)
            n_sweeps += 1
    if n_sweeps == 0:  # all sweeps were burn-in; fall back to the final state
        accumulated = np.asarray(n_wk, dtype=np.int64)
        n_sweeps = 1

    model = LdaModel(vocab, accumulated, n_sweeps, cfg)
    model.assignments = list(z)
    return model
