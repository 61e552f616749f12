"""Shared machinery for the five text-embedding trainers.

Every trainer produces a :class:`TextEmbeddingModel`: a word-vector table
over a vocabulary plus method-specific state, supporting word and document
embeddings into the joint D-dimensional space. Training is single-threaded
and bit-reproducible given (corpus, config, seed).
"""

from __future__ import annotations

import numpy as np

from ..corpus import Document, Vocabulary, build_vocabulary, tfidf_weights
from ..errors import AllOOVError, OOVWordError, UnsupportedAggregationError


def sigmoid(x):
    """Numerically stable logistic function."""
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softplus(x):
    """log(1 + exp(x)) without overflow."""
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def negative_sampling_loss(h, target_vecs, labels):
    """Loss and gradients of the negative-sampling objective at input h.

    The objective for one example is
        -sum_t [ l_t * log sigma(v_t . h) + (1 - l_t) * log sigma(-v_t . h) ]
    over target rows v_t with binary labels l_t (1 = observed word,
    0 = noise word). Returns (loss, dL/dh, dL/dtargets).
    """
    z = target_vecs @ h
    loss = float(np.sum(labels * softplus(-z) + (1.0 - labels) * softplus(z)))
    g = sigmoid(z) - labels
    grad_h = g @ target_vecs
    grad_targets = g[:, None] * h[None, :]
    return loss, grad_h, grad_targets


def unigram_noise_cumulative(vocab: Vocabulary, power: float = 0.75) -> np.ndarray:
    """Cumulative noise distribution over vocab indices, proportional to count^power."""
    freq = np.array([vocab.counts[t] for t in vocab.tokens], dtype=np.float64)
    return np.cumsum(freq**power)


def draw_negatives(rng, cumulative, count, exclude):
    """Draw ``count`` noise word indices, dropping any equal to ``exclude``.

    Always consumes exactly ``count`` uniforms so the random stream does not
    depend on collisions.
    """
    picks = np.searchsorted(cumulative, rng.random(count) * cumulative[-1], side="right")
    return [int(p) for p in picks if p != exclude]


def linear_decay(initial_lr: float, position: int, total: int) -> float:
    """Learning rate decaying linearly from initial_lr to initial_lr/100."""
    if total <= 0:
        return initial_lr
    return initial_lr * (1.0 - 0.99 * position / total)


def corpus_token_ids(docs, vocab: Vocabulary) -> list[list[int]]:
    """Map documents to lists of in-vocabulary token indices (OOV dropped)."""
    ids = []
    for doc in docs:
        tokens = doc.tokens if isinstance(doc, Document) else doc
        ids.append([vocab.index[t] for t in tokens if t in vocab.index])
    return ids


def resolve_vocab(docs, min_count, vocab):
    return vocab if vocab is not None else build_vocabulary(docs, min_count=min_count)


class TextEmbeddingModel:
    """Trained vectorizer mapping words and documents to the joint space."""

    method = "base"

    def __init__(self, dim: int, vocab: Vocabulary, vectors: np.ndarray, config: dict):
        self.dim = dim
        self.vocab = vocab
        self.vectors = vectors  # (|V|, dim) float32, per-method meaning
        self.config = dict(config)

    def word_vector(self, token: str) -> np.ndarray:
        """Return the token's vector, raising OOVWordError when unknown."""
        idx = self.vocab.index.get(token)
        if idx is None:
            raise OOVWordError(f"{token!r} is not in the {self.method} vocabulary")
        return self.vectors[idx].astype(np.float64)

    def embed_word(self, token: str) -> np.ndarray:
        return self.word_vector(token)

    def can_embed(self, token: str) -> bool:
        return token in self.vocab.index

    def embed_document(self, tokens, aggregation: str = "mean", doc_id=None) -> np.ndarray:
        """Aggregate token vectors into one document embedding.

        ``mean`` averages over embeddable tokens (OOV skipped);
        ``tfidf_mean`` weights unique tokens by corpus-level tf-idf,
        renormalized over the embeddable subset; ``native`` defers to
        method-specific inference (LDA fold-in, Doc2Vec inference).
        """
        tokens = list(tokens)
        if aggregation == "native":
            return self.native_document(tokens, doc_id=doc_id)
        if aggregation == "mean":
            vecs = [self.embed_word(t) for t in tokens if self.can_embed(t)]
            if not vecs:
                raise AllOOVError("no embeddable token in document")
            return np.mean(vecs, axis=0)
        if aggregation == "tfidf_mean":
            weights = tfidf_weights(tokens, self.vocab)  # raises AllOOVError
            out = np.zeros(self.dim, dtype=np.float64)
            for tok, w in weights.items():
                if w > 0.0:
                    out += w * self.embed_word(tok)
            return out
        raise UnsupportedAggregationError(f"unknown aggregation {aggregation!r}")

    def native_document(self, tokens, doc_id=None) -> np.ndarray:
        raise UnsupportedAggregationError(
            f"{self.method} supports only word-level aggregation (mean, tfidf_mean)"
        )
