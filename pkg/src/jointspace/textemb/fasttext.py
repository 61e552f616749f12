"""FastText: skip-gram over subword-composed input vectors.

A word's input vector is its whole-word vector plus the sum of hashed
character n-gram vectors of the word wrapped in boundary markers, so
words unseen at training time still embed from their n-grams alone.
N-grams index into a fixed-size bucket table through a 32-bit FNV-1a
hash. Bucket rows start at zero: untouched buckets contribute nothing,
and the (large) default table stays unmaterialized until written to.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from ..errors import EmptyVocabularyError, OOVWordError
from .base import (
    TextEmbeddingModel,
    corpus_token_ids,
    draw_negatives,
    linear_decay,
    negative_sampling_loss,
    resolve_vocab,
    unigram_noise_cumulative,
)

FNV_OFFSET = 2166136261
FNV_PRIME = 16777619


def fnv1a(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & 0xFFFFFFFF
    return h


def char_ngrams(word: str, ngram_min: int, ngram_max: int) -> list[str]:
    """Character n-grams of '<word>' with lengths in [ngram_min, ngram_max]."""
    s = "<" + word + ">"
    return [
        s[i : i + n]
        for n in range(ngram_min, ngram_max + 1)
        for i in range(len(s) - n + 1)
    ]


def ngram_buckets(word: str, ngram_min: int, ngram_max: int, buckets: int) -> list[int]:
    return [
        fnv1a(g.encode("utf-8")) % buckets
        for g in char_ngrams(word, ngram_min, ngram_max)
    ]


@dataclass
class FastTextConfig:
    dim: int = 400
    window: int = 5
    negatives: int = 5
    ngram_min: int = 3
    ngram_max: int = 6
    buckets: int = 2**20
    epochs: int = 15
    initial_lr: float = 0.025
    subsample_t: float = 0.0  # 0 disables frequent-word subsampling
    min_count: int = 1
    seed: int = 0


class FastTextModel(TextEmbeddingModel):
    """Text embedder whose word vectors compose from subword n-grams."""

    method = "fasttext"

    def __init__(self, vocab, word_vectors, ngram_vectors, cfg: FastTextConfig):
        super().__init__(word_vectors.shape[1], vocab, word_vectors, asdict(cfg))
        self.ngram_vectors = ngram_vectors  # (buckets, dim) float32
        self.ngram_min = cfg.ngram_min
        self.ngram_max = cfg.ngram_max
        self.buckets = cfg.buckets

    def ngram_sum(self, token: str) -> np.ndarray:
        ids = ngram_buckets(token, self.ngram_min, self.ngram_max, self.buckets)
        return self.ngram_vectors[ids].astype(np.float64).sum(axis=0)

    def word_vector(self, token: str) -> np.ndarray:
        """Known words add their whole-word vector; OOV words embed from n-grams."""
        if not token:
            raise OOVWordError("cannot embed an empty token")
        out = self.ngram_sum(token)
        idx = self.vocab.index.get(token)
        if idx is not None:
            out = out + self.vectors[idx].astype(np.float64)
        return out

    def can_embed(self, token: str) -> bool:
        return bool(token)


def train_fasttext(docs, cfg: FastTextConfig | None = None, vocab=None) -> FastTextModel:
    cfg = cfg or FastTextConfig()
    if cfg.ngram_min > cfg.ngram_max:
        raise ValueError("ngram_min must not exceed ngram_max")
    if cfg.buckets < 1:
        raise ValueError("buckets must be >= 1")
    vocab = resolve_vocab(docs, cfg.min_count, vocab)
    doc_ids = corpus_token_ids(docs, vocab)
    total_tokens = sum(len(d) for d in doc_ids)
    if total_tokens == 0:
        raise EmptyVocabularyError("corpus has no in-vocabulary token")

    rng = np.random.default_rng(cfg.seed)
    dim = cfg.dim
    w_word = rng.uniform(-0.5 / dim, 0.5 / dim, size=(len(vocab), dim))
    w_ngram = np.zeros((cfg.buckets, dim))
    w_out = np.zeros((len(vocab), dim))
    noise = unigram_noise_cumulative(vocab)
    subwords = [
        ngram_buckets(t, cfg.ngram_min, cfg.ngram_max, cfg.buckets)
        for t in vocab.tokens
    ]

    keep_prob = None
    if cfg.subsample_t > 0.0:
        freq = np.array([vocab.counts[t] for t in vocab.tokens], dtype=np.float64)
        ratio = cfg.subsample_t / (freq / freq.sum())
        keep_prob = np.minimum(1.0, np.sqrt(ratio))

    total_positions = cfg.epochs * total_tokens
    position = 0
    epoch_losses = []
    for _ in range(cfg.epochs):
        loss_sum = 0.0
        examples = 0
        for ids in doc_ids:
            if keep_prob is not None:
                ids = [w for w in ids if rng.random() < keep_prob[w]]
            for i, center in enumerate(ids):
                lr = linear_decay(cfg.initial_lr, position, total_positions)
                position += 1
                ctx = ids[max(0, i - cfg.window) : i] + ids[i + 1 : i + cfg.window + 1]
                if not ctx:
                    continue
                grams = subwords[center]
                for out_word in ctx:
                    h = w_word[center] + w_ngram[grams].sum(axis=0)
                    negs = draw_negatives(rng, noise, cfg.negatives, exclude=out_word)
                    targets = np.array([out_word] + negs)
                    labels = np.zeros(len(targets))
                    labels[0] = 1.0
                    loss, grad_h, grad_t = negative_sampling_loss(h, w_out[targets], labels)
                    np.subtract.at(w_out, targets, lr * grad_t)
                    w_word[center] -= lr * grad_h
                    np.subtract.at(w_ngram, grams, lr * grad_h)
                    loss_sum += loss
                    examples += 1
        epoch_losses.append(loss_sum / max(examples, 1))

    # Copy only buckets some vocabulary word touches: the zero remainder of
    # the default-size table then never takes real memory.
    w_ngram32 = np.zeros((cfg.buckets, dim), dtype=np.float32)
    touched = sorted({g for lst in subwords for g in lst})
    if touched:
        w_ngram32[touched] = w_ngram[touched].astype(np.float32)
    model = FastTextModel(vocab, w_word.astype(np.float32), w_ngram32, cfg)
    model.train_loss = epoch_losses
    return model
