"""Word2Vec: CBOW with negative sampling, trained from scratch.

The averaged context window predicts the center word against noise words
drawn from the unigram distribution raised to 0.75. The learning rate
decays linearly from its initial value to 1% of it across all token
positions of all epochs.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from ..errors import EmptyVocabularyError
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
class Word2VecConfig:
    dim: int = 400
    window: int = 5
    negatives: int = 5
    epochs: int = 15
    initial_lr: float = 0.025
    subsample_t: float = 0.0  # 0 disables frequent-word subsampling
    min_count: int = 1
    seed: int = 0


class Word2VecModel(TextEmbeddingModel):
    method = "word2vec"


def train_word2vec(docs, cfg: Word2VecConfig | None = None, vocab=None) -> Word2VecModel:
    cfg = cfg or Word2VecConfig()
    vocab = resolve_vocab(docs, cfg.min_count, vocab)
    doc_ids = corpus_token_ids(docs, vocab)
    total_tokens = sum(len(d) for d in doc_ids)
    if total_tokens == 0:
        raise EmptyVocabularyError("corpus has no in-vocabulary token")

    rng = np.random.default_rng(cfg.seed)
    dim = cfg.dim
    w_in = rng.uniform(-0.5 / dim, 0.5 / dim, size=(len(vocab), dim))
    w_out = np.zeros((len(vocab), dim))
    noise = unigram_noise_cumulative(vocab)

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
            n = len(ids)
            for i, center in enumerate(ids):
                lr = linear_decay(cfg.initial_lr, position, total_positions)
                position += 1
                ctx = ids[max(0, i - cfg.window) : i] + ids[i + 1 : i + cfg.window + 1]
                if not ctx:
                    continue
                negs = draw_negatives(rng, noise, cfg.negatives, exclude=center)
                targets = np.array([center] + negs)
                labels = np.zeros(len(targets))
                labels[0] = 1.0
                h = w_in[ctx].mean(axis=0)
                loss, grad_h, grad_targets = negative_sampling_loss(h, w_out[targets], labels)
                np.subtract.at(w_out, targets, lr * grad_targets)
                np.subtract.at(w_in, ctx, (lr / len(ctx)) * grad_h)
                loss_sum += loss
                examples += 1
        epoch_losses.append(loss_sum / max(examples, 1))
    model = Word2VecModel(dim, vocab, w_in.astype(np.float32), asdict(cfg))
    model.train_loss = epoch_losses
    return model
