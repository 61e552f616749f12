"""Five from-scratch text embedding methods sharing one model interface."""

from .base import TextEmbeddingModel, negative_sampling_loss, sigmoid, softplus
from .word2vec import Word2VecConfig, Word2VecModel, train_word2vec
from .glove import GloveConfig, GloveModel, train_glove
from .lda import LdaConfig, LdaModel, train_lda
from .doc2vec import Doc2VecConfig, Doc2VecModel, train_doc2vec
from .fasttext import FastTextConfig, FastTextModel, train_fasttext

TRAINERS = {
    "word2vec": (Word2VecConfig, train_word2vec),
    "glove": (GloveConfig, train_glove),
    "lda": (LdaConfig, train_lda),
    "doc2vec": (Doc2VecConfig, train_doc2vec),
    "fasttext": (FastTextConfig, train_fasttext),
}

__all__ = [
    "TextEmbeddingModel",
    "negative_sampling_loss",
    "sigmoid",
    "softplus",
    "Word2VecConfig",
    "Word2VecModel",
    "train_word2vec",
    "GloveConfig",
    "GloveModel",
    "train_glove",
    "LdaConfig",
    "LdaModel",
    "train_lda",
    "Doc2VecConfig",
    "Doc2VecModel",
    "train_doc2vec",
    "FastTextConfig",
    "FastTextModel",
    "train_fasttext",
    "TRAINERS",
]
