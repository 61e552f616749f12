"""Binary model and index containers.

Model file ("JTIE"): magic, version, method tag (1=word2vec, 2=glove,
3=lda, 4=doc2vec, 5=fasttext, 6=regressor), output dimension, then for
text models a vocabulary block, the float32 word-vector table, the
training-config snapshot, and a method-specific state block; the
regressor instead stores a layer-shape header with float64 parameters.

Index file ("JIDX"): magic, version, dimension, count, id table, and the
unit-normalized float32 row matrix exactly as the index holds it, so a
reloaded index reproduces rankings bit for bit.

All integers are little-endian; strings are length-prefixed UTF-8.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .corpus import Vocabulary
from .errors import DatasetFormatError
from .retrieval import EmbeddingIndex
from .regressor import RegressorConfig, VisualRegressor
from .textemb import (
    Doc2VecConfig,
    Doc2VecModel,
    FastTextConfig,
    FastTextModel,
    GloveConfig,
    GloveModel,
    LdaConfig,
    LdaModel,
    Word2VecConfig,
    Word2VecModel,
)

JTIE_MAGIC = b"JTIE"
JIDX_MAGIC = b"JIDX"
FORMAT_VERSION = 1

METHOD_TAGS = {"word2vec": 1, "glove": 2, "lda": 3, "doc2vec": 4, "fasttext": 5, "regressor": 6}
TAG_METHODS = {v: k for k, v in METHOD_TAGS.items()}


def _w_u8(fh, value):
    fh.write(struct.pack("<B", value))


def _w_u32(fh, value):
    fh.write(struct.pack("<I", value))


def _w_u64(fh, value):
    fh.write(struct.pack("<Q", value))


def _w_f64(fh, value):
    fh.write(struct.pack("<d", value))


def _w_str(fh, text):
    data = text.encode("utf-8")
    _w_u32(fh, len(data))
    fh.write(data)


def _w_mat(fh, array, dtype):
    np.ascontiguousarray(array, dtype=dtype).tofile(fh)


def _r_exact(fh, count):
    data = fh.read(count)
    if len(data) != count:
        raise DatasetFormatError("truncated model file")
    return data


def _r_u8(fh):
    return struct.unpack("<B", _r_exact(fh, 1))[0]


def _r_u32(fh):
    return struct.unpack("<I", _r_exact(fh, 4))[0]


def _r_u64(fh):
    return struct.unpack("<Q", _r_exact(fh, 8))[0]


def _r_f64(fh):
    return struct.unpack("<d", _r_exact(fh, 8))[0]


def _r_str(fh):
    return _r_exact(fh, _r_u32(fh)).decode("utf-8")


def _r_mat(fh, shape, dtype):
    count = int(np.prod(shape)) if shape else 0
    flat = np.fromfile(fh, dtype=dtype, count=count)
    if flat.size != count:
        raise DatasetFormatError("truncated model file")
    return flat.reshape(shape)


def _write_vocab(fh, vocab: Vocabulary):
    _w_u32(fh, len(vocab))
    _w_u64(fh, vocab.n_docs)
    for token in vocab.tokens:
        _w_str(fh, token)
        _w_u64(fh, vocab.counts[token])
        _w_u64(fh, vocab.doc_freq[token])


def _read_vocab(fh) -> Vocabulary:
    size = _r_u32(fh)
    n_docs = _r_u64(fh)
    counts = {}
    doc_freq = {}
    for _ in range(size):
        token = _r_str(fh)
        counts[token] = _r_u64(fh)
        doc_freq[token] = _r_u64(fh)
    return Vocabulary(counts, doc_freq, n_docs)


def _write_config(fh, config: dict):
    _w_str(fh, json.dumps(config, sort_keys=True))


def _read_config(fh) -> dict:
    return json.loads(_r_str(fh))


def save_model(path, model) -> None:
    """Write a text-embedding model or visual regressor to a JTIE file."""
    if isinstance(model, VisualRegressor):
        with open(path, "wb") as fh:
            fh.write(JTIE_MAGIC)
            _w_u32(fh, FORMAT_VERSION)
            _w_u8(fh, METHOD_TAGS["regressor"])
            _w_u32(fh, model.output_dim)
            _w_u32(fh, len(model.weights))
            for w in model.weights:
                _w_u32(fh, w.shape[0])
                _w_u32(fh, w.shape[1])
            for w, b in zip(model.weights, model.biases):
                _w_mat(fh, w, "<f8")
                _w_mat(fh, b, "<f8")
            _w_u64(fh, model.iteration)
            cfg = dict(model.cfg.__dict__)
            cfg["hidden_dims"] = list(cfg["hidden_dims"])
            _write_config(fh, cfg)
        return

    tag = METHOD_TAGS.get(getattr(model, "method", None))
    if tag is None or tag == 6:
        raise ValueError(f"cannot serialize object of type {type(model).__name__}")
    with open(path, "wb") as fh:
        fh.write(JTIE_MAGIC)
        _w_u32(fh, FORMAT_VERSION)
        _w_u8(fh, tag)
        _w_u32(fh, model.dim)
        _write_vocab(fh, model.vocab)
        _w_mat(fh, model.vectors, "<f4")
        _write_config(fh, model.config)
        if model.method == "lda":
            _w_u32(fh, model.k_topics)
            _w_f64(fh, model.alpha)
            _w_f64(fh, model.beta)
            _w_u64(fh, model.n_sweeps)
            _w_mat(fh, model.topic_word_counts, "<i8")
        elif model.method == "doc2vec":
            _w_u64(fh, len(model.doc_ids))
            for doc_id in model.doc_ids:
                _w_str(fh, doc_id)
            _w_mat(fh, model.doc_vectors, "<f4")
            _w_mat(fh, model.w_out, "<f4")
        elif model.method == "fasttext":
            _w_u32(fh, model.ngram_min)
            _w_u32(fh, model.ngram_max)
            _w_u64(fh, model.buckets)
            _w_mat(fh, model.ngram_vectors, "<f4")


def load_model(path):
    """Read back anything save_model wrote; the tag selects the type."""
    with open(path, "rb") as fh:
        if _r_exact(fh, 4) != JTIE_MAGIC:
            raise DatasetFormatError("not a JTIE model file (bad magic)")
        version = _r_u32(fh)
        if version != FORMAT_VERSION:
            raise DatasetFormatError(f"unsupported model format version {version}")
        tag = _r_u8(fh)
        method = TAG_METHODS.get(tag)
        if method is None:
            raise DatasetFormatError(f"unknown method tag {tag}")
        dim = _r_u32(fh)

        if method == "regressor":
            n_layers = _r_u32(fh)
            shapes = [(_r_u32(fh), _r_u32(fh)) for _ in range(n_layers)]
            weights = []
            biases = []
            for fan_in, fan_out in shapes:
                weights.append(_r_mat(fh, (fan_in, fan_out), "<f8"))
                biases.append(_r_mat(fh, (fan_out,), "<f8"))
            iteration = _r_u64(fh)
            cfg_dict = _read_config(fh)
            cfg_dict["hidden_dims"] = tuple(cfg_dict["hidden_dims"])
            model = VisualRegressor(RegressorConfig(**cfg_dict))
            model.weights = weights
            model.biases = biases
            model.vel_w = [np.zeros_like(w) for w in weights]
            model.vel_b = [np.zeros_like(b) for b in biases]
            model.iteration = iteration
            return model

        vocab = _read_vocab(fh)
        vectors = _r_mat(fh, (len(vocab), dim), "<f4")
        config = _read_config(fh)

        if method == "word2vec":
            return Word2VecModel(dim, vocab, vectors, Word2VecConfig(**config).__dict__)
        if method == "glove":
            return GloveModel(dim, vocab, vectors, GloveConfig(**config).__dict__)
        if method == "lda":
            k = _r_u32(fh)
            alpha = _r_f64(fh)
            beta = _r_f64(fh)
            n_sweeps = _r_u64(fh)
            counts = _r_mat(fh, (len(vocab), k), "<i8")
            cfg = LdaConfig(**config)
            model = LdaModel(vocab, counts, n_sweeps, cfg)
            if abs(model.alpha - alpha) > 1e-12 or abs(model.beta - beta) > 1e-12:
                raise DatasetFormatError("lda hyperparameters disagree with config snapshot")
            return model
        if method == "doc2vec":
            n_docs = _r_u64(fh)
            doc_ids = [_r_str(fh) for _ in range(n_docs)]
            doc_vectors = _r_mat(fh, (n_docs, dim), "<f4")
            w_out = _r_mat(fh, (len(vocab), dim), "<f4")
            return Doc2VecModel(vocab, vectors, doc_ids, doc_vectors, w_out, Doc2VecConfig(**config))
        # fasttext
        ngram_min = _r_u32(fh)
        ngram_max = _r_u32(fh)
        buckets = _r_u64(fh)
        table = _r_mat(fh, (buckets, dim), "<f4")
        cfg = FastTextConfig(**config)
        if (cfg.ngram_min, cfg.ngram_max, cfg.buckets) != (ngram_min, ngram_max, buckets):
            raise DatasetFormatError("fasttext n-gram header disagrees with config snapshot")
        return FastTextModel(vocab, vectors, table, cfg)


def save_index(path, index: EmbeddingIndex) -> None:
    with open(path, "wb") as fh:
        fh.write(JIDX_MAGIC)
        _w_u32(fh, FORMAT_VERSION)
        _w_u32(fh, index.dim)
        _w_u64(fh, len(index))
        for item_id in index.ids:
            _w_str(fh, item_id)
        _w_mat(fh, index.matrix, "<f4")


def load_index(path) -> EmbeddingIndex:
    with open(path, "rb") as fh:
        if _r_exact(fh, 4) != JIDX_MAGIC:
            raise DatasetFormatError("not a JIDX index file (bad magic)")
        version = _r_u32(fh)
        if version != FORMAT_VERSION:
            raise DatasetFormatError(f"unsupported index format version {version}")
        dim = _r_u32(fh)
        count = _r_u64(fh)
        ids = [_r_str(fh) for _ in range(count)]
        matrix = _r_mat(fh, (count, dim), "<f4")
    return EmbeddingIndex.from_normalized(ids, matrix)
