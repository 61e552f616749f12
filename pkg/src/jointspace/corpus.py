"""Caption corpus handling: tokenization, vocabulary, tf-idf, dataset IO.

A dataset pairs captioned documents with fixed-size image feature vectors.
Records live in a JSON-lines text file (fields ``id``, ``caption``,
optional ``tags``); features live in a binary ``FEAT`` sidecar keyed by id.
"""

from __future__ import annotations

import json
import math
import re
import struct
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AllOOVError,
    DatasetFormatError,
    DimensionMismatchError,
    DuplicateIdError,
    EmptyVocabularyError,
)

FEAT_MAGIC = b"FEAT"
FEAT_VERSION = 1

_URL_RE = re.compile(r"https?://\S*")


def tokenize(raw: str) -> list[str]:
    """Split caption text into lowercase alphanumeric tokens.

    Lowercases, drops http(s) URLs up to the next whitespace, strips
    leading '#'/'@' from words, and treats every remaining character that
    is not a letter or digit as a separator. Token order is preserved.
    """
    text = _URL_RE.sub(" ", raw.lower())
    tokens = []
    for word in text.split():
        word = word.lstrip("#@")
        cleaned = "".join(c if c.isalnum() else " " for c in word)
        tokens.extend(cleaned.split())
    return tokens


@dataclass(frozen=True)
class Document:
    """One caption with its id and optional ground-truth concept tags."""

    id: str
    raw: str
    tokens: tuple[str, ...]
    tags: frozenset[str] = field(default_factory=frozenset)

    @classmethod
    def from_raw(cls, doc_id: str, raw: str, tags=()) -> "Document":
        return cls(id=doc_id, raw=raw, tokens=tuple(tokenize(raw)), tags=frozenset(tags))


class Vocabulary:
    """Token index with corpus frequencies and document frequencies.

    Indices are dense in ``[0, len(vocab))``, assigned by descending corpus
    frequency with lexicographic tie-break, so the assignment is invariant
    under document order.
    """

    def __init__(self, counts: dict[str, int], doc_freq: dict[str, int], n_docs: int):
        order = sorted(counts, key=lambda t: (-counts[t], t))
        self.index = {tok: i for i, tok in enumerate(order)}
        self.tokens = order
        self.counts = dict(counts)
        self.doc_freq = dict(doc_freq)
        self.n_docs = n_docs

    def __len__(self):
        return len(self.index)

    def __contains__(self, token):
        return token in self.index

    def idf(self, token: str) -> float:
        """Smoothed inverse document frequency: ln((1+N)/(1+df)) + 1."""
        return math.log((1 + self.n_docs) / (1 + self.doc_freq[token])) + 1.0


def build_vocabulary(docs, min_count: int = 20) -> Vocabulary:
    """Count tokens over ``docs`` and keep those seen at least ``min_count`` times."""
    if not docs:
        raise EmptyVocabularyError("cannot build a vocabulary from an empty corpus")
    counts = Counter()
    doc_freq = Counter()
    n_docs = 0
    for doc in docs:
        tokens = doc.tokens if isinstance(doc, Document) else doc
        counts.update(tokens)
        doc_freq.update(set(tokens))
        n_docs += 1
    kept = {t: c for t, c in counts.items() if c >= min_count}
    if not kept:
        raise EmptyVocabularyError(
            f"no token reaches min_count={min_count} (max observed count: "
            f"{max(counts.values(), default=0)})"
        )
    return Vocabulary(kept, {t: doc_freq[t] for t in kept}, n_docs)


def tfidf_weights(tokens, vocab: Vocabulary) -> dict[str, float]:
    """Per-token tf-idf weights for one document, rescaled to sum to 1.

    Out-of-vocabulary tokens are present with weight 0; the normalization
    runs over the in-vocabulary tokens only.
    """
    tf = Counter(tokens)
    raw = {t: (tf[t] * vocab.idf(t) if t in vocab else 0.0) for t in tf}
    total = sum(raw.values())
    if total <= 0.0:
        raise AllOOVError("document has no in-vocabulary token")
    return {t: w / total for t, w in raw.items()}


class PairDataset:
    """Documents plus one image feature vector per document id."""

    def __init__(self, documents: list[Document], features: dict[str, np.ndarray]):
        dims = {f.shape[0] for f in features.values()}
        if len(dims) > 1:
            raise DimensionMismatchError(f"feature vectors have mixed dimensions: {sorted(dims)}")
        seen = set()
        for doc in documents:
            if doc.id in seen:
                raise DuplicateIdError(f"duplicate document id: {doc.id!r}")
            seen.add(doc.id)
            if doc.id not in features:
                raise DatasetFormatError(f"no feature vector for id {doc.id!r}")
        self.documents = list(documents)
        self.features = features
        self.feature_dim = dims.pop() if dims else 0

    def __len__(self):
        return len(self.documents)

    def __getitem__(self, i) -> Document:
        return self.documents[i]

    def feature_matrix(self) -> np.ndarray:
        """Features stacked in document order, shape (n, F)."""
        return np.stack([self.features[d.id] for d in self.documents])


def write_features(path, ids, vectors) -> None:
    """Write the binary FEAT sidecar (little-endian f32 rows keyed by id)."""
    vectors = np.asarray(vectors, dtype=np.float32)
    with open(path, "wb") as fh:
        fh.write(FEAT_MAGIC)
        fh.write(struct.pack("<III", FEAT_VERSION, len(ids), vectors.shape[1]))
        for doc_id, vec in zip(ids, vectors):
            encoded = doc_id.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(vec.tobytes())


def read_features(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != FEAT_MAGIC:
            raise DatasetFormatError(f"bad feature file magic: {magic!r}")
        version, count, dim = struct.unpack("<III", fh.read(12))
        if version != FEAT_VERSION:
            raise DatasetFormatError(f"unsupported feature file version {version}")
        features = {}
        for _ in range(count):
            (id_len,) = struct.unpack("<I", fh.read(4))
            doc_id = fh.read(id_len).decode("utf-8")
            buf = fh.read(4 * dim)
            if len(buf) != 4 * dim:
                raise DatasetFormatError(f"truncated feature record for id {doc_id!r}")
            if doc_id in features:
                raise DuplicateIdError(f"duplicate id in feature file: {doc_id!r}")
            features[doc_id] = np.frombuffer(buf, dtype="<f4").astype(np.float32)
    return features


def save_pairs(ds: PairDataset, records_path, features_path) -> None:
    """Write a dataset as JSON-lines records plus a FEAT sidecar."""
    with open(records_path, "w", encoding="utf-8") as fh:
        for doc in ds.documents:
            rec = {"id": doc.id, "caption": doc.raw}
            if doc.tags:
                rec["tags"] = sorted(doc.tags)
            fh.write(json.dumps(rec) + "\n")
    write_features(features_path, [d.id for d in ds.documents], ds.feature_matrix())


def load_pairs(records_path, features_path) -> PairDataset:
    """Load and validate a dataset from its record file and FEAT sidecar."""
    features = read_features(features_path)
    dim = next(iter(features.values())).shape[0] if features else 0
    documents = []
    seen = set()
    with open(records_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(f"malformed record: {exc}", line=lineno) from exc
            if not isinstance(rec, dict) or "id" not in rec or "caption" not in rec:
                raise DatasetFormatError("record needs 'id' and 'caption' fields", line=lineno)
            doc_id = str(rec["id"])
            if doc_id in seen:
                raise DuplicateIdError(f"duplicate id {doc_id!r} at line {lineno}")
            seen.add(doc_id)
            if doc_id not in features:
                raise DatasetFormatError(f"no feature vector for id {doc_id!r}", line=lineno)
            if features[doc_id].shape[0] != dim:
                raise DimensionMismatchError(
                    f"feature for id {doc_id!r} has dimension "
                    f"{features[doc_id].shape[0]}, expected {dim}"
                )
            documents.append(Document.from_raw(doc_id, str(rec["caption"]), rec.get("tags", ())))
    extra = set(features) - seen
    if extra:
        raise DatasetFormatError(f"feature file has ids absent from records: {sorted(extra)[:5]}")
    return PairDataset(documents, features)


def inject_caption_noise(ds: PairDataset, fraction: float, seed: int) -> PairDataset:
    """Replace round(fraction * n) captions by captions of other documents.

    Victims are drawn uniformly without replacement; each victim receives
    the caption of a uniformly drawn donor other than itself. Features and
    tags are untouched. Deterministic given ``seed``.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    n = len(ds)
    n_replace = int(math.floor(fraction * n + 0.5))
    if n_replace == 0:
        return PairDataset(list(ds.documents), ds.features)
    if n < 2:
        raise ValueError("need at least 2 documents to swap captions")
    rng = np.random.default_rng(seed)
    victims = rng.choice(n, size=n_replace, replace=False)
    docs = list(ds.documents)
    for v in victims:
        donor = int(rng.integers(0, n - 1))
        if donor >= v:
            donor += 1
        src = ds.documents[donor]
        old = docs[v]
        docs[v] = Document(id=old.id, raw=src.raw, tokens=src.tokens, tags=old.tags)
    return PairDataset(docs, ds.features)


def generate_synthetic(
    num_concepts: int,
    docs_per_concept: int,
    feature_dim: int,
    noise_sigma: float = 0.05,
    seed: int = 0,
    words_per_concept: int = 8,
) -> PairDataset:
    """Desk-scale stand-in corpus with known concept structure.

    Concept ``k`` owns a disjoint vocabulary headed by the word
    ``concept{k}`` (which doubles as its tag, so class-name queries are
    trainable). Each document draws 3-8 words from its concept vocabulary;
    its feature vector is a fixed random linear image of the concept
    one-hot plus Gaussian noise.
    """
    if num_concepts < 2:
        raise ValueError("need at least 2 concepts")
    if docs_per_concept < 1:
        raise ValueError("need at least 1 document per concept")
    if feature_dim < num_concepts:
        raise ValueError("feature_dim must be >= num_concepts")
    if words_per_concept < 5:
        raise ValueError("each concept vocabulary needs at least 5 words")
    rng = np.random.default_rng(seed)
    mixing = rng.normal(size=(feature_dim, num_concepts))
    concept_words = [
        [f"concept{k}"] + [f"c{k}w{j}" for j in range(words_per_concept - 1)]
        for k in range(num_concepts)
    ]
    documents = []
    features = {}
    idx = 0
    for k in range(num_concepts):
        words = concept_words[k]
        for _ in range(docs_per_concept):
            length = int(rng.integers(3, 9))
            picks = rng.integers(0, len(words), size=length)
            raw = " ".join(words[p] for p in picks)
            noise = rng.normal(size=feature_dim)
            doc_id = f"img{idx:05d}"
            documents.append(Document.from_raw(doc_id, raw, tags=(f"concept{k}",)))
            features[doc_id] = (mixing[:, k] + noise_sigma * noise).astype(np.float64)
            idx += 1
    return PairDataset(documents, features)
