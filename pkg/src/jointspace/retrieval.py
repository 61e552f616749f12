"""Cosine-similarity retrieval over the joint embedding space.

The index stores unit-normalized rows, so a search is one matrix-vector
product followed by an exact sort. Nearest means maximum cosine
similarity (equivalently minimum cosine distance 1 - cos). Queries may
combine several terms, each unit-normalized then weighted, so text and
image terms mix on comparable scales and negative weights subtract
concepts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DuplicateIdError, ZeroVectorError

NORM_EPS = 1e-12


def _unit(vec: np.ndarray, what: str) -> np.ndarray:
    v = np.asarray(vec, dtype=np.float64)
    n = float(np.linalg.norm(v))
    if n < NORM_EPS:
        raise ZeroVectorError(f"{what} has zero norm")
    return v / n


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dims differ: {a.shape} vs {b.shape}")
    return float(_unit(a, "first vector") @ _unit(b, "second vector"))


@dataclass
class RankedResult:
    ids: list[str]
    scores: list[float]

    def __iter__(self):
        return iter(zip(self.ids, self.scores))

    def __len__(self):
        return len(self.ids)


class EmbeddingIndex:
    """Immutable exhaustive index; rows are stored L2-normalized."""

    def __init__(self, ids, vectors):
        ids = [str(i) for i in ids]
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise DimensionMismatchError("vectors must form a 2-d matrix")
        if len(ids) != vectors.shape[0]:
            raise DimensionMismatchError(
                f"{len(ids)} ids but {vectors.shape[0]} vectors"
            )
        norms = np.linalg.norm(vectors, axis=1)
        bad = np.nonzero(norms < NORM_EPS)[0]
        if bad.size:
            raise ZeroVectorError(f"zero vector for id {ids[int(bad[0])]!r}")
        # float32 is the canonical stored form, so saving and reloading an
        # index reproduces scores (hence rankings) bit for bit
        self._finish(ids, (vectors / norms[:, None]).astype(np.float32))

    def _finish(self, ids, matrix32):
        if len(set(ids)) != len(ids):
            seen = set()
            dup = next(i for i in ids if i in seen or seen.add(i))
            raise DuplicateIdError(f"duplicate id {dup!r}")
        self.ids = tuple(ids)
        self.dim = int(matrix32.shape[1])
        self.matrix = matrix32
        self.matrix.setflags(write=False)
        # tie-break ranks: position of each row in lexicographic id order
        self._lex_rank = np.empty(len(ids), dtype=np.int64)
        self._lex_rank[np.argsort(np.array(self.ids))] = np.arange(len(ids))

    @classmethod
    def from_normalized(cls, ids, matrix32):
        """Rebuild from already-normalized float32 rows without re-dividing."""
        index = cls.__new__(cls)
        matrix32 = np.ascontiguousarray(matrix32, dtype=np.float32)
        norms = np.linalg.norm(matrix32.astype(np.float64), axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-5):
            raise ZeroVectorError("stored index rows are not unit-normalized")
        index._finish([str(i) for i in ids], matrix32)
        return index

    def __len__(self):
        return len(self.ids)


def build_index(ids, vectors) -> EmbeddingIndex:
    return EmbeddingIndex(ids, vectors)


def search(index: EmbeddingIndex, query_vec, k: int) -> RankedResult:
    """Top-k ids by descending cosine; ties broken by id order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(index) == 0:
        raise ValueError("cannot search an empty index")
    q = np.asarray(query_vec, dtype=np.float64)
    if q.shape != (index.dim,):
        raise DimensionMismatchError(
            f"query dim {q.shape} != index dim ({index.dim},)"
        )
    q = _unit(q, "query vector")
    scores = index.matrix @ q
    order = np.lexsort((index._lex_rank, -scores))
    top = order[: min(k, len(index))]
    return RankedResult(
        ids=[index.ids[i] for i in top],
        scores=[float(scores[i]) for i in top],
    )


def compose_query(terms) -> np.ndarray:
    """Weighted sum of unit-normalized term embeddings.

    ``terms`` is a sequence of (embedding, weight). The result is returned
    unnormalized; search normalizes. Full cancellation yields a zero
    vector, which search rejects.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("a query needs at least one term")
    out = None
    dim = None
    for embedding, weight in terms:
        if not np.isfinite(weight):
            raise ValueError("term weights must be finite")
        unit = _unit(embedding, "query term")
        if out is None:
            dim = unit.shape[0]
            out = np.zeros(dim)
        elif unit.shape[0] != dim:
            raise DimensionMismatchError(
                f"term dim {unit.shape[0]} != query dim {dim}"
            )
        out += float(weight) * unit
    return out
