"""Shared fixtures: small synthetic corpora and controlled stand-in models.

Training fixtures are session-scoped because even slim trainer configs
cost seconds; every test that uses them must treat them as read-only.
"""

import numpy as np
import pytest

from jointspace.corpus import Document, PairDataset, generate_synthetic
from jointspace.regressor import RegressorConfig, VisualRegressor

# Hand-checkable golden dataset shared by the protocol tests and the
# acceptance gate.  Two tag directions, ten items whose features lean
# toward one tag or sit between both.
TAG_VEC = {"sun": (1.0, 0.0), "sea": (0.0, 1.0)}

ITEMS10 = [
    ("i0", {"sun"}, (1.0, 0.1)),
    ("i1", {"sun"}, (0.45, 0.8)),
    ("i2", {"sun"}, (0.8, -0.2)),
    ("i3", {"sun", "sea"}, (0.7, 0.7)),
    ("i4", {"sea"}, (0.1, 1.0)),
    ("i5", {"sea"}, (0.9, 0.35)),
    ("i6", {"sun"}, (0.3, 0.8)),
    ("i7", {"sun", "sea"}, (0.6, 0.5)),
    ("i8", {"sun"}, (1.0, -0.5)),
    ("i9", {"sea"}, (-0.1, 1.2)),
]

ITEMS6 = [
    ("a0", {"sea"}, (0.9, 0.1)),
    ("a1", {"sun"}, (0.8, 0.4)),
    ("a2", {"sea"}, (0.2, 0.9)),
    ("a3", {"sea"}, (-0.1, 0.8)),
    ("a4", {"sun"}, (0.5, 0.45)),
    ("a5", {"sea"}, (0.4, 0.7)),
]

# Frozen protocol outputs for the datasets above, derived once by
# walking the rankings by hand (see the worked examples in
# test_protocols.py) and pinned here so any scoring change trips.
GOLDEN_TAG10 = {
    "query_frac": 0.2,
    "seed": 3,
    "aggregation": "mean",
    "per_query": {"i9": 0.8041666666666667, "i6": 0.8734126984126983},
    "aggregate": 0.8387896825396826,
}

GOLDEN_CLASS6 = {
    "retrieval_frac": 0.5,
    "seed": 1,
    "per_class": {"sea": 0.8333333333333333, "sun": 0.5},
    "aggregate": 0.6666666666666666,
}


@pytest.fixture(scope="session")
def two_concept_ds():
    """Two cleanly separated concepts, desk-slim: 2 x 40 docs, 8-dim features."""
    return generate_synthetic(2, 40, 8, noise_sigma=0.05, seed=0)


@pytest.fixture(scope="session")
def two_concept_docs(two_concept_ds):
    return two_concept_ds.documents


@pytest.fixture(scope="session")
def concept_words(two_concept_ds):
    """Generator vocabulary split by concept tag, for separation checks."""
    words = {0: set(), 1: set()}
    for doc in two_concept_ds.documents:
        k = 0 if "concept0" in doc.tags else 1
        words[k].update(doc.tokens)
    return words[0], words[1]


def separation_gap(model, words_a, words_b):
    """Mean intra-concept cosine minus mean inter-concept cosine."""
    from jointspace.retrieval import cosine_similarity

    va = [model.embed_word(w) for w in sorted(words_a) if model.can_embed(w)]
    vb = [model.embed_word(w) for w in sorted(words_b) if model.can_embed(w)]
    intra, inter = [], []
    for vs in (va, vb):
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                intra.append(cosine_similarity(vs[i], vs[j]))
    for x in va:
        for y in vb:
            inter.append(cosine_similarity(x, y))
    return float(np.mean(intra)) - float(np.mean(inter))


def identity_regressor(dim: int) -> VisualRegressor:
    """Single linear layer with identity weights: forward(x) == x."""
    reg = VisualRegressor(RegressorConfig(input_dim=dim, output_dim=dim, hidden_dims=()))
    reg.weights = [np.eye(dim)]
    reg.biases = [np.zeros(dim)]
    return reg


class DirectionTextModel:
    """Stand-in text model mapping known words to fixed 2-D directions.

    Documents embed as the plain sum of their known words' vectors, so
    every protocol ranking it produces is hand-computable.
    """

    method = "direction"

    def __init__(self, table):
        self.table = {k: np.asarray(v, dtype=np.float64) for k, v in table.items()}
        self.dim = len(next(iter(table.values())))

    def can_embed(self, token):
        return token in self.table

    def embed_word(self, token):
        from jointspace.errors import OOVWordError

        if token not in self.table:
            raise OOVWordError(f"{token!r} unknown")
        return self.table[token].copy()

    def embed_document(self, tokens, aggregation="mean", doc_id=None):
        from jointspace.errors import AllOOVError

        known = [t for t in tokens if t in self.table]
        if not known:
            raise AllOOVError("no known token")
        out = np.zeros(self.dim)
        for t in known:
            out += self.table[t]
        return out


def hand_dataset(items):
    """Build a PairDataset from (id, tag set, feature tuple) triples.

    Captions are the sorted tags, so tag-derived and caption-derived
    text embeddings agree under DirectionTextModel.
    """
    docs = [
        Document.from_raw(item_id, " ".join(sorted(tags)), tags=tags)
        for item_id, tags, _ in items
    ]
    feats = {
        item_id: np.asarray(vec, dtype=np.float64) for item_id, _, vec in items
    }
    return PairDataset(docs, feats)
