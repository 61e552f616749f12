"""Quantitative evaluation: ranked-retrieval metrics, MAP protocols over
tagged image collections, caption-noise sweeps, text-image distance
correlation, and the 2-D canvas layout used to render maps of the space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .corpus import inject_caption_noise
from .errors import AllOOVError, OOVWordError
from .retrieval import EmbeddingIndex, cosine_similarity, search


def precision_at_k(ranked_ids, relevant, k: int) -> float:
    """Fraction of the top-k ids that are relevant.

    ``relevant`` is a set of ids or a predicate; multi-concept relevance
    (an item must carry every query concept) is expressed by the caller's
    predicate.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked_ids = list(ranked_ids)
    if not ranked_ids:
        raise ValueError("empty ranking")
    is_relevant = relevant if callable(relevant) else set(relevant).__contains__
    return sum(1 for i in ranked_ids[:k] if is_relevant(i)) / k


def average_precision(ranked_ids, relevant_set) -> float:
    """AP over the full ranking: (1/R) sum of Precision@k at relevant ranks.

    R counts relevant items that appear in the ranking; a ranking that
    retrieves none of them scores 0.0.
    """
    relevant_set = set(relevant_set)
    if not relevant_set:
        raise ValueError("relevant set must be nonempty")
    ranked_ids = list(ranked_ids)
    r = len(relevant_set.intersection(ranked_ids))
    if r == 0:
        return 0.0
    hits = 0
    total = 0.0
    for pos, item in enumerate(ranked_ids, start=1):
        if item in relevant_set:
            hits += 1
            total += hits / pos
    return total / r


@dataclass
class EvalReport:
    protocol: str
    per_query: dict
    aggregate: float
    config: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "aggregate": self.aggregate,
            "per_query": self.per_query,
            "config": self.config,
            "skipped": self.skipped,
        }


def _split(ids, frac: float, seed: int):
    """Seeded split: first part gets floor(frac*n + 0.5) items."""
    ids = list(ids)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(ids))
    cut = int(np.floor(frac * len(ids) + 0.5))
    head = [ids[i] for i in order[:cut]]
    tail = [ids[i] for i in order[cut:]]
    return head, tail


def _visual_index(ds, regressor, ids) -> EmbeddingIndex:
    feats = np.stack([np.asarray(ds.features[i], dtype=np.float64) for i in ids])
    return EmbeddingIndex(ids, regressor.forward(feats))


def map_tag_protocol(
    ds,
    text_model,
    regressor,
    query_frac: float = 0.05,
    seed: int = 0,
    aggregation: str = "tfidf_mean",
) -> EvalReport:
    """MAP with shared-tag relevance.

    A seeded split reserves ``query_frac`` of the items as queries; the
    rest form the retrieval index of visual embeddings. Each query is the
    aggregated text embedding of the query image's tags, and a retrieved
    image is relevant if it shares at least one tag. Queries whose tags
    are all out of vocabulary, or that share a tag with no retrieval item,
    are skipped and listed.
    """
    by_id = {doc.id: doc for doc in ds.documents}
    query_ids, retrieval_ids = _split([d.id for d in ds.documents], query_frac, seed)
    if not query_ids:
        raise ValueError("query split is empty; raise query_frac")
    if not retrieval_ids:
        raise ValueError("retrieval split is empty; lower query_frac")
    index = _visual_index(ds, regressor, retrieval_ids)

    per_query = {}
    skipped = []
    for qid in query_ids:
        tags = sorted(by_id[qid].tags)
        if not tags:
            skipped.append((qid, "no tags"))
            continue
        try:
            qvec = text_model.embed_document(tags, aggregation)
        except AllOOVError:
            skipped.append((qid, "all tags out of vocabulary"))
            continue
        relevant = {
            rid for rid in retrieval_ids if by_id[rid].tags & by_id[qid].tags
        }
        if not relevant:
            skipped.append((qid, "no relevant item in retrieval split"))
            continue
        ranking = search(index, qvec, k=len(index)).ids
        per_query[qid] = average_precision(ranking, relevant)
    if not per_query:
        raise ValueError("no evaluable query in the split")
    aggregate = float(np.mean(list(per_query.values())))
    return EvalReport(
        protocol="tag",
        per_query=per_query,
        aggregate=aggregate,
        config={"query_frac": query_frac, "seed": seed, "aggregation": aggregation},
        skipped=skipped,
    )


def map_class_protocol(
    ds,
    text_model,
    regressor,
    class_names,
    retrieval_frac: float = 0.5,
    seed: int = 0,
) -> EvalReport:
    """Per-class AP with class-name queries over a seeded retrieval half.

    The query for a class is its name's word embedding; an item is
    relevant if tagged with the class. OOV class names (word-level models)
    and classes with no tagged retrieval item are skipped and listed.
    """
    class_names = list(class_names)
    if not class_names:
        raise ValueError("class names must be nonempty")
    by_id = {doc.id: doc for doc in ds.documents}
    retrieval_ids, _ = _split([d.id for d in ds.documents], retrieval_frac, seed)
    if not retrieval_ids:
        raise ValueError("retrieval split is empty; raise retrieval_frac")
    index = _visual_index(ds, regressor, retrieval_ids)

    per_class = {}
    skipped = []
    for name in class_names:
        try:
            qvec = text_model.embed_word(name)
        except OOVWordError:
            skipped.append((name, "out of vocabulary"))
            continue
        relevant = {rid for rid in retrieval_ids if name in by_id[rid].tags}
        if not relevant:
            skipped.append((name, "no tagged item in retrieval split"))
            continue
        ranking = search(index, qvec, k=len(index)).ids
        per_class[name] = average_precision(ranking, relevant)
    if not per_class:
        raise ValueError("no evaluable class")
    aggregate = float(np.mean(list(per_class.values())))
    return EvalReport(
        protocol="class",
        per_query=per_class,
        aggregate=aggregate,
        config={"retrieval_frac": retrieval_frac, "seed": seed},
        skipped=skipped,
    )


def noise_sweep(ds, fractions, train_and_score, seeds=(0,)):
    """Caption-noise robustness table: rows of (fraction, mean score).

    For each fraction and seed, captions are rewritten on a noisy copy of
    the dataset and ``train_and_score(noisy_ds, seed)`` retrains the full
    text + visual stack and returns its evaluation score. Fraction 0.0
    reuses the dataset untouched, so its row is the exact baseline.
    """
    rows = []
    for frac in fractions:
        if not 0.0 <= frac <= 1.0:
            raise ValueError("noise fractions must lie in [0, 1]")
        scores = []
        for seed in seeds:
            noisy = ds if frac == 0.0 else inject_caption_noise(ds, frac, seed)
            scores.append(float(train_and_score(noisy, seed)))
        rows.append((float(frac), float(np.mean(scores))))
    return rows


@dataclass
class ScatterAnalysis:
    pair_indices: np.ndarray  # (n_pairs, 2) item indices
    text_distances: np.ndarray  # min-max normalized to [0, 1]
    image_distances: np.ndarray  # min-max normalized to [0, 1]
    shared_tags: np.ndarray  # per-pair shared-tag count
    r_squared: float
    slope: float
    intercept: float

    def band_counts(self) -> dict:
        """Pair counts for the shared-tag color bands 0, 1, 2, 3, >3."""
        counts = {"0": 0, "1": 0, "2": 0, "3": 0, ">3": 0}
        for s in self.shared_tags:
            counts[str(int(s)) if s <= 3 else ">3"] += 1
        return counts


def _minmax(column: np.ndarray) -> np.ndarray:
    lo, hi = float(column.min()), float(column.max())
    if hi - lo < 1e-300:
        return np.zeros_like(column)
    return (column - lo) / (hi - lo)


def distance_correlation(
    text_embeddings,
    image_embeddings,
    tags=None,
    n_pairs: int = 20000,
    seed: int = 0,
) -> ScatterAnalysis:
    """Cosine-distance agreement between the two modalities.

    Samples seeded random item pairs, computes 1 - cos in each modality,
    min-max normalizes each distance column over the sample, and fits a
    simple linear regression of image distance on text distance. R² is
    the squared Pearson correlation of the two columns.
    """
    text = np.asarray(text_embeddings, dtype=np.float64)
    image = np.asarray(image_embeddings, dtype=np.float64)
    if text.shape[0] != image.shape[0]:
        raise ValueError("text and image embeddings must align by row")
    n = text.shape[0]
    if n < 2:
        raise ValueError("need at least 2 items to form pairs")
    rng = np.random.default_rng(seed)
    first = rng.integers(0, n, size=n_pairs)
    second = rng.integers(0, n - 1, size=n_pairs)
    second = np.where(second >= first, second + 1, second)

    tdist = np.empty(n_pairs)
    idist = np.empty(n_pairs)
    for p in range(n_pairs):
        i, j = int(first[p]), int(second[p])
        tdist[p] = 1.0 - cosine_similarity(text[i], text[j])
        idist[p] = 1.0 - cosine_similarity(image[i], image[j])
    tdist = _minmax(tdist)
    idist = _minmax(idist)

    tvar = float(np.var(tdist))
    if tvar < 1e-300:
        slope, intercept = 0.0, float(np.mean(idist))
    else:
        slope = float(np.cov(tdist, idist, bias=True)[0, 1] / tvar)
        intercept = float(np.mean(idist) - slope * np.mean(tdist))
    ss_tot = float(np.sum((idist - idist.mean()) ** 2))
    ss_res = float(np.sum((idist - (slope * tdist + intercept)) ** 2))
    if ss_tot < 1e-300:
        r_squared = 1.0 if ss_res < 1e-12 else 0.0
    else:
        r_squared = max(0.0, min(1.0, 1.0 - ss_res / ss_tot))

    if tags is not None:
        shared = np.array(
            [len(tags[int(i)] & tags[int(j)]) for i, j in zip(first, second)],
            dtype=np.int64,
        )
    else:
        shared = np.zeros(n_pairs, dtype=np.int64)
    return ScatterAnalysis(
        pair_indices=np.stack([first, second], axis=1),
        text_distances=tdist,
        image_distances=idist,
        shared_tags=shared,
        r_squared=r_squared,
        slope=slope,
        intercept=intercept,
    )


@dataclass
class Placement:
    item_id: str
    kind: str  # "photo" or "word"
    x: int
    y: int
    kept: bool


def canvas_layout(coords, kinds, ids=None, canvas_px: int = 2000, thumb_px: int = 50):
    """Place square thumbnails on a canvas at their 2-D embedding spots.

    Coordinates are min-max normalized per axis into
    [0, canvas_px - thumb_px]. Word items are placed before photos; an
    item whose square would share any pixel with an already placed one is
    omitted (kept=False). Returns one Placement per input item.
    """
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim != 2 or coords.shape[1] != 2:
        raise ValueError("coords must be an n x 2 array")
    if not np.all(np.isfinite(coords)):
        raise ValueError("coords must be finite")
    n = coords.shape[0]
    kinds = list(kinds)
    if len(kinds) != n:
        raise ValueError("one kind per coordinate row required")
    if any(k not in ("photo", "word") for k in kinds):
        raise ValueError("kinds must be 'photo' or 'word'")
    ids = [str(i) for i in (ids if ids is not None else range(n))]
    span = canvas_px - thumb_px
    pixels = np.empty((n, 2), dtype=np.int64)
    for axis in range(2):
        pixels[:, axis] = np.floor(_minmax(coords[:, axis]) * span + 0.5).astype(np.int64)

    order = [i for i in range(n) if kinds[i] == "word"] + [
        i for i in range(n) if kinds[i] == "photo"
    ]
    placements = [None] * n
    occupied = []
    for i in order:
        x, y = int(pixels[i, 0]), int(pixels[i, 1])
        clash = any(
            abs(x - ox) < thumb_px and abs(y - oy) < thumb_px for ox, oy in occupied
        )
        if not clash:
            occupied.append((x, y))
        placements[i] = Placement(ids[i], kinds[i], x, y, kept=not clash)
    return placements


def write_report(path, report: EvalReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_report_table(path, report: EvalReport) -> None:
    """Flat two-column table: query id (or class), score; final MAP row."""
    with open(path, "w", encoding="utf-8") as fh:
        for key in sorted(report.per_query):
            fh.write(f"{key}\t{report.per_query[key]:.6f}\n")
        fh.write(f"MAP\t{report.aggregate:.6f}\n")


def write_noise_table(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("noise_fraction\tmean_score\n")
        for frac, score in rows:
            fh.write(f"{frac:.2f}\t{score:.6f}\n")


def write_scatter(path, analysis: ScatterAnalysis) -> None:
    """Tab-separated pairs plus a trailing summary comment row."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("text_distance\timage_distance\tshared_tags\n")
        for t, i, s in zip(
            analysis.text_distances, analysis.image_distances, analysis.shared_tags
        ):
            fh.write(f"{t:.6f}\t{i:.6f}\t{int(s)}\n")
        fh.write(f"# r_squared={analysis.r_squared:.6f}\n")


def write_placements(path, placements) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("id\tkind\tx\ty\tkept\n")
        for p in placements:
            fh.write(f"{p.item_id}\t{p.kind}\t{p.x}\t{p.y}\t{int(p.kept)}\n")
