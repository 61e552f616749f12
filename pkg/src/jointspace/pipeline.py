"""End-to-end glue: text training, visual training, indexing, scoring.

These functions wire the trainers, regressor, index, and evaluation
protocols together the way the CLI and the noise-sweep harness need
them. Everything is deterministic given the config seeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evaluation import map_class_protocol, map_tag_protocol, precision_at_k
from .regressor import RegressorConfig, TrainingResult, train_visual
from .retrieval import EmbeddingIndex, search
from .textemb import TRAINERS


def train_text(docs, method: str, cfg_dict: dict | None = None, vocab=None):
    """Train one of the five text methods from a plain config dict."""
    if method not in TRAINERS:
        raise ValueError(
            f"unknown text method {method!r}; choose from {sorted(TRAINERS)}"
        )
    config_cls, trainer = TRAINERS[method]
    return trainer(docs, config_cls(**(cfg_dict or {})), vocab=vocab)


def visual_index(ds, regressor, ids=None) -> EmbeddingIndex:
    """Index the regressed joint-space embeddings of dataset items."""
    ids = [d.id for d in ds.documents] if ids is None else list(ids)
    feats = np.stack([np.asarray(ds.features[i], dtype=np.float64) for i in ids])
    return EmbeddingIndex(ids, regressor.forward(feats))


@dataclass
class PipelineResult:
    text_model: object
    regressor: object
    training: TrainingResult
    index: EmbeddingIndex


def run_pipeline(ds, text_method: str = "word2vec", text_cfg: dict | None = None,
                 regressor_cfg: dict | None = None, aggregation: str = "tfidf_mean") -> PipelineResult:
    """Train text model and regressor on ``ds`` and index every item."""
    text_model = train_text(ds.documents, text_method, text_cfg)
    reg_cfg = RegressorConfig(**{"aggregation": aggregation, **(regressor_cfg or {})})
    training = train_visual(ds, text_model, reg_cfg)
    index = visual_index(ds, training.model)
    return PipelineResult(
        text_model=text_model,
        regressor=training.model,
        training=training,
        index=index,
    )


def class_query_precision(ds, text_model, index: EmbeddingIndex, class_names, k: int = 5):
    """Mean P@k over class-name queries with tag relevance; also per class."""
    by_id = {d.id: d for d in ds.documents}
    per_class = {}
    for name in class_names:
        if not text_model.can_embed(name):
            continue
        ranking = search(index, text_model.embed_word(name), k=k).ids
        per_class[name] = precision_at_k(
            ranking, lambda i: name in by_id[i].tags, k
        )
    if not per_class:
        raise ValueError("no embeddable class name")
    return float(np.mean(list(per_class.values()))), per_class


def dataset_class_names(ds) -> list[str]:
    """Sorted union of tags over the dataset."""
    names = set()
    for doc in ds.documents:
        names.update(doc.tags)
    return sorted(names)


def make_noise_scorer(text_method: str = "word2vec", text_cfg: dict | None = None,
                      regressor_cfg: dict | None = None, aggregation: str = "tfidf_mean",
                      k: int = 5):
    """Build the train_and_score callable the noise sweep retrains with.

    The returned function retrains the full stack on the (possibly
    noise-injected) dataset with unchanged model seeds and scores mean
    P@k of class-name queries; tags are untouched by caption noise, so
    relevance stays clean while training text degrades.
    """

    def train_and_score(ds, seed: int) -> float:
        result = run_pipeline(
            ds,
            text_method=text_method,
            text_cfg=text_cfg,
            regressor_cfg=regressor_cfg,
            aggregation=aggregation,
        )
        score, _ = class_query_precision(
            ds, result.text_model, result.index, dataset_class_names(ds), k=k
        )
        return score

    return train_and_score


def evaluate_protocol(ds, text_model, regressor, protocol: str, eval_cfg: dict):
    if protocol == "tag":
        return map_tag_protocol(
            ds,
            text_model,
            regressor,
            query_frac=eval_cfg.get("query_frac", 0.05),
            seed=eval_cfg.get("seed", 0),
            aggregation=eval_cfg.get("aggregation", "tfidf_mean"),
        )
    if protocol == "class":
        return map_class_protocol(
            ds,
            text_model,
            regressor,
            class_names=eval_cfg.get("class_names") or dataset_class_names(ds),
            retrieval_frac=eval_cfg.get("retrieval_frac", 0.5),
            seed=eval_cfg.get("seed", 0),
        )
    raise ValueError(f"unknown protocol {protocol!r}; choose 'tag' or 'class'")
