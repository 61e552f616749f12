"""Pipeline configuration: JSON file + dotted-path overrides.

One nested document drives every CLI subcommand. Values resolve in
order: built-in defaults, then the config file, then ``--set key=value``
overrides (dotted paths, values parsed as JSON with plain-string
fallback).
"""

from __future__ import annotations

import copy
import json
import os

CONFIG_ENV_VAR = "JOINTSPACE_CONFIG"

DEFAULTS = {
    "dataset": {
        "path": "dataset.jsonl",
        "features": "features.feat",
    },
    "synth": {
        "num_concepts": 4,
        "docs_per_concept": 250,
        "feature_dim": 64,
        "noise_sigma": 0.05,
        "seed": 0,
    },
    "text": {
        "method": "word2vec",
        "aggregation": "tfidf_mean",
        "model_path": "text_model.jtie",
        "cfg": {},
    },
    "regressor": {
        "model_path": "regressor.jtie",
        "loss_curve_path": "loss_curve.tsv",
        "cfg": {},
    },
    "index": {
        "path": "index.jidx",
    },
    "eval": {
        "protocol": "class",
        "k": 5,
        "query_frac": 0.05,
        "retrieval_frac": 0.5,
        "seed": 0,
        "report_path": "eval_report.json",
        "table_path": "eval_report.tsv",
    },
    "analysis": {
        "n_pairs": 20000,
        "seed": 0,
        "perplexity": 20.0,
        "tsne_iterations": 600,
        "canvas_px": 2000,
        "thumb_px": 50,
        "scatter_path": "scatter.tsv",
        "tsne_path": "tsne.tsv",
        "placements_path": "placements.tsv",
    },
    "service": {
        "host": "127.0.0.1",
        "port": 8765,
        "image_root": None,
    },
}


def _merge(base: dict, extra: dict, path: str = "") -> dict:
    for key, value in extra.items():
        where = f"{path}.{key}" if path else key
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value, where)
        else:
            base[key] = value
    return base


def parse_override(text: str):
    """Split 'a.b.c=value' into (['a','b','c'], parsed value)."""
    if "=" not in text:
        raise ValueError(f"override {text!r} must look like key.path=value")
    key, raw = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ValueError(f"override {text!r} has an empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.split("."), value


def apply_override(config: dict, dotted_path: list[str], value) -> None:
    node = config
    for part in dotted_path[:-1]:
        nxt = node.get(part)
        if not isinstance(nxt, dict):
            nxt = {}
            node[part] = nxt
        node = nxt
    node[dotted_path[-1]] = value


def load_config(path: str | None = None, overrides=()) -> dict:
    """Defaults, overlaid by the JSON file at ``path`` (or $JOINTSPACE_CONFIG),
    overlaid by dotted overrides."""
    config = copy.deepcopy(DEFAULTS)
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                loaded = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"config file {path}: invalid JSON ({exc})") from exc
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {path}: top level must be an object")
        _merge(config, loaded)
    for text in overrides:
        dotted, value = parse_override(text)
        apply_override(config, dotted, value)
    return config
