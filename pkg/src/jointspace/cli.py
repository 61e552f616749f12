"""Command-line workflow driver.

Subcommands cover the whole pipeline: synthesize data, train the text
and visual models, build the retrieval index, run queries, evaluate,
analyze the space, and serve the HTTP API. Settings come from a JSON
config file (``--config`` or $JOINTSPACE_CONFIG) with ``--set`` dotted
overrides; specific flags beat both.

Exit codes: 0 success, 1 runtime/config failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import corpus, evaluation, tsne
from .config import CONFIG_ENV_VAR, load_config
from .errors import JointSpaceError
from .pipeline import evaluate_protocol, train_text, visual_index
from .regressor import RegressorConfig, train_visual, write_loss_curve
from .retrieval import compose_query, search
from .serialization import load_index, load_model, save_index, save_model
from .service import JointSpaceService, build_snapshot, make_server


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help=f"config file path (default ${CONFIG_ENV_VAR})")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config value by dotted path, e.g. text.method=glove",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jointspace",
        description="Joint text-image embedding training and retrieval.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic captioned dataset")
    _add_common(p)
    p.add_argument("--dataset", help="output records path")
    p.add_argument("--features", help="output feature sidecar path")

    p = sub.add_parser("train-text", help="train a text embedding model")
    _add_common(p)
    p.add_argument("--dataset", help="records path")
    p.add_argument("--features", help="feature sidecar path")
    p.add_argument("--method", choices=["word2vec", "glove", "lda", "doc2vec", "fasttext"])
    p.add_argument("--out", help="model output path")

    p = sub.add_parser("train-visual", help="train the visual regressor")
    _add_common(p)
    p.add_argument("--dataset", help="records path")
    p.add_argument("--features", help="feature sidecar path")
    p.add_argument("--text-model", help="trained text model path")
    p.add_argument("--out", help="regressor output path")

    p = sub.add_parser("build-index", help="index the regressed embeddings")
    _add_common(p)
    p.add_argument("--dataset", help="records path")
    p.add_argument("--features", help="feature sidecar path")
    p.add_argument("--regressor", help="trained regressor path")
    p.add_argument("--out", help="index output path")

    p = sub.add_parser("query", help="run a retrieval query")
    _add_common(p)
    p.add_argument("--index", help="index path")
    p.add_argument("--text-model", help="trained text model path")
    p.add_argument(
        "--text",
        action="append",
        default=[],
        metavar="TEXT",
        help="text term (repeatable)",
    )
    p.add_argument(
        "--weight",
        action="append",
        default=[],
        type=float,
        metavar="W",
        help="weight for the term at the same position (default 1)",
    )
    p.add_argument("-k", type=int, default=5, help="results to return")

    p = sub.add_parser("eval", help="run a MAP evaluation protocol")
    _add_common(p)
    p.add_argument("--dataset", help="records path")
    p.add_argument("--features", help="feature sidecar path")
    p.add_argument("--text-model", help="trained text model path")
    p.add_argument("--regressor", help="trained regressor path")
    p.add_argument("--protocol", choices=["tag", "class"])

    p = sub.add_parser("analyze", help="distance correlation, t-SNE, canvas layout")
    _add_common(p)
    p.add_argument("--dataset", help="records path")
    p.add_argument("--features", help="feature sidecar path")
    p.add_argument("--text-model", help="trained text model path")
    p.add_argument("--regressor", help="trained regressor path")

    p = sub.add_parser("serve", help="serve the HTTP query API")
    _add_common(p)
    p.add_argument("--dataset", help="records path")
    p.add_argument("--features", help="feature sidecar path")
    p.add_argument("--text-model", help="trained text model path")
    p.add_argument("--regressor", help="trained regressor path")
    p.add_argument("--index", help="index path")
    p.add_argument("--host")
    p.add_argument("--port", type=int)

    return parser


def _dataset_paths(args, cfg):
    records = args.dataset or cfg["dataset"]["path"]
    features = args.features or cfg["dataset"]["features"]
    return records, features


def _load_dataset(args, cfg):
    records, features = _dataset_paths(args, cfg)
    return corpus.load_pairs(records, features)


def cmd_synth(args, cfg) -> int:
    s = cfg["synth"]
    ds = corpus.generate_synthetic(
        num_concepts=s["num_concepts"],
        docs_per_concept=s["docs_per_concept"],
        feature_dim=s["feature_dim"],
        noise_sigma=s["noise_sigma"],
        seed=s["seed"],
    )
    records, features = _dataset_paths(args, cfg)
    corpus.save_pairs(ds, records, features)
    print(f"wrote {len(ds)} records to {records} (features: {features})")
    return 0


def cmd_train_text(args, cfg) -> int:
    ds = _load_dataset(args, cfg)
    method = args.method or cfg["text"]["method"]
    model = train_text(ds.documents, method, cfg["text"]["cfg"])
    out = args.out or cfg["text"]["model_path"]
    save_model(out, model)
    print(f"trained {method} (|V|={len(model.vocab)}, D={model.dim}) -> {out}")
    return 0


def cmd_train_visual(args, cfg) -> int:
    ds = _load_dataset(args, cfg)
    text_model = load_model(args.text_model or cfg["text"]["model_path"])
    reg_cfg = RegressorConfig(
        **{"aggregation": cfg["text"]["aggregation"], **cfg["regressor"]["cfg"]}
    )
    result = train_visual(ds, text_model, reg_cfg)
    out = args.out or cfg["regressor"]["model_path"]
    save_model(out, result.model)
    curve_path = cfg["regressor"]["loss_curve_path"]
    write_loss_curve(curve_path, result.loss_curve)
    skipped = f", skipped {len(result.skipped_docs)} all-OOV captions" if result.skipped_docs else ""
    print(
        f"trained regressor ({result.model.input_dim}->{result.model.output_dim}, "
        f"{result.model.iteration} iters{skipped}) -> {out}; loss curve: {curve_path}"
    )
    return 0


def cmd_build_index(args, cfg) -> int:
    ds = _load_dataset(args, cfg)
    regressor = load_model(args.regressor or cfg["regressor"]["model_path"])
    index = visual_index(ds, regressor)
    out = args.out or cfg["index"]["path"]
    save_index(out, index)
    print(f"indexed {len(index)} items (D={index.dim}) -> {out}")
    return 0


def cmd_query(args, cfg) -> int:
    if not args.text:
        raise JointSpaceError("provide at least one --text term")
    if args.weight and len(args.weight) != len(args.text):
        raise JointSpaceError("--weight count must match --text count")
    index = load_index(args.index or cfg["index"]["path"])
    text_model = load_model(args.text_model or cfg["text"]["model_path"])
    aggregation = cfg["text"]["aggregation"]
    weights = args.weight or [1.0] * len(args.text)
    terms = []
    for text, weight in zip(args.text, weights):
        vec = text_model.embed_document(corpus.tokenize(text), aggregation)
        terms.append((vec, weight))
    ranked = search(index, compose_query(terms), args.k)
    for item_id, score in ranked:
        print(f"{item_id}\t{score:.6f}")
    return 0


def cmd_eval(args, cfg) -> int:
    ds = _load_dataset(args, cfg)
    text_model = load_model(args.text_model or cfg["text"]["model_path"])
    regressor = load_model(args.regressor or cfg["regressor"]["model_path"])
    protocol = args.protocol or cfg["eval"]["protocol"]
    eval_cfg = dict(cfg["eval"])
    eval_cfg.setdefault("aggregation", cfg["text"]["aggregation"])
    report = evaluate_protocol(ds, text_model, regressor, protocol, eval_cfg)
    evaluation.write_report(cfg["eval"]["report_path"], report)
    evaluation.write_report_table(cfg["eval"]["table_path"], report)
    for key in sorted(report.per_query):
        print(f"{key}\tAP={report.per_query[key]:.4f}")
    print(f"MAP\t{report.aggregate:.4f}")
    if report.skipped:
        print(f"skipped {len(report.skipped)} queries", file=sys.stderr)
    return 0


def cmd_analyze(args, cfg) -> int:
    ds = _load_dataset(args, cfg)
    text_model = load_model(args.text_model or cfg["text"]["model_path"])
    regressor = load_model(args.regressor or cfg["regressor"]["model_path"])
    a = cfg["analysis"]
    aggregation = cfg["text"]["aggregation"]

    ids, text_vecs, tags = [], [], []
    for doc in ds.documents:
        try:
            text_vecs.append(text_model.embed_document(doc.tokens, aggregation, doc_id=doc.id))
        except JointSpaceError:
            continue
        ids.append(doc.id)
        tags.append(set(doc.tags))
    feats = np.stack([ds.features[i] for i in ids]).astype(np.float64)
    image_vecs = regressor.forward(feats)

    scatter = evaluation.distance_correlation(
        np.stack(text_vecs), image_vecs, tags, n_pairs=a["n_pairs"], seed=a["seed"]
    )
    evaluation.write_scatter(a["scatter_path"], scatter)

    coords = tsne.tsne_project(
        image_vecs,
        perplexity=a["perplexity"],
        iterations=a["tsne_iterations"],
        seed=a["seed"],
    )
    tsne.write_coordinates(a["tsne_path"], ids, coords)

    placements = evaluation.canvas_layout(
        coords,
        kinds=["photo"] * len(ids),
        ids=ids,
        canvas_px=a["canvas_px"],
        thumb_px=a["thumb_px"],
    )
    evaluation.write_placements(a["placements_path"], placements)

    kept = sum(1 for p in placements if p.kept)
    print(f"r_squared\t{scatter.r_squared:.6f}")
    print(f"tsne_points\t{len(ids)}")
    print(f"canvas_kept\t{kept}/{len(placements)}")
    return 0


def cmd_serve(args, cfg) -> int:
    ds = _load_dataset(args, cfg)
    text_model = load_model(args.text_model or cfg["text"]["model_path"])
    regressor = load_model(args.regressor or cfg["regressor"]["model_path"])
    index = load_index(args.index or cfg["index"]["path"])
    snapshot = build_snapshot(
        ds,
        text_model,
        regressor,
        index,
        aggregation=cfg["text"]["aggregation"],
        image_root=cfg["service"]["image_root"],
    )
    host = args.host or cfg["service"]["host"]
    port = cfg["service"]["port"] if args.port is None else args.port
    server = make_server(JointSpaceService(snapshot), host, port)
    print(f"serving on http://{host}:{server.server_address[1]}/api/health")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "train-text": cmd_train_text,
    "train-visual": cmd_train_visual,
    "build-index": cmd_build_index,
    "query": cmd_query,
    "eval": cmd_eval,
    "analyze": cmd_analyze,
    "serve": cmd_serve,
}


def entrypoint(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config, args.overrides)
        return COMMANDS[args.command](args, cfg)
    except (JointSpaceError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(entrypoint())
