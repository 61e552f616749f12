"""Train all five text embedding methods on one corpus and compare them.

Two lenses: how cleanly each method separates the two concept
vocabularies (mean intra-concept cosine minus mean inter-concept
cosine), and the class MAP after wiring each into the full pipeline.

    python3 demos/compare_text_models.py
"""

import time

from jointspace.corpus import generate_synthetic
from jointspace.evaluation import map_class_protocol
from jointspace.pipeline import dataset_class_names, run_pipeline
from jointspace.retrieval import cosine_similarity

# desk-sized configs so the whole comparison runs in well under a minute;
# lda gets a sharp sub-1 prior because the documents are only 3-8 tokens
CONFIGS = {
    "word2vec": {"dim": 16, "epochs": 8, "seed": 0},
    "glove": {"dim": 16, "epochs": 30, "seed": 0},
    "lda": {"k_topics": 2, "alpha": 0.5, "gibbs_iters": 80, "burn_in": 40, "seed": 0},
    "doc2vec": {"dim": 16, "epochs": 20, "seed": 0},
    "fasttext": {"dim": 16, "epochs": 4, "buckets": 4096, "seed": 0},
}
AGGREGATION = {"lda": "native", "doc2vec": "native"}


def separation(model, words_a, words_b):
    def embeds(words):
        return [model.embed_word(w) for w in sorted(words) if model.can_embed(w)]

    va, vb = embeds(words_a), embeds(words_b)
    intra = [
        cosine_similarity(vs[i], vs[j])
        for vs in (va, vb)
        for i in range(len(vs))
        for j in range(i + 1, len(vs))
    ]
    inter = [cosine_similarity(x, y) for x in va for y in vb]
    return sum(intra) / len(intra) - sum(inter) / len(inter)


def main():
    ds = generate_synthetic(2, 80, 16, noise_sigma=0.1, seed=3)
    words = {0: set(), 1: set()}
    for doc in ds.documents:
        words[0 if "concept0" in doc.tags else 1].update(doc.tokens)
    names = dataset_class_names(ds)

    print(f"{'method':<10} {'train s':>8} {'separation':>11} {'class MAP':>10}")
    for method, cfg in CONFIGS.items():
        t0 = time.perf_counter()
        result = run_pipeline(
            ds,
            text_method=method,
            text_cfg=cfg,
            regressor_cfg={"max_iters": 1200, "seed": 0},
            aggregation=AGGREGATION.get(method, "tfidf_mean"),
        )
        elapsed = time.perf_counter() - t0
        gap = separation(result.text_model, words[0], words[1])
        report = map_class_protocol(
            ds, result.text_model, result.regressor, names,
            retrieval_frac=0.5, seed=0,
        )
        print(f"{method:<10} {elapsed:>8.1f} {gap:>11.3f} {report.aggregate:>10.3f}")


if __name__ == "__main__":
    main()
