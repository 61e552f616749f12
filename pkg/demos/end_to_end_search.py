"""Walk the full stack once: corpus, text model, regressor, index, queries.

Run from the repository root:

    python3 demos/end_to_end_search.py
"""

import numpy as np

from jointspace.corpus import generate_synthetic
from jointspace.pipeline import class_query_precision, dataset_class_names, run_pipeline
from jointspace.retrieval import compose_query, search


def show(title, ranked, by_id, limit=5):
    print(f"\n{title}")
    for item_id, score in zip(ranked.ids[:limit], ranked.scores[:limit]):
        tags = ",".join(sorted(by_id[item_id].tags))
        print(f"  {item_id}  {score:+.4f}  [{tags}]")


def main():
    # three visual concepts, 120 captioned items each, 32-dim image features
    ds = generate_synthetic(3, 120, 32, noise_sigma=0.1, seed=7)
    by_id = {d.id: d for d in ds.documents}
    print(f"corpus: {len(ds.documents)} items, classes {dataset_class_names(ds)}")

    print("training word2vec text model and the visual regressor...")
    result = run_pipeline(
        ds,
        text_method="word2vec",
        text_cfg={"dim": 24, "epochs": 8, "seed": 0},
        regressor_cfg={"max_iters": 1500, "seed": 0},
    )
    print(f"indexed {len(result.index)} items in a {result.index.dim}-dim joint space")

    tm = result.text_model
    show("query: concept0", search(result.index, tm.embed_word("concept0"), k=5), by_id)

    # weighted composition: lean toward concept1, push away from concept2
    q = compose_query([
        (tm.embed_word("concept1"), 1.0),
        (tm.embed_word("concept2"), -0.5),
    ])
    show("query: concept1 minus half concept2", search(result.index, q, k=5), by_id)

    # an indexed item itself works as a query vector: nearest neighbors
    anchor = ds.documents[0].id
    row = result.index.matrix[list(result.index.ids).index(anchor)]
    ranked = search(result.index, np.asarray(row, dtype=np.float64), k=6)
    show(f"neighbors of {anchor} {sorted(by_id[anchor].tags)}", ranked, by_id, limit=6)

    mean_p5, per_class = class_query_precision(
        ds, tm, result.index, dataset_class_names(ds), k=5
    )
    print(f"\nclass-name query P@5: {per_class} (mean {mean_p5:.2f})")


if __name__ == "__main__":
    main()
