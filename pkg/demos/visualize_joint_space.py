"""Project the learned joint space to 2-D and lay it out on a canvas.

Words and images live in the same space, so both go through one t-SNE
run; the canvas layout then drops whatever would overlap, keeping words
over photos. Also prints the text-vs-image distance agreement that a
good mapping should show. Writes three TSV files under demos/out/.

    python3 demos/visualize_joint_space.py
"""

import os

import numpy as np

from jointspace.corpus import generate_synthetic
from jointspace.evaluation import canvas_layout, distance_correlation, write_placements
from jointspace.pipeline import run_pipeline
from jointspace.regressor import caption_targets
from jointspace.tsne import tsne_project, write_coordinates

OUT_DIR = os.path.join(os.path.dirname(__file__), "out")


def main():
    ds = generate_synthetic(2, 80, 16, noise_sigma=0.1, seed=5)
    result = run_pipeline(
        ds,
        text_method="glove",
        text_cfg={"dim": 16, "epochs": 30, "seed": 0},
        regressor_cfg={"max_iters": 1200, "seed": 0},
    )

    # distance agreement between modalities over sampled item pairs
    kept, targets, _ = caption_targets(ds, result.text_model, "tfidf_mean")
    text = np.stack(targets)
    image = result.regressor.forward(
        np.stack([np.asarray(ds.features[i], dtype=np.float64) for i in kept])
    )
    tag_lookup = {d.id: d.tags for d in ds.documents}
    scatter = distance_correlation(
        text, image, tags=[tag_lookup[i] for i in kept], n_pairs=4000, seed=0
    )
    print(f"text/image distance R^2: {scatter.r_squared:.3f} "
          f"(slope {scatter.slope:.2f})")
    print(f"pairs by shared-tag count: {scatter.band_counts()}")

    # one shared projection for the class-name words and every image
    tm = result.text_model
    words = ["concept0", "concept1"]
    word_vecs = np.stack([tm.embed_word(w) for w in words])
    stacked = np.vstack([word_vecs, result.index.matrix.astype(np.float64)])
    ids = words + list(result.index.ids)
    kinds = ["word"] * len(words) + ["photo"] * len(result.index)
    print(f"projecting {len(ids)} points with t-SNE...")
    diag = {}
    coords = tsne_project(stacked, perplexity=20.0, iterations=400, seed=0,
                          diagnostics=diag)
    print(f"KL after exaggeration {diag['kl_exaggeration_end']:.3f}, "
          f"final {diag['kl_final']:.3f}")

    placements = canvas_layout(coords, kinds, ids=ids)
    kept_kinds = {}
    for p in placements:
        kept_kinds[p.kind] = kept_kinds.get(p.kind, 0) + 1
    print(f"canvas kept {len(placements)} of {len(ids)} thumbnails: {kept_kinds}")

    os.makedirs(OUT_DIR, exist_ok=True)
    write_coordinates(os.path.join(OUT_DIR, "tsne_coordinates.tsv"), ids, coords)
    write_placements(os.path.join(OUT_DIR, "canvas_placements.tsv"), placements)
    with open(os.path.join(OUT_DIR, "scatter_pairs.tsv"), "w") as fh:
        fh.write("text_distance\timage_distance\tshared_tags\n")
        for td, imd, s in zip(
            scatter.text_distances, scatter.image_distances, scatter.shared_tags
        ):
            fh.write(f"{td:.6f}\t{imd:.6f}\t{int(s)}\n")
    print(f"wrote TSVs to {OUT_DIR}")


if __name__ == "__main__":
    main()
