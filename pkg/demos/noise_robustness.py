"""How badly does caption noise hurt retrieval?

Rewrites a growing fraction of captions with vocabulary drawn from the
wrong concepts, retrains the whole stack at each level, and reports
mean P@5 of class-name queries averaged over three noise seeds.

The corpus here is deliberately hard (six concepts, few documents,
high feature noise) so the degradation is visible; on an easy corpus
every noise level saturates at 1.0 and the table is flat.

    python3 demos/noise_robustness.py
"""

from jointspace.corpus import generate_synthetic
from jointspace.evaluation import noise_sweep
from jointspace.pipeline import make_noise_scorer


def main():
    ds = generate_synthetic(6, 60, 12, noise_sigma=0.8, seed=0)
    print(f"corpus: {len(ds.documents)} items, 6 concepts, feature noise 0.8")
    print("retraining at each noise level (three seeds each)...\n")

    scorer = make_noise_scorer(
        text_cfg={"dim": 16, "epochs": 8, "seed": 0},
        regressor_cfg={"max_iters": 2500, "seed": 0},
    )
    rows = noise_sweep(ds, (0.0, 0.2, 0.4, 0.8), scorer, seeds=(0, 1, 2))

    print(f"{'noise fraction':>14} {'mean P@5':>9}")
    for frac, score in rows:
        bar = "#" * round(score * 40)
        print(f"{frac:>14.1f} {score:>9.3f}  {bar}")

    clean, worst = rows[0][1], rows[-1][1]
    print(f"\nrewriting 80% of captions costs {clean - worst:.3f} P@5 here")


if __name__ == "__main__":
    main()
