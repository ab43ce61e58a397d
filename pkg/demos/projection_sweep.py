"""Stability of the index across projection dimension and method.

Each cell replicates the full pipeline (scale, project, trimmed
k-means, score) with independent projection and clusterer seeds on one
fixed contaminated benchmark.  The coefficient of variation says how
much a single random projection draw matters at each target dimension.
"""

from hdbwdm import MixtureConfig, run_sweep

cfg = MixtureConfig()  # standard benchmark: 500 inliers, d=500, K=5, 10% outliers
cells = run_sweep(cfg, p_values=[50, 150, 300], methods=["rp", "pca"], reps=5,
                  alpha=0.10, master_seed=0)

print(f"{cfg.n_total} rows, d={cfg.d}, K={cfg.K_true}, 5 replications per cell\n")
print(f"{'p':>5s} {'method':8s} {'mean':>9s} {'sd':>8s} {'cv':>8s}")
for cell in cells:
    print(
        f"{cell.p:5d} {cell.method:8s} {cell.mean_bwdm:9.3f}"
        f" {cell.sd_bwdm:8.3f} {cell.cv:8.4f}"
    )

print("\nrandom projections carry draw-to-draw scatter that shrinks as p")
print("grows while their mean barely moves.  PCA of a fixed dataset is")
print("deterministic (sd 0: the embedding has no randomness here and every")
print("clusterer seed finds the same fit), and its value drifts toward the")
print("random-projection level as p approaches d.")
