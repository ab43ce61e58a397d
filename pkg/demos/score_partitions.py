"""Score three partitions of one contaminated dataset.

Ten percent of the rows are uniform noise spread far beyond the
clusters.  Plain k-means has to absorb those rows somewhere, which
drags its centers and inflates within-cluster distances; trimmed
k-means may discard them.  Scoring both against the ground-truth
labels shows how much of the gap the trimming recovers.
"""

from hdbwdm import MixtureConfig, run_diagnostic

cfg = MixtureConfig(n_inliers=200, d=300, K_true=4, outlier_fraction=0.10)
report = run_diagnostic(cfg, p=60, alpha=0.10, seed=7)

print(
    f"{cfg.n_total} rows in {cfg.d} dimensions ({cfg.n_outliers} outliers), "
    f"projected to p={report.p}, alpha={report.alpha}\n"
)
print(f"{'partition':16s} {'between':>9s} {'within':>9s} {'ratio':>9s} {'rows used':>10s}")
for name in ("true", "kmeans", "trimmed-kmeans"):
    rep = report.entries[name]
    print(f"{name:16s} {rep.abdm:9.3f} {rep.awdm:9.3f} {rep.bwdm:9.3f} {rep.n_used:10d}")

ratio = report.entries["trimmed-kmeans"].bwdm / report.entries["kmeans"].bwdm
print(f"\ntrimming improves the plain k-means score by a factor of {ratio:.1f};")
print("the trimmed fit lands essentially on the ground-truth score because")
print("the discarded rows are exactly the planted contamination.")
