"""Seed derivation, replication statistics, diagnostic and sweep drivers."""

import math

import numpy as np
import pytest

from hdbwdm import MixtureConfig, NumericalError, PipelineConfig, generate
from hdbwdm.harness import (
    _METHOD_CODES,
    _TAG_REPLICATION,
    RepResult,
    SweepCell,
    derive_seed,
    replication_stats,
    run_diagnostic,
    run_select_k,
    run_sweep,
)


def test_replication_stats_constant_stream():
    stats = replication_stats([5.0, 5.0, 5.0])
    assert stats.mean == 5.0
    assert stats.sd == 0.0
    assert stats.cv == 0.0
    assert stats.sd_defined and stats.cv_defined


def test_replication_stats_hand_pair():
    stats = replication_stats([1.0, 3.0])
    assert stats.mean == pytest.approx(2.0)
    assert stats.sd == pytest.approx(math.sqrt(2.0))
    assert stats.cv == pytest.approx(math.sqrt(2.0) / 2.0)


def test_replication_stats_single_value():
    stats = replication_stats([7.0])
    assert stats.mean == 7.0
    assert math.isnan(stats.sd)
    assert not stats.sd_defined
    assert not stats.cv_defined


def test_replication_stats_zero_mean_leaves_cv_undefined():
    stats = replication_stats([-1.0, 1.0])
    assert stats.mean == 0.0
    assert stats.sd == pytest.approx(math.sqrt(2.0))
    assert math.isnan(stats.cv)


def test_replication_stats_rejects_empty():
    with pytest.raises(ValueError, match="at least one"):
        replication_stats([])


def test_derive_seed_is_a_pure_function_of_the_path():
    assert derive_seed(3, 1, 4) == derive_seed(3, 1, 4)
    assert derive_seed(3, 1, 4) != derive_seed(3, 4, 1)
    assert derive_seed(3, 1, 4) != derive_seed(4, 1, 4)
    assert derive_seed(3) != derive_seed(3, 2)
    assert 0 <= derive_seed(0) < 2**64


def _small_mixture(**overrides):
    base = dict(n_inliers=40, d=30, K_true=2, outlier_fraction=0.1)
    base.update(overrides)
    return MixtureConfig(**base)


def test_diagnostic_entries_share_one_embedding():
    rep = run_diagnostic(_small_mixture(), p=8, alpha=0.1, seed=5)
    assert set(rep.entries) == {"true", "kmeans", "trimmed-kmeans"}
    for entry in rep.entries.values():
        assert entry.bwdm == pytest.approx(entry.abdm / entry.awdm, rel=1e-12)
        assert entry.p == 8
        assert entry.center_kind == "medoid"
        assert entry.projection == "rp"
    assert rep.master_seed == 5
    assert rep.projection_seed == derive_seed(5, 1)
    assert rep.config.seed == derive_seed(5, 0)
    # the true partition pre-trims exactly the contamination rows
    assert rep.entries["true"].n_used == 40


def test_diagnostic_is_deterministic():
    a = run_diagnostic(_small_mixture(), p=8, alpha=0.1, seed=11)
    b = run_diagnostic(_small_mixture(), p=8, alpha=0.1, seed=11)
    assert a == b
    c = run_diagnostic(_small_mixture(), p=8, alpha=0.1, seed=12)
    assert a != c


def test_diagnostic_easy_instance_agreement():
    # clean, widely spaced clusters: every partition recovers the truth,
    # so the three index values agree (well inside the 10% allowance)
    easy = MixtureConfig(
        n_inliers=45, d=40, K_true=3, center_spacing=60.0, outlier_fraction=0.0
    )
    for seed in range(5):
        rep = run_diagnostic(easy, p=10, alpha=0.0, seed=seed)
        vals = [e.bwdm for e in rep.entries.values()]
        assert max(vals) - min(vals) <= 0.10 * min(vals)


def test_sweep_cell_bookkeeping():
    cells = run_sweep(_small_mixture(), [6, 10], ["rp", "pca"], reps=3, alpha=0.1, master_seed=9)
    assert [(c.p, c.method) for c in cells] == [(6, "rp"), (6, "pca"), (10, "rp"), (10, "pca")]
    for cell in cells:
        assert cell.reps == len(cell.per_rep) == 3
        stats = replication_stats([r.value for r in cell.per_rep])
        assert cell.mean_bwdm == pytest.approx(stats.mean, rel=1e-12)
        assert cell.sd_bwdm == pytest.approx(stats.sd, rel=1e-12)
        assert cell.cv == pytest.approx(stats.cv, rel=1e-12)
        assert cell.sd_bwdm >= 0.0
        for rep_index, rec in enumerate(cell.per_rep):
            assert rec.rep == rep_index
            assert rec.seed == derive_seed(
                9, _TAG_REPLICATION, cell.p, _METHOD_CODES[cell.method], rec.rep
            )


def test_sweep_cell_rejects_mismatched_replication_count():
    with pytest.raises(ValueError, match="replication records"):
        SweepCell(
            p=5,
            method="rp",
            reps=2,
            mean_bwdm=1.0,
            sd_bwdm=0.0,
            cv=0.0,
            per_rep=(RepResult(rep=0, seed=1, value=1.0),),
        )


def test_sweep_validation():
    cfg = _small_mixture()
    with pytest.raises(ValueError, match="reps"):
        run_sweep(cfg, [6], ["rp"], reps=1, alpha=0.1, master_seed=0)
    with pytest.raises(ValueError, match="non-empty"):
        run_sweep(cfg, [], ["rp"], reps=2, alpha=0.1, master_seed=0)
    with pytest.raises(ValueError, match="non-empty"):
        run_sweep(cfg, [6], [], reps=2, alpha=0.1, master_seed=0)
    with pytest.raises(ValueError, match="unknown method"):
        run_sweep(cfg, [6], ["umap"], reps=2, alpha=0.1, master_seed=0)


def test_sweep_cells_do_not_depend_on_the_rest_of_the_grid():
    cfg = _small_mixture()
    full = run_sweep(cfg, [6, 10], ["rp", "pca"], reps=3, alpha=0.1, master_seed=9)
    alone = run_sweep(cfg, [10], ["rp", "pca"], reps=3, alpha=0.1, master_seed=9)
    assert [c for c in full if c.p == 10] == alone


def test_sweep_worker_count_does_not_change_results():
    cfg = _small_mixture()
    serial = run_sweep(cfg, [6], ["rp", "pca"], reps=3, alpha=0.1, master_seed=4)
    pooled = run_sweep(cfg, [6], ["rp", "pca"], reps=3, alpha=0.1, master_seed=4, n_workers=2)
    assert serial == pooled


def test_sweep_identical_seeds_give_zero_sd():
    from hdbwdm.harness import _sweep_job

    cfg = _small_mixture()
    X = generate(cfg).X
    payload = (6, "rp", 0, 123, cfg, 0.1, False, X)
    a = _sweep_job(payload)
    b = _sweep_job(payload)
    assert a == b and a[5] is None
    stats = replication_stats([a[4], b[4]])
    assert stats.sd == 0.0


def test_sweep_failure_cap_names_the_cell():
    # two coincident-point blobs whose shuffle leaves one blob occupying
    # the positions the trim step discards: every restart of every
    # replication empties a cluster, tripping the 20% failure cap
    blob = MixtureConfig(
        n_inliers=6, d=12, K_true=2, center_spacing=15.0,
        within_sd=1e-300, outlier_fraction=0.0,
    )
    with pytest.raises(NumericalError, match=r"cell \(p=4, method=rp\) failed 3/3"):
        run_sweep(blob, [4], ["rp"], reps=3, alpha=0.45, master_seed=0)


def test_sweep_fresh_data_mode():
    cfg = _small_mixture()
    fresh = run_sweep(cfg, [6], ["rp"], reps=3, alpha=0.1, master_seed=9, fresh_data=True)
    again = run_sweep(cfg, [6], ["rp"], reps=3, alpha=0.1, master_seed=9, fresh_data=True)
    assert fresh == again
    fixed = run_sweep(cfg, [6], ["rp"], reps=3, alpha=0.1, master_seed=9)
    assert fresh != fixed


def test_run_select_k_scores_truth_in_the_scan_embedding():
    ds = generate(
        MixtureConfig(n_inliers=40, d=20, K_true=3, center_spacing=40.0,
                      outlier_fraction=0.2, seed=6)
    )
    template = PipelineConfig(K=2, p=8, alpha=0.2, seed=3)
    report = run_select_k(ds, range(2, 5), template, score_true=True)
    assert set(report.reports) == {2, 3, 4}
    assert report.K_star in (2, 3, 4)
    assert report.true_report is not None
    assert report.true_report.p == 8
    assert report.true_report.n_used == 40  # contamination rows pre-trimmed


def test_run_select_k_on_a_plain_matrix():
    X = generate(
        MixtureConfig(n_inliers=30, d=12, K_true=2, center_spacing=40.0,
                      outlier_fraction=0.0, seed=1)
    ).X
    template = PipelineConfig(K=2, p=6, alpha=0.1, seed=0)
    report = run_select_k(X, [2, 3], template)
    assert report.true_report is None
    assert set(report.reports) == {2, 3}
    with pytest.raises(ValueError, match="score_true"):
        run_select_k(X, [2, 3], template, score_true=True)
