"""Median-based cluster validity: the BWDM family of indices.

ABDM is the average distance between cluster centers over ordered center
pairs; AWDM is the average distance from retained observations to their
own cluster center, with ``retained_count - K`` in the denominator.
BWDM is their ratio: larger means tighter clusters that sit farther
apart.  ``hd_bwdm`` evaluates the index after robust scaling, dimension
reduction and (optionally) trimmed clustering, which is the intended use
on high-dimensional contaminated data.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import pdist

from .clustering import (
    ClusterCenters,
    Partition,
    TRIMMED,
    cluster_centers,
    kmeans,
    trimmed_kmeans,
)
from .errors import NumericalError
from .geometry import _as_points, robust_scale_apply, robust_scale_fit
from .projection import ProjectionModel, fit_pca, fit_random_projection, project

__all__ = [
    "IndexReport",
    "PipelineConfig",
    "SelectKResult",
    "abdm",
    "awdm",
    "bwdm",
    "hd_bwdm",
    "select_k",
]

_PROJECTIONS = ("rp", "pca")
_CENTER_KINDS = ("medoid", "spatial-median")
_CLUSTERERS = ("trimmed-kmeans", "kmeans", "external-labels")


@dataclass(frozen=True)
class IndexReport:
    """One evaluated index value with full provenance.

    ``p`` is None when the index was computed in the original
    (unprojected) space; serializers spell that as ``"FULL"``.
    ``degenerate`` marks a zero within-cluster distance sum, in which
    case ``bwdm`` is the +inf sentinel.
    """

    abdm: float
    awdm: float
    bwdm: float
    K: int
    p: int | None
    alpha: float
    projection: str
    center_kind: str
    seed: int | None
    n_used: int
    degenerate: bool = False

    def __post_init__(self):
        if not self.degenerate:
            expect = self.abdm / self.awdm
            if not math.isclose(self.bwdm, expect, rel_tol=1e-12, abs_tol=0.0):
                raise ValueError(f"bwdm={self.bwdm!r} is not abdm/awdm={expect!r}")

    def to_dict(self) -> dict:
        return {
            "abdm": self.abdm,
            "awdm": self.awdm,
            "bwdm": self.bwdm,
            "k": self.K,
            "p": "FULL" if self.p is None else self.p,
            "alpha": self.alpha,
            "projection": self.projection,
            "center_kind": self.center_kind,
            "seed": self.seed,
            "n_used": self.n_used,
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IndexReport":
        p = d["p"]
        return cls(
            abdm=float(d["abdm"]),
            awdm=float(d["awdm"]),
            bwdm=float(d["bwdm"]),
            K=int(d["k"]),
            p=None if p in (None, "FULL") else int(p),
            alpha=float(d["alpha"]),
            projection=str(d["projection"]),
            center_kind=str(d["center_kind"]),
            seed=None if d["seed"] is None else int(d["seed"]),
            n_used=int(d["n_used"]),
            degenerate=bool(d["degenerate"]),
        )


def abdm(centers: ClusterCenters | np.ndarray) -> float:
    """Average between-center distance over ordered pairs.

    Equals ``sum_{i != j} ||c_i - c_j|| / (K * (K - 1))``; needs K >= 2.
    """
    C = centers.centers if isinstance(centers, ClusterCenters) else _as_points(centers, "centers")
    K = C.shape[0]
    if K < 2:
        raise ValueError(f"abdm needs at least 2 centers, got {K}")
    return float(2.0 * pdist(C).sum() / (K * (K - 1)))


def awdm(X, part: Partition, centers: ClusterCenters) -> float:
    """Average within-cluster distance over retained observations.

    Sums the distance from each retained observation to its cluster
    center and divides by ``retained_count - K``; trimmed observations
    contribute nothing.  Requires ``retained_count > K``.
    """
    X = _as_points(X, "X")
    if X.shape[0] != part.n:
        raise ValueError(f"X has {X.shape[0]} rows but the partition labels {part.n}")
    retained = part.retained_count
    if retained <= part.K:
        raise ValueError(f"awdm needs retained_count > K, got {retained} <= {part.K}")
    mask = ~part.trimmed_mask
    diffs = X[mask] - centers.centers[part.labels[mask]]
    total = float(np.sqrt((diffs**2).sum(axis=1)).sum())
    return total / (retained - part.K)


def bwdm(
    X,
    part: Partition,
    center_kind: str = "spatial-median",
    *,
    projection: str = "none",
    p: int | None = None,
    seed: int | None = None,
) -> IndexReport:
    """BWDM index of a partition: ``abdm / awdm`` with robust centers.

    Centers default to spatial medians; pass ``center_kind="medoid"``
    for the medoid variant used by the high-dimensional pipeline.  A zero
    AWDM (every retained observation sitting on its center) yields the
    +inf sentinel with ``degenerate=True`` instead of an error.

    The keyword-only arguments only annotate the report's provenance
    fields; they do not change the computation.
    """
    cc = cluster_centers(X, part, kind=center_kind)
    a = abdm(cc)
    w = awdm(X, part, cc)
    if w == 0.0:
        value, degenerate = math.inf, True
    else:
        value, degenerate = a / w, False
    return IndexReport(
        abdm=a,
        awdm=w,
        bwdm=value,
        K=part.K,
        p=p,
        alpha=part.alpha,
        projection=projection,
        center_kind=center_kind,
        seed=seed,
        n_used=part.retained_count,
        degenerate=degenerate,
    )


@dataclass(frozen=True)
class PipelineConfig:
    """Settings for one :func:`hd_bwdm` evaluation.

    ``seed`` feeds two derived streams, one for the random projection and
    one for the clusterer, so a single integer pins the whole run.
    """

    K: int
    p: int
    alpha: float = 0.1
    projection: str = "rp"
    center_kind: str = "medoid"
    clusterer: str = "trimmed-kmeans"
    seed: int = 0
    scale: bool = True

    def __post_init__(self):
        if self.K < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not 0.0 <= self.alpha < 0.5:
            raise ValueError(f"alpha must lie in [0, 0.5), got {self.alpha}")
        if self.projection not in _PROJECTIONS:
            raise ValueError(f"projection must be one of {_PROJECTIONS}, got {self.projection!r}")
        if self.center_kind not in _CENTER_KINDS:
            raise ValueError(f"center_kind must be one of {_CENTER_KINDS}, got {self.center_kind!r}")
        if self.clusterer not in _CLUSTERERS:
            raise ValueError(f"clusterer must be one of {_CLUSTERERS}, got {self.clusterer!r}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")


def _sub_seeds(seed: int, n: int = 2) -> list[int]:
    """Derived, documented sub-streams of one pipeline seed."""
    return [int(s) for s in np.random.SeedSequence(int(seed)).generate_state(n, np.uint64)]


def hd_bwdm(
    X_raw,
    cfg: PipelineConfig,
    true_labels: Partition | None = None,
    projection_model: ProjectionModel | None = None,
) -> IndexReport:
    """BWDM of high-dimensional data after scaling, projection and clustering.

    Pipeline: (1) optional median/MAD scaling, (2) dimension reduction to
    ``cfg.p`` via a seeded Gaussian random projection or PCA, (3) a
    partition from trimmed k-means, plain k-means, or caller-supplied
    labels (``cfg.clusterer="external-labels"``, with any excluded rows
    already marked TRIMMED), (4) the index with ``cfg.center_kind``
    centers, everything in the projected space.

    ``projection_model`` lets several calls share one fitted embedding,
    as :func:`select_k` does; it must match ``cfg.projection`` and
    ``cfg.p``.
    """
    X = _as_points(X_raw, "X_raw")
    d = X.shape[1]
    if not cfg.p <= d:
        raise ValueError(f"p={cfg.p} exceeds the data dimension d={d}")
    if cfg.scale:
        X = robust_scale_apply(X, robust_scale_fit(X))
    proj_seed, clust_seed = _sub_seeds(cfg.seed)
    if projection_model is not None:
        if projection_model.kind != cfg.projection or projection_model.p != cfg.p:
            raise ValueError(
                f"supplied projection model ({projection_model.kind}, p={projection_model.p}) "
                f"does not match config ({cfg.projection}, p={cfg.p})"
            )
        model = projection_model
    elif cfg.projection == "rp":
        model = fit_random_projection(d, cfg.p, proj_seed)
    else:
        model = fit_pca(X, cfg.p)
    Xp = project(X, model)

    if cfg.clusterer == "trimmed-kmeans":
        part = trimmed_kmeans(Xp, cfg.K, cfg.alpha, seed=clust_seed)
    elif cfg.clusterer == "kmeans":
        part = kmeans(Xp, cfg.K, seed=clust_seed)
    else:
        if true_labels is None:
            raise ValueError("clusterer='external-labels' requires true_labels")
        if true_labels.n != X.shape[0]:
            raise ValueError(
                f"true_labels cover {true_labels.n} rows but the data has {X.shape[0]}"
            )
        part = true_labels

    return bwdm(
        Xp, part, cfg.center_kind, projection=cfg.projection, p=cfg.p, seed=cfg.seed
    )


@dataclass(frozen=True)
class SelectKResult:
    """Outcome of a K scan: the argmax K and the per-K reports."""

    K_star: int
    reports: dict[int, IndexReport]
    model: ProjectionModel


def select_k(X_raw, k_range, cfg_template: PipelineConfig) -> SelectKResult:
    """Choose K by maximizing BWDM over a candidate range.

    One embedding is fitted from ``cfg_template`` and shared across every
    K so the scan compares partitions, not projections.  A K whose fit
    fails is skipped with a warning; if every K fails a
    :class:`NumericalError` is raised.  Ties go to the smallest K.
    """
    X = _as_points(X_raw, "X_raw")
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise ValueError("k_range is empty")
    n = X.shape[0]
    limit = n * (1.0 - cfg_template.alpha) / 2.0
    if ks[0] < 2 or ks[-1] > limit:
        raise ValueError(
            f"k_range must lie within [2, n*(1-alpha)/2] = [2, {limit:.1f}], got {ks[0]}..{ks[-1]}"
        )
    Xs = robust_scale_apply(X, robust_scale_fit(X)) if cfg_template.scale else X
    proj_seed, _ = _sub_seeds(cfg_template.seed)
    if cfg_template.projection == "rp":
        model = fit_random_projection(X.shape[1], cfg_template.p, proj_seed)
    else:
        model = fit_pca(Xs, cfg_template.p)

    reports: dict[int, IndexReport] = {}
    for k in ks:
        cfg_k = replace(cfg_template, K=k)
        try:
            reports[k] = hd_bwdm(X, cfg_k, projection_model=model)
        except (ValueError, NumericalError) as exc:
            warnings.warn(f"K={k} skipped: {exc}", stacklevel=2)
    if not reports:
        raise NumericalError(f"no K in {ks[0]}..{ks[-1]} produced a usable fit")
    best_k = None
    for k in sorted(reports):  # ascending with strict >: ties keep the smallest K
        if best_k is None or reports[k].bwdm > reports[best_k].bwdm:
            best_k = k
    return SelectKResult(K_star=best_k, reports=reports, model=model)
