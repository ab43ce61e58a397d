"""Dimension reduction: Gaussian random projection and PCA.

Random projections use i.i.d. N(0, 1/p) entries, which preserves expected
squared norms (the Johnson-Lindenstrauss regime).  PCA is computed from
the SVD of the mean-centred data with a deterministic sign convention.
``distortion_profile`` measures how far a given embedding actually is
from isometry on sampled point pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .geometry import _as_points

__all__ = [
    "ProjectionModel",
    "DistortionProfile",
    "fit_random_projection",
    "fit_pca",
    "project",
    "distortion_profile",
    "save_projection_model",
    "load_projection_model",
]

_KINDS = ("rp", "pca")


@dataclass(frozen=True)
class ProjectionModel:
    """A fitted linear embedding ``x -> matrix @ (x - centers)``.

    Attributes
    ----------
    kind : str
        "rp" (Gaussian random projection) or "pca".
    matrix : ndarray, shape (p, d)
        Projection rows.  Orthonormal loadings for PCA.
    centers : ndarray, shape (d,)
        Column offsets subtracted before projecting; zeros for "rp".
    p, d : int
        Target and source dimension.
    seed : int or None
        Seed that generated a random projection; None for PCA.
    explained_variance : ndarray or None
        Descending component variances for PCA; None for "rp".
    """

    kind: str
    matrix: np.ndarray
    centers: np.ndarray
    p: int
    d: int
    seed: int | None = None
    explained_variance: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.matrix.shape != (self.p, self.d):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match (p, d)=({self.p}, {self.d})"
            )


def fit_random_projection(d: int, p: int, seed: int) -> ProjectionModel:
    """Draw a p x d Gaussian projection with entries N(0, 1/p).

    The matrix is generated by ``numpy.random.default_rng(seed)`` via
    ``standard_normal``, so one seed always yields one matrix for a given
    numpy generator implementation.

    Preconditions: ``1 <= p <= d``.
    """
    if not 1 <= p <= d:
        raise ValueError(f"need 1 <= p <= d, got p={p}, d={d}")
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((p, d)) / np.sqrt(p)
    return ProjectionModel(
        kind="rp", matrix=matrix, centers=np.zeros(d), p=int(p), d=int(d), seed=int(seed)
    )


def fit_pca(X, p: int) -> ProjectionModel:
    """Top-p principal components of ``X`` via SVD of the centred matrix.

    Loadings are orthonormal rows in descending explained-variance order.
    Each row's sign is fixed so that its largest-magnitude entry is
    positive.  ``p`` may not exceed the attainable rank ``min(n-1, d)``.
    """
    X = _as_points(X, "X")
    n, d = X.shape
    if n < 2:
        raise ValueError(f"PCA needs at least 2 observations, got {n}")
    max_rank = min(n - 1, d)
    if not 1 <= p <= max_rank:
        raise ValueError(
            f"p={p} exceeds the attainable rank {max_rank} for {n} observations in {d} dimensions"
        )
    centers = X.mean(axis=0)
    _, svals, vt = np.linalg.svd(X - centers, full_matrices=False)
    loadings = vt[:p].copy()
    explained = (svals[:p] ** 2) / (n - 1)
    # sign convention: largest-|entry| of each loading made positive
    lead = np.argmax(np.abs(loadings), axis=1)
    signs = np.sign(loadings[np.arange(p), lead])
    signs[signs == 0] = 1.0
    loadings *= signs[:, None]
    return ProjectionModel(
        kind="pca",
        matrix=loadings,
        centers=centers,
        p=int(p),
        d=int(d),
        seed=None,
        explained_variance=explained,
    )


def project(X, model: ProjectionModel) -> np.ndarray:
    """Apply a fitted projection to an (n, d) matrix, returning (n, p)."""
    X = _as_points(X, "X")
    if X.shape[1] != model.d:
        raise ValueError(
            f"dimension mismatch: X has {X.shape[1]} columns, model expects {model.d}"
        )
    return (X - model.centers) @ model.matrix.T


@dataclass(frozen=True)
class DistortionProfile:
    """Distance distortion of an embedding on sampled pairs.

    ``epsilon_hat`` is the largest observed deviation of the squared
    distance ratio from 1, i.e. ``max(|min_ratio-1|, |max_ratio-1|)``.
    """

    epsilon_hat: float
    min_ratio: float
    max_ratio: float
    pairs_sampled: int


def _decode_pair_index(m: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Map linear indices over the i<j pairs of range(n) to (i, j)."""
    # pairs are ordered (0,1),(0,2),...,(0,n-1),(1,2),...; row i starts at
    # i*n - i*(i+3)/2 ... easier: cumulative row lengths and searchsorted.
    row_len = np.arange(n - 1, 0, -1)
    starts = np.concatenate([[0], np.cumsum(row_len)])
    i = np.searchsorted(starts, m, side="right") - 1
    j = m - starts[i] + i + 1
    return i, j


def distortion_profile(X, X_proj, max_pairs: int = 10_000, seed: int = 0) -> DistortionProfile:
    """Squared-distance ratios of an embedding over sampled point pairs.

    Samples up to ``max_pairs`` unordered pairs uniformly without
    replacement (all pairs when there are fewer than ``max_pairs``).
    Pairs with zero distance in the source space are skipped.

    Parameters
    ----------
    X : array-like, shape (n, d)
        Source-space data.
    X_proj : array-like, shape (n, p)
        The same observations after projection, row-aligned with ``X``.
    max_pairs : int
        Sampling cap.
    seed : int
        Seed for the pair sample.
    """
    X = _as_points(X, "X")
    Xp = _as_points(X_proj, "X_proj")
    n = X.shape[0]
    if Xp.shape[0] != n:
        raise ValueError(f"row mismatch: X has {n} rows, X_proj has {Xp.shape[0]}")
    if n < 2:
        raise ValueError("need at least 2 rows to sample pairs")
    total = n * (n - 1) // 2
    if total <= max_pairs:
        lin = np.arange(total)
    else:
        rng = np.random.default_rng(seed)
        lin = rng.choice(total, size=max_pairs, replace=False)
    i, j = _decode_pair_index(lin, n)
    d2_src = ((X[i] - X[j]) ** 2).sum(axis=1)
    d2_dst = ((Xp[i] - Xp[j]) ** 2).sum(axis=1)
    keep = d2_src > 0.0
    if not keep.any():
        raise DataError("all sampled pairs have zero source-space distance")
    ratios = d2_dst[keep] / d2_src[keep]
    lo = float(ratios.min())
    hi = float(ratios.max())
    return DistortionProfile(
        epsilon_hat=max(abs(lo - 1.0), abs(hi - 1.0)),
        min_ratio=lo,
        max_ratio=hi,
        pairs_sampled=int(keep.sum()),
    )


def save_projection_model(model: ProjectionModel, path) -> None:
    """Write a model to a small text format (kind/dims/seed header + CSV rows)."""
    lines = [
        f"kind={model.kind}",
        f"p={model.p}",
        f"d={model.d}",
        f"seed={'none' if model.seed is None else model.seed}",
        "centers=" + ",".join(repr(float(v)) for v in model.centers),
    ]
    if model.explained_variance is None:
        lines.append("explained_variance=none")
    else:
        lines.append(
            "explained_variance=" + ",".join(repr(float(v)) for v in model.explained_variance)
        )
    for row in model.matrix:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_projection_model(path) -> ProjectionModel:
    """Read back a model written by :func:`save_projection_model`."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    try:
        header = dict(ln.split("=", 1) for ln in lines[:6])
        kind = header["kind"]
        p = int(header["p"])
        d = int(header["d"])
        seed = None if header["seed"] == "none" else int(header["seed"])
        centers = np.array([float(v) for v in header["centers"].split(",")])
        if header["explained_variance"] == "none":
            explained = None
        else:
            explained = np.array([float(v) for v in header["explained_variance"].split(",")])
        matrix = np.array([[float(v) for v in ln.split(",")] for ln in lines[6:]])
    except (KeyError, ValueError, IndexError) as exc:
        raise DataError(f"cannot parse projection model file {path}: {exc}") from exc
    if matrix.shape != (p, d):
        raise DataError(f"projection model file {path} has {matrix.shape} rows, expected ({p}, {d})")
    return ProjectionModel(
        kind=kind, matrix=matrix, centers=centers, p=p, d=d, seed=seed,
        explained_variance=explained,
    )
