"""Sentence density estimation and inverse-density weights.

Repeated boilerplate (navigation strings, disclaimers, headers) forms
dense clumps in embedding space and drags pooled document vectors
toward itself. The countermeasure: estimate each sentence's density
P(s) with a kernel estimator in a PCA-reduced space, then downweight by

    w_s = b / (b + P(s)),   b = (1/2T) * sum_s P(s)

so sentences at exactly average density get weight 1/3 and duplicates
approach 0. Bandwidth comes from k-fold cross-validation of held-out
log likelihood.

Density evaluation is blocked and optionally threaded; blocks write to
disjoint output slices so the result does not depend on scheduling.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .corpus_store import EmbeddingMatrix, SentenceId
from .errors import (
    AllZeroDensity,
    BadBandwidth,
    DensityError,
    EmptyGrid,
    IoFailure,
    TooFewPoints,
)
from .numeric_core import pca_reduce

log = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEFAULT_REDUCED_DIM = 16
DEFAULT_FOLDS = 5
DEFAULT_GRID_SIZE = 16
_DISTANCE_SUBSAMPLE = 1000
_LOG_FLOOR = 1e-12  # only inside cross-validation scoring
_QUERY_BLOCK = 1024


class Kernel(str, Enum):
    TOPHAT = "tophat"
    GAUSSIAN = "gaussian"


def ball_volume(d: int, radius: float) -> float:
    """Volume of the d-ball, pi^(d/2) r^d / Gamma(d/2 + 1).

    Evaluated through the recurrence C_d = C_{d-2} * 2 pi / d instead of
    the gamma function: libm's gamma is off by an ulp at half-integers,
    and the 1-D unit case (volume 2r) must come out exact.
    """
    if d < 0:
        raise DensityError(f"dimension must be non-negative, got {d}")
    if d == 0:
        return 1.0
    c = 2.0 if d % 2 else 1.0
    k = 1 if d % 2 else 0
    while k < d:
        k += 2
        c *= 2.0 * math.pi / k
    return c * radius**d


def _check_bandwidth(bandwidth: float) -> float:
    h = float(bandwidth)
    if not math.isfinite(h) or h <= 0.0:
        raise BadBandwidth(f"bandwidth must be finite and positive, got {bandwidth!r}")
    return h


def _sq_distances(queries: np.ndarray, refs: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, clipped at 0 against rounding."""
    q2 = np.einsum("ij,ij->i", queries, queries)
    r2 = np.einsum("ij,ij->i", refs, refs)
    d2 = q2[:, None] + r2[None, :] - 2.0 * (queries @ refs.T)
    return np.maximum(d2, 0.0)


def density_at(
    queries: np.ndarray,
    refs: np.ndarray,
    kernel: Kernel,
    bandwidth: float,
    threads: int = 1,
) -> np.ndarray:
    """Kernel density of `refs` evaluated at `queries`.

    Tophat: count of reference points within bandwidth, divided by
    N * ball volume. Gaussian: isotropic normal mixture. Either way the
    estimate at a reference point itself includes that point, so
    densities over a corpus are strictly positive.
    """
    h = _check_bandwidth(bandwidth)
    queries = np.asarray(queries, dtype=np.float64)
    refs = np.asarray(refs, dtype=np.float64)
    if queries.ndim != 2 or refs.ndim != 2 or queries.shape[1] != refs.shape[1]:
        raise DensityError(f"bad shapes {queries.shape} vs {refs.shape}")
    n_ref, d = refs.shape
    if n_ref == 0:
        raise DensityError("no reference points")

    out = np.empty(len(queries), dtype=np.float64)
    blocks = [
        slice(start, min(start + _QUERY_BLOCK, len(queries)))
        for start in range(0, len(queries), _QUERY_BLOCK)
    ]

    def run(block: slice) -> None:
        d2 = _sq_distances(queries[block], refs)
        if kernel == Kernel.TOPHAT:
            counts = (d2 <= h * h).sum(axis=1)
            out[block] = counts / (n_ref * ball_volume(d, h))
        else:
            norm = (2.0 * math.pi * h * h) ** (d / 2.0)
            out[block] = np.exp(-d2 / (2.0 * h * h)).sum(axis=1) / (n_ref * norm)

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, blocks))
    else:
        for block in blocks:
            run(block)
    return out


def estimate_density(
    points: np.ndarray, kernel: Kernel, bandwidth: float, threads: int = 1
) -> np.ndarray:
    """Density of every corpus point against the whole corpus (self included)."""
    points = np.asarray(points, dtype=np.float64)
    return density_at(points, points, kernel, bandwidth, threads=threads)


@dataclass(frozen=True)
class BandwidthSelection:
    bandwidth: float
    mean_log_likelihood: float
    grid: tuple[float, ...]
    scores: tuple[float, ...]


def default_bandwidth_grid(
    points: np.ndarray, seed: int = 0, size: int = DEFAULT_GRID_SIZE
) -> np.ndarray:
    """Log-spaced grid between the 1st and 99th percentile of pair distances.

    Distances come from a fixed-size random subsample of point pairs so
    the grid cost stays flat in corpus size.
    """
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    rng = np.random.default_rng([seed, 1000])
    ii = rng.integers(0, n, _DISTANCE_SUBSAMPLE)
    jj = rng.integers(0, n, _DISTANCE_SUBSAMPLE)
    keep = ii != jj
    if not keep.any():
        return np.array([1.0])
    dists = np.sqrt(
        np.einsum("ij,ij->i", points[ii[keep]] - points[jj[keep]], points[ii[keep]] - points[jj[keep]])
    )
    lo, hi = np.percentile(dists, [1.0, 99.0])
    if hi <= 0.0:
        # all sampled points identical; any bandwidth gives uniform density
        return np.array([1.0])
    if lo <= 0.0:
        lo = max(hi * 1e-3, 1e-9)
    if lo >= hi:
        return np.array([float(hi)])
    return np.geomspace(lo, hi, size)


def select_bandwidth(
    points: np.ndarray,
    kernel: Kernel = Kernel.TOPHAT,
    folds: int = DEFAULT_FOLDS,
    grid: Optional[Sequence[float]] = None,
    seed: int = 0,
) -> BandwidthSelection:
    """Pick the bandwidth maximizing mean held-out log likelihood.

    Deterministic k-fold assignment from the seed. Held-out densities
    are floored at 1e-12 before the log (a tophat can leave a held-out
    point with zero density); the floor exists only here, never in
    final density estimates. Ties prefer the smaller bandwidth.
    """
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    if folds < 2:
        raise DensityError(f"need at least 2 folds, got {folds}")
    if n < folds:
        raise TooFewPoints(f"{n} points with {folds} folds")
    if grid is None:
        grid_arr = default_bandwidth_grid(points, seed=seed)
    else:
        grid_arr = np.sort(np.asarray(list(grid), dtype=np.float64))
        if grid_arr.size == 0:
            raise EmptyGrid("bandwidth grid is empty")
        for h in grid_arr:
            _check_bandwidth(h)

    perm = np.random.default_rng([seed, 1001]).permutation(n)
    fold_masks = []
    for f in range(folds):
        test = np.zeros(n, dtype=bool)
        test[perm[f::folds]] = True
        fold_masks.append(test)

    scores = []
    best_h = None
    best_score = -np.inf
    for h in grid_arr:
        total = 0.0
        for test in fold_masks:
            dens = density_at(points[test], points[~test], kernel, float(h))
            total += float(np.log(np.maximum(dens, _LOG_FLOOR)).sum())
        score = total / n
        scores.append(score)
        if score > best_score:
            best_score = score
            best_h = float(h)
    assert best_h is not None
    return BandwidthSelection(best_h, best_score, tuple(map(float, grid_arr)), tuple(scores))


# --- weights -----------------------------------------------------------------------


@dataclass(frozen=True)
class SentenceWeights:
    densities: np.ndarray
    b_constant: float
    weights: np.ndarray
    provenance: dict = field(default_factory=dict)


def compute_weights(densities: np.ndarray, provenance: Optional[dict] = None) -> SentenceWeights:
    """w = b / (b + P) with b = half the mean density.

    A sentence at exactly average density gets 1/3; an isolated one
    tends to 1; duplicates tend to 0. Scaling all densities by a common
    factor cancels, so weights do not depend on the density unit.
    """
    dens = np.asarray(densities, dtype=np.float64)
    if dens.ndim != 1 or len(dens) == 0:
        raise DensityError(f"expected a nonempty 1-D density array, got {dens.shape}")
    if not np.isfinite(dens).all() or (dens < 0.0).any():
        raise DensityError("densities must be finite and non-negative")
    if not (dens > 0.0).any():
        raise AllZeroDensity("all density estimates are zero")
    b = dens.mean() / 2.0
    weights = b / (b + dens)
    return SentenceWeights(dens, float(b), weights, provenance or {})


def weight_pipeline(
    matrix: EmbeddingMatrix,
    d_reduced: int = DEFAULT_REDUCED_DIM,
    kernel: Kernel = Kernel.TOPHAT,
    folds: int = DEFAULT_FOLDS,
    bandwidth: Optional[float] = None,
    grid: Optional[Sequence[float]] = None,
    seed: int = 0,
    threads: int = 1,
) -> SentenceWeights:
    """PCA-reduce, pick a bandwidth, estimate density, turn into weights.

    Explicit `bandwidth` skips cross-validation. Corpora with fewer
    points than folds cannot be cross-validated; they fall back to
    bandwidth 1.0 with a warning (a single-sentence document ends up at
    weight 1/3 regardless, since any lone density is the average).
    """
    reduced = pca_reduce(matrix.data.astype(np.float64), d_reduced).reduced
    cv = None
    if bandwidth is None:
        if matrix.rows >= max(folds, 2):
            cv = select_bandwidth(reduced, kernel, folds, grid, seed)
            bandwidth = cv.bandwidth
        else:
            bandwidth = 1.0
            log.warning(
                "corpus of %d points is too small for %d-fold bandwidth "
                "selection; using bandwidth 1.0",
                matrix.rows,
                folds,
            )
    dens = estimate_density(reduced, kernel, float(bandwidth), threads=threads)
    provenance = {
        "kernel": kernel.value,
        "bandwidth": float(bandwidth),
        "d_reduced": int(reduced.shape[1]),
        "folds": int(folds),
        "seed": int(seed),
        "cross_validated": cv is not None,
    }
    return compute_weights(dens, provenance)


# --- TSV --------------------------------------------------------------------------


def write_weights_tsv(weights: SentenceWeights, ids: Sequence[SentenceId], path: PathLike) -> None:
    """doc_id, sentence_index, density, weight; 9 significant digits."""
    if len(ids) != len(weights.weights):
        raise DensityError(f"{len(ids)} ids for {len(weights.weights)} weights")
    lines = ["doc_id\tsentence_index\tdensity\tweight"]
    for (doc_id, idx), dens, w in zip(ids, weights.densities, weights.weights):
        lines.append(f"{doc_id}\t{idx}\t{dens:.9g}\t{w:.9g}")
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_weights_tsv(path: PathLike) -> tuple[list[SentenceId], np.ndarray, np.ndarray]:
    """Returns (ids, densities, weights) in file order."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    ids: list[SentenceId] = []
    dens: list[float] = []
    weights: list[float] = []
    lines = text.splitlines()
    if not lines or lines[0].split("\t") != ["doc_id", "sentence_index", "density", "weight"]:
        raise DensityError(f"{path}: missing weights header")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise DensityError(f"{path}:{lineno}: expected 4 fields")
        ids.append((parts[0], int(parts[1])))
        dens.append(float(parts[2]))
        weights.append(float(parts[3]))
    return ids, np.asarray(dens), np.asarray(weights)
