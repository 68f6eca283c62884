"""Deterministic linear-algebra kernels.

Everything here is float64 and reproducible bit-for-bit across runs on
the same machine: iteration starts come from a fixed seeded generator,
reductions happen in fixed order, and ties break by first index.

The truncated SVD works on the smaller Gram matrix (M'M when dim <=
rows, MM' otherwise) with block power iteration. QR re-orthonormalizes
the block each step, which is what keeps the k directions from
collapsing onto the dominant one; a final k-by-k Rayleigh-Ritz solve
aligns the converged subspace with the individual singular directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimMismatch,
    DTooLarge,
    KTooLarge,
    NotOrthonormal,
    NumericError,
)

_INIT_SEED = 20240611  # iteration starts and basis completions
_ORTHO_TOL = 1e-6
_SUBSPACE_TOL = 1e-9
_ITER_CAP = 12000  # operator applications; one QR per application
# eigenvalue shift (after normalization) pinning exact-null directions
# so they do not wander under floating-point noise
_NULL_SHIFT = 1e-6
# singular values below floor * sigma_max are treated as zero; mapping
# left to right vectors divides by sigma, and below this the quotient
# is numerical noise
_SIGMA_FLOOR = 1e-5


@dataclass(frozen=True)
class OrthonormalBasis:
    """Rows are orthonormal vectors spanning a subspace of R^dim."""

    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = self.vectors
        if v.ndim != 2 or v.shape[0] < 1:
            raise NumericError(f"basis must be a nonempty 2-D array, got {v.shape}")
        gram = v @ v.T
        dev = float(np.abs(gram - np.eye(v.shape[0])).max())
        if not np.isfinite(dev) or dev > _ORTHO_TOL:
            raise NotOrthonormal(f"basis deviates from orthonormal by {dev:.3e}")

    @property
    def k(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def projector(self) -> np.ndarray:
        """dim-by-dim orthogonal projector onto the spanned subspace."""
        return self.vectors.T @ self.vectors


def pairwise_inner(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All inner products between rows of a and rows of b.

    This is the one canonical routine for batched inner products. Reuse
    it instead of writing `x @ y.T` inline: BLAS paths for matrix-matrix,
    matrix-vector, and dot products round differently, and downstream
    consumers compare scores for exact equality.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DimMismatch(f"cannot pair shapes {a.shape} and {b.shape}")
    return a @ b.T


def unit_normalize(data: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Scale rows to unit length. Zero rows stay zero; their indices are returned."""
    data = np.asarray(data, dtype=np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", data, data))
    zero_rows = [int(i) for i in np.flatnonzero(norms == 0.0)]
    safe = norms.copy()
    safe[safe == 0.0] = 1.0
    return data / safe[:, None], zero_rows


def project_out(data: np.ndarray, basis: OrthonormalBasis) -> np.ndarray:
    """Remove the basis subspace component from each row: v - sum <v,u_i> u_i."""
    arr = np.asarray(data, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.shape[1] != basis.dim:
        raise DimMismatch(f"data dim {arr.shape[1]} vs basis dim {basis.dim}")
    out = arr - (arr @ basis.vectors.T) @ basis.vectors
    return out[0] if single else out


def _completion_vector(existing: list[np.ndarray], dim: int, rng: np.random.Generator) -> np.ndarray:
    """A deterministic unit vector orthogonal to everything in `existing`."""
    for _ in range(1000):
        cand = rng.standard_normal(dim)
        for u in existing:
            cand = cand - np.dot(cand, u) * u
        norm = float(np.linalg.norm(cand))
        if norm > 1e-3:
            return cand / norm
    raise NumericError("could not complete an orthonormal basis")


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Canonical sign: the largest-magnitude entry of each row is non-negative."""
    out = vectors.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def truncated_svd(data: np.ndarray, k: int) -> tuple[OrthonormalBasis, np.ndarray]:
    """Top-k right singular vectors and singular values of `data`.

    Uncentered: this factors the matrix as given, so on raw embeddings
    the first direction tracks the dominant mean-plus-variance
    structure rather than pure variance.

    Returns (basis, singular_values) with singular values descending
    and each basis vector's largest-magnitude entry non-negative.
    Raises KTooLarge when k exceeds min(rows, dim) and
    ConvergenceFailure when the subspace iteration hits its cap.
    """
    M = np.asarray(data, dtype=np.float64)
    if M.ndim != 2:
        raise NumericError(f"expected a 2-D array, got shape {M.shape}")
    rows, dim = M.shape
    if k < 1 or k > min(rows, dim):
        raise KTooLarge(f"k={k} with min(rows, dim)={min(rows, dim)}")

    right_side = dim <= rows
    G = M.T @ M if right_side else M @ M.T
    p = G.shape[0]
    norm_g = float(np.linalg.norm(G))

    rng = np.random.default_rng(_INIT_SEED)
    if norm_g == 0.0:
        # zero matrix: every direction is singular with value 0
        small = np.eye(p)[:k]
        svals = np.zeros(k)
        basis_vecs = small if right_side else _map_left_to_right(M, small, svals, rng)
        return OrthonormalBasis(_fix_signs(basis_vecs)), svals

    Gn = G / norm_g + _NULL_SHIFT * np.eye(p)
    X, _ = np.linalg.qr(rng.standard_normal((p, k)))
    if X.ndim == 1:
        X = X[:, None]

    # Re-orthonormalize after every operator application. Batching
    # applications would shrink the k-th component by (l_k / l_1)^batch
    # relative to the first before QR sees it; past ~16 orders of
    # magnitude that direction is gone from the float64 block and the
    # iteration stalls above the tolerance.
    converged = False
    crit = np.inf
    for _ in range(_ITER_CAP):
        Q, _ = np.linalg.qr(Gn @ X)
        resid = Q - X @ (X.T @ Q)
        crit = float(np.linalg.norm(resid)) / np.sqrt(k)
        X = Q
        if crit <= _SUBSPACE_TOL:
            converged = True
            break
    if not converged:
        raise ConvergenceFailure(
            f"subspace iteration at residual {crit:.3e} after {_ITER_CAP} steps"
        )

    # Rayleigh-Ritz on the original (unshifted, unnormalized) Gram matrix
    B = X.T @ (G @ X)
    B = (B + B.T) / 2.0
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    V = X @ evecs[:, order]
    svals = np.sqrt(evals)

    if right_side:
        basis_vecs = V.T.copy()
    else:
        basis_vecs = _map_left_to_right(M, V.T, svals, rng)
    return OrthonormalBasis(_fix_signs(basis_vecs)), svals


def _map_left_to_right(
    M: np.ndarray, left: np.ndarray, svals: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Turn left singular vectors into right ones: v_i = M'u_i / sigma_i.

    Directions whose singular value is numerically zero have no defined
    right vector; those get a deterministic orthonormal completion. A
    modified Gram-Schmidt pass cleans up the rounding that the division
    by small sigmas lets in.
    """
    dim = M.shape[1]
    floor = _SIGMA_FLOOR * (svals[0] if svals.size else 0.0)
    out: list[np.ndarray] = []
    for i in range(left.shape[0]):
        if svals[i] > floor and svals[i] > 0.0:
            v = (M.T @ left[i]) / svals[i]
        else:
            v = _completion_vector(out, dim, rng)
        for u in out:
            v = v - np.dot(v, u) * u
        norm = float(np.linalg.norm(v))
        if norm <= 1e-8:
            v = _completion_vector(out, dim, rng)
            norm = 1.0
        out.append(v / norm)
    return np.vstack(out)


@dataclass(frozen=True)
class PcaResult:
    """Centered projection onto leading principal directions."""

    reduced: np.ndarray
    basis: OrthonormalBasis
    mean: np.ndarray


def pca_reduce(data: np.ndarray, d_out: int, clamp: bool = True) -> PcaResult:
    """Center `data` and keep its top d_out principal coordinates.

    When dim <= d_out the basis is the identity directions and reduced
    is exactly the centered input. With clamp=False that case raises
    DTooLarge instead. The component count is also capped at rows - 1
    (a centered matrix has no more rank than that), so very small
    corpora come back with fewer than d_out columns.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise NumericError(f"expected a nonempty 2-D array, got shape {arr.shape}")
    if d_out < 1:
        raise NumericError(f"d_out must be >= 1, got {d_out}")
    rows, dim = arr.shape
    mean = arr.mean(axis=0)
    centered = arr - mean

    if dim <= d_out:
        if not clamp and dim < d_out:
            raise DTooLarge(f"d_out={d_out} exceeds dim={dim}")
        return PcaResult(centered, OrthonormalBasis(np.eye(dim)), mean)

    k = min(d_out, max(rows - 1, 1))
    if float(np.linalg.norm(centered)) == 0.0:
        basis = OrthonormalBasis(np.eye(dim)[:k])
        return PcaResult(np.zeros((rows, k)), basis, mean)
    basis, _ = truncated_svd(centered, k)
    return PcaResult(centered @ basis.vectors.T, basis, mean)
