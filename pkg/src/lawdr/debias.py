"""Dominant-direction removal.

Sentence embeddings carry strong language-identity directions that
swamp cross-lingual similarity. The top-m uncentered singular
directions of one language's corpus capture most of that signal;
subtracting each row's projection onto them leaves a representation in
which a linear language classifier should sit near chance.

The classifier here doubles as the measuring stick: rank selection
sweeps candidate m values and keeps the smallest one that pushes
held-out classification accuracy below a threshold.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .corpus_store import EmbeddingMatrix, load_embeddings, save_embeddings
from .errors import DimMismatch, IoFailure, KTooLarge, NoRankSatisfies, TooFewSamples
from .numeric_core import OrthonormalBasis, project_out, truncated_svd

log = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEFAULT_RANK_THRESHOLD = 0.55
DEFAULT_RANK_CANDIDATES = tuple(2**i for i in range(10))  # 1 .. 512


@dataclass(frozen=True)
class LanguageSubspace:
    """Top-m dominant directions of one language's sentence embeddings."""

    language: str
    m: int
    basis: OrthonormalBasis
    singular_values: np.ndarray

    def __post_init__(self) -> None:
        if self.m != self.basis.k:
            raise KTooLarge(f"m={self.m} but basis has {self.basis.k} vectors")


def estimate_subspace(
    matrix: EmbeddingMatrix, m: int, language: str = "", center: bool = False
) -> LanguageSubspace:
    """Uncentered top-m singular directions of the corpus.

    Uncentered is deliberate: the language signal lives in the mean as
    much as the variance, and removing centered principal components
    would leave the mean offset intact. `center=True` switches to
    conventional PCA directions for comparison runs.

    m must be at least 1 and no larger than the embedding dim; when m
    exceeds the row count it is clamped to it (with a warning) since the
    corpus cannot support more directions than rows.
    """
    if m < 1:
        raise KTooLarge(f"m must be >= 1, got {m}")
    if m > matrix.dim:
        raise KTooLarge(f"m={m} exceeds embedding dim {matrix.dim}")
    if m > matrix.rows:
        log.warning(
            "rank %d exceeds corpus size %d; clamping to %d", m, matrix.rows, matrix.rows
        )
        m = matrix.rows
    data = matrix.data.astype(np.float64)
    if center:
        data = data - data.mean(axis=0)
    basis, svals = truncated_svd(data, m)
    return LanguageSubspace(language, m, basis, svals)


def debias_corpus(matrix: EmbeddingMatrix, subspace: LanguageSubspace) -> EmbeddingMatrix:
    """Remove each row's projection onto the language subspace."""
    if matrix.dim != subspace.basis.dim:
        raise DimMismatch(
            f"corpus dim {matrix.dim} vs subspace dim {subspace.basis.dim}"
        )
    resid = project_out(matrix.data.astype(np.float64), subspace.basis)
    return EmbeddingMatrix(matrix.dim, resid.astype(np.float32), matrix.ids)


def language_components(matrix: EmbeddingMatrix, subspace: LanguageSubspace) -> np.ndarray:
    """The part debiasing removes: per-row projections onto the subspace."""
    if matrix.dim != subspace.basis.dim:
        raise DimMismatch(
            f"corpus dim {matrix.dim} vs subspace dim {subspace.basis.dim}"
        )
    data = matrix.data.astype(np.float64)
    v = subspace.basis.vectors
    return (data @ v.T) @ v


@dataclass(frozen=True)
class DecomposedEmbedding:
    language_component: np.ndarray
    semantic_component: np.ndarray
    coefficients: np.ndarray


def decompose(vector: np.ndarray, subspace: LanguageSubspace) -> DecomposedEmbedding:
    """Split one vector into its language and semantic parts.

    The parts are orthogonal, so inner products split additively:
    <v1, v2> == <lang1, lang2> + <sem1, sem2>.
    """
    v = np.asarray(vector, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != subspace.basis.dim:
        raise DimMismatch(f"vector shape {v.shape} vs subspace dim {subspace.basis.dim}")
    coeffs = subspace.basis.vectors @ v
    lang = coeffs @ subspace.basis.vectors
    return DecomposedEmbedding(lang, v - lang, coeffs)


def save_subspace(subspace: LanguageSubspace, path: PathLike) -> None:
    """Basis rows as an embedding container plus a JSON sidecar."""
    vecs = subspace.basis.vectors.astype(np.float32)
    save_embeddings(EmbeddingMatrix(vecs.shape[1], vecs), path)
    sidecar = {
        "lang": subspace.language,
        "m": subspace.m,
        "singular_values": [float(s) for s in subspace.singular_values],
    }
    try:
        Path(str(path) + ".json").write_text(
            json.dumps(sidecar, indent=2) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise IoFailure(f"cannot write subspace sidecar: {exc}") from exc


def load_subspace(path: PathLike) -> LanguageSubspace:
    matrix = load_embeddings(path)
    try:
        sidecar = json.loads(Path(str(path) + ".json").read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read subspace sidecar: {exc}") from exc
    basis = OrthonormalBasis(matrix.data.astype(np.float64))
    return LanguageSubspace(
        sidecar["lang"],
        int(sidecar["m"]),
        basis,
        np.asarray(sidecar["singular_values"], dtype=np.float64),
    )


# --- language classifier -------------------------------------------------------


@dataclass(frozen=True)
class LinearLanguageClassifier:
    """Logistic regression separating language a (0) from language b (1)."""

    weights: np.ndarray
    bias: float

    def decision_values(self, data: np.ndarray) -> np.ndarray:
        return np.asarray(data, dtype=np.float64) @ self.weights + self.bias

    def predict(self, data: np.ndarray) -> np.ndarray:
        return (self.decision_values(data) >= 0.0).astype(np.int64)


_EPOCHS = 200
_STEP = 0.1
_L2 = 1e-3
_MIN_PER_CLASS = 10


def train_language_classifier(
    corpus_a: EmbeddingMatrix,
    corpus_b: EmbeddingMatrix,
    split: float = 0.8,
    seed: int = 0,
) -> tuple[LinearLanguageClassifier, float]:
    """Train on a deterministic stratified split; return held-out accuracy.

    Full-batch gradient descent on L2-regularized log loss, fixed step
    and epoch count. No early stopping, so the result depends only on
    the data and the shuffle seed.
    """
    if corpus_a.dim != corpus_b.dim:
        raise DimMismatch(f"dims differ: {corpus_a.dim} vs {corpus_b.dim}")
    if not 0.0 < split < 1.0:
        raise ValueError(f"split must be in (0, 1), got {split}")
    if min(corpus_a.rows, corpus_b.rows) < _MIN_PER_CLASS:
        raise TooFewSamples(
            f"need at least {_MIN_PER_CLASS} rows per language, got "
            f"{corpus_a.rows} and {corpus_b.rows}"
        )

    rng = np.random.default_rng(seed)
    parts = []
    for label, corpus in ((0, corpus_a), (1, corpus_b)):
        order = rng.permutation(corpus.rows)
        cut = int(round(split * corpus.rows))
        cut = min(max(cut, 1), corpus.rows - 1)
        x = corpus.data.astype(np.float64)[order]
        parts.append((x[:cut], x[cut:], label))

    x_train = np.vstack([p[0] for p in parts])
    y_train = np.concatenate([np.full(len(p[0]), p[2], dtype=np.float64) for p in parts])
    x_test = np.vstack([p[1] for p in parts])
    y_test = np.concatenate([np.full(len(p[1]), p[2], dtype=np.int64) for p in parts])

    w = np.zeros(corpus_a.dim)
    b = 0.0
    n = len(x_train)
    for _ in range(_EPOCHS):
        z = x_train @ w + b
        p = 1.0 / (1.0 + np.exp(-z))
        err = p - y_train
        w = w - _STEP * ((x_train.T @ err) / n + _L2 * w)
        b = b - _STEP * float(err.mean())

    clf = LinearLanguageClassifier(w, b)
    accuracy = float((clf.predict(x_test) == y_test).mean())
    return clf, accuracy


@dataclass(frozen=True)
class RankSelection:
    m: int
    accuracy: float
    tried: dict[int, float]


def select_rank(
    corpus_a: EmbeddingMatrix,
    corpus_b: EmbeddingMatrix,
    threshold: float = DEFAULT_RANK_THRESHOLD,
    candidates: Optional[Sequence[int]] = None,
    seed: int = 0,
) -> RankSelection:
    """Smallest rank whose removal drops classifier accuracy below threshold.

    Candidates default to powers of two, clamped to the embedding dim.
    Subspaces are estimated per language on the full corpus (estimation
    is unsupervised); only the classifier uses the train/test split.
    The accuracy comparison is strict, except that a threshold >= 1.0
    accepts any rank: accuracy cannot exceed 1, so such a threshold is
    vacuous even for a perfectly separable corpus.
    """
    dim = corpus_a.dim
    if candidates is None:
        candidates = DEFAULT_RANK_CANDIDATES
    usable = sorted({int(c) for c in candidates if 1 <= int(c) <= dim})
    if not usable:
        raise KTooLarge(f"no candidate rank in [1, {dim}]")

    tried: dict[int, float] = {}
    best = np.inf
    for m in usable:
        sub_a = estimate_subspace(corpus_a, m, "a")
        sub_b = estimate_subspace(corpus_b, m, "b")
        _, acc = train_language_classifier(
            debias_corpus(corpus_a, sub_a), debias_corpus(corpus_b, sub_b), seed=seed
        )
        tried[m] = acc
        best = min(best, acc)
        log.info("rank sweep: m=%d accuracy=%.4f", m, acc)
        if acc < threshold or threshold >= 1.0:
            return RankSelection(m, acc, tried)
    raise NoRankSatisfies(
        f"no candidate rank reached accuracy < {threshold}; best was {best:.4f}",
        best_accuracy=float(best),
    )
