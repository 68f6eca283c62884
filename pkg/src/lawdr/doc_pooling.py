"""Pooling sentence embeddings into document embeddings.

A document vector is the (optionally weighted) sum of its sentence
vectors, unit-normalized by default so downstream inner products are
cosines. Summation runs in ascending sentence order within each
document; together with fixed-seed upstream stages this keeps whole
pipeline runs byte-identical.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .corpus_store import (
    CorpusManifest,
    EmbeddingMatrix,
    load_embeddings,
    save_embeddings,
    validate_manifest,
)
from .density_weighting import SentenceWeights
from .errors import IoFailure, PoolingError, WeightRowMismatch
from .numeric_core import unit_normalize

log = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class DocumentEmbeddings:
    """One row per document, aligned with doc_ids."""

    dim: int
    doc_ids: tuple[str, ...]
    data: np.ndarray
    pooling: str
    normalized: bool

    def __post_init__(self) -> None:
        if self.data.shape != (len(self.doc_ids), self.dim):
            raise PoolingError(
                f"data shape {self.data.shape} does not match "
                f"{len(self.doc_ids)} docs of dim {self.dim}"
            )

    @property
    def count(self) -> int:
        return len(self.doc_ids)

    def row_for(self, doc_id: str) -> np.ndarray:
        return self.data[self.doc_ids.index(doc_id)]


def _pool(
    matrix: EmbeddingMatrix,
    manifest: CorpusManifest,
    weights: np.ndarray,
    pooling: str,
    normalize: bool,
) -> DocumentEmbeddings:
    validate_manifest(manifest, matrix.rows)
    data = matrix.data.astype(np.float64)
    docs = np.empty((len(manifest.docs), matrix.dim), dtype=np.float64)
    for row, doc in enumerate(manifest.docs):
        block = slice(doc.sentence_start, doc.sentence_start + doc.sentence_count)
        docs[row] = np.add.reduce(weights[block, None] * data[block], axis=0)
    if normalize:
        docs, zero_rows = unit_normalize(docs)
        if zero_rows:
            log.warning(
                "%d document vectors are zero and stay zero after "
                "normalization (first: %s)",
                len(zero_rows),
                manifest.docs[zero_rows[0]].doc_id,
            )
    return DocumentEmbeddings(
        matrix.dim, tuple(manifest.doc_ids()), docs, pooling, normalize
    )


def pool_mean(
    matrix: EmbeddingMatrix, manifest: CorpusManifest, normalize: bool = True
) -> DocumentEmbeddings:
    """Plain average of each document's sentence vectors."""
    validate_manifest(manifest, matrix.rows)
    weights = np.empty(matrix.rows, dtype=np.float64)
    for doc in manifest.docs:
        block = slice(doc.sentence_start, doc.sentence_start + doc.sentence_count)
        weights[block] = 1.0 / doc.sentence_count
    return _pool(matrix, manifest, weights, "mean", normalize)


def pool_weighted(
    matrix: EmbeddingMatrix,
    manifest: CorpusManifest,
    weights: Union[SentenceWeights, np.ndarray],
    normalize: bool = True,
) -> DocumentEmbeddings:
    """Weighted sum of sentence vectors, one weight per corpus row."""
    w = weights.weights if isinstance(weights, SentenceWeights) else np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or len(w) != matrix.rows:
        raise WeightRowMismatch(f"{len(w)} weights for {matrix.rows} sentence rows")
    if not np.isfinite(w).all():
        raise PoolingError("weights must be finite")
    return _pool(matrix, manifest, w, "weighted", normalize)


def save_doc_embeddings(docs: DocumentEmbeddings, path: PathLike) -> None:
    """Embedding container for the vectors, JSON sidecar for identity."""
    save_embeddings(
        EmbeddingMatrix(docs.dim, docs.data.astype(np.float32)), path
    )
    sidecar = {
        "doc_ids": list(docs.doc_ids),
        "pooling": docs.pooling,
        "normalized": docs.normalized,
        "dim": docs.dim,
    }
    try:
        Path(str(path) + ".json").write_text(
            json.dumps(sidecar, indent=2) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise IoFailure(f"cannot write doc-embedding sidecar: {exc}") from exc


def load_doc_embeddings(path: PathLike) -> DocumentEmbeddings:
    matrix = load_embeddings(path)
    try:
        sidecar = json.loads(Path(str(path) + ".json").read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read doc-embedding sidecar: {exc}") from exc
    doc_ids = tuple(sidecar["doc_ids"])
    if len(doc_ids) != matrix.rows:
        raise PoolingError(
            f"sidecar lists {len(doc_ids)} documents, container has {matrix.rows} rows"
        )
    return DocumentEmbeddings(
        matrix.dim,
        doc_ids,
        matrix.data.astype(np.float64),
        str(sidecar.get("pooling", "unknown")),
        bool(sidecar.get("normalized", False)),
    )
