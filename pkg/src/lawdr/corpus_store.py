"""Binary embedding container, corpus manifests, and gold-pair files.

The on-disk embedding format is deliberately minimal: a 16-byte header
(magic "EMB1", version, reserved, dim, rows; all little-endian) followed
by rows*dim float32 values in row-major order. Ids are not stored in the
container; they come from the manifest, a UTF-8 JSON-lines file with one
record per document.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    BadMagic,
    CorpusStoreError,
    DuplicateDocId,
    GoldAlignmentError,
    IoFailure,
    ManifestFormatError,
    NonFiniteValue,
    RangeGap,
    RangeOverlap,
    RowCountMismatch,
    TruncatedFile,
    VersionMismatch,
)

MAGIC = b"EMB1"
VERSION = 1
_HEADER = struct.Struct("<4sHHII")  # magic, version, reserved, dim, rows

PathLike = Union[str, Path]
SentenceId = tuple[str, int]


@dataclass(frozen=True)
class EmbeddingMatrix:
    """A block of sentence embeddings plus optional sentence ids.

    ids, when present, are (doc_id, within-document index) pairs. They
    must be unique, grouped into one contiguous block per document, and
    ascending within each document. When ids is None the rows are
    anonymous and identified by position only (this is what a bare
    container load gives you; attach ids via a manifest).
    """

    dim: int
    data: np.ndarray
    ids: Optional[tuple[SentenceId, ...]] = None

    def __post_init__(self) -> None:
        if self.dim <= 0:
            raise CorpusStoreError(f"dim must be positive, got {self.dim}")
        if self.data.ndim != 2 or self.data.shape[1] != self.dim:
            raise CorpusStoreError(
                f"data shape {self.data.shape} does not match dim={self.dim}"
            )
        if self.data.dtype != np.float32:
            raise CorpusStoreError(f"data must be float32, got {self.data.dtype}")
        bad = _first_nonfinite_row(self.data)
        if bad is not None:
            raise NonFiniteValue(f"non-finite value in row {bad}")
        if self.ids is not None:
            _check_ids(self.ids, self.rows)

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    def with_ids(self, ids: Sequence[SentenceId]) -> "EmbeddingMatrix":
        return EmbeddingMatrix(self.dim, self.data, tuple(ids))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingMatrix):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.ids == other.ids
            and self.data.shape == other.data.shape
            and self.data.tobytes() == other.data.tobytes()
        )


def _first_nonfinite_row(data: np.ndarray) -> Optional[int]:
    if data.size == 0:
        return None
    finite_rows = np.isfinite(data).all(axis=1)
    if finite_rows.all():
        return None
    return int(np.argmin(finite_rows))


def _check_ids(ids: Sequence[SentenceId], rows: int) -> None:
    if len(ids) != rows:
        raise CorpusStoreError(f"{len(ids)} ids for {rows} rows")
    if len(set(ids)) != len(ids):
        raise CorpusStoreError("sentence ids are not unique")
    seen_docs: set[str] = set()
    prev_doc: Optional[str] = None
    prev_idx = -1
    for doc_id, idx in ids:
        if doc_id != prev_doc:
            if doc_id in seen_docs:
                raise CorpusStoreError(
                    f"rows of document {doc_id!r} are not contiguous"
                )
            seen_docs.add(doc_id)
            prev_doc = doc_id
            prev_idx = -1
        if idx <= prev_idx:
            raise CorpusStoreError(
                f"sentence indices not ascending within document {doc_id!r}"
            )
        prev_idx = idx


def save_embeddings(matrix: EmbeddingMatrix, path: PathLike) -> None:
    """Write the container. Ids are not persisted; keep the manifest."""
    header = _HEADER.pack(MAGIC, VERSION, 0, matrix.dim, matrix.rows)
    payload = np.ascontiguousarray(matrix.data, dtype="<f4").tobytes()
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load_embeddings(path: PathLike) -> EmbeddingMatrix:
    """Read a container, validating header and payload.

    Raises BadMagic / VersionMismatch / TruncatedFile / NonFiniteValue
    on malformed input and IoFailure when the OS read fails. A nonzero
    reserved field is treated as VersionMismatch since this reader
    cannot know what a future writer meant by it.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise TruncatedFile(
            f"{path}: {len(raw)} bytes is shorter than the {_HEADER.size}-byte header"
        )
    magic, version, reserved, dim, rows = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise BadMagic(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise VersionMismatch(f"{path}: version {version}, expected {VERSION}")
    if reserved != 0:
        raise VersionMismatch(f"{path}: reserved field is {reserved}, expected 0")
    expected = rows * dim * 4
    actual = len(raw) - _HEADER.size
    if actual != expected:
        raise TruncatedFile(
            f"{path}: payload is {actual} bytes, header promises {expected}"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(rows, dim)
    return EmbeddingMatrix(dim=dim, data=data.copy())


# --- manifests ---------------------------------------------------------------


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: str
    sentence_start: int
    sentence_count: int
    url: Optional[str] = None


@dataclass(frozen=True)
class CorpusManifest:
    """Per-document row ranges for one language's embedding matrix."""

    language: str
    docs: tuple[DocumentRecord, ...] = field(default_factory=tuple)

    def doc_ids(self) -> list[str]:
        return [d.doc_id for d in self.docs]

    def sentence_ids(self) -> list[SentenceId]:
        """Ids in row order: (doc_id, within-document sentence index)."""
        out: list[SentenceId] = []
        for doc in self.docs:
            out.extend((doc.doc_id, i) for i in range(doc.sentence_count))
        return out

    def total_rows(self) -> int:
        return sum(d.sentence_count for d in self.docs)


def validate_manifest(manifest: CorpusManifest, rows: int) -> None:
    """Check that document ranges tile [0, rows) exactly, without repeats."""
    seen: set[str] = set()
    cursor = 0
    for doc in manifest.docs:
        if doc.doc_id in seen:
            raise DuplicateDocId(f"document id {doc.doc_id!r} appears twice")
        seen.add(doc.doc_id)
        if doc.sentence_count < 1:
            raise ManifestFormatError(
                f"document {doc.doc_id!r} has sentence_count {doc.sentence_count}"
            )
        if doc.sentence_start > cursor:
            raise RangeGap(
                f"rows [{cursor}, {doc.sentence_start}) are covered by no document"
            )
        if doc.sentence_start < cursor:
            raise RangeOverlap(
                f"document {doc.doc_id!r} starts at row {doc.sentence_start}, "
                f"row {cursor} was the next uncovered row"
            )
        cursor += doc.sentence_count
    if cursor != rows:
        raise RowCountMismatch(f"manifest covers {cursor} rows, matrix has {rows}")


def load_manifest(path: PathLike, rows: Optional[int] = None) -> CorpusManifest:
    """Parse a JSON-lines manifest; validate coverage when rows is given."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    docs: list[DocumentRecord] = []
    language: Optional[str] = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestFormatError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
        try:
            doc_id = rec["doc_id"]
            lang = rec["lang"]
            start = rec["sentence_start"]
            count = rec["sentence_count"]
        except KeyError as exc:
            raise ManifestFormatError(f"{path}:{lineno}: missing field {exc}") from exc
        if not isinstance(doc_id, str) or not isinstance(lang, str):
            raise ManifestFormatError(f"{path}:{lineno}: doc_id and lang must be strings")
        if not isinstance(start, int) or not isinstance(count, int):
            raise ManifestFormatError(
                f"{path}:{lineno}: sentence_start and sentence_count must be integers"
            )
        if language is None:
            language = lang
        elif lang != language:
            raise ManifestFormatError(
                f"{path}:{lineno}: language {lang!r} differs from {language!r}"
            )
        docs.append(DocumentRecord(doc_id, start, count, rec.get("url")))
    manifest = CorpusManifest(language or "", tuple(docs))
    if rows is not None:
        validate_manifest(manifest, rows)
    return manifest


def save_manifest(manifest: CorpusManifest, path: PathLike) -> None:
    lines = []
    for doc in manifest.docs:
        rec = {
            "doc_id": doc.doc_id,
            "lang": manifest.language,
            "sentence_start": doc.sentence_start,
            "sentence_count": doc.sentence_count,
        }
        if doc.url is not None:
            rec["url"] = doc.url
        lines.append(json.dumps(rec, sort_keys=True))
    try:
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def attach_ids(matrix: EmbeddingMatrix, manifest: CorpusManifest) -> EmbeddingMatrix:
    """Label matrix rows with (doc_id, sentence index) from the manifest."""
    validate_manifest(manifest, matrix.rows)
    return matrix.with_ids(manifest.sentence_ids())


# --- gold / pre-aligned pairs ------------------------------------------------


@dataclass(frozen=True)
class GoldAlignment:
    """One-to-one document pairs: source id TAB target id."""

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        srcs = [s for s, _ in self.pairs]
        tgts = [t for _, t in self.pairs]
        if len(set(srcs)) != len(srcs):
            raise GoldAlignmentError("a source document id appears twice")
        if len(set(tgts)) != len(tgts):
            raise GoldAlignmentError("a target document id appears twice")

    def __len__(self) -> int:
        return len(self.pairs)


def pairs_from_urls(manifest_a: CorpusManifest, manifest_b: CorpusManifest) -> GoldAlignment:
    """Document pairs whose manifests carry the same url.

    Urls that are missing, repeated within a side, or already consumed
    by an earlier pair are skipped; what remains is a clean one-to-one
    set usable as pre-alignment.
    """
    a_by_url: dict[str, list[str]] = {}
    for doc in manifest_a.docs:
        if doc.url:
            a_by_url.setdefault(doc.url, []).append(doc.doc_id)
    pairs: list[tuple[str, str]] = []
    used_src: set[str] = set()
    for doc in manifest_b.docs:
        if not doc.url:
            continue
        candidates = a_by_url.get(doc.url, [])
        if len(candidates) != 1 or candidates[0] in used_src:
            continue
        used_src.add(candidates[0])
        pairs.append((candidates[0], doc.doc_id))
    return GoldAlignment(tuple(pairs))


def load_pairs(path: PathLike) -> GoldAlignment:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    pairs: list[tuple[str, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise GoldAlignmentError(f"{path}:{lineno}: expected 2 tab-separated fields")
        pairs.append((parts[0], parts[1]))
    return GoldAlignment(tuple(pairs))


def save_pairs(gold: GoldAlignment, path: PathLike) -> None:
    lines = [f"{s}\t{t}" for s, t in gold.pairs]
    try:
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
