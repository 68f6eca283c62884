"""Cross-lingual document alignment.

Candidate pairs come from cosine similarity; scoring can stay cosine or
switch to a margin that divides each pair's cosine by the sum of both
endpoints' nearest-neighbour cosines. The margin punishes hubs:
documents that are near everything get large denominators, so a high
raw cosine against a hub stops looking special.

Determinism contract: every similarity is produced by
numeric_core.pairwise_inner on one matrix, neighbour and candidate
selection break ties by ascending document id, neighbour sums
accumulate sequentially in selection order, and the final greedy sweep
orders by (-score, source id, target id). Two runs over the same
document embeddings produce byte-identical results.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from .corpus_store import GoldAlignment
from .doc_pooling import DocumentEmbeddings
from .errors import (
    AlignmentError,
    EmptyCorpus,
    EmptyGold,
    IoFailure,
    KTooLarge,
)

log = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEFAULT_K = 4
DEFAULT_CANDIDATES = 16


class Metric(str, Enum):
    COSINE = "cosine"
    MARGIN = "margin"


@dataclass(frozen=True)
class ScoredPair:
    source: str
    target: str
    score: float
    metric: str


@dataclass(frozen=True)
class AlignmentResult:
    matched: tuple[ScoredPair, ...]
    recall: Optional[float]
    skipped_zero_denominator: int
    metric: Metric
    k: int
    n_candidates: int
    pre_aligned_count: int

    def pairs(self) -> list[tuple[str, str]]:
        return [(p.source, p.target) for p in self.matched]


def _ranked_indices(values: np.ndarray, ids: list[str], top: int) -> list[int]:
    """Indices of the `top` largest values; ties by ascending id."""
    order = sorted(range(len(ids)), key=lambda j: (-values[j], ids[j]))
    return order[:top]


def _neighbor_sum(values: np.ndarray, ids: list[str], k: int) -> float:
    """Sequential sum of the k nearest cosines, in selection order."""
    total = 0.0
    for j in _ranked_indices(values, ids, k):
        total += float(values[j])
    return total


def align(
    src_docs: DocumentEmbeddings,
    tgt_docs: DocumentEmbeddings,
    metric: Metric = Metric.MARGIN,
    k: int = DEFAULT_K,
    n_candidates: int = DEFAULT_CANDIDATES,
    gold: Optional[GoldAlignment] = None,
    pre_aligned: Optional[GoldAlignment] = None,
) -> AlignmentResult:
    """Greedy one-to-one alignment of source documents onto targets.

    Steps: fix any pre-aligned pairs (recorded as matches, removed from
    both pools), take each remaining source's top n_candidates targets
    by cosine, score them with `metric`, then sweep all scored pairs in
    descending score order accepting those whose endpoints are free.

    Margin neighbour sums use the full remaining pools, including the
    candidate pair itself. Pairs whose margin denominator is exactly
    zero are skipped and counted. With `gold` given, recall over the
    gold pairs (pre-aligned ones included) is attached to the result.
    """
    from .numeric_core import pairwise_inner

    if src_docs.count == 0 or tgt_docs.count == 0:
        raise EmptyCorpus(
            f"{src_docs.count} source and {tgt_docs.count} target documents"
        )
    if n_candidates < 1:
        raise AlignmentError(f"n_candidates must be >= 1, got {n_candidates}")

    matched: list[ScoredPair] = []
    fixed_src: set[str] = set()
    fixed_tgt: set[str] = set()
    pre_count = 0
    if pre_aligned is not None and pre_aligned.pairs:
        src_lookup = {d: i for i, d in enumerate(src_docs.doc_ids)}
        tgt_lookup = {d: i for i, d in enumerate(tgt_docs.doc_ids)}
        for s, t in pre_aligned.pairs:
            if s not in src_lookup or t not in tgt_lookup:
                log.warning("pre-aligned pair (%s, %s) not in the corpora; ignored", s, t)
                continue
            cos = float(
                pairwise_inner(
                    src_docs.data[src_lookup[s]][None, :],
                    tgt_docs.data[tgt_lookup[t]][None, :],
                )[0, 0]
            )
            matched.append(ScoredPair(s, t, cos, "url"))
            fixed_src.add(s)
            fixed_tgt.add(t)
            pre_count += 1

    src_keep = [i for i, d in enumerate(src_docs.doc_ids) if d not in fixed_src]
    tgt_keep = [j for j, d in enumerate(tgt_docs.doc_ids) if d not in fixed_tgt]
    src_ids = [src_docs.doc_ids[i] for i in src_keep]
    tgt_ids = [tgt_docs.doc_ids[j] for j in tgt_keep]

    skipped = 0
    if src_ids and tgt_ids:
        if k < 1 or k > min(len(src_ids), len(tgt_ids)):
            raise KTooLarge(
                f"k={k} with {len(src_ids)} source and {len(tgt_ids)} target documents"
            )
        sims = pairwise_inner(src_docs.data[src_keep], tgt_docs.data[tgt_keep])

        if metric == Metric.MARGIN:
            src_den = [_neighbor_sum(sims[i], tgt_ids, k) for i in range(len(src_ids))]
            tgt_den = [_neighbor_sum(sims[:, j], src_ids, k) for j in range(len(tgt_ids))]

        scored: list[tuple[float, str, str, int, int]] = []
        cand_count = min(n_candidates, len(tgt_ids))
        for i in range(len(src_ids)):
            for j in _ranked_indices(sims[i], tgt_ids, cand_count):
                if metric == Metric.MARGIN:
                    denom = src_den[i] + tgt_den[j]
                    if denom == 0.0:
                        skipped += 1
                        continue
                    score = float(sims[i, j]) / denom
                else:
                    score = float(sims[i, j])
                scored.append((score, src_ids[i], tgt_ids[j], i, j))

        scored.sort(key=lambda t: (-t[0], t[1], t[2]))
        used_src: set[int] = set()
        used_tgt: set[int] = set()
        for score, sid, tid, i, j in scored:
            if i in used_src or j in used_tgt:
                continue
            used_src.add(i)
            used_tgt.add(j)
            matched.append(ScoredPair(sid, tid, score, metric.value))
        if skipped:
            log.warning("skipped %d candidate pairs with zero margin denominator", skipped)

    rec = recall_against(matched, gold) if gold is not None else None
    return AlignmentResult(
        tuple(matched), rec, skipped, metric, k, n_candidates, pre_count
    )


def recall_against(matched: Iterable[ScoredPair], gold: GoldAlignment) -> float:
    return recall([(p.source, p.target) for p in matched], gold)


def recall(matched_pairs: Iterable[tuple[str, str]], gold: Optional[GoldAlignment] = None) -> float:
    """Fraction of gold pairs present among the matched pairs."""
    if gold is None or len(gold) == 0:
        raise EmptyGold("recall needs a nonempty gold set")
    found = set(matched_pairs)
    hits = sum(1 for pair in gold.pairs if pair in found)
    return hits / len(gold)


# --- TSV --------------------------------------------------------------------------


def write_alignment_tsv(result: AlignmentResult, path: PathLike) -> None:
    """One line per matched pair: source, target, score, metric."""
    lines = ["src_doc_id\ttgt_doc_id\tscore\tmetric"]
    for p in result.matched:
        lines.append(f"{p.source}\t{p.target}\t{p.score:.9g}\t{p.metric}")
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_alignment_tsv(path: PathLike) -> list[ScoredPair]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or lines[0].split("\t") != ["src_doc_id", "tgt_doc_id", "score", "metric"]:
        raise AlignmentError(f"{path}: missing alignment header")
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise AlignmentError(f"{path}:{lineno}: expected 4 fields")
        out.append(ScoredPair(parts[0], parts[1], float(parts[2]), parts[3]))
    return out
