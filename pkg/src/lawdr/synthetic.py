"""Synthetic bilingual corpora with controllable pathologies.

Each parallel document pair shares a topic vector; every sentence adds
per-language structure on top:

  * a language offset direction with a large mean coefficient, the
    dominant signal a language classifier keys on;
  * a shared "hub" direction whose coefficient is drawn per document.
    Raw cosine ranking against the other language is dominated by
    products of these coefficients, so a handful of documents with
    extreme coefficients attract everyone's top candidates. This is the
    failure mode margin scoring and debiasing exist to fix.

Both effects live in each language's top-2 uncentered singular
directions; removing them leaves only shared semantics plus noise,
symmetric across languages.

An optional boilerplate variant appends near-duplicate filler sentences
(all built on one corpus-wide topic) in independently drawn counts per
document side, which drags mean-pooled document vectors toward the
filler direction. Density weighting should mostly neutralize it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .corpus_store import (
    CorpusManifest,
    DocumentRecord,
    EmbeddingMatrix,
    GoldAlignment,
)
from .errors import LawdrError


@dataclass(frozen=True)
class GeneratorConfig:
    n_docs: int = 200
    sentences_per_doc: tuple[int, int] = (4, 8)  # inclusive bounds
    dim: int = 32
    semantic_dim: int = 24
    offset_scale: float = 6.0
    offset_sd: float = 1.0
    hub_sd: float = 2.0
    topic_scale: tuple[float, float] = (1.0, 2.0)
    topic_max_cos: float = 0.5
    sentence_jitter: float = 0.05
    noise: float = 0.1
    boilerplate_range: tuple[int, int] = (0, 0)
    boilerplate_scale: float = 1.8
    boilerplate_jitter: float = 0.03
    url_overlap: float = 0.0
    seed: int = 0
    lang_a: str = "xa"
    lang_b: str = "xb"


@dataclass(frozen=True)
class SyntheticCorpus:
    matrix_a: EmbeddingMatrix
    manifest_a: CorpusManifest
    matrix_b: EmbeddingMatrix
    manifest_b: CorpusManifest
    gold: GoldAlignment
    config: GeneratorConfig = field(repr=False, default=GeneratorConfig())


def spread_unit_vectors(
    rng: np.random.Generator, count: int, dim: int, max_cos: float, tries: int = 500_000
) -> np.ndarray:
    """Unit vectors with pairwise |cos| bounded, by rejection sampling.

    The bound is what guarantees a correct document pair always beats
    every topical near-miss after debiasing; without it two random
    topics in a small space can sit arbitrarily close.
    """
    out: list[np.ndarray] = []
    accepted = np.empty((count, dim))
    for _ in range(tries):
        v = rng.standard_normal(dim)
        v /= float(np.linalg.norm(v))
        if not out or np.abs(accepted[: len(out)] @ v).max() <= max_cos:
            accepted[len(out)] = v
            out.append(v)
            if len(out) == count:
                return accepted.copy()
    raise LawdrError(
        f"could not place {count} vectors in {dim} dims below cos {max_cos}; "
        f"raise the bound or the dimensionality"
    )


def _doc_id(lang: str, index: int) -> str:
    return f"{lang}{index:04d}"


def make_parallel_corpus(config: GeneratorConfig) -> SyntheticCorpus:
    cfg = config
    q = cfg.semantic_dim
    if cfg.dim < q + 3:
        raise LawdrError(f"dim {cfg.dim} too small for {q} topic dims plus 3 structure dims")
    lo, hi = cfg.sentences_per_doc
    if not 1 <= lo <= hi:
        raise LawdrError(f"bad sentences_per_doc {cfg.sentences_per_doc}")
    blo, bhi = cfg.boilerplate_range
    if not 0 <= blo <= bhi:
        raise LawdrError(f"bad boilerplate_range {cfg.boilerplate_range}")

    rng = np.random.default_rng(cfg.seed)

    # orthonormal frame: language offsets, hub direction, topic block
    frame, _ = np.linalg.qr(rng.standard_normal((cfg.dim, cfg.dim)))
    u_lang = {cfg.lang_a: frame[:, 0], cfg.lang_b: frame[:, 1]}
    u_hub = frame[:, 2]
    topic_block = frame[:, 3 : 3 + q]  # dim x q

    boiler_topic = rng.standard_normal(q)
    boiler_topic /= float(np.linalg.norm(boiler_topic))
    topics = spread_unit_vectors(rng, cfg.n_docs, q, cfg.topic_max_cos)
    rhos = rng.uniform(cfg.topic_scale[0], cfg.topic_scale[1], cfg.n_docs)

    rows: dict[str, list[np.ndarray]] = {cfg.lang_a: [], cfg.lang_b: []}
    docs: dict[str, list[DocumentRecord]] = {cfg.lang_a: [], cfg.lang_b: []}
    shared_url_count = math.ceil(cfg.url_overlap * cfg.n_docs)

    def emit_sentence(lang: str, hub_coeff: float, topic_vec: np.ndarray) -> np.ndarray:
        lang_coeff = cfg.offset_scale + cfg.offset_sd * rng.standard_normal()
        v = (
            lang_coeff * u_lang[lang]
            + hub_coeff * u_hub
            + topic_block @ topic_vec
            + cfg.noise * rng.standard_normal(cfg.dim)
        )
        return v

    for d in range(cfg.n_docs):
        n_sent = int(rng.integers(lo, hi + 1))
        topic = rhos[d] * topics[d]
        hub = {
            cfg.lang_a: cfg.hub_sd * rng.standard_normal(),
            cfg.lang_b: cfg.hub_sd * rng.standard_normal(),
        }
        # parallel content: both sides share each sentence's topic jitter
        for _ in range(n_sent):
            jitter = cfg.sentence_jitter * rng.standard_normal(q)
            for lang in (cfg.lang_a, cfg.lang_b):
                rows[lang].append(emit_sentence(lang, hub[lang], topic + jitter))
        # boilerplate: independent count per side, near-duplicate topic
        counts = {
            cfg.lang_a: int(rng.integers(blo, bhi + 1)),
            cfg.lang_b: int(rng.integers(blo, bhi + 1)),
        }
        for lang in (cfg.lang_a, cfg.lang_b):
            for _ in range(counts[lang]):
                filler = (
                    cfg.boilerplate_scale * boiler_topic
                    + cfg.boilerplate_jitter * rng.standard_normal(q)
                )
                rows[lang].append(emit_sentence(lang, hub[lang], filler))
        for lang in (cfg.lang_a, cfg.lang_b):
            start = len(rows[lang]) - n_sent - counts[lang]
            if d < shared_url_count:
                url = f"https://example.test/doc/{d:04d}"
            else:
                url = f"https://example.test/{lang}/{d:04d}"
            docs[lang].append(
                DocumentRecord(_doc_id(lang, d), start, n_sent + counts[lang], url)
            )

    def finish(lang: str) -> tuple[EmbeddingMatrix, CorpusManifest]:
        data = np.vstack(rows[lang]).astype(np.float32)
        return (
            EmbeddingMatrix(cfg.dim, data),
            CorpusManifest(lang, tuple(docs[lang])),
        )

    matrix_a, manifest_a = finish(cfg.lang_a)
    matrix_b, manifest_b = finish(cfg.lang_b)
    gold = GoldAlignment(
        tuple((_doc_id(cfg.lang_a, d), _doc_id(cfg.lang_b, d)) for d in range(cfg.n_docs))
    )
    return SyntheticCorpus(matrix_a, manifest_a, matrix_b, manifest_b, gold, cfg)


def classifier_fixture(seed: int = 0) -> SyntheticCorpus:
    """Two languages x 500 sentences with rank-2 language structure."""
    return make_parallel_corpus(
        GeneratorConfig(n_docs=100, sentences_per_doc=(5, 5), seed=seed)
    )


def alignment_fixture(seed: int = 0, boilerplate: bool = False) -> SyntheticCorpus:
    """200 parallel documents; optionally with duplicated-sentence filler."""
    cfg = GeneratorConfig(n_docs=200, seed=seed)
    if boilerplate:
        cfg = replace(cfg, boilerplate_range=(2, 12))
    return make_parallel_corpus(cfg)
