"""Command-line interface.

Subcommands mirror the pipeline stages (debias, weights, pool, align,
eval, classify-lang, viz-pca) plus run-all, which chains them over a
bilingual corpus and writes every intermediate artifact into a
directory. Logs go to stderr; structured results go to stdout or the
requested summary file as JSON with the effective config echoed in.

Exit codes: 0 success, 1 stage failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import alignment as al
from . import corpus_store as cs
from . import debias as db
from . import density_weighting as dw
from . import doc_pooling as dp
from .config import PipelineConfig, load_config
from .errors import LawdrError
from .numeric_core import pca_reduce

log = logging.getLogger("lawdr")


def _emit_json(payload: dict, path: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_corpus(emb_path: str, manifest_path: Optional[str]):
    matrix = cs.load_embeddings(emb_path)
    manifest = None
    if manifest_path:
        manifest = cs.load_manifest(manifest_path, rows=matrix.rows)
        matrix = cs.attach_ids(matrix, manifest)
    return matrix, manifest


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    """File config (if any) overridden by explicitly passed flags."""
    config = load_config(args.config) if getattr(args, "config", None) else PipelineConfig()
    overrides = {}
    for name in (
        "rank",
        "rank_threshold",
        "kernel",
        "folds",
        "d_reduced",
        "bandwidth",
        "density_on",
        "pooling",
        "metric",
        "k",
        "n_candidates",
        "split",
        "seed",
        "threads",
    ):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "no_normalize", False):
        overrides["normalize"] = False
    if overrides.get("rank") == "auto":
        overrides["rank"] = None
        return config.with_overrides(**overrides) if overrides else config
    if "rank" in overrides:
        overrides["rank"] = int(overrides["rank"])
    return config.with_overrides(**overrides) if overrides else config


# --- subcommands -------------------------------------------------------------------


def cmd_debias(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    matrix, _ = _load_corpus(args.emb, args.manifest)
    if config.rank is None:
        if not args.other_lang:
            raise LawdrError("automatic rank selection needs --other-lang")
        other, _ = _load_corpus(args.other_lang, None)
        selection = db.select_rank(
            matrix, other, threshold=config.rank_threshold, seed=config.seed
        )
        rank = selection.m
        log.info("selected rank m=%d (debiased accuracy %.4f)", rank, selection.accuracy)
    else:
        rank = config.rank
    subspace = db.estimate_subspace(matrix, rank, args.lang, center=args.center)
    debiased = db.debias_corpus(matrix, subspace)
    cs.save_embeddings(debiased, args.out)
    subspace_path = args.subspace_out or args.out + ".subspace.emb"
    db.save_subspace(subspace, subspace_path)
    log.info("debiased %d rows with m=%d -> %s", matrix.rows, subspace.m, args.out)
    return 0


def cmd_weights(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    matrix, manifest = _load_corpus(args.emb, args.manifest)
    weights = dw.weight_pipeline(
        matrix,
        d_reduced=config.d_reduced,
        kernel=dw.Kernel(config.kernel),
        folds=config.folds,
        bandwidth=config.bandwidth,
        seed=config.seed,
        threads=config.effective_threads(),
    )
    ids = matrix.ids if matrix.ids is not None else tuple(("", i) for i in range(matrix.rows))
    dw.write_weights_tsv(weights, ids, args.out)
    log.info(
        "wrote %d weights (bandwidth %.6g, kernel %s) -> %s",
        matrix.rows,
        weights.provenance["bandwidth"],
        weights.provenance["kernel"],
        args.out,
    )
    return 0


def cmd_pool(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    matrix, manifest = _load_corpus(args.emb, args.manifest)
    if manifest is None:
        raise LawdrError("pooling needs --manifest")
    if config.pooling == "weighted":
        if not args.weights:
            raise LawdrError("weighted pooling needs --weights")
        _, _, weights = dw.read_weights_tsv(args.weights)
        docs = dp.pool_weighted(matrix, manifest, weights, normalize=config.normalize)
    else:
        docs = dp.pool_mean(matrix, manifest, normalize=config.normalize)
    dp.save_doc_embeddings(docs, args.out)
    log.info("pooled %d documents (%s) -> %s", docs.count, config.pooling, args.out)
    return 0


def cmd_align(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    src = dp.load_doc_embeddings(args.src)
    tgt = dp.load_doc_embeddings(args.tgt)
    gold = cs.load_pairs(args.gold) if args.gold else None
    pre = cs.load_pairs(args.pre_aligned) if args.pre_aligned else None
    result = al.align(
        src,
        tgt,
        metric=al.Metric(config.metric),
        k=config.k,
        n_candidates=config.n_candidates,
        gold=gold,
        pre_aligned=pre,
    )
    al.write_alignment_tsv(result, args.out)
    summary = {
        "config": config.as_dict(),
        "matched": len(result.matched),
        "pre_aligned": result.pre_aligned_count,
        "skipped_zero_denominator": result.skipped_zero_denominator,
        "recall": result.recall,
        "output": str(args.out),
    }
    _emit_json(summary, args.summary)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    matched = al.read_alignment_tsv(args.matched)
    gold = cs.load_pairs(args.gold)
    value = al.recall([(p.source, p.target) for p in matched], gold)
    _emit_json(
        {
            "config": config.as_dict(),
            "recall": value,
            "matched": len(matched),
            "gold": len(gold),
        },
        args.summary,
    )
    return 0


def cmd_classify_lang(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    a, _ = _load_corpus(args.emb_a, None)
    b, _ = _load_corpus(args.emb_b, None)
    _, accuracy = db.train_language_classifier(a, b, split=config.split, seed=config.seed)
    _emit_json(
        {
            "config": config.as_dict(),
            "accuracy": accuracy,
            "rows_a": a.rows,
            "rows_b": b.rows,
        },
        args.summary,
    )
    return 0


def cmd_viz_pca(args: argparse.Namespace) -> int:
    a, man_a = _load_corpus(args.emb_a, args.manifest_a)
    b, man_b = _load_corpus(args.emb_b, args.manifest_b)
    union = np.vstack([a.data.astype(np.float64), b.data.astype(np.float64)])
    reduced = pca_reduce(union, 2).reduced
    if reduced.shape[1] < 2:  # degenerate corpus: pad with zeros
        reduced = np.hstack([reduced, np.zeros((len(reduced), 2 - reduced.shape[1]))])
    lines = ["doc_id,sentence_index,lang,pc1,pc2"]
    row = 0
    for matrix, lang in ((a, args.lang_a), (b, args.lang_b)):
        ids = matrix.ids if matrix.ids is not None else tuple(("", i) for i in range(matrix.rows))
        for doc_id, idx in ids:
            lines.append(f"{doc_id},{idx},{lang},{reduced[row, 0]:.9g},{reduced[row, 1]:.9g}")
            row += 1
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    log.info("wrote %d projected points -> %s", row, args.out)
    return 0


def cmd_run_all(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    matrix_a, manifest_a = _load_corpus(args.emb_a, args.manifest_a)
    matrix_b, manifest_b = _load_corpus(args.emb_b, args.manifest_b)
    if manifest_a is None or manifest_b is None:
        raise LawdrError("run-all needs manifests for both sides")
    gold = cs.load_pairs(args.gold) if args.gold else None
    pre = cs.load_pairs(args.pre_aligned) if args.pre_aligned else None

    if config.rank is None:
        selection = db.select_rank(
            matrix_a, matrix_b, threshold=config.rank_threshold, seed=config.seed
        )
        rank = selection.m
        log.info("selected rank m=%d (debiased accuracy %.4f)", rank, selection.accuracy)
    else:
        rank = config.rank

    sides = {}
    bandwidths = {}
    for tag, matrix, manifest in (
        ("a", matrix_a, manifest_a),
        ("b", matrix_b, manifest_b),
    ):
        lang = manifest.language
        subspace = db.estimate_subspace(matrix, rank, lang)
        debiased = db.debias_corpus(matrix, subspace)
        cs.save_embeddings(debiased, out_dir / f"{tag}.debiased.emb")
        db.save_subspace(subspace, out_dir / f"{tag}.subspace.emb")

        density_input = debiased if config.density_on == "debiased" else matrix
        weights = dw.weight_pipeline(
            density_input,
            d_reduced=config.d_reduced,
            kernel=dw.Kernel(config.kernel),
            folds=config.folds,
            bandwidth=config.bandwidth,
            seed=config.seed,
            threads=config.effective_threads(),
        )
        assert matrix.ids is not None
        dw.write_weights_tsv(weights, matrix.ids, out_dir / f"{tag}.weights.tsv")
        bandwidths[tag] = weights.provenance["bandwidth"]

        if config.pooling == "weighted":
            docs = dp.pool_weighted(debiased, manifest, weights, normalize=config.normalize)
        else:
            docs = dp.pool_mean(debiased, manifest, normalize=config.normalize)
        dp.save_doc_embeddings(docs, out_dir / f"{tag}.docs.emb")
        sides[tag] = docs

    result = al.align(
        sides["a"],
        sides["b"],
        metric=al.Metric(config.metric),
        k=config.k,
        n_candidates=config.n_candidates,
        gold=gold,
        pre_aligned=pre,
    )
    al.write_alignment_tsv(result, out_dir / "alignment.tsv")

    summary = {
        "config": config.as_dict(),
        "rank": rank,
        "bandwidths": bandwidths,
        "matched": len(result.matched),
        "pre_aligned": result.pre_aligned_count,
        "skipped_zero_denominator": result.skipped_zero_denominator,
        "recall": result.recall,
        "documents": {"a": sides["a"].count, "b": sides["b"].count},
    }
    _emit_json(summary, str(out_dir / "summary.json"))
    if result.recall is not None:
        log.info("alignment recall %.4f", result.recall)
    return 0


# --- parser ------------------------------------------------------------------------


def _add_config_flags(p: argparse.ArgumentParser, *names: str) -> None:
    flags = {
        "config": lambda: p.add_argument("--config", help="key = value config file"),
        "rank": lambda: p.add_argument("--rank", help="debias rank, integer or 'auto'"),
        "rank_threshold": lambda: p.add_argument(
            "--threshold", "--rank-threshold", type=float, dest="rank_threshold"
        ),
        "kernel": lambda: p.add_argument("--kernel", choices=["tophat", "gaussian"]),
        "folds": lambda: p.add_argument("--folds", type=int),
        "d_reduced": lambda: p.add_argument("--d-reduced", type=int, dest="d_reduced"),
        "bandwidth": lambda: p.add_argument("--bandwidth", type=float),
        "density_on": lambda: p.add_argument("--density-on", choices=["debiased", "raw"], dest="density_on"),
        "pooling": lambda: p.add_argument("--pooling", choices=["weighted", "mean"]),
        "metric": lambda: p.add_argument("--metric", choices=["margin", "cosine"]),
        "k": lambda: p.add_argument("--k", type=int),
        "n_candidates": lambda: p.add_argument("--n-candidates", type=int, dest="n_candidates"),
        "normalize": lambda: p.add_argument("--no-normalize", action="store_true", dest="no_normalize"),
        "split": lambda: p.add_argument("--split", type=float),
        "seed": lambda: p.add_argument("--seed", type=int),
        "threads": lambda: p.add_argument("--threads", type=int),
    }
    for name in names:
        flags[name]()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lawdr",
        description="Debiased, density-weighted document representations and alignment",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("debias", help="remove dominant language directions")
    p.add_argument("--emb", required=True)
    p.add_argument("--manifest")
    p.add_argument(
        "--other-lang", dest="other_lang",
        help="other language's embeddings, for automatic rank selection",
    )
    p.add_argument("--lang", default="")
    p.add_argument("--center", action="store_true", help="center before estimating directions")
    p.add_argument("--out", required=True)
    p.add_argument("--subspace-out")
    _add_config_flags(p, "config", "rank", "rank_threshold", "seed")
    p.set_defaults(func=cmd_debias, stage="debias")

    p = sub.add_parser("weights", help="density-based sentence weights")
    p.add_argument("--emb", required=True)
    p.add_argument("--manifest")
    p.add_argument("--out", required=True)
    _add_config_flags(p, "config", "kernel", "folds", "d_reduced", "bandwidth", "seed", "threads")
    p.set_defaults(func=cmd_weights, stage="weights")

    p = sub.add_parser("pool", help="pool sentences into document embeddings")
    p.add_argument("--emb", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--weights", help="weights TSV for weighted pooling")
    p.add_argument("--out", required=True)
    _add_config_flags(p, "config", "pooling", "normalize")
    p.set_defaults(func=cmd_pool, stage="pool")

    p = sub.add_parser("align", help="align source documents onto targets")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--gold")
    p.add_argument("--pre-aligned", dest="pre_aligned")
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="write the JSON summary here instead of stdout")
    _add_config_flags(p, "config", "metric", "k", "n_candidates")
    p.set_defaults(func=cmd_align, stage="align")

    p = sub.add_parser("eval", help="recall of an alignment against gold pairs")
    p.add_argument("--matched", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--summary")
    _add_config_flags(p, "config")
    p.set_defaults(func=cmd_eval, stage="eval")

    p = sub.add_parser("classify-lang", help="language classifier accuracy between two corpora")
    p.add_argument("--emb-a", required=True, dest="emb_a")
    p.add_argument("--emb-b", required=True, dest="emb_b")
    p.add_argument("--summary")
    _add_config_flags(p, "config", "split", "seed")
    p.set_defaults(func=cmd_classify_lang, stage="classify-lang")

    p = sub.add_parser("viz-pca", help="2-D PCA projection of two corpora as CSV")
    p.add_argument("--emb-a", required=True, dest="emb_a")
    p.add_argument("--emb-b", required=True, dest="emb_b")
    p.add_argument("--manifest-a", dest="manifest_a")
    p.add_argument("--manifest-b", dest="manifest_b")
    p.add_argument("--lang-a", required=True, dest="lang_a")
    p.add_argument("--lang-b", required=True, dest="lang_b")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_viz_pca, stage="viz-pca")

    p = sub.add_parser("run-all", help="debias, weight, pool, align, evaluate")
    p.add_argument("--emb-a", required=True, dest="emb_a")
    p.add_argument("--manifest-a", required=True, dest="manifest_a")
    p.add_argument("--emb-b", required=True, dest="emb_b")
    p.add_argument("--manifest-b", required=True, dest="manifest_b")
    p.add_argument("--gold")
    p.add_argument("--pre-aligned", dest="pre_aligned")
    p.add_argument("--out-dir", required=True, dest="out_dir")
    _add_config_flags(
        p,
        "config",
        "rank",
        "rank_threshold",
        "kernel",
        "folds",
        "d_reduced",
        "bandwidth",
        "density_on",
        "pooling",
        "metric",
        "k",
        "n_candidates",
        "normalize",
        "seed",
        "threads",
    )
    p.set_defaults(func=cmd_run_all, stage="run-all")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (LawdrError, OSError) as exc:
        print(f"error: {args.stage}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
