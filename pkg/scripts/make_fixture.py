#!/usr/bin/env python3
"""Write a synthetic bilingual corpus to disk in the pipeline's file formats.

Produces <out-dir>/{a,b}.emb, {a,b}.jsonl, gold.tsv and, when --url-overlap
is positive, pre_aligned.tsv holding the pairs recoverable from shared URLs.
The result is a ready-made input for `lawdr run-all`.
"""

import argparse
import sys
from pathlib import Path

from lawdr import corpus_store as cs
from lawdr.synthetic import GeneratorConfig, make_parallel_corpus


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", required=True)
    ap.add_argument("--docs", type=int, default=200)
    ap.add_argument("--min-sentences", type=int, default=4)
    ap.add_argument("--max-sentences", type=int, default=8)
    ap.add_argument("--dim", type=int, default=32)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument(
        "--boilerplate", action="store_true",
        help="append 2-12 near-duplicate filler sentences per document",
    )
    ap.add_argument(
        "--url-overlap", type=float, default=0.0,
        help="fraction of documents sharing a URL across languages",
    )
    args = ap.parse_args(argv)

    config = GeneratorConfig(
        n_docs=args.docs,
        sentences_per_doc=(args.min_sentences, args.max_sentences),
        dim=args.dim,
        boilerplate_range=(2, 12) if args.boilerplate else (0, 0),
        url_overlap=args.url_overlap,
        seed=args.seed,
    )
    corpus = make_parallel_corpus(config)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for tag, matrix, manifest in (
        ("a", corpus.matrix_a, corpus.manifest_a),
        ("b", corpus.matrix_b, corpus.manifest_b),
    ):
        cs.save_embeddings(matrix, out / f"{tag}.emb")
        cs.save_manifest(manifest, out / f"{tag}.jsonl")
    cs.save_pairs(corpus.gold, out / "gold.tsv")
    written = ["a.emb", "a.jsonl", "b.emb", "b.jsonl", "gold.tsv"]

    if args.url_overlap > 0.0:
        pre = cs.pairs_from_urls(corpus.manifest_a, corpus.manifest_b)
        cs.save_pairs(pre, out / "pre_aligned.tsv")
        written.append(f"pre_aligned.tsv ({len(pre)} pairs)")

    print(f"wrote {', '.join(written)} to {out}")
    print(f"{args.docs} documents per side, seed {args.seed}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
