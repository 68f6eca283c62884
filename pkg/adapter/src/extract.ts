/**
 * Corpus extraction: plain-text documents in, EMB1 + manifest out.
 *
 * A corpus is a directory of one-document-per-file plain text; the
 * directory name is the language code unless the config overrides it.
 * Each document is segmented, tokenized, packed into encoder windows,
 * and encoded; each window becomes one embedding row, and the manifest
 * row ranges count windows. Files and rows are processed in sorted
 * order so extraction is deterministic end to end.
 */

import * as fs from "fs";
import * as path from "path";

import { writeEmb1 } from "./emb1";
import { Encoder, loadEncoder } from "./encoder";
import { EmptyDocument, InvalidConfig } from "./errors";
import { DocumentRecord, writeManifest } from "./manifest";
import { segment } from "./segment";

export type Mode = "st" | "mp";
export type Packing = "single" | "multi";

export interface ExtractionConfig {
  model: string;
  mode: Mode;
  packing: Packing;
  maxTokens: number;
  /** Overrides the corpus directory name. */
  language?: string;
  batchSize: number;
}

export const DEFAULT_CONFIG: ExtractionConfig = {
  model: "toy-64",
  mode: "mp",
  packing: "single",
  maxTokens: 128,
  batchSize: 32,
};

export function validateConfig(config: ExtractionConfig): void {
  if (config.maxTokens < 8) {
    throw new InvalidConfig(`maxTokens must be >= 8, got ${config.maxTokens}`);
  }
  if (config.batchSize < 1) {
    throw new InvalidConfig(`batchSize must be >= 1, got ${config.batchSize}`);
  }
  if (config.mode !== "st" && config.mode !== "mp") {
    throw new InvalidConfig(`mode must be "st" or "mp", got ${config.mode}`);
  }
  if (config.packing !== "single" && config.packing !== "multi") {
    throw new InvalidConfig(`packing must be "single" or "multi", got ${config.packing}`);
  }
}

/**
 * Greedy packing in document order: keep adding whole sentences while
 * the window stays within maxTokens, counting the one special token the
 * encoder prepends. A single sentence that cannot fit even alone is
 * truncated to the budget with a warning.
 */
export function packWindows(
  sentenceTokens: string[][],
  maxTokens: number,
  packing: Packing,
  warn: (msg: string) => void = console.warn
): string[][] {
  const capacity = maxTokens - 1; // one slot for the special token
  const fit = (tokens: string[], label: number): string[] => {
    if (tokens.length > capacity) {
      warn(`sentence ${label}: ${tokens.length} tokens truncated to ${capacity}`);
      return tokens.slice(0, capacity);
    }
    return tokens;
  };

  if (packing === "single") {
    return sentenceTokens.map((toks, i) => fit(toks, i));
  }

  const windows: string[][] = [];
  let current: string[] = [];
  sentenceTokens.forEach((raw, i) => {
    const toks = fit(raw, i);
    if (current.length > 0 && current.length + toks.length > capacity) {
      windows.push(current);
      current = [];
    }
    current = current.concat(toks);
  });
  if (current.length > 0) {
    windows.push(current);
  }
  return windows;
}

function meanPool(vectors: Float64Array[], dim: number): Float64Array {
  const out = new Float64Array(dim);
  for (const vec of vectors) {
    for (let i = 0; i < dim; i++) {
      out[i] += vec[i];
    }
  }
  for (let i = 0; i < dim; i++) {
    out[i] /= vectors.length;
  }
  return out;
}

/** One row per window: the special-token vector (st) or the mean of
 * every output token vector including the special one (mp). */
export function embedWindow(encoder: Encoder, tokens: string[], mode: Mode): Float64Array {
  const vectors = encoder.encode(tokens);
  return mode === "st" ? vectors[0] : meanPool(vectors, encoder.dim);
}

export interface ExtractionResult {
  embPath: string;
  manifestPath: string;
  rows: number;
  docs: number;
  dim: number;
}

export function extract(
  corpusDir: string,
  config: ExtractionConfig,
  outPrefix: string
): ExtractionResult {
  validateConfig(config);
  const encoder = loadEncoder(config.model);
  const lang = config.language ?? path.basename(path.resolve(corpusDir));

  const files = fs
    .readdirSync(corpusDir)
    .filter((name) => !name.startsWith(".") && fs.statSync(path.join(corpusDir, name)).isFile())
    .sort();
  if (files.length === 0) {
    throw new EmptyDocument(`no document files in ${corpusDir}`);
  }

  const records: DocumentRecord[] = [];
  const pending: string[][] = [];
  let cursor = 0;
  for (const name of files) {
    const docId = name.replace(/\.[^.]*$/, "");
    const text = fs.readFileSync(path.join(corpusDir, name), "utf-8");
    let sentences: string[];
    try {
      sentences = segment(text, lang);
    } catch (err) {
      if (err instanceof EmptyDocument) {
        throw new EmptyDocument(`${name}: ${err.message}`);
      }
      throw err;
    }
    const windows = packWindows(
      sentences.map((s) => encoder.tokenize(s)),
      config.maxTokens,
      config.packing,
      (msg) => console.warn(`${name}: ${msg}`)
    );
    records.push({
      doc_id: docId,
      lang,
      sentence_start: cursor,
      sentence_count: windows.length,
    });
    cursor += windows.length;
    pending.push(...windows);
  }

  const data = new Float32Array(pending.length * encoder.dim);
  for (let start = 0; start < pending.length; start += config.batchSize) {
    const batch = pending.slice(start, start + config.batchSize);
    batch.forEach((tokens, offset) => {
      const row = embedWindow(encoder, tokens, config.mode);
      data.set(Float32Array.from(row), (start + offset) * encoder.dim);
    });
  }

  const embPath = `${outPrefix}.emb`;
  const manifestPath = `${outPrefix}.jsonl`;
  writeEmb1(embPath, { dim: encoder.dim, rows: pending.length, data });
  writeManifest(records, manifestPath);
  return {
    embPath,
    manifestPath,
    rows: pending.length,
    docs: records.length,
    dim: encoder.dim,
  };
}
