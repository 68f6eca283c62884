/**
 * JSON-lines corpus manifest: one document per line, rows contiguous
 * over the companion embedding file.
 */

import * as fs from "fs";

import { FormatError } from "./errors";

export interface DocumentRecord {
  doc_id: string;
  lang: string;
  sentence_start: number;
  sentence_count: number;
  url?: string;
}

export function writeManifest(records: DocumentRecord[], path: string): void {
  let cursor = 0;
  const seen = new Set<string>();
  const lines: string[] = [];
  for (const rec of records) {
    if (seen.has(rec.doc_id)) {
      throw new FormatError(`duplicate doc_id ${rec.doc_id}`);
    }
    seen.add(rec.doc_id);
    if (rec.sentence_count < 1) {
      throw new FormatError(`${rec.doc_id}: sentence_count must be >= 1`);
    }
    if (rec.sentence_start !== cursor) {
      throw new FormatError(
        `${rec.doc_id}: sentence_start ${rec.sentence_start} != cursor ${cursor}`
      );
    }
    cursor += rec.sentence_count;
    const obj: DocumentRecord = {
      doc_id: rec.doc_id,
      lang: rec.lang,
      sentence_start: rec.sentence_start,
      sentence_count: rec.sentence_count,
    };
    if (rec.url !== undefined) {
      obj.url = rec.url;
    }
    lines.push(JSON.stringify(obj));
  }
  fs.writeFileSync(path, lines.join("\n") + (lines.length ? "\n" : ""));
}

export function readManifest(path: string): DocumentRecord[] {
  const out: DocumentRecord[] = [];
  const text = fs.readFileSync(path, "utf-8");
  for (const line of text.split("\n")) {
    if (!line.trim()) continue;
    out.push(JSON.parse(line) as DocumentRecord);
  }
  return out;
}
