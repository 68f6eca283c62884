/**
 * Rule-based sentence segmentation.
 *
 * Splits after terminal punctuation ([.!?] plus trailing quotes or
 * brackets) followed by whitespace and a capital, digit, or opening
 * quote, unless the word before the period is a known abbreviation for
 * the language or a single-letter initial. Nothing is dropped: the
 * concatenation of the returned sentences covers every non-whitespace
 * character of the input.
 */

import { EmptyDocument } from "./errors";

// lowercase, final period stripped, inner periods kept ("e.g" matches "e.g.")
const ABBREVIATIONS: Record<string, string[]> = {
  en: [
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "no", "vol",
    "fig", "al", "etc", "e.g", "i.e", "vs", "cf", "dept", "est", "inc",
    "approx",
  ],
  de: ["dr", "prof", "nr", "bzw", "ca", "usw", "z.b", "d.h", "u.a", "evtl", "ggf"],
  fr: ["m", "mme", "mlle", "dr", "st", "etc", "p.ex", "c.-a-d", "av"],
  es: ["sr", "sra", "dr", "dra", "etc", "p.ej", "av", "ud", "uds"],
};

function abbreviationsFor(lang: string): Set<string> {
  const base = lang.toLowerCase().split(/[-_]/)[0];
  return new Set(ABBREVIATIONS[base] ?? ABBREVIATIONS.en);
}

const BOUNDARY = /[.!?]+["')\]»]*\s+/g;
const OPENER = /^["'("«¿¡\p{Lu}\p{N}]/u;

export function segment(text: string, lang = "en"): string[] {
  if (!text || !text.trim()) {
    throw new EmptyDocument("document has no non-whitespace content");
  }
  const abbrev = abbreviationsFor(lang);
  const flat = text.replace(/\s+/g, " ").trim();

  const sentences: string[] = [];
  let start = 0;
  BOUNDARY.lastIndex = 0;
  let m: RegExpExecArray | null;
  while ((m = BOUNDARY.exec(flat)) !== null) {
    const end = m.index + m[0].length;
    const rest = flat.slice(end);
    if (!rest || !OPENER.test(rest)) continue;

    // word immediately before the terminal punctuation
    const before = flat.slice(start, m.index);
    const lastWord = before.match(/([\p{L}\p{N}.]+)$/u)?.[1] ?? "";
    if (m[0][0] === ".") {
      const key = lastWord.toLowerCase().replace(/\.$/, "");
      if (abbrev.has(key)) continue;
      // single-letter initials: "J. Smith"
      if (/^\p{Lu}$/u.test(lastWord)) continue;
    }

    sentences.push(flat.slice(start, end).trim());
    start = end;
  }
  if (start < flat.length) {
    sentences.push(flat.slice(start).trim());
  }
  return sentences.filter((s) => s.length > 0);
}
