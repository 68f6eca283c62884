import * as fs from "fs";
import * as path from "path";

import { describe, expect, it } from "vitest";

import { EmptyDocument } from "../src/errors";
import { segment } from "../src/segment";

describe("segment", () => {
  it("splits on terminal punctuation before a capital", () => {
    expect(segment("Hello. World.")).toEqual(["Hello.", "World."]);
  });

  it("returns a single sentence without terminal punctuation", () => {
    expect(segment("just one fragment without a period")).toEqual([
      "just one fragment without a period",
    ]);
  });

  it("keeps abbreviations attached", () => {
    expect(segment("Dr. Smith saw Mr. Jones. They spoke briefly.")).toEqual([
      "Dr. Smith saw Mr. Jones.",
      "They spoke briefly.",
    ]);
  });

  it("keeps single-letter initials attached", () => {
    expect(segment('It was J. Watson. He knocked.')).toEqual([
      "It was J. Watson.",
      "He knocked.",
    ]);
  });

  it("does not split decimals", () => {
    expect(segment("Pi is about 3.14 here. Next sentence.")).toEqual([
      "Pi is about 3.14 here.",
      "Next sentence.",
    ]);
  });

  it("does not split before a lowercase continuation", () => {
    expect(segment("He arrived at 5 p.m. and left at six. Then it rained.")).toEqual([
      "He arrived at 5 p.m. and left at six.",
      "Then it rained.",
    ]);
  });

  it("uses per-language abbreviation lists", () => {
    expect(segment("Das kostet ca. 40 Euro. Mehr nicht.", "de")).toEqual([
      "Das kostet ca. 40 Euro.",
      "Mehr nicht.",
    ]);
    // "ca" is not an English abbreviation, so the same text splits
    expect(segment("Das kostet ca. 40 Euro. Mehr nicht.", "en")[0]).toBe("Das kostet ca.");
  });

  it("matches the hand-checked paragraph golden file", () => {
    const base = path.join(__dirname, "data");
    const text = fs.readFileSync(path.join(base, "paragraph.txt"), "utf-8");
    const golden = JSON.parse(
      fs.readFileSync(path.join(base, "paragraph_golden.json"), "utf-8")
    );
    expect(segment(text)).toEqual(golden);
  });

  it("covers all non-whitespace content", () => {
    const text = "First one! Second, with 3.5 things. Dr. Ma agrees? \"Sure.\" End";
    const joined = segment(text).join("").replace(/\s+/g, "");
    expect(joined).toBe(text.replace(/\s+/g, ""));
  });

  it("raises EmptyDocument on whitespace-only input", () => {
    expect(() => segment("   \n\t ")).toThrow(EmptyDocument);
    expect(() => segment("")).toThrow(EmptyDocument);
  });
});
