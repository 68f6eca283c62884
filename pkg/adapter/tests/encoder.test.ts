import { describe, expect, it } from "vitest";

import { loadEncoder, SPECIAL_TOKEN } from "../src/encoder";
import { ModelLoadFailure } from "../src/errors";

describe("loadEncoder", () => {
  it("parses the toy family and rejects everything else", () => {
    const enc = loadEncoder("toy-32");
    expect(enc.dim).toBe(32);
    expect(enc.id).toBe("toy-32");
    expect(() => loadEncoder("bert-base")).toThrow(ModelLoadFailure);
    expect(() => loadEncoder("toy-4")).toThrow(ModelLoadFailure);
    expect(() => loadEncoder("toy-99999")).toThrow(ModelLoadFailure);
  });
});

describe("toy encoder", () => {
  it("tokenizes words and punctuation separately", () => {
    const enc = loadEncoder("toy-16");
    expect(enc.tokenize('So, "why"?')).toEqual(["So", ",", '"', "why", '"', "?"]);
    expect(enc.tokenize("")).toEqual([]);
  });

  it("is deterministic across instances", () => {
    const a = loadEncoder("toy-16").encode(["alpha", "beta"]);
    const b = loadEncoder("toy-16").encode(["alpha", "beta"]);
    expect(a.length).toBe(3); // special token + 2
    for (let i = 0; i < a.length; i++) {
      expect(Array.from(a[i])).toEqual(Array.from(b[i]));
    }
  });

  it("maps equal tokens to equal vectors and distinct tokens apart", () => {
    const enc = loadEncoder("toy-16");
    const [, v1, v2, v3] = enc.encode(["same", "other", "same"]);
    expect(Array.from(v1)).toEqual(Array.from(v3));
    expect(Array.from(v1)).not.toEqual(Array.from(v2));
  });

  it("prepends the special token vector", () => {
    const enc = loadEncoder("toy-16");
    const bare = enc.encode([]);
    expect(bare.length).toBe(1);
    const withWords = enc.encode(["x"]);
    expect(Array.from(withWords[0])).toEqual(Array.from(bare[0]));
    // the special token is a real token with a stable identity
    expect(SPECIAL_TOKEN).toBe("<s>");
  });
});
