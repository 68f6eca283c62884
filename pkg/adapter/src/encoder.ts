/**
 * Sentence encoders behind an opaque model identifier.
 *
 * This build bundles a deterministic hash-based encoder family,
 * `toy-<dim>`: every token maps to a fixed pseudo-random vector seeded
 * by the token string, and the encoder prepends one special
 * beginning-of-sequence token whose vector plays the ST role. It needs
 * no weights, no network, and produces identical output on every run,
 * which is exactly what the downstream contracts (pooling, packing,
 * serialization) require of any encoder. Swap in a real model by
 * implementing the Encoder interface.
 */

import { ModelLoadFailure } from "./errors";

export const SPECIAL_TOKEN = "<s>";

export interface Encoder {
  readonly id: string;
  readonly dim: number;
  tokenize(text: string): string[];
  /** One vector per token, with the special token's vector first. */
  encode(tokens: string[]): Float64Array[];
}

function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

class ToyEncoder implements Encoder {
  readonly id: string;
  readonly dim: number;
  private cache = new Map<string, Float64Array>();

  constructor(dim: number) {
    this.id = `toy-${dim}`;
    this.dim = dim;
  }

  tokenize(text: string): string[] {
    return text.match(/[\p{L}\p{N}]+|[^\s\p{L}\p{N}]/gu) ?? [];
  }

  private vectorFor(token: string): Float64Array {
    const hit = this.cache.get(token);
    if (hit) return hit;
    const rand = mulberry32(fnv1a(token));
    const scale = 1 / Math.sqrt(this.dim);
    const vec = new Float64Array(this.dim);
    for (let i = 0; i < this.dim; i++) {
      vec[i] = (2 * rand() - 1) * scale;
    }
    this.cache.set(token, vec);
    return vec;
  }

  encode(tokens: string[]): Float64Array[] {
    const out: Float64Array[] = [this.vectorFor(SPECIAL_TOKEN)];
    for (const tok of tokens) {
      out.push(this.vectorFor(tok));
    }
    return out;
  }
}

export function loadEncoder(modelId: string): Encoder {
  const m = modelId.match(/^toy-(\d+)$/);
  if (!m) {
    throw new ModelLoadFailure(
      `cannot load "${modelId}": this build bundles only the deterministic toy-<dim> family`
    );
  }
  const dim = parseInt(m[1], 10);
  if (dim < 8 || dim > 4096) {
    throw new ModelLoadFailure(`toy encoder dim must be in [8, 4096], got ${dim}`);
  }
  return new ToyEncoder(dim);
}
