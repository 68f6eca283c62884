import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { EmbeddingMatrix, readEmb1, rowOf, writeEmb1 } from "../src/emb1";
import { FormatError } from "../src/errors";

let dir: string;
beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "emb1-"));
});
afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function sample(): EmbeddingMatrix {
  const data = Float32Array.from([1.5, -2.25, 0.125, 3, 0.1, -0.0078125]);
  return { dim: 3, rows: 2, data };
}

describe("emb1 round-trip", () => {
  it("preserves every byte of the payload", () => {
    const p = path.join(dir, "x.emb");
    writeEmb1(p, sample());
    const back = readEmb1(p);
    expect(back.dim).toBe(3);
    expect(back.rows).toBe(2);
    expect(Array.from(back.data)).toEqual(Array.from(sample().data));
  });

  it("writes the documented header layout", () => {
    const p = path.join(dir, "x.emb");
    writeEmb1(p, sample());
    const buf = fs.readFileSync(p);
    expect(buf.toString("ascii", 0, 4)).toBe("EMB1");
    expect(buf.readUInt16LE(4)).toBe(1);
    expect(buf.readUInt16LE(6)).toBe(0);
    expect(buf.readUInt32LE(8)).toBe(3);
    expect(buf.readUInt32LE(12)).toBe(2);
    expect(buf.length).toBe(16 + 4 * 6);
    // row-major little-endian float32: first value at offset 16
    const view = new DataView(buf.buffer, buf.byteOffset);
    expect(view.getFloat32(16, true)).toBe(1.5);
  });

  it("rowOf returns views into the matrix", () => {
    const m = sample();
    expect(Array.from(rowOf(m, 1))).toEqual([3, 0.1 as any, -0.0078125].map(Math.fround));
    expect(() => rowOf(m, 2)).toThrow(RangeError);
  });
});

describe("emb1 validation", () => {
  it("rejects bad magic", () => {
    const p = path.join(dir, "x.emb");
    writeEmb1(p, sample());
    const buf = fs.readFileSync(p);
    buf.write("NOPE", 0, "ascii");
    fs.writeFileSync(p, buf);
    expect(() => readEmb1(p)).toThrow(FormatError);
    expect(() => readEmb1(p)).toThrow(/magic/);
  });

  it("rejects unknown version and nonzero reserved bytes", () => {
    const p = path.join(dir, "x.emb");
    writeEmb1(p, sample());
    const buf = fs.readFileSync(p);
    buf.writeUInt16LE(2, 4);
    fs.writeFileSync(p, buf);
    expect(() => readEmb1(p)).toThrow(/version/);

    writeEmb1(p, sample());
    const buf2 = fs.readFileSync(p);
    buf2.writeUInt16LE(7, 6);
    fs.writeFileSync(p, buf2);
    expect(() => readEmb1(p)).toThrow(/reserved/);
  });

  it("rejects truncated and padded payloads", () => {
    const p = path.join(dir, "x.emb");
    writeEmb1(p, sample());
    const buf = fs.readFileSync(p);
    fs.writeFileSync(p, buf.subarray(0, buf.length - 4));
    expect(() => readEmb1(p)).toThrow(/bytes/);
    fs.writeFileSync(p, Buffer.concat([buf, Buffer.alloc(4)]));
    expect(() => readEmb1(p)).toThrow(/bytes/);
  });

  it("refuses to write non-finite values or inconsistent shapes", () => {
    const p = path.join(dir, "x.emb");
    expect(() =>
      writeEmb1(p, { dim: 2, rows: 1, data: Float32Array.from([1, NaN]) })
    ).toThrow(/non-finite/);
    expect(() =>
      writeEmb1(p, { dim: 2, rows: 2, data: Float32Array.from([1, 2, 3]) })
    ).toThrow(/length/);
  });
});
