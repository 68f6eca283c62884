/**
 * EMB1 binary embedding files.
 *
 * Layout: magic "EMB1", u16 version (= 1), u16 reserved (= 0), u32 dim,
 * u32 rows, then rows * dim float32 values, row-major. All integers and
 * floats little-endian; no padding, no footer.
 */

import * as fs from "fs";

import { FormatError } from "./errors";

const MAGIC = "EMB1";
const VERSION = 1;
const HEADER_BYTES = 4 + 2 + 2 + 4 + 4;

export interface EmbeddingMatrix {
  dim: number;
  rows: number;
  /** rows * dim values, row-major. */
  data: Float32Array;
}

export function rowOf(matrix: EmbeddingMatrix, index: number): Float32Array {
  if (index < 0 || index >= matrix.rows) {
    throw new RangeError(`row ${index} out of range [0, ${matrix.rows})`);
  }
  return matrix.data.subarray(index * matrix.dim, (index + 1) * matrix.dim);
}

export function writeEmb1(path: string, matrix: EmbeddingMatrix): void {
  const { dim, rows, data } = matrix;
  if (dim < 1 || !Number.isInteger(dim)) {
    throw new FormatError(`dim must be a positive integer, got ${dim}`);
  }
  if (data.length !== rows * dim) {
    throw new FormatError(`data length ${data.length} != rows ${rows} * dim ${dim}`);
  }
  for (let i = 0; i < data.length; i++) {
    if (!Number.isFinite(data[i])) {
      throw new FormatError(`non-finite value at flat index ${i}`);
    }
  }
  const buf = Buffer.alloc(HEADER_BYTES + 4 * data.length);
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt16LE(VERSION, 4);
  buf.writeUInt16LE(0, 6);
  buf.writeUInt32LE(dim, 8);
  buf.writeUInt32LE(rows, 12);
  const view = new DataView(buf.buffer, buf.byteOffset + HEADER_BYTES);
  for (let i = 0; i < data.length; i++) {
    view.setFloat32(4 * i, data[i], true);
  }
  fs.writeFileSync(path, buf);
}

export function readEmb1(path: string): EmbeddingMatrix {
  const buf = fs.readFileSync(path);
  if (buf.length < HEADER_BYTES) {
    throw new FormatError(`${path}: ${buf.length} bytes is too short for a header`);
  }
  if (buf.toString("ascii", 0, 4) !== MAGIC) {
    throw new FormatError(`${path}: bad magic`);
  }
  const version = buf.readUInt16LE(4);
  if (version !== VERSION) {
    throw new FormatError(`${path}: unsupported version ${version}`);
  }
  if (buf.readUInt16LE(6) !== 0) {
    throw new FormatError(`${path}: reserved header bytes are nonzero`);
  }
  const dim = buf.readUInt32LE(8);
  const rows = buf.readUInt32LE(12);
  const expected = HEADER_BYTES + 4 * dim * rows;
  if (buf.length !== expected) {
    throw new FormatError(`${path}: expected ${expected} bytes, found ${buf.length}`);
  }
  const data = new Float32Array(dim * rows);
  const view = new DataView(buf.buffer, buf.byteOffset + HEADER_BYTES);
  for (let i = 0; i < data.length; i++) {
    data[i] = view.getFloat32(4 * i, true);
  }
  return { dim, rows, data };
}
