/**
 * The binary feature-stream format shared with the learner package.
 *
 * Layout (little-endian): magic "LPFT", u32 version = 1, u64 sample count,
 * u32 dimension, u32 class count; per sample an i32 label (-1 = unlabeled)
 * followed by `dimension` float32 features in [0, 1].
 */

import { promises as fs } from "node:fs";

export const UNLABELED = -1;

const MAGIC = "LPFT";
const VERSION = 1;
const HEADER_BYTES = 24;

export interface FeatureStream {
  dim: number;
  numClasses: number;
  labels: Int32Array;
  /** row-major [count, dim] */
  values: Float32Array;
}

export function encodeStream(stream: FeatureStream): Buffer {
  const count = stream.labels.length;
  if (stream.values.length !== count * stream.dim) {
    throw new Error(
      `values length ${stream.values.length} != count ${count} x dim ${stream.dim}`
    );
  }
  const buf = Buffer.alloc(HEADER_BYTES + count * (4 + 4 * stream.dim));
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt32LE(VERSION, 4);
  buf.writeBigUInt64LE(BigInt(count), 8);
  buf.writeUInt32LE(stream.dim, 16);
  buf.writeUInt32LE(stream.numClasses, 20);
  let offset = HEADER_BYTES;
  for (let i = 0; i < count; i++) {
    const label = stream.labels[i];
    if (label !== UNLABELED && (label < 0 || label >= stream.numClasses)) {
      throw new Error(`sample ${i} label ${label} out of range`);
    }
    buf.writeInt32LE(label, offset);
    offset += 4;
    for (let j = 0; j < stream.dim; j++) {
      const v = stream.values[i * stream.dim + j];
      if (!Number.isFinite(v) || v < 0 || v > 1) {
        throw new Error(`sample ${i} feature ${j} = ${v} outside [0, 1]`);
      }
      buf.writeFloatLE(v, offset);
      offset += 4;
    }
  }
  return buf;
}

export function decodeStream(buf: Buffer): FeatureStream {
  if (buf.length < HEADER_BYTES) {
    throw new Error(`truncated header (byte offset ${buf.length})`);
  }
  if (buf.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error(`bad magic (byte offset 0)`);
  }
  if (buf.readUInt32LE(4) !== VERSION) {
    throw new Error(`unsupported version (byte offset 4)`);
  }
  const count = Number(buf.readBigUInt64LE(8));
  const dim = buf.readUInt32LE(16);
  const numClasses = buf.readUInt32LE(20);
  const expected = HEADER_BYTES + count * (4 + 4 * dim);
  if (buf.length !== expected) {
    throw new Error(`expected ${expected} bytes, got ${buf.length}`);
  }
  const labels = new Int32Array(count);
  const values = new Float32Array(count * dim);
  let offset = HEADER_BYTES;
  for (let i = 0; i < count; i++) {
    const label = buf.readInt32LE(offset);
    if (label !== UNLABELED && (label < 0 || label >= numClasses)) {
      throw new Error(`record ${i} label ${label} out of range (byte offset ${offset})`);
    }
    labels[i] = label;
    offset += 4;
    for (let j = 0; j < dim; j++) {
      values[i * dim + j] = buf.readFloatLE(offset);
      offset += 4;
    }
  }
  return { dim, numClasses, labels, values };
}

export async function writeStream(path: string, stream: FeatureStream): Promise<void> {
  await fs.writeFile(path, encodeStream(stream));
}

export async function readStream(path: string): Promise<FeatureStream> {
  return decodeStream(await fs.readFile(path));
}

export interface DimRange {
  min: number;
  max: number;
}

/** Per-dimension min/max over a row-major [count, dim] matrix. */
export function dimensionRanges(values: Float32Array | number[], dim: number): DimRange[] {
  const ranges: DimRange[] = Array.from({ length: dim }, () => ({
    min: Number.POSITIVE_INFINITY,
    max: Number.NEGATIVE_INFINITY,
  }));
  for (let i = 0; i < values.length; i++) {
    const r = ranges[i % dim];
    const v = values[i] as number;
    if (v < r.min) r.min = v;
    if (v > r.max) r.max = v;
  }
  return ranges;
}

/**
 * Min-max rescale into [0, 1] using precomputed (train-split) ranges, then
 * clip; a degenerate dimension maps to 0.5.
 */
export function normalizeWithRanges(
  values: Float32Array | number[],
  dim: number,
  ranges: DimRange[]
): Float32Array {
  const out = new Float32Array(values.length);
  for (let i = 0; i < values.length; i++) {
    const { min, max } = ranges[i % dim];
    const span = max - min;
    const scaled = span > 0 ? ((values[i] as number) - min) / span : 0.5;
    out[i] = Math.min(1, Math.max(0, scaled));
  }
  return out;
}
