/**
 * Dataset loading: MNIST-format IDX files from disk, plus a procedural
 * two-class "stripes" set small enough for unit tests and smoke training.
 */

import { promises as fs } from "node:fs";
import * as path from "node:path";
import * as zlib from "node:zlib";

import { mulberry32 } from "./random.js";

export interface Dataset {
  name: string;
  width: number;
  height: number;
  numClasses: number;
  /** row-major [count, width*height], values in [0, 1] */
  images: Float32Array;
  labels: Int32Array;
}

const IDX_IMAGES_MAGIC = 2051;
const IDX_LABELS_MAGIC = 2049;

async function readMaybeGzipped(base: string): Promise<Buffer> {
  for (const candidate of [base, `${base}.gz`]) {
    try {
      const raw = await fs.readFile(candidate);
      return candidate.endsWith(".gz") ? zlib.gunzipSync(raw) : raw;
    } catch {
      // try the next candidate
    }
  }
  throw new Error(`dataset file not found: ${base}[.gz]`);
}

function parseIdxImages(buf: Buffer): { width: number; height: number; data: Float32Array } {
  if (buf.readUInt32BE(0) !== IDX_IMAGES_MAGIC) {
    throw new Error("not an IDX image file");
  }
  const count = buf.readUInt32BE(4);
  const height = buf.readUInt32BE(8);
  const width = buf.readUInt32BE(12);
  const pixels = count * width * height;
  const data = new Float32Array(pixels);
  for (let i = 0; i < pixels; i++) {
    data[i] = buf[16 + i] / 255;
  }
  return { width, height, data };
}

function parseIdxLabels(buf: Buffer): Int32Array {
  if (buf.readUInt32BE(0) !== IDX_LABELS_MAGIC) {
    throw new Error("not an IDX label file");
  }
  const count = buf.readUInt32BE(4);
  const labels = new Int32Array(count);
  for (let i = 0; i < count; i++) {
    labels[i] = buf[8 + i];
  }
  return labels;
}

async function loadIdxSplit(dir: string, images: string, labels: string): Promise<Dataset> {
  const image = parseIdxImages(await readMaybeGzipped(path.join(dir, images)));
  const label = parseIdxLabels(await readMaybeGzipped(path.join(dir, labels)));
  return {
    name: "mnist",
    width: image.width,
    height: image.height,
    numClasses: 10,
    images: image.data,
    labels: label,
  };
}

export async function loadMnist(dir: string, split: "train" | "test"): Promise<Dataset> {
  return split === "train"
    ? loadIdxSplit(dir, "train-images-idx3-ubyte", "train-labels-idx1-ubyte")
    : loadIdxSplit(dir, "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte");
}

/**
 * Two classes of 12x12 images: vertical vs horizontal stripes with seeded
 * pixel noise. Trivially separable, trains in seconds on the CPU backend.
 */
export function makeToyDataset(count: number, seed: number): Dataset {
  const side = 12;
  const rng = mulberry32(seed);
  const images = new Float32Array(count * side * side);
  const labels = new Int32Array(count);
  for (let i = 0; i < count; i++) {
    const cls = i % 2;
    labels[i] = cls;
    const phase = rng() < 0.5 ? 0 : 1;
    for (let y = 0; y < side; y++) {
      for (let x = 0; x < side; x++) {
        const stripe = cls === 0 ? (x + phase) % 2 : (y + phase) % 2;
        const noise = (rng() - 0.5) * 0.3;
        const v = stripe * 0.8 + 0.1 + noise;
        images[i * side * side + y * side + x] = Math.min(1, Math.max(0, v));
      }
    }
  }
  return { name: "toy", width: side, height: side, numClasses: 2, images, labels };
}

export interface SplitPair {
  train: Dataset;
  test: Dataset;
}

export async function loadDataset(
  name: string,
  opts: { dataDir?: string; seed: number; limit?: number }
): Promise<SplitPair> {
  if (name === "toy") {
    const n = opts.limit ?? 400;
    return {
      train: makeToyDataset(n, opts.seed),
      test: makeToyDataset(Math.max(2, Math.floor(n / 4)), opts.seed + 1),
    };
  }
  if (name === "mnist") {
    if (!opts.dataDir) {
      throw new Error("--data-dir is required for mnist (directory of IDX files)");
    }
    const train = truncate(await loadMnist(opts.dataDir, "train"), opts.limit);
    const test = truncate(await loadMnist(opts.dataDir, "test"), opts.limit);
    return { train, test };
  }
  throw new Error(`unknown dataset ${name} (expected mnist or toy)`);
}

function truncate(ds: Dataset, limit?: number): Dataset {
  if (!limit || limit >= ds.labels.length) return ds;
  const pixels = ds.width * ds.height;
  return {
    ...ds,
    images: ds.images.slice(0, limit * pixels),
    labels: ds.labels.slice(0, limit),
  };
}
