/**
 * Pair-loss variational autoencoder.
 *
 * A dense encoder maps flattened images to a Gaussian posterior (mu,
 * logVar); the first `classDim` posterior-mean dimensions form the
 * class-embedded representation exported as features. Training minimizes
 *
 *     loss = -ELBO + lambda * pairLoss
 *
 * where -ELBO is the Bernoulli reconstruction cross-entropy plus the KL
 * divergence from the unit Gaussian, and pairLoss compares consecutive
 * in-batch samples: +L2 distance between their class embeddings when the
 * labels agree, -L2 when they differ (pairs with a missing label are
 * skipped). Everything (initializers, sampling noise, shuffling) is seeded.
 */

import * as tf from "@tensorflow/tfjs";

import type { Dataset } from "./data.js";
import { mulberry32, shuffleInPlace } from "./random.js";

export interface VaeConfig {
  inputDim: number;
  latentDim: number;
  classDim: number;
  pairWeight: number;
  hidden: number[];
  seed: number;
}

export interface VaeModel {
  config: VaeConfig;
  encoder: tf.LayersModel; // input -> [mu, logVar]
  decoder: tf.LayersModel; // z -> logits
  noiseSeed: { next: () => number };
}

export function buildVae(config: VaeConfig): VaeModel {
  if (config.classDim > config.latentDim) {
    throw new Error(
      `class dimension ${config.classDim} exceeds latent dimension ${config.latentDim}`
    );
  }
  let seedCursor = config.seed;
  const nextSeed = () => ++seedCursor;
  const dense = (units: number, activation?: "relu" | "sigmoid") =>
    tf.layers.dense({
      units,
      activation,
      kernelInitializer: tf.initializers.glorotUniform({ seed: nextSeed() }),
    });

  const input = tf.input({ shape: [config.inputDim] });
  let h: tf.SymbolicTensor = input;
  for (const units of config.hidden) {
    h = dense(units, "relu").apply(h) as tf.SymbolicTensor;
  }
  const mu = dense(config.latentDim).apply(h) as tf.SymbolicTensor;
  const logVar = dense(config.latentDim).apply(h) as tf.SymbolicTensor;
  const encoder = tf.model({ inputs: input, outputs: [mu, logVar] });

  const zInput = tf.input({ shape: [config.latentDim] });
  let g: tf.SymbolicTensor = zInput;
  for (const units of [...config.hidden].reverse()) {
    g = dense(units, "relu").apply(g) as tf.SymbolicTensor;
  }
  const logits = dense(config.inputDim).apply(g) as tf.SymbolicTensor;
  const decoder = tf.model({ inputs: zInput, outputs: logits });

  let noise = config.seed * 7919 + 17;
  return { config, encoder, decoder, noiseSeed: { next: () => ++noise } };
}

/** Numerically stable Bernoulli cross-entropy from logits, summed per sample. */
function bernoulliNll(logits: tf.Tensor2D, targets: tf.Tensor2D): tf.Tensor1D {
  return tf.tidy(() => {
    const zero = tf.zerosLike(logits);
    const perPixel = tf
      .maximum(logits, zero)
      .sub(logits.mul(targets))
      .add(tf.log1p(tf.exp(tf.neg(tf.abs(logits)))));
    return perPixel.sum(1) as tf.Tensor1D;
  });
}

/**
 * Signed L2 pair loss over consecutive in-batch samples (mean over valid
 * pairs; 0 when no pair has both labels).
 */
export function pairLoss(classEmbedding: tf.Tensor2D, labels: Int32Array): tf.Scalar {
  return tf.tidy(() => {
    const batch = classEmbedding.shape[0];
    if (batch < 2) return tf.scalar(0);
    const signs = new Float32Array(batch - 1);
    let valid = 0;
    for (let i = 0; i < batch - 1; i++) {
      if (labels[i] < 0 || labels[i + 1] < 0) {
        signs[i] = 0;
      } else {
        signs[i] = labels[i] === labels[i + 1] ? 1 : -1;
        valid += 1;
      }
    }
    if (valid === 0) return tf.scalar(0);
    const head = classEmbedding.slice([0, 0], [batch - 1, -1]);
    const tail = classEmbedding.slice([1, 0], [batch - 1, -1]);
    const dist = head.sub(tail).square().sum(1).add(1e-12).sqrt();
    return dist.mul(tf.tensor1d(signs)).sum().div(valid) as tf.Scalar;
  });
}

export interface LossParts {
  total: tf.Scalar;
  recon: tf.Scalar;
  kl: tf.Scalar;
  pair: tf.Scalar;
}

export function lossParts(model: VaeModel, images: tf.Tensor2D, labels: Int32Array): LossParts {
  return tf.tidy(() => {
    const [mu, logVar] = model.encoder.apply(images) as [tf.Tensor2D, tf.Tensor2D];
    const eps = tf.randomNormal(mu.shape, 0, 1, "float32", model.noiseSeed.next());
    const z = mu.add(logVar.mul(0.5).exp().mul(eps));
    const logits = model.decoder.apply(z) as tf.Tensor2D;
    const recon = bernoulliNll(logits, images).mean() as tf.Scalar;
    const kl = logVar
      .exp()
      .add(mu.square())
      .sub(logVar)
      .sub(1)
      .sum(1)
      .mul(0.5)
      .mean() as tf.Scalar;
    const classEmbedding = mu.slice([0, 0], [-1, model.config.classDim]) as tf.Tensor2D;
    const pair = pairLoss(classEmbedding, labels);
    const total = recon.add(kl).add(pair.mul(model.config.pairWeight)) as tf.Scalar;
    return { total, recon, kl, pair };
  });
}

export interface EpochLog {
  epoch: number;
  loss: number;
  recon: number;
  kl: number;
  pair: number;
}

export interface TrainOptions {
  epochs: number;
  batchSize: number;
  learningRate?: number;
  onEpoch?: (log: EpochLog) => void;
}

export function trainVae(model: VaeModel, dataset: Dataset, opts: TrainOptions): EpochLog[] {
  const optimizer = tf.train.adam(opts.learningRate ?? 1e-3);
  const count = dataset.labels.length;
  const dim = model.config.inputDim;
  const logs: EpochLog[] = [];
  const variables = [
    ...model.encoder.trainableWeights,
    ...model.decoder.trainableWeights,
  ].map((w) => w.read() as tf.Variable);
  for (let epoch = 1; epoch <= opts.epochs; epoch++) {
    const order = shuffleInPlace(
      Array.from({ length: count }, (_, i) => i),
      mulberry32(model.config.seed + 7 * epoch)
    );
    const sums = { loss: 0, recon: 0, kl: 0, pair: 0 };
    let batches = 0;
    for (let start = 0; start < count; start += opts.batchSize) {
      const idx = order.slice(start, start + opts.batchSize);
      if (idx.length < 2) continue;
      const images = new Float32Array(idx.length * dim);
      const labels = new Int32Array(idx.length);
      idx.forEach((src, row) => {
        images.set(dataset.images.subarray(src * dim, (src + 1) * dim), row * dim);
        labels[row] = dataset.labels[src];
      });
      const batch = tf.tensor2d(images, [idx.length, dim]);
      const parts: { recon: number; kl: number; pair: number } = { recon: 0, kl: 0, pair: 0 };
      const loss = optimizer.minimize(
        () => {
          const p = lossParts(model, batch, labels);
          parts.recon = p.recon.dataSync()[0];
          parts.kl = p.kl.dataSync()[0];
          parts.pair = p.pair.dataSync()[0];
          return p.total;
        },
        true,
        variables
      ) as tf.Scalar;
      sums.loss += loss.dataSync()[0];
      sums.recon += parts.recon;
      sums.kl += parts.kl;
      sums.pair += parts.pair;
      batches += 1;
      loss.dispose();
      batch.dispose();
    }
    const log: EpochLog = {
      epoch,
      loss: sums.loss / batches,
      recon: sums.recon / batches,
      kl: sums.kl / batches,
      pair: sums.pair / batches,
    };
    logs.push(log);
    opts.onEpoch?.(log);
  }
  optimizer.dispose();
  return logs;
}

/** Posterior means' first `classDim` dimensions for every sample, batched. */
export function classEmbeddings(model: VaeModel, dataset: Dataset, batchSize = 512): Float32Array {
  const count = dataset.labels.length;
  const dim = model.config.inputDim;
  const out = new Float32Array(count * model.config.classDim);
  for (let start = 0; start < count; start += batchSize) {
    const size = Math.min(batchSize, count - start);
    const slice = tf.tidy(() => {
      const batch = tf.tensor2d(
        dataset.images.subarray(start * dim, (start + size) * dim),
        [size, dim]
      );
      const [mu] = model.encoder.apply(batch) as [tf.Tensor2D, tf.Tensor2D];
      return mu.slice([0, 0], [-1, model.config.classDim]);
    });
    out.set(slice.dataSync() as Float32Array, start * model.config.classDim);
    slice.dispose();
  }
  return out;
}

export function disposeVae(model: VaeModel): void {
  model.encoder.dispose();
  model.decoder.dispose();
}
