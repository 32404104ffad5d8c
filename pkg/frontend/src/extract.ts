/**
 * End-to-end extraction: train the pair-loss VAE on a dataset's train split,
 * encode both splits, min-max normalize the class embeddings with
 * train-split statistics (clipping the test split into [0, 1]), and write
 * the two binary feature streams plus a JSON training log.
 */

import { promises as fs } from "node:fs";

import { loadDataset } from "./data.js";
import {
  dimensionRanges,
  normalizeWithRanges,
  writeStream,
} from "./features.js";
import { buildVae, classEmbeddings, disposeVae, trainVae, type EpochLog } from "./vae.js";

export interface ExtractConfig {
  dataset: string;
  dataDir?: string;
  classDim: number;
  latentDim: number;
  pairWeight: number;
  epochs: number;
  batchSize: number;
  seed: number;
  limit?: number;
  outTrain: string;
  outTest: string;
  outLog?: string;
  quiet?: boolean;
}

export interface ExtractResult {
  epochs: EpochLog[];
  trainCount: number;
  testCount: number;
  ranges: { min: number; max: number }[];
}

export async function extract(config: ExtractConfig): Promise<ExtractResult> {
  if (config.classDim > config.latentDim) {
    throw new Error(
      `class dimension ${config.classDim} exceeds latent dimension ${config.latentDim}`
    );
  }
  const { train, test } = await loadDataset(config.dataset, {
    dataDir: config.dataDir,
    seed: config.seed,
    limit: config.limit,
  });
  const model = buildVae({
    inputDim: train.width * train.height,
    latentDim: config.latentDim,
    classDim: config.classDim,
    pairWeight: config.pairWeight,
    hidden: [256, 128],
    seed: config.seed,
  });
  const epochs = trainVae(model, train, {
    epochs: config.epochs,
    batchSize: config.batchSize,
    onEpoch: config.quiet
      ? undefined
      : (log) =>
          console.error(
            `epoch ${log.epoch}: loss=${log.loss.toFixed(3)} recon=${log.recon.toFixed(3)} ` +
              `kl=${log.kl.toFixed(3)} pair=${log.pair.toFixed(4)}`
          ),
  });

  const trainEmbedding = classEmbeddings(model, train);
  const testEmbedding = classEmbeddings(model, test);
  disposeVae(model);

  const ranges = dimensionRanges(trainEmbedding, config.classDim);
  await writeStream(config.outTrain, {
    dim: config.classDim,
    numClasses: train.numClasses,
    labels: train.labels,
    values: normalizeWithRanges(trainEmbedding, config.classDim, ranges),
  });
  await writeStream(config.outTest, {
    dim: config.classDim,
    numClasses: test.numClasses,
    labels: test.labels,
    values: normalizeWithRanges(testEmbedding, config.classDim, ranges),
  });

  const result: ExtractResult = {
    epochs,
    trainCount: train.labels.length,
    testCount: test.labels.length,
    ranges,
  };
  if (config.outLog) {
    const log = {
      config: {
        dataset: config.dataset,
        class_dim: config.classDim,
        latent_dim: config.latentDim,
        pair_weight: config.pairWeight,
        epochs: config.epochs,
        batch_size: config.batchSize,
        seed: config.seed,
        limit: config.limit ?? null,
      },
      train_samples: result.trainCount,
      test_samples: result.testCount,
      normalization: ranges,
      epochs: epochs,
    };
    await fs.writeFile(config.outLog, JSON.stringify(log, null, 2) + "\n");
  }
  return result;
}
