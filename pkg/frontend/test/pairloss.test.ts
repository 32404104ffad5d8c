import * as tf from "@tensorflow/tfjs";
import { describe, expect, it } from "vitest";

import { buildVae, disposeVae, lossParts, pairLoss } from "../src/vae.js";
import { makeToyDataset } from "../src/data.js";

describe("pair loss", () => {
  it("is zero for identical consecutive same-class embeddings", () => {
    const embedding = tf.tensor2d([
      [0.3, 0.7],
      [0.3, 0.7],
    ]);
    const value = pairLoss(embedding, new Int32Array([1, 1])).dataSync()[0];
    expect(value).toBeCloseTo(0, 5);
  });

  it("is +distance for same-class pairs and -distance for different-class pairs", () => {
    const embedding = tf.tensor2d([
      [0, 0],
      [3, 4],
    ]); // L2 distance 5
    const same = pairLoss(embedding, new Int32Array([2, 2])).dataSync()[0];
    const diff = pairLoss(embedding, new Int32Array([0, 1])).dataSync()[0];
    expect(same).toBeCloseTo(5, 4);
    expect(diff).toBeCloseTo(-5, 4);
  });

  it("averages over valid pairs and skips pairs with a missing label", () => {
    const embedding = tf.tensor2d([
      [0, 0],
      [3, 4],
      [3, 4],
      [0, 0],
    ]);
    // pairs: (0,1) same -> +5; (1,2) and (2,3) touch the missing label -> skipped
    const skipped = pairLoss(embedding, new Int32Array([0, 0, -1, 1])).dataSync()[0];
    expect(skipped).toBeCloseTo(5, 4);
    // all labels present: +5, -0, then (2,3) different classes -> -5; mean over 3
    const full = pairLoss(embedding, new Int32Array([0, 0, 1, 0])).dataSync()[0];
    expect(full).toBeCloseTo((5 - 0 - 5) / 3, 4);
  });

  it("is zero when every pair has a missing label", () => {
    const embedding = tf.tensor2d([
      [1, 2],
      [3, 4],
    ]);
    expect(pairLoss(embedding, new Int32Array([-1, -1])).dataSync()[0]).toBe(0);
  });
});

describe("total objective", () => {
  it("reduces to the plain VAE objective when lambda is 0", () => {
    const dataset = makeToyDataset(8, 3);
    const images = tf.tensor2d(dataset.images, [8, 144]);

    const plain = buildVae({
      inputDim: 144,
      latentDim: 8,
      classDim: 2,
      pairWeight: 0,
      hidden: [32],
      seed: 5,
    });
    const parts = lossParts(plain, images, dataset.labels);
    const total = parts.total.dataSync()[0];
    const elboOnly = parts.recon.dataSync()[0] + parts.kl.dataSync()[0];
    expect(total).toBeCloseTo(elboOnly, 4);
    expect(parts.pair.dataSync()[0]).not.toBeNaN();
    disposeVae(plain);
  });

  it("rejects a class dimension larger than the latent space", () => {
    expect(() =>
      buildVae({ inputDim: 4, latentDim: 2, classDim: 3, pairWeight: 1, hidden: [8], seed: 1 })
    ).toThrow(/exceeds latent/);
  });
});
