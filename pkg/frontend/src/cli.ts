#!/usr/bin/env node
/**
 * CLI: `extract --dataset mnist --d 10 --lambda 1.0 --epochs 5 --seed 0
 *       --out-train train.lpft --out-test test.lpft [--data-dir DIR]
 *       [--latent 32] [--batch 128] [--limit N] [--log train-log.json]`
 *
 * Exit codes: 0 success, 2 configuration error, 3 data/format error.
 */

import { parseArgs } from "node:util";

import { extract } from "./extract.js";

function usage(): void {
  console.error(
    "usage: pairvae-extract extract --dataset {mnist|toy} --d N --lambda F " +
      "--epochs N --seed N --out-train PATH --out-test PATH " +
      "[--data-dir DIR] [--latent N] [--batch N] [--limit N] [--log PATH]"
  );
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  if (command !== "extract") {
    usage();
    return 2;
  }
  let values;
  try {
    ({ values } = parseArgs({
      args: rest,
      options: {
        dataset: { type: "string" },
        "data-dir": { type: "string" },
        d: { type: "string" },
        lambda: { type: "string", default: "1.0" },
        latent: { type: "string", default: "32" },
        epochs: { type: "string", default: "5" },
        batch: { type: "string", default: "128" },
        seed: { type: "string", default: "0" },
        limit: { type: "string" },
        "out-train": { type: "string" },
        "out-test": { type: "string" },
        log: { type: "string" },
        quiet: { type: "boolean", default: false },
      },
    }));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    usage();
    return 2;
  }
  const missing = ["dataset", "d", "out-train", "out-test"].filter(
    (k) => !(values as Record<string, unknown>)[k]
  );
  if (missing.length) {
    console.error(`error: missing required flags: ${missing.map((m) => `--${m}`).join(", ")}`);
    usage();
    return 2;
  }
  const num = (name: string, raw: string | undefined, integer = true): number => {
    const v = integer ? Number.parseInt(raw ?? "", 10) : Number.parseFloat(raw ?? "");
    if (!Number.isFinite(v)) throw new RangeError(`--${name} must be numeric, got ${raw}`);
    return v;
  };
  try {
    const result = await extract({
      dataset: values.dataset as string,
      dataDir: values["data-dir"],
      classDim: num("d", values.d),
      latentDim: num("latent", values.latent),
      pairWeight: num("lambda", values.lambda, false),
      epochs: num("epochs", values.epochs),
      batchSize: num("batch", values.batch),
      seed: num("seed", values.seed),
      limit: values.limit === undefined ? undefined : num("limit", values.limit),
      outTrain: values["out-train"] as string,
      outTest: values["out-test"] as string,
      outLog: values.log,
      quiet: values.quiet,
    });
    console.log(
      JSON.stringify({
        train_samples: result.trainCount,
        test_samples: result.testCount,
        final_loss: result.epochs.at(-1)?.loss ?? null,
      })
    );
    return 0;
  } catch (err) {
    const message = (err as Error).message ?? String(err);
    console.error(`error: ${message}`);
    if (/exceeds latent|unknown dataset|required|must be numeric/.test(message)) return 2;
    return 3;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
