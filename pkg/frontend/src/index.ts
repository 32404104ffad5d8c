export {
  UNLABELED,
  decodeStream,
  dimensionRanges,
  encodeStream,
  normalizeWithRanges,
  readStream,
  writeStream,
  type DimRange,
  type FeatureStream,
} from "./features.js";
export { loadDataset, loadMnist, makeToyDataset, type Dataset } from "./data.js";
export {
  buildVae,
  classEmbeddings,
  disposeVae,
  lossParts,
  pairLoss,
  trainVae,
  type EpochLog,
  type VaeConfig,
  type VaeModel,
} from "./vae.js";
export { extract, type ExtractConfig, type ExtractResult } from "./extract.js";
