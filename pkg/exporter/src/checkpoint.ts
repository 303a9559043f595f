import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { FileFormatError, UnsupportedLayer } from "./errors.js";
import { DenseSpec, LayerSpec, NetworkSpec } from "./schema.js";

interface WeightEntry {
  name: string;
  shape: number[];
  dtype: string;
}

interface ManifestGroup {
  paths: string[];
  weights: WeightEntry[];
}

interface KerasLayer {
  class_name: string;
  config: Record<string, unknown>;
}

export function looksLikeLayersModel(doc: unknown): boolean {
  return (
    typeof doc === "object" &&
    doc !== null &&
    "modelTopology" in (doc as object) &&
    "weightsManifest" in (doc as object)
  );
}

/** Decode every tensor in the manifest, resolving shard paths next to model.json. */
function readWeights(
  manifest: ManifestGroup[],
  modelDir: string,
): Map<string, { shape: number[]; values: Float32Array }> {
  const out = new Map<string, { shape: number[]; values: Float32Array }>();
  for (const group of manifest) {
    const shards = group.paths.map((p) => {
      try {
        return readFileSync(join(modelDir, p));
      } catch (err) {
        throw new FileFormatError(`cannot read weight shard ${p}: ${(err as Error).message}`);
      }
    });
    const total = shards.reduce((n, b) => n + b.byteLength, 0);
    const buf = new Uint8Array(total);
    let at = 0;
    for (const shard of shards) {
      buf.set(shard, at);
      at += shard.byteLength;
    }
    let offset = 0;
    for (const entry of group.weights) {
      if (entry.dtype !== "float32") {
        throw new FileFormatError(`weight ${entry.name}: dtype ${entry.dtype} not supported`);
      }
      const count = entry.shape.reduce((a, b) => a * b, 1);
      const end = offset + 4 * count;
      if (end > buf.byteLength) {
        throw new FileFormatError(`weight ${entry.name}: shard data truncated`);
      }
      // slice() copies, giving a 4-byte-aligned buffer for the view
      const values = new Float32Array(buf.slice(offset, end).buffer);
      out.set(entry.name, { shape: entry.shape, values });
      offset = end;
    }
  }
  return out;
}

function featureDim(shape: unknown, layerName: string): number {
  if (!Array.isArray(shape) || shape.length !== 2 || !Number.isInteger(shape[1])) {
    throw new UnsupportedLayer(
      `${layerName}: only flat [batch, features] inputs are supported, got ${JSON.stringify(shape)}`,
    );
  }
  return shape[1] as number;
}

function denseFromWeights(
  name: string,
  units: number,
  useBias: boolean,
  weights: Map<string, { shape: number[]; values: Float32Array }>,
  inDim: number,
): DenseSpec {
  const kernel = weights.get(`${name}/kernel`);
  if (kernel === undefined) {
    throw new FileFormatError(`missing weight ${name}/kernel in manifest`);
  }
  if (kernel.shape.length !== 2 || kernel.shape[0] !== inDim || kernel.shape[1] !== units) {
    throw new FileFormatError(
      `${name}/kernel: shape [${kernel.shape}] does not match ${inDim} -> ${units}`,
    );
  }
  // kernel is stored [in, out]; the schema wants row-major out x in
  const W: number[][] = [];
  for (let o = 0; o < units; o++) {
    const row = new Array<number>(inDim);
    for (let i = 0; i < inDim; i++) {
      row[i] = kernel.values[i * units + o];
    }
    W.push(row);
  }
  let b = new Array<number>(units).fill(0);
  if (useBias) {
    const bias = weights.get(`${name}/bias`);
    if (bias === undefined) {
      throw new FileFormatError(`missing weight ${name}/bias in manifest`);
    }
    if (bias.shape.length !== 1 || bias.shape[0] !== units) {
      throw new FileFormatError(`${name}/bias: shape [${bias.shape}] does not match ${units}`);
    }
    b = Array.from(bias.values);
  }
  return { type: "dense", weights: W, bias: b };
}

/**
 * Translate a TensorFlow.js LayersModel (model.json + weight shards) into
 * the network schema: a chain of dense and relu layers.
 *
 * Dense activations other than linear/relu, and any layer kind beyond
 * Dense / Activation(relu) / ReLU / InputLayer / Dropout / Flatten, are
 * rejected with UnsupportedLayer naming the offender.
 */
export function convertLayersModel(doc: Record<string, unknown>, modelPath: string): NetworkSpec {
  const topology = doc.modelTopology as Record<string, unknown> | undefined;
  if (topology === undefined || typeof topology !== "object") {
    throw new FileFormatError("modelTopology missing");
  }
  if (topology.class_name !== "Sequential") {
    throw new FileFormatError(
      `only Sequential topologies are supported, got ${JSON.stringify(topology.class_name)}`,
    );
  }
  const config = topology.config as Record<string, unknown> | undefined;
  const rawLayers = config?.layers;
  if (!Array.isArray(rawLayers) || rawLayers.length === 0) {
    throw new FileFormatError("model has no layers");
  }
  const weights = readWeights(doc.weightsManifest as ManifestGroup[], dirname(modelPath));

  let dim = -1;
  const layers: LayerSpec[] = [];
  for (const raw of rawLayers as KerasLayer[]) {
    const cls = raw.class_name;
    const cfg = raw.config ?? {};
    const name = String(cfg.name ?? cls);
    if (dim < 0) {
      // first layer must pin the input shape
      dim = featureDim(cfg.batch_input_shape, name);
    }
    switch (cls) {
      case "InputLayer":
        break;
      case "Dense": {
        const units = cfg.units as number;
        if (!Number.isInteger(units) || units < 1) {
          throw new FileFormatError(`${name}: bad units ${JSON.stringify(cfg.units)}`);
        }
        layers.push(denseFromWeights(name, units, cfg.use_bias !== false, weights, dim));
        dim = units;
        const act = (cfg.activation ?? "linear") as string;
        if (act === "relu") {
          layers.push({ type: "relu" });
        } else if (act !== "linear") {
          throw new UnsupportedLayer(`${name}: Dense activation '${act}'`);
        }
        break;
      }
      case "Activation": {
        const act = cfg.activation as string;
        if (act === "relu") {
          layers.push({ type: "relu" });
        } else if (act !== "linear") {
          throw new UnsupportedLayer(`${name}: Activation '${act}'`);
        }
        break;
      }
      case "ReLU":
        if (cfg.max_value !== null && cfg.max_value !== undefined) {
          throw new UnsupportedLayer(`${name}: ReLU with max_value is not plain relu`);
        }
        layers.push({ type: "relu" });
        break;
      case "Dropout": // inference no-op
      case "Flatten": // input is already flat
        break;
      default:
        throw new UnsupportedLayer(`${name}: layer kind ${cls}`);
    }
  }
  const inputDim = featureDim(
    (rawLayers[0] as KerasLayer).config?.batch_input_shape,
    "model input",
  );
  return { input_dim: inputDim, layers };
}
