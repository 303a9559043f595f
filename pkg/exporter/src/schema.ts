import { FileFormatError } from "./errors.js";

/** Row-major out x in weight matrix; y = weights x + bias. */
export interface DenseSpec {
  type: "dense";
  weights: number[][];
  bias: number[];
}

export interface ReluSpec {
  type: "relu";
}

export type LayerSpec = DenseSpec | ReluSpec;

export interface NetworkSpec {
  input_dim: number;
  layers: LayerSpec[];
}

function isNumberArray(v: unknown): v is number[] {
  return Array.isArray(v) && v.every((x) => typeof x === "number" && Number.isFinite(x));
}

/**
 * Validate a parsed document against the network schema.
 *
 * Returns a clean copy carrying only schema fields, so re-serialization
 * is canonical regardless of what extras the input carried.
 */
export function validateNetwork(doc: unknown): NetworkSpec {
  if (typeof doc !== "object" || doc === null) {
    throw new FileFormatError("network JSON must be an object");
  }
  const d = doc as Record<string, unknown>;
  if (!Number.isInteger(d.input_dim) || (d.input_dim as number) < 1) {
    throw new FileFormatError("input_dim must be a positive integer");
  }
  if (!Array.isArray(d.layers)) {
    throw new FileFormatError("layers must be an array");
  }
  let dim = d.input_dim as number;
  const layers: LayerSpec[] = [];
  d.layers.forEach((raw, k) => {
    if (typeof raw !== "object" || raw === null) {
      throw new FileFormatError(`layer ${k}: not an object`);
    }
    const layer = raw as Record<string, unknown>;
    if (layer.type === "relu") {
      layers.push({ type: "relu" });
      return;
    }
    if (layer.type !== "dense") {
      throw new FileFormatError(`layer ${k}: unknown type ${JSON.stringify(layer.type)}`);
    }
    const W = layer.weights;
    if (!Array.isArray(W) || W.length === 0 || !W.every(isNumberArray)) {
      throw new FileFormatError(`layer ${k}: weights must be a nonempty numeric matrix`);
    }
    const rows = W as number[][];
    if (rows.some((r) => r.length !== dim)) {
      throw new FileFormatError(`layer ${k}: weights columns must match incoming width ${dim}`);
    }
    if (!isNumberArray(layer.bias) || layer.bias.length !== rows.length) {
      throw new FileFormatError(
        `layer ${k}: bias must be a numeric vector of length ${rows.length}`,
      );
    }
    layers.push({ type: "dense", weights: rows.map((r) => [...r]), bias: [...layer.bias] });
    dim = rows.length;
  });
  return { input_dim: d.input_dim as number, layers };
}

/** Fixed key order so export is byte-stable and re-export is the identity. */
export function serializeNetwork(net: NetworkSpec): string {
  const layers = net.layers.map((l) =>
    l.type === "dense" ? { type: l.type, weights: l.weights, bias: l.bias } : { type: l.type },
  );
  return JSON.stringify({ input_dim: net.input_dim, layers }, null, 1) + "\n";
}
