import { readFileSync, writeFileSync } from "node:fs";

import { convertLayersModel, looksLikeLayersModel } from "./checkpoint.js";
import { FileFormatError } from "./errors.js";
import { NetworkSpec, serializeNetwork, validateNetwork } from "./schema.js";

export { FileFormatError, UnsupportedLayer } from "./errors.js";
export { NetworkSpec } from "./schema.js";

/** Parse either a LayersModel checkpoint or an already-exported network JSON. */
export function readCheckpoint(inPath: string): NetworkSpec {
  let text: string;
  try {
    text = readFileSync(inPath, "utf8");
  } catch (err) {
    throw new FileFormatError(`cannot read ${inPath}: ${(err as Error).message}`);
  }
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new FileFormatError(`${inPath} is not JSON`);
  }
  if (looksLikeLayersModel(doc)) {
    return convertLayersModel(doc as Record<string, unknown>, inPath);
  }
  if (typeof doc === "object" && doc !== null && "layers" in doc && "input_dim" in doc) {
    return validateNetwork(doc); // re-export is the identity
  }
  throw new FileFormatError(`${inPath}: neither a LayersModel checkpoint nor a network JSON`);
}

export function exportCheckpoint(inPath: string, outPath: string): NetworkSpec {
  const net = readCheckpoint(inPath);
  writeFileSync(outPath, serializeNetwork(net));
  return net;
}
