#!/usr/bin/env node
/**
 * export-weights IN OUT
 *
 * IN is a TensorFlow.js LayersModel model.json (weight shards are read
 * from the same directory) or an already-exported network JSON; OUT
 * receives the network JSON.
 *
 * Exit codes: 0 ok, 1 file format error, 2 unsupported layer.
 */

import { UnsupportedLayer } from "./errors.js";
import { exportCheckpoint } from "./export.js";

function main(argv: string[]): number {
  const args = argv.filter((a) => a !== "--");
  if (args.length !== 2 || args.includes("-h") || args.includes("--help")) {
    console.error("usage: export-weights IN OUT");
    return args.length !== 2 ? 1 : 0;
  }
  const [inPath, outPath] = args;
  try {
    const net = exportCheckpoint(inPath, outPath);
    console.error(
      `wrote ${outPath}: ${net.layers.length} layers, input_dim ${net.input_dim}`,
    );
    return 0;
  } catch (err) {
    const e = err as Error;
    console.error(`${e.name}: ${e.message}`);
    return e instanceof UnsupportedLayer ? 2 : 1;
  }
}

process.exit(main(process.argv.slice(2)));
