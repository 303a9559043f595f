import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import * as tf from "@tensorflow/tfjs";
import { beforeAll, describe, expect, it } from "vitest";

import { FileFormatError, UnsupportedLayer, exportCheckpoint } from "../src/export.js";
import { NetworkSpec } from "../src/schema.js";

/** Write a tfjs model to dir in the standard model.json + shard layout. */
async function saveModel(model: tf.LayersModel, dir: string): Promise<string> {
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const manifest = [
        { paths: ["group1-shard1of1.bin"], weights: artifacts.weightSpecs },
      ];
      writeFileSync(
        join(dir, "model.json"),
        JSON.stringify({
          modelTopology: artifacts.modelTopology,
          format: "layers-model",
          generatedBy: "test",
          convertedBy: null,
          weightsManifest: manifest,
        }),
      );
      writeFileSync(
        join(dir, "group1-shard1of1.bin"),
        Buffer.from(artifacts.weightData as ArrayBuffer),
      );
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: "JSON" } };
    }),
  );
  return join(dir, "model.json");
}

function mlp(): tf.Sequential {
  const model = tf.sequential();
  model.add(tf.layers.dense({ units: 16, activation: "relu", inputShape: [2] }));
  model.add(tf.layers.dense({ units: 16, activation: "relu" }));
  model.add(tf.layers.dense({ units: 2 }));
  return model;
}

/** Float64 replay of the exported network; the parity oracle. */
function forward(net: NetworkSpec, x: number[]): number[] {
  let v = x;
  for (const layer of net.layers) {
    if (layer.type === "relu") {
      v = v.map((t) => Math.max(0, t));
    } else {
      v = layer.weights.map((row, o) =>
        row.reduce((acc, w, i) => acc + w * v[i], layer.bias[o]),
      );
    }
  }
  return v;
}

let dir: string;
let modelPath: string;
let model: tf.Sequential;

beforeAll(async () => {
  dir = mkdtempSync(join(tmpdir(), "exporter-"));
  model = mlp();
  modelPath = await saveModel(model, dir);
});

describe("export", () => {
  it("matches the source forward pass within 1e-6 on 100 points", () => {
    const outPath = join(dir, "net.json");
    const net = exportCheckpoint(modelPath, outPath);
    expect(net.input_dim).toBe(2);
    // dense+relu, dense+relu, dense
    expect(net.layers.map((l) => l.type)).toEqual([
      "dense", "relu", "dense", "relu", "dense",
    ]);

    const n = 100;
    const xs: number[][] = [];
    for (let k = 0; k < n; k++) {
      xs.push([Math.sin(k * 12.9898) * 3, Math.sin(k * 78.233) * 3]);
    }
    const ys = tf.tidy(() => model.predict(tf.tensor2d(xs)) as tf.Tensor2D).arraySync();
    let worst = 0;
    for (let k = 0; k < n; k++) {
      const got = forward(net, xs[k]);
      for (let j = 0; j < got.length; j++) {
        worst = Math.max(worst, Math.abs(got[j] - ys[k][j]));
      }
    }
    expect(worst).toBeLessThan(1e-6);
  });

  it("is idempotent on its own output", () => {
    const first = join(dir, "once.json");
    const second = join(dir, "twice.json");
    exportCheckpoint(modelPath, first);
    exportCheckpoint(first, second);
    expect(readFileSync(second, "utf8")).toBe(readFileSync(first, "utf8"));
  });

  it("names a convolution when rejecting it", async () => {
    const conv = tf.sequential();
    conv.add(
      tf.layers.conv2d({ filters: 4, kernelSize: 3, inputShape: [8, 8, 1], activation: "relu" }),
    );
    const convDir = mkdtempSync(join(tmpdir(), "exporter-conv-"));
    const convPath = await saveModel(conv, convDir);
    expect(() => exportCheckpoint(convPath, join(convDir, "out.json"))).toThrowError(
      UnsupportedLayer,
    );
    expect(() => exportCheckpoint(convPath, join(convDir, "out.json"))).toThrowError(/Conv2D|flat/);
  });

  it("rejects non-relu dense activations by name", async () => {
    const sig = tf.sequential();
    sig.add(tf.layers.dense({ units: 3, activation: "sigmoid", inputShape: [2] }));
    const sigDir = mkdtempSync(join(tmpdir(), "exporter-sig-"));
    const sigPath = await saveModel(sig, sigDir);
    expect(() => exportCheckpoint(sigPath, join(sigDir, "out.json"))).toThrowError(/sigmoid/);
  });

  it("rejects files that are not checkpoints", () => {
    const junk = join(dir, "junk.json");
    writeFileSync(junk, "not json at all {");
    expect(() => exportCheckpoint(junk, join(dir, "x.json"))).toThrowError(FileFormatError);

    const wrong = join(dir, "wrong.json");
    writeFileSync(wrong, JSON.stringify({ hello: 1 }));
    expect(() => exportCheckpoint(wrong, join(dir, "y.json"))).toThrowError(FileFormatError);
  });

  it("rejects a truncated weight shard", () => {
    const shortDir = mkdtempSync(join(tmpdir(), "exporter-short-"));
    const doc = JSON.parse(readFileSync(modelPath, "utf8"));
    writeFileSync(join(shortDir, "model.json"), JSON.stringify(doc));
    const shard = readFileSync(join(dir, "group1-shard1of1.bin"));
    writeFileSync(join(shortDir, "group1-shard1of1.bin"), shard.subarray(0, 16));
    expect(() =>
      exportCheckpoint(join(shortDir, "model.json"), join(shortDir, "out.json")),
    ).toThrowError(/truncated/);
  });
});

describe("integration with the converter", () => {
  it("exported JSON feeds relu-dissect convert", async () => {
    const small = tf.sequential();
    small.add(tf.layers.dense({ units: 4, activation: "relu", inputShape: [2] }));
    small.add(tf.layers.dense({ units: 2 }));
    const smallDir = mkdtempSync(join(tmpdir(), "exporter-small-"));
    const smallPath = await saveModel(small, smallDir);
    const netPath = join(smallDir, "net.json");
    exportCheckpoint(smallPath, netPath);

    const pwaPath = join(smallDir, "pwa.json");
    execFileSync("python3", [
      "-m", "relu_dissect.cli", "convert",
      "--network", netPath, "--out", pwaPath, "--workers", "1",
    ]);
    const pwa = JSON.parse(readFileSync(pwaPath, "utf8"));
    expect(pwa.input_dim).toBe(2);
    expect(pwa.regions.length).toBeGreaterThanOrEqual(1);
    // 4 hyperplanes in the plane cut at most 11 cells
    expect(pwa.regions.length).toBeLessThanOrEqual(11);
  }, 30_000);
});
