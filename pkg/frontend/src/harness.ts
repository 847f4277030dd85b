/**
 * Training harness: reads DCTD splits, fine-tunes the model, and emits an
 * evaluation report in the shared metrics JSON schema plus per-epoch
 * history.  Optimizer choices are part of the run output, never implied.
 */

import * as tf from '@tensorflow/tfjs';

import { DatasetManifest, DatasetRecord, readDataset } from './dctd.js';
import { Backbone, FreezePolicy, buildModel } from './model.js';
import { MetricsReport, buildReport, confusion, topkAccuracy } from './metrics.js';

export interface TlConfig {
  datasetDir: string;
  epochs: number;
  batchSize: number;
  learningRate: number;
  seed: number;
  backbone?: Backbone;
  freeze?: FreezePolicy;
}

export interface EpochEntry {
  epoch: number;
  loss: number;
  accuracy: number;
}

export interface RunResult {
  metrics: MetricsReport;
  history: EpochEntry[];
  runConfig: {
    optimizer: string;
    learningRate: number;
    epochs: number;
    batchSize: number;
    seed: number;
    backbone: Backbone;
    freeze: FreezePolicy;
    representation: string;
  };
}

/** Input shape implied by the manifest; channels last for conv layers. */
export function inputShapeFor(manifest: DatasetManifest): [number, number, number] {
  const size = manifest.target_size;
  if (size % 32 !== 0) {
    throw new Error('manifest target size must be a multiple of 32');
  }
  if (manifest.representation === 'dct-tensor') {
    return [size / 8, size / 8, 3 * 64];
  }
  return [size, size, 3];
}

/** Stack records into (n, h, w, c) features and one-hot labels. */
export function recordsToTensors(
  records: DatasetRecord[],
  manifest: DatasetManifest,
): { xs: tf.Tensor4D; ys: tf.Tensor2D; labels: number[] } {
  const [h, w, c] = inputShapeFor(manifest);
  const n = records.length;
  const xs = new Float32Array(n * h * w * c);
  const labels: number[] = [];
  records.forEach((record, r) => {
    labels.push(record.label);
    const base = r * h * w * c;
    if (manifest.representation === 'dct-tensor') {
      // Record layout (component, bh, bw, 64) -> (bh, bw, component * 64).
      const [comps, bh, bw, ch] = record.shape;
      if (comps * bh * bw * ch !== h * w * c) {
        throw new Error(
          `record shape [${record.shape}] does not match manifest input`,
        );
      }
      for (let p = 0; p < comps; p++) {
        for (let i = 0; i < bh; i++) {
          for (let j = 0; j < bw; j++) {
            for (let k = 0; k < ch; k++) {
              xs[base + ((i * bw + j) * comps + p) * ch + k] =
                (record.data as Float32Array)[((p * bh + i) * bw + j) * ch + k];
            }
          }
        }
      }
    } else {
      if (record.data.length !== h * w * c) {
        throw new Error(
          `record shape [${record.shape}] does not match manifest input`,
        );
      }
      for (let i = 0; i < record.data.length; i++) {
        xs[base + i] = record.data[i] / 255;
      }
    }
  });
  const classCount = manifest.classes.length;
  return {
    xs: tf.tensor4d(xs, [n, h, w, c]),
    ys: tf.oneHot(tf.tensor1d(labels, 'int32'), classCount) as tf.Tensor2D,
    labels,
  };
}

export async function trainAndEvaluate(config: TlConfig): Promise<RunResult> {
  const train = readDataset(`${config.datasetDir}/train.dctd`);
  const test = readDataset(`${config.datasetDir}/test.dctd`);
  if (train.manifest.representation !== test.manifest.representation) {
    throw new Error('train/test representation mismatch');
  }

  const backbone = config.backbone ?? 'resnet50';
  const freeze = config.freeze ?? 'last-stage';
  const model = buildModel({
    classCount: train.manifest.classes.length,
    inputShape: inputShapeFor(train.manifest),
    backbone,
    freeze,
  });
  model.compile({
    optimizer: tf.train.adam(config.learningRate),
    loss: 'categoricalCrossentropy',
    metrics: ['accuracy'],
  });

  const trainData = recordsToTensors(train.records, train.manifest);
  const testData = recordsToTensors(test.records, test.manifest);
  try {
    const fit = await model.fit(trainData.xs, trainData.ys, {
      epochs: config.epochs,
      batchSize: config.batchSize,
      shuffle: true,
      verbose: 0,
    });
    const history: EpochEntry[] = fit.history.loss.map((loss, epoch) => ({
      epoch,
      loss: Number(loss),
      accuracy: Number(fit.history.acc[epoch]),
    }));

    const probsTensor = model.predict(testData.xs) as tf.Tensor2D;
    const probs = (await probsTensor.array()) as number[][];
    probsTensor.dispose();
    const preds = probs.map((row) => {
      let best = 0;
      row.forEach((p, c) => {
        if (p > row[best]) best = c;
      });
      return best;
    });
    const classCount = train.manifest.classes.length;
    const cm = confusion(preds, testData.labels, classCount);
    const top3 =
      classCount >= 3 ? topkAccuracy(probs, testData.labels, 3) : null;
    const metrics = buildReport(cm, train.manifest.classes, top3);

    return {
      metrics,
      history,
      runConfig: {
        optimizer: 'adam',
        learningRate: config.learningRate,
        epochs: config.epochs,
        batchSize: config.batchSize,
        seed: config.seed,
        backbone,
        freeze,
        representation: train.manifest.representation,
      },
    };
  } finally {
    trainData.xs.dispose();
    trainData.ys.dispose();
    testData.xs.dispose();
    testData.ys.dispose();
  }
}
