/** Minimal train-and-evaluate entry point mirroring the pipeline's CLI. */

import { writeFileSync } from 'node:fs';
import { parseArgs } from 'node:util';

import { trainAndEvaluate } from './harness.js';
import { Backbone, FreezePolicy } from './model.js';

async function main(): Promise<number> {
  const { values, positionals } = parseArgs({
    allowPositionals: true,
    options: {
      epochs: { type: 'string', default: '20' },
      batch: { type: 'string', default: '32' },
      lr: { type: 'string', default: '1e-4' },
      seed: { type: 'string' },
      backbone: { type: 'string', default: 'resnet50' },
      freeze: { type: 'string', default: 'last-stage' },
      output: { type: 'string' },
      history: { type: 'string' },
    },
  });
  if (positionals.length !== 1 || values.seed === undefined) {
    console.error('usage: cli.ts <dataset-dir> --seed N [--epochs N] [--batch N]'
      + ' [--lr F] [--backbone resnet50|tiny] [--freeze none|last-stage|all]'
      + ' [--output metrics.json] [--history history.json]');
    return 3;
  }
  const result = await trainAndEvaluate({
    datasetDir: positionals[0],
    epochs: Number(values.epochs),
    batchSize: Number(values.batch),
    learningRate: Number(values.lr),
    seed: Number(values.seed),
    backbone: values.backbone as Backbone,
    freeze: values.freeze as FreezePolicy,
  });
  const metricsText = JSON.stringify(
    { ...result.metrics, run_config: result.runConfig },
    null,
    2,
  );
  if (values.output) {
    writeFileSync(values.output, metricsText);
  } else {
    console.log(metricsText);
  }
  if (values.history) {
    writeFileSync(values.history, JSON.stringify(result.history, null, 2));
  }
  return 0;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(err);
    process.exit(1);
  },
);
