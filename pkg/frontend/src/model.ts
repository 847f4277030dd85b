/**
 * Model construction: a convolutional backbone with its classification top
 * removed, followed by global average pooling, two dense layers of 512
 * units, and a K-way softmax output.
 *
 * Two backbones are available: a 'resnet50'-style bottleneck-residual stack
 * (stages of 3/4/6/3 blocks) and a 'tiny' two-stage network for smoke tests.
 * Pretrained weights are not bundled; when a weights file is available it
 * can be loaded into the resnet50 topology before fine-tuning.
 */

import * as tf from '@tensorflow/tfjs';

export type Backbone = 'resnet50' | 'tiny';
export type FreezePolicy = 'none' | 'last-stage' | 'all';

export interface ModelConfig {
  classCount: number;
  inputShape: [number, number, number];
  backbone?: Backbone;
  /** Which backbone layers stay frozen during fine-tuning. */
  freeze?: FreezePolicy;
}

function bottleneckBlock(
  input: tf.SymbolicTensor,
  filters: number,
  stride: number,
  stage: number,
  block: number,
): tf.SymbolicTensor {
  const prefix = `stage${stage}_block${block}`;
  let x = tf.layers
    .conv2d({ filters, kernelSize: 1, strides: stride, name: `${prefix}_c1` })
    .apply(input) as tf.SymbolicTensor;
  x = tf.layers.batchNormalization({ name: `${prefix}_bn1` }).apply(x) as tf.SymbolicTensor;
  x = tf.layers.reLU().apply(x) as tf.SymbolicTensor;
  x = tf.layers
    .conv2d({ filters, kernelSize: 3, padding: 'same', name: `${prefix}_c2` })
    .apply(x) as tf.SymbolicTensor;
  x = tf.layers.batchNormalization({ name: `${prefix}_bn2` }).apply(x) as tf.SymbolicTensor;
  x = tf.layers.reLU().apply(x) as tf.SymbolicTensor;
  x = tf.layers
    .conv2d({ filters: filters * 4, kernelSize: 1, name: `${prefix}_c3` })
    .apply(x) as tf.SymbolicTensor;
  x = tf.layers.batchNormalization({ name: `${prefix}_bn3` }).apply(x) as tf.SymbolicTensor;

  let shortcut = input;
  const inChannels = input.shape[input.shape.length - 1] as number;
  if (stride !== 1 || inChannels !== filters * 4) {
    shortcut = tf.layers
      .conv2d({
        filters: filters * 4,
        kernelSize: 1,
        strides: stride,
        name: `${prefix}_proj`,
      })
      .apply(input) as tf.SymbolicTensor;
    shortcut = tf.layers
      .batchNormalization({ name: `${prefix}_projbn` })
      .apply(shortcut) as tf.SymbolicTensor;
  }
  const sum = tf.layers.add().apply([x, shortcut]) as tf.SymbolicTensor;
  return tf.layers.reLU().apply(sum) as tf.SymbolicTensor;
}

function resnet50Backbone(input: tf.SymbolicTensor): tf.SymbolicTensor {
  let x = tf.layers
    .conv2d({ filters: 64, kernelSize: 7, strides: 2, padding: 'same', name: 'stem_conv' })
    .apply(input) as tf.SymbolicTensor;
  x = tf.layers.batchNormalization({ name: 'stem_bn' }).apply(x) as tf.SymbolicTensor;
  x = tf.layers.reLU().apply(x) as tf.SymbolicTensor;
  x = tf.layers
    .maxPooling2d({ poolSize: 3, strides: 2, padding: 'same' })
    .apply(x) as tf.SymbolicTensor;

  const stages: Array<[number, number]> = [
    [64, 3],
    [128, 4],
    [256, 6],
    [512, 3],
  ];
  stages.forEach(([filters, blocks], i) => {
    for (let b = 0; b < blocks; b++) {
      const stride = b === 0 && i > 0 ? 2 : 1;
      x = bottleneckBlock(x, filters, stride, i + 2, b);
    }
  });
  return x;
}

function tinyBackbone(input: tf.SymbolicTensor): tf.SymbolicTensor {
  let x = tf.layers
    .conv2d({ filters: 16, kernelSize: 3, padding: 'same', activation: 'relu', name: 'stage1_conv' })
    .apply(input) as tf.SymbolicTensor;
  x = tf.layers
    .conv2d({ filters: 32, kernelSize: 3, padding: 'same', activation: 'relu', name: 'stage2_conv' })
    .apply(x) as tf.SymbolicTensor;
  return x;
}

/** Backbone layer names belonging to the final stage, for partial freezing. */
function isLastStageLayer(name: string, backbone: Backbone): boolean {
  return backbone === 'resnet50' ? name.startsWith('stage5_') : name.startsWith('stage2_');
}

export function buildModel(config: ModelConfig): tf.LayersModel {
  const { classCount, inputShape } = config;
  if (!Number.isInteger(classCount) || classCount <= 0) {
    throw new Error(`class count must be a positive integer, got ${classCount}`);
  }
  const backbone = config.backbone ?? 'resnet50';
  const freeze = config.freeze ?? 'last-stage';

  const input = tf.input({ shape: inputShape });
  const features =
    backbone === 'resnet50' ? resnet50Backbone(input) : tinyBackbone(input);
  let x = tf.layers.globalAveragePooling2d({}).apply(features) as tf.SymbolicTensor;
  x = tf.layers
    .dense({ units: 512, activation: 'relu', name: 'head_dense1' })
    .apply(x) as tf.SymbolicTensor;
  x = tf.layers
    .dense({ units: 512, activation: 'relu', name: 'head_dense2' })
    .apply(x) as tf.SymbolicTensor;
  const output = tf.layers
    .dense({ units: classCount, activation: 'softmax', name: 'head_softmax' })
    .apply(x) as tf.SymbolicTensor;

  const model = tf.model({ inputs: input, outputs: output });
  for (const layer of model.layers) {
    if (layer.name.startsWith('head_')) continue;
    if (freeze === 'all') {
      layer.trainable = false;
    } else if (freeze === 'last-stage') {
      layer.trainable = isLastStageLayer(layer.name, backbone);
    }
  }
  return model;
}
