import * as tf from '@tensorflow/tfjs';
import { describe, expect, it } from 'vitest';

import { buildModel } from '../src/model.js';

describe('buildModel', () => {
  it('rejects non-positive class counts', () => {
    expect(() => buildModel({ classCount: 0, inputShape: [8, 8, 3] })).toThrow();
    expect(() => buildModel({ classCount: -4, inputShape: [8, 8, 3] })).toThrow();
  });

  it('emits K probabilities summing to 1', async () => {
    const model = buildModel({
      classCount: 32,
      inputShape: [8, 8, 192],
      backbone: 'tiny',
    });
    const out = model.predict(tf.randomNormal([2, 8, 8, 192])) as tf.Tensor2D;
    expect(out.shape).toEqual([2, 32]);
    const rows = (await out.sum(1).array()) as number[];
    rows.forEach((s) => expect(s).toBeCloseTo(1, 5));
  });

  it('has the GAP -> 512 -> 512 -> K head', () => {
    const model = buildModel({
      classCount: 5,
      inputShape: [8, 8, 192],
      backbone: 'tiny',
    });
    const names = model.layers.map((l) => l.name);
    expect(names).toContain('head_dense1');
    expect(names).toContain('head_dense2');
    const d1 = model.getLayer('head_dense1');
    const d2 = model.getLayer('head_dense2');
    const top = model.getLayer('head_softmax');
    expect(d1.outputShape).toEqual([null, 512]);
    expect(d2.outputShape).toEqual([null, 512]);
    expect(top.outputShape).toEqual([null, 5]);
  });

  it('builds the resnet50-style topology', () => {
    const model = buildModel({ classCount: 3, inputShape: [64, 64, 3] });
    const names = model.layers.map((l) => l.name);
    expect(names).toContain('stem_conv');
    expect(names.filter((n) => /^stage2_block\d+_c1$/.test(n)).length).toBe(3);
    expect(names.filter((n) => /^stage5_block\d+_c1$/.test(n)).length).toBe(3);
  });

  it('freeze policy: frozen backbone weights do not move', async () => {
    const model = buildModel({
      classCount: 2,
      inputShape: [8, 8, 3],
      backbone: 'tiny',
      freeze: 'all',
    });
    model.compile({
      optimizer: tf.train.adam(0.05),
      loss: 'categoricalCrossentropy',
    });
    const frozenBefore = (await model
      .getLayer('stage1_conv')
      .getWeights()[0]
      .data()) as Float32Array;
    const headBefore = (await model
      .getLayer('head_softmax')
      .getWeights()[0]
      .data()) as Float32Array;
    await model.fit(tf.randomNormal([8, 8, 8, 3]), tf.oneHot([0, 1, 0, 1, 0, 1, 0, 1], 2), {
      epochs: 1,
      verbose: 0,
    });
    const frozenAfter = (await model
      .getLayer('stage1_conv')
      .getWeights()[0]
      .data()) as Float32Array;
    const headAfter = (await model
      .getLayer('head_softmax')
      .getWeights()[0]
      .data()) as Float32Array;
    expect(Array.from(frozenAfter)).toEqual(Array.from(frozenBefore));
    expect(Array.from(headAfter)).not.toEqual(Array.from(headBefore));
  });

  it('last-stage policy keeps earlier stages frozen, later trainable', () => {
    const model = buildModel({
      classCount: 2,
      inputShape: [8, 8, 3],
      backbone: 'tiny',
      freeze: 'last-stage',
    });
    expect(model.getLayer('stage1_conv').trainable).toBe(false);
    expect(model.getLayer('stage2_conv').trainable).toBe(true);
    expect(model.getLayer('head_dense1').trainable).toBe(true);
  });
});
