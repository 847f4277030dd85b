/**
 * Reader for DCTD dataset files.
 *
 * Layout: magic "DCTD" | u32 version | u32 manifest length | manifest JSON,
 * then per record: u32 label | u32 rank | u32 dims... | raw payload.
 * Payload scalars are uint8 for the pixel and dct-image representations and
 * little-endian float32 for dct-tensor.  All integers little-endian.
 */

import { readFileSync } from 'node:fs';

const MAGIC = 'DCTD';
const FORMAT_VERSION = 1;

export type Representation = 'pixel' | 'dct-image' | 'dct-tensor';

export interface DatasetManifest {
  classes: string[];
  representation: Representation;
  quality: number;
  subsampling: string;
  target_size: number;
  split_ratios: number[];
  split_seed: number;
  split_counts: Record<string, number>;
  version: number;
}

export interface DatasetRecord {
  label: number;
  shape: number[];
  /** Flat payload in record order; Uint8Array or Float32Array per dtype. */
  data: Uint8Array | Float32Array;
}

export class DatasetFormatError extends Error {}

export function readDataset(path: string): {
  manifest: DatasetManifest;
  records: DatasetRecord[];
} {
  const buf = readFileSync(path);
  if (buf.length < 12 || buf.toString('latin1', 0, 4) !== MAGIC) {
    throw new DatasetFormatError('not a dataset file');
  }
  const version = buf.readUInt32LE(4);
  if (version !== FORMAT_VERSION) {
    throw new DatasetFormatError(`unsupported dataset version ${version}`);
  }
  const headerLen = buf.readUInt32LE(8);
  if (buf.length < 12 + headerLen) {
    throw new DatasetFormatError('truncated manifest');
  }
  const manifest = JSON.parse(
    buf.toString('utf8', 12, 12 + headerLen),
  ) as DatasetManifest;
  const floats = manifest.representation === 'dct-tensor';

  const records: DatasetRecord[] = [];
  let off = 12 + headerLen;
  while (off < buf.length) {
    if (off + 8 > buf.length) {
      throw new DatasetFormatError(`truncated record ${records.length}`);
    }
    const label = buf.readUInt32LE(off);
    const rank = buf.readUInt32LE(off + 4);
    off += 8;
    if (off + 4 * rank > buf.length) {
      throw new DatasetFormatError(`truncated record ${records.length}`);
    }
    const shape: number[] = [];
    for (let i = 0; i < rank; i++) {
      shape.push(buf.readUInt32LE(off + 4 * i));
    }
    off += 4 * rank;
    const count = shape.reduce((a, b) => a * b, 1);
    const nbytes = count * (floats ? 4 : 1);
    if (off + nbytes > buf.length) {
      throw new DatasetFormatError(`truncated record ${records.length}`);
    }
    if (label >= manifest.classes.length) {
      throw new DatasetFormatError(`record ${records.length}: label out of range`);
    }
    // Copy out of the file buffer so records own aligned storage.
    const payload = buf.subarray(off, off + nbytes);
    const data = floats
      ? new Float32Array(
          payload.buffer.slice(
            payload.byteOffset,
            payload.byteOffset + nbytes,
          ),
        )
      : new Uint8Array(payload);
    records.push({ label, shape, data });
    off += nbytes;
  }
  return { manifest, records };
}

export function readManifest(path: string): DatasetManifest {
  return JSON.parse(readFileSync(path, 'utf8')) as DatasetManifest;
}
