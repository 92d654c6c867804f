import * as fs from 'node:fs';
import * as path from 'node:path';
import * as tf from '@tensorflow/tfjs';

import type { DistributionRecord, Query } from './wire.js';

/** Model directory layout:
 *
 *   <dir>/vocab.txt            one token per line; line i is output row i
 *   <dir>/forward/model.json   tf.LayersModel (+ weights.bin alongside)
 *   <dir>/backward/model.json  trained on reversed sentences
 *
 * Each model maps int32 token-id sequences [batch, T] to a next-token
 * distribution; the final Dense layer supplies the output kernel W. The
 * bridge recomputes predictions as softmax(h . W), dropping the layer's bias
 * term, so unconditionally frequent words are not boosted.
 *
 * Out-of-vocabulary tokens (including boundary markers absent from
 * vocab.txt) map to the '<unk>' row when the vocabulary has one and are
 * dropped from the context otherwise.
 */

const UNK = '<unk>';

export interface BridgeConfig {
  topK: number;
  batchSize: number;
  device: string;
}

function concatBuffers(data: ArrayBuffer | ArrayBuffer[]): ArrayBuffer {
  if (!Array.isArray(data)) return data;
  const total = data.reduce((n, b) => n + b.byteLength, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const buf of data) {
    out.set(new Uint8Array(buf), offset);
    offset += buf.byteLength;
  }
  return out.buffer;
}

/** Write LayersModel artifacts as <dir>/model.json + weights.bin. */
export function fileSaveHandler(dir: string): tf.io.IOHandler {
  return {
    async save(artifacts: tf.io.ModelArtifacts): Promise<tf.io.SaveResult> {
      fs.mkdirSync(dir, { recursive: true });
      const weightData = concatBuffers(artifacts.weightData as ArrayBuffer | ArrayBuffer[]);
      const manifest = {
        modelTopology: artifacts.modelTopology,
        weightsManifest: [{ paths: ['weights.bin'], weights: artifacts.weightSpecs }],
      };
      fs.writeFileSync(path.join(dir, 'model.json'), JSON.stringify(manifest));
      fs.writeFileSync(path.join(dir, 'weights.bin'), Buffer.from(weightData));
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: 'JSON',
        },
      };
    },
  };
}

export function fileLoadHandler(dir: string): tf.io.IOHandler {
  return {
    async load(): Promise<tf.io.ModelArtifacts> {
      const manifestPath = path.join(dir, 'model.json');
      if (!fs.existsSync(manifestPath)) {
        throw new Error(`no model.json under ${dir}`);
      }
      const manifest = JSON.parse(fs.readFileSync(manifestPath, 'utf-8'));
      const weightSpecs = manifest.weightsManifest.flatMap((g: { weights: unknown[] }) => g.weights);
      const bin = fs.readFileSync(path.join(dir, manifest.weightsManifest[0].paths[0]));
      const weightData = bin.buffer.slice(bin.byteOffset, bin.byteOffset + bin.byteLength);
      return {
        modelTopology: manifest.modelTopology,
        weightSpecs,
        weightData,
      };
    },
  };
}

interface DirectionalModel {
  featurizer: tf.LayersModel; // context ids -> final hidden state [B, H]
  kernel: tf.Tensor2D; // output embedding W [H, V], bias discarded
}

function stripBias(model: tf.LayersModel): DirectionalModel {
  for (let i = model.layers.length - 1; i >= 0; i--) {
    const layer = model.layers[i];
    if (layer.getClassName() === 'Dense') {
      const featurizer = tf.model({
        inputs: model.inputs,
        outputs: layer.input as tf.SymbolicTensor,
      });
      const kernel = layer.getWeights()[0] as tf.Tensor2D;
      return { featurizer, kernel };
    }
  }
  throw new Error('model has no Dense output layer to take the kernel from');
}

export class BiLM {
  private constructor(
    private readonly vocab: string[],
    private readonly index: Map<string, number>,
    private readonly forward: DirectionalModel,
    private readonly backward: DirectionalModel,
  ) {}

  static async load(dir: string): Promise<BiLM> {
    const vocabPath = path.join(dir, 'vocab.txt');
    if (!fs.existsSync(vocabPath)) {
      throw new Error(`cannot load model: no vocab.txt under ${dir}`);
    }
    const vocab = fs
      .readFileSync(vocabPath, 'utf-8')
      .split('\n')
      .map((t) => t.trim())
      .filter((t) => t.length > 0);
    const index = new Map(vocab.map((w, i) => [w, i]));
    const fwd = await tf.loadLayersModel(fileLoadHandler(path.join(dir, 'forward')));
    const bwd = await tf.loadLayersModel(fileLoadHandler(path.join(dir, 'backward')));
    return new BiLM(vocab, index, stripBias(fwd), stripBias(bwd));
  }

  vocabSize(): number {
    return this.vocab.length;
  }

  /** Token ids fed to the direction's model: backward contexts are reversed
   * so the model sees them in its (right-to-left) training order. */
  private contextIds(query: Query): number[] {
    const tokens = query.direction === 'bwd' ? [...query.context_tokens].reverse() : query.context_tokens;
    const unk = this.index.get(UNK);
    const ids: number[] = [];
    for (const token of tokens) {
      const id = this.index.get(token) ?? unk;
      if (id !== undefined) ids.push(id);
    }
    if (ids.length === 0) {
      // context entirely out of vocabulary and no <unk>: fall back to a
      // single <unk>-free empty step is impossible for an RNN, so fail loud
      throw new Error(`query ${query.instance_id}/${query.direction}: no in-vocabulary context tokens`);
    }
    return ids;
  }

  /** Score all queries; output order matches input order. Queries sharing
   * (direction, context length) are batched without padding. */
  scoreAll(queries: Query[], config: BridgeConfig): DistributionRecord[] {
    const ids = queries.map((q) => this.contextIds(q));
    const groups = new Map<string, number[]>();
    queries.forEach((q, i) => {
      const key = `${q.direction}:${ids[i].length}`;
      const group = groups.get(key);
      if (group) group.push(i);
      else groups.set(key, [i]);
    });

    const results: DistributionRecord[] = new Array(queries.length);
    const topK = Math.min(config.topK, this.vocab.length);
    for (const [key, members] of groups) {
      const model = key.startsWith('bwd') ? this.backward : this.forward;
      for (let start = 0; start < members.length; start += config.batchSize) {
        const chunk = members.slice(start, start + config.batchSize);
        const batch = tf.tensor2d(chunk.map((i) => ids[i]), undefined, 'int32');
        const { values, indices } = tf.tidy(() => {
          const hidden = model.featurizer.predict(batch) as tf.Tensor2D;
          const logits = tf.matMul(hidden, model.kernel); // softmax(Wx), no bias
          const probs = tf.softmax(logits);
          return tf.topk(probs, topK, true);
        });
        const probsData = values.arraySync() as number[][];
        const idxData = indices.arraySync() as number[][];
        tf.dispose([batch, values, indices]);
        chunk.forEach((queryIndex, row) => {
          const q = queries[queryIndex];
          results[queryIndex] = {
            instance_id: q.instance_id,
            direction: q.direction,
            pattern: q.pattern,
            entries: idxData[row].map((v, k) => [this.vocab[v], probsData[row][k]] as [string, number]),
          };
        });
      }
    }
    return results;
  }
}
