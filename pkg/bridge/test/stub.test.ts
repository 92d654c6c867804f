import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { runScore } from '../src/cli.js';
import { STUB_WORDS, stubScore } from '../src/stub.js';
import { parseQueryFile, QuerySchema } from '../src/wire.js';

let dir: string;

beforeAll(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), 'bridge-stub-'));
});

afterAll(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function writeQueries(n: number): string {
  const lines: string[] = [];
  for (let i = 0; i < n; i++) {
    for (const direction of ['fwd', 'bwd'] as const) {
      lines.push(
        JSON.stringify({
          instance_id: `word.n.${i}`,
          direction,
          pattern: true,
          context_tokens: direction === 'fwd' ? ['<s>', 'a', 'word', 'and'] : ['and', 'word', 'b', '</s>'],
        }),
      );
    }
  }
  const file = path.join(dir, `queries-${n}.jsonl`);
  fs.writeFileSync(file, lines.join('\n') + '\n');
  return file;
}

describe('stub scorer', () => {
  it('uses a fixed 60-word uniform distribution', () => {
    expect(STUB_WORDS).toHaveLength(60);
    expect(new Set(STUB_WORDS).size).toBe(60);
    const record = stubScore({ instance_id: 'x', direction: 'fwd', pattern: false, context_tokens: ['a'] });
    expect(record.entries).toHaveLength(60);
    for (const [, p] of record.entries) expect(p).toBeCloseTo(1 / 60, 12);
  });
});

describe('score --stub integration', () => {
  it('writes one valid record per query, ids preserved in order', async () => {
    const queriesPath = writeQueries(25);
    const outPath = path.join(dir, 'dists.jsonl');
    await runScore({
      queries: queriesPath,
      out: outPath,
      stub: true,
      topK: 100,
      batchSize: 16,
      device: 'cpu',
    });

    const queryLines = fs.readFileSync(queriesPath, 'utf-8').trim().split('\n');
    const outLines = fs.readFileSync(outPath, 'utf-8').trim().split('\n');
    expect(outLines).toHaveLength(queryLines.length);

    outLines.forEach((line, i) => {
      const record = JSON.parse(line);
      const query = JSON.parse(queryLines[i]);
      expect(record.instance_id).toBe(query.instance_id);
      expect(record.direction).toBe(query.direction);
      expect(record.pattern).toBe(query.pattern);
      expect(record.entries.length).toBe(60);
      for (const [word, p] of record.entries) {
        expect(typeof word).toBe('string');
        expect(p).toBeGreaterThan(0);
        expect(p).toBeLessThanOrEqual(1);
      }
    });
  });

  it('round-trips through the query parser', async () => {
    const queriesPath = writeQueries(3);
    const parsed = parseQueryFile(fs.readFileSync(queriesPath, 'utf-8'));
    for (const q of parsed) expect(QuerySchema.safeParse(q).success).toBe(true);
  });

  it('fails loudly on malformed query files', async () => {
    const bad = path.join(dir, 'bad.jsonl');
    fs.writeFileSync(bad, '{"instance_id": "x"}\n');
    await expect(
      runScore({ queries: bad, out: path.join(dir, 'no.jsonl'), stub: true, topK: 100, batchSize: 4, device: 'cpu' }),
    ).rejects.toThrowError(/line 1/);
    expect(fs.existsSync(path.join(dir, 'no.jsonl'))).toBe(false);
  });

  it('requires a mode', async () => {
    const queriesPath = writeQueries(1);
    await expect(
      runScore({ queries: queriesPath, out: path.join(dir, 'x.jsonl'), stub: false, topK: 100, batchSize: 4, device: 'cpu' }),
    ).rejects.toThrowError(/--stub or --model/);
  });
});
