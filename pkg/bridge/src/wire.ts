import { z } from 'zod';

export const QuerySchema = z.object({
  instance_id: z.string().min(1),
  direction: z.enum(['fwd', 'bwd']),
  pattern: z.boolean(),
  context_tokens: z.array(z.string()).min(1),
});

export type Query = z.infer<typeof QuerySchema>;

export interface DistributionRecord {
  instance_id: string;
  direction: 'fwd' | 'bwd';
  pattern: boolean;
  entries: [string, number][];
}

export class WireError extends Error {
  constructor(public readonly line: number, message: string) {
    super(`line ${line}: ${message}`);
    this.name = 'WireError';
  }
}

/** Parse a query file (one JSON record per line; blank lines ignored). */
export function parseQueryFile(text: string): Query[] {
  const queries: Query[] = [];
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let raw: unknown;
    try {
      raw = JSON.parse(line);
    } catch {
      throw new WireError(i + 1, `invalid JSON: ${line.slice(0, 80)}`);
    }
    const parsed = QuerySchema.safeParse(raw);
    if (!parsed.success) {
      throw new WireError(i + 1, `bad query record: ${parsed.error.issues[0]?.message ?? 'invalid'}`);
    }
    queries.push(parsed.data);
  }
  return queries;
}

/** Render one distribution record as a wire-format line. Entries must
 * already be in descending probability order. */
export function formatDistributionLine(record: DistributionRecord): string {
  for (let i = 1; i < record.entries.length; i++) {
    if (record.entries[i][1] > record.entries[i - 1][1]) {
      throw new Error(`entries for ${record.instance_id} not in descending order`);
    }
  }
  return JSON.stringify({
    instance_id: record.instance_id,
    direction: record.direction,
    pattern: record.pattern,
    entries: record.entries,
  });
}

export function formatDistributionFile(records: DistributionRecord[]): string {
  return records.map(formatDistributionLine).join('\n') + (records.length ? '\n' : '');
}
