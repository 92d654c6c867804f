#!/usr/bin/env node
import * as fs from 'node:fs';
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { BiLM, type BridgeConfig } from './model.js';
import { stubScore } from './stub.js';
import { formatDistributionFile, parseQueryFile, type DistributionRecord } from './wire.js';

export interface ScoreArgs {
  queries: string;
  out: string;
  stub: boolean;
  model?: string;
  topK: number;
  batchSize: number;
  device: string;
}

export async function runScore(args: ScoreArgs): Promise<number> {
  if (!args.stub && !args.model) {
    throw new Error('either --stub or --model <dir> is required');
  }
  if (!args.stub && args.topK < 50) {
    throw new Error(`--top-k must be >= 50 (got ${args.topK})`);
  }
  const queries = parseQueryFile(fs.readFileSync(args.queries, 'utf-8'));

  let records: DistributionRecord[];
  if (args.stub) {
    records = queries.map(stubScore);
  } else {
    const tf = await import('@tensorflow/tfjs');
    await tf.setBackend(args.device);
    await tf.ready();
    const model = await BiLM.load(args.model as string); // startup failure surfaces here
    const config: BridgeConfig = { topK: args.topK, batchSize: args.batchSize, device: args.device };
    records = model.scoreAll(queries, config);
  }

  if (records.length !== queries.length) {
    throw new Error(`internal: ${records.length} records for ${queries.length} queries`);
  }
  const tmp = `${args.out}.tmp`;
  fs.writeFileSync(tmp, formatDistributionFile(records));
  fs.renameSync(tmp, args.out);
  console.log(`scored ${records.length} queries -> ${args.out}`);
  return 0;
}

export function buildCli(argv: string[]) {
  return yargs(argv)
    .scriptName('subsense-bridge')
    .command(
      'score',
      'score a query file into a distribution file',
      (cmd) =>
        cmd
          .option('queries', { type: 'string', demandOption: true, describe: 'query wire-format file' })
          .option('out', { type: 'string', demandOption: true, describe: 'distribution file to write' })
          .option('stub', { type: 'boolean', default: false, describe: 'uniform fixed-word-list test stub' })
          .option('model', { type: 'string', describe: 'biLM artifact directory (vocab.txt, forward/, backward/)' })
          .option('top-k', { type: 'number', default: 100 })
          .option('batch-size', { type: 'number', default: 32 })
          .option('device', { type: 'string', default: 'cpu', describe: 'tfjs backend hint' }),
      async (args) => {
        await runScore({
          queries: args.queries,
          out: args.out,
          stub: args.stub,
          model: args.model,
          topK: args['top-k'],
          batchSize: args['batch-size'],
          device: args.device,
        });
      },
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(err?.message ?? msg);
      process.exit(1);
    });
}

const invokedDirectly = process.argv[1]?.endsWith('cli.js') || process.argv[1]?.endsWith('subsense-bridge');
if (invokedDirectly) {
  buildCli(hideBin(process.argv)).parseAsync();
}
