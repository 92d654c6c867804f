import type { DistributionRecord, Query } from './wire.js';

/** Fixed 60-word list for the test stub: every query gets the same uniform
 * distribution, so integration tests run without any model download. */
export const STUB_WORDS: readonly string[] = [
  'time', 'year', 'people', 'way', 'day', 'man', 'thing', 'woman', 'life', 'child',
  'world', 'school', 'state', 'family', 'student', 'group', 'country', 'problem', 'hand', 'part',
  'place', 'case', 'week', 'company', 'system', 'program', 'question', 'work', 'government', 'number',
  'night', 'point', 'home', 'water', 'room', 'mother', 'area', 'money', 'story', 'fact',
  'month', 'lot', 'right', 'study', 'book', 'eye', 'job', 'word', 'business', 'issue',
  'side', 'kind', 'head', 'house', 'service', 'friend', 'father', 'power', 'hour', 'game',
];

export function stubScore(query: Query): DistributionRecord {
  const p = 1 / STUB_WORDS.length;
  return {
    instance_id: query.instance_id,
    direction: query.direction,
    pattern: query.pattern,
    entries: STUB_WORDS.map((w) => [w, p]),
  };
}
