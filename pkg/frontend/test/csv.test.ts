import { describe, expect, it } from 'vitest';

import {
  methodOrder,
  parsePosteriorCsv,
  parseTimingCsv,
  POSTERIOR_HEADER,
  TIMING_HEADER,
} from '../src/csv.js';

const POSTERIOR_TEXT = [
  POSTERIOR_HEADER,
  'gp,0,0,1.5,1,1.62,1.48,0.21,-1,',
  'gp,1,0.1,1.7,0,,1.66,0.35,-1,',
  'gp,0,0,1.5,1,1.62,1.48,0.21,0,1.41',
  'enkf,0,0,1.5,1,1.62,1.52,0.24,-1,',
].join('\n');

const TIMING_TEXT = [
  TIMING_HEADER,
  'gp,observations,40,0.012,0.003,0.4,3,3',
  'gp,observations,80,0.05,0.004,0.3,3,3',
  'enkf,observations,40,0.002,0.001,0.45,3,3',
].join('\n');

describe('parsePosteriorCsv', () => {
  it('parses summary, observed, and draw rows', () => {
    const rows = parsePosteriorCsv(POSTERIOR_TEXT);
    expect(rows).toHaveLength(4);
    expect(rows[0]).toEqual({
      method: 'gp',
      gridIndex: 0,
      position: 0,
      truth: 1.5,
      isObserved: true,
      obsValue: 1.62,
      postMean: 1.48,
      postStd: 0.21,
      drawId: -1,
      drawValue: null,
    });
    expect(rows[1].isObserved).toBe(false);
    expect(rows[1].obsValue).toBeNull();
    expect(rows[2].drawId).toBe(0);
    expect(rows[2].drawValue).toBeCloseTo(1.41, 12);
  });

  it('accepts trailing newlines', () => {
    expect(parsePosteriorCsv(POSTERIOR_TEXT + '\n')).toHaveLength(4);
  });

  it('rejects a wrong or missing header', () => {
    expect(() => parsePosteriorCsv('')).toThrow(/header/);
    expect(() => parsePosteriorCsv('a,b,c\n1,2,3')).toThrow(/header/);
    // same fields, different order
    const shuffled = POSTERIOR_HEADER.split(',').reverse().join(',');
    expect(() => parsePosteriorCsv(shuffled)).toThrow(/header/);
  });

  it('rejects rows with the wrong field count', () => {
    expect(() => parsePosteriorCsv(`${POSTERIOR_HEADER}\ngp,0,0,1.5,1,1.62,1.48,0.21,-1`))
      .toThrow(/10 fields/);
  });

  it('rejects non-numeric and non-finite required fields', () => {
    expect(() => parsePosteriorCsv(`${POSTERIOR_HEADER}\ngp,0,0,oops,1,1.62,1.48,0.21,-1,`))
      .toThrow(/finite/);
    expect(() => parsePosteriorCsv(`${POSTERIOR_HEADER}\ngp,0,0,inf,1,1.62,1.48,0.21,-1,`))
      .toThrow(/finite/);
    expect(() => parsePosteriorCsv(`${POSTERIOR_HEADER}\ngp,0,0,,1,1.62,1.48,0.21,-1,`))
      .toThrow(/finite/);
  });

  it('rejects is_observed flags outside 0/1', () => {
    expect(() => parsePosteriorCsv(`${POSTERIOR_HEADER}\ngp,0,0,1.5,2,1.62,1.48,0.21,-1,`))
      .toThrow(/is_observed/);
    expect(() => parsePosteriorCsv(`${POSTERIOR_HEADER}\ngp,0,0,1.5,true,1.62,1.48,0.21,-1,`))
      .toThrow(/is_observed/);
  });
});

describe('parseTimingCsv', () => {
  it('parses every column with its type', () => {
    const rows = parseTimingCsv(TIMING_TEXT);
    expect(rows).toHaveLength(3);
    expect(rows[0]).toEqual({
      method: 'gp',
      axis: 'observations',
      axisValue: 40,
      fitTimeS: 0.012,
      predictTimeS: 0.003,
      rmse: 0.4,
      runs: 3,
      seed: 3,
    });
  });

  it('rejects a wrong header', () => {
    expect(() => parseTimingCsv(POSTERIOR_TEXT)).toThrow(/header/);
  });

  it('rejects short rows and bad numbers', () => {
    expect(() => parseTimingCsv(`${TIMING_HEADER}\ngp,observations,40,0.01`))
      .toThrow(/8 fields/);
    expect(() => parseTimingCsv(`${TIMING_HEADER}\ngp,observations,40,x,0.003,0.4,3,3`))
      .toThrow(/finite/);
  });
});

describe('methodOrder', () => {
  it('keeps first-appearance order without duplicates', () => {
    const rows = [{ method: 'letkf' }, { method: 'gp' }, { method: 'letkf' }, { method: 'enkf' }];
    expect(methodOrder(rows)).toEqual(['letkf', 'gp', 'enkf']);
  });

  it('returns an empty list for no rows', () => {
    expect(methodOrder([])).toEqual([]);
  });
});
