import { mkdtempSync, readFileSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { EXIT_BAD_ARGS, EXIT_OK, EXIT_RENDER_FAILED, parseArgs, runCli } from '../src/cli.js';
import { POSTERIOR_HEADER, TIMING_HEADER } from '../src/csv.js';

describe('parseArgs', () => {
  it('parses a full render invocation in any flag order', () => {
    expect(parseArgs(['render', '--kind', 'posterior', '--in', 'a.csv', '--out', 'b.pdf']))
      .toEqual({ kind: 'posterior', input: 'a.csv', output: 'b.pdf' });
    expect(parseArgs(['render', '--out', 'b.pdf', '--kind', 'timing', '--in', 'a.csv']))
      .toEqual({ kind: 'timing', input: 'a.csv', output: 'b.pdf' });
  });

  it('rejects unknown subcommands and flags', () => {
    expect(() => parseArgs([])).toThrow(/subcommand/);
    expect(() => parseArgs(['plot'])).toThrow(/subcommand/);
    expect(() => parseArgs(['render', '--bogus', 'x'])).toThrow(/bad argument/);
  });

  it('rejects bad kinds and missing paths', () => {
    expect(() => parseArgs(['render', '--kind', 'surface', '--in', 'a', '--out', 'b']))
      .toThrow(/--kind/);
    expect(() => parseArgs(['render', '--kind', 'timing', '--out', 'b'])).toThrow(/--in/);
    expect(() => parseArgs(['render', '--kind', 'timing', '--in', 'a'])).toThrow(/--out/);
    expect(() => parseArgs(['render', '--kind'])).toThrow(/bad argument/);
  });
});

describe('runCli', () => {
  let dir: string;

  beforeEach(() => {
    dir = mkdtempSync(join(tmpdir(), 'plots-cli-'));
    vi.spyOn(console, 'log').mockImplementation(() => {});
    vi.spyOn(console, 'error').mockImplementation(() => {});
  });

  afterEach(() => {
    rmSync(dir, { recursive: true, force: true });
    vi.restoreAllMocks();
  });

  it('renders a posterior CSV to a PDF and reports the size', async () => {
    const input = join(dir, 'post.csv');
    const output = join(dir, 'post.pdf');
    writeFileSync(input, `${POSTERIOR_HEADER}\ngp,0,0,1.0,1,1.1,0.9,0.2,-1,\ngp,1,1,0.5,0,,0.6,0.2,-1,\n`);
    const code = await runCli(['render', '--kind', 'posterior', '--in', input, '--out', output]);
    expect(code).toBe(EXIT_OK);
    const pdf = readFileSync(output);
    expect(pdf.subarray(0, 5).toString('latin1')).toBe('%PDF-');
    expect(console.log).toHaveBeenCalledWith(expect.stringContaining('post.pdf'));
  });

  it('renders a timing CSV to a PDF', async () => {
    const input = join(dir, 'time.csv');
    const output = join(dir, 'time.pdf');
    writeFileSync(
      input,
      `${TIMING_HEADER}\ngp,dimensions,10,0.1,0.01,0.3,3,0\ngp,dimensions,20,0.4,0.02,0.3,3,0\n`,
    );
    const code = await runCli(['render', '--kind', 'timing', '--in', input, '--out', output]);
    expect(code).toBe(EXIT_OK);
    expect(readFileSync(output).length).toBeGreaterThan(0);
  });

  it('returns the argument exit code for bad usage', async () => {
    expect(await runCli([])).toBe(EXIT_BAD_ARGS);
    expect(await runCli(['render', '--kind', 'nope', '--in', 'a', '--out', 'b']))
      .toBe(EXIT_BAD_ARGS);
    expect(console.error).toHaveBeenCalled();
  });

  it('returns the render exit code when the input is missing or malformed', async () => {
    const output = join(dir, 'out.pdf');
    expect(
      await runCli(['render', '--kind', 'timing', '--in', join(dir, 'nope.csv'), '--out', output]),
    ).toBe(EXIT_RENDER_FAILED);

    const bad = join(dir, 'bad.csv');
    writeFileSync(bad, 'not,a,real,header\n1,2,3,4\n');
    expect(await runCli(['render', '--kind', 'timing', '--in', bad, '--out', output]))
      .toBe(EXIT_RENDER_FAILED);
  });

  it('returns the render exit code when the output directory does not exist', async () => {
    const input = join(dir, 'time.csv');
    writeFileSync(input, `${TIMING_HEADER}\ngp,dimensions,10,0.1,0.01,0.3,3,0\n`);
    const code = await runCli([
      'render', '--kind', 'timing', '--in', input, '--out', join(dir, 'missing', 'out.pdf'),
    ]);
    expect(code).toBe(EXIT_RENDER_FAILED);
  });
});
