import { createWriteStream } from 'node:fs';
import { readFile } from 'node:fs/promises';
import { pathToFileURL } from 'node:url';

import PDFDocument from 'pdfkit';

import { parsePosteriorCsv, parseTimingCsv } from './csv.js';
import { POSTERIOR_PAGE, renderPosteriorFigure } from './posterior.js';
import { renderTimingFigure, TIMING_PAGE } from './timing.js';

export const EXIT_OK = 0;
export const EXIT_RENDER_FAILED = 1;
export const EXIT_BAD_ARGS = 2;

const USAGE = `usage: matheron-enkf-plots render --kind <posterior|timing> --in <csv> --out <pdf>

Renders a posterior-recovery figure (one panel per method) or a pair of
log-log timing panels (fit, predict) from the benchmark CSVs.`;

interface RenderArgs {
  kind: 'posterior' | 'timing';
  input: string;
  output: string;
}

export function parseArgs(argv: string[]): RenderArgs {
  if (argv[0] !== 'render') {
    throw new Error(`unknown subcommand ${JSON.stringify(argv[0] ?? '')}\n${USAGE}`);
  }
  const values: Record<string, string> = {};
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!['--kind', '--in', '--out'].includes(flag) || value === undefined) {
      throw new Error(`bad argument ${JSON.stringify(flag)}\n${USAGE}`);
    }
    values[flag] = value;
  }
  const kind = values['--kind'];
  if (kind !== 'posterior' && kind !== 'timing') {
    throw new Error(`--kind must be posterior or timing, got ${JSON.stringify(kind ?? '')}`);
  }
  if (!values['--in'] || !values['--out']) {
    throw new Error(`--in and --out are required\n${USAGE}`);
  }
  return { kind, input: values['--in'], output: values['--out'] };
}

/** Render a figure of the given kind from CSV text into a PDF buffer. */
export async function renderToBuffer(
  kind: 'posterior' | 'timing',
  csvText: string,
): Promise<Buffer> {
  const page = kind === 'posterior' ? POSTERIOR_PAGE : TIMING_PAGE;
  const doc = new PDFDocument({
    size: [page.width, page.height],
    margin: 0,
    // pinned so identical CSV input yields byte-identical PDFs
    info: { CreationDate: new Date(0) },
  });
  const chunks: Buffer[] = [];
  doc.on('data', (chunk: Buffer) => chunks.push(chunk));
  const done = new Promise<Buffer>((resolve, reject) => {
    doc.on('end', () => resolve(Buffer.concat(chunks)));
    doc.on('error', reject);
  });
  if (kind === 'posterior') {
    renderPosteriorFigure(doc, parsePosteriorCsv(csvText));
  } else {
    renderTimingFigure(doc, parseTimingCsv(csvText));
  }
  doc.end();
  return done;
}

export async function runCli(argv: string[]): Promise<number> {
  let args: RenderArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return EXIT_BAD_ARGS;
  }
  try {
    const csvText = await readFile(args.input, 'utf8');
    const pdf = await renderToBuffer(args.kind, csvText);
    await new Promise<void>((resolve, reject) => {
      const stream = createWriteStream(args.output);
      stream.on('finish', resolve);
      stream.on('error', reject);
      stream.end(pdf);
    });
    console.log(`wrote ${args.output} (${pdf.length} bytes)`);
    return EXIT_OK;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return EXIT_RENDER_FAILED;
  }
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (isMain) {
  process.exit(await runCli(process.argv.slice(2)));
}
