export const POSTERIOR_HEADER =
  'method,grid_index,position,truth,is_observed,obs_value,' +
  'post_mean,post_std,draw_id,draw_value';

export const TIMING_HEADER =
  'method,axis,axis_value,fit_time_s,predict_time_s,rmse,runs,seed';

export interface PosteriorRow {
  method: string;
  gridIndex: number;
  position: number;
  truth: number;
  isObserved: boolean;
  obsValue: number | null;
  postMean: number;
  postStd: number;
  drawId: number;
  drawValue: number | null;
}

export interface TimingRow {
  method: string;
  axis: string;
  axisValue: number;
  fitTimeS: number;
  predictTimeS: number;
  rmse: number;
  runs: number;
  seed: number;
}

function splitLines(text: string): string[] {
  return text.split(/\r?\n/).filter((line) => line.length > 0);
}

function num(field: string, where: string): number {
  const value = Number(field);
  if (field.trim() === '' || !Number.isFinite(value)) {
    throw new Error(`${where}: not a finite number: ${JSON.stringify(field)}`);
  }
  return value;
}

function optionalNum(field: string, where: string): number | null {
  return field === '' ? null : num(field, where);
}

/** Parse a posterior-samples CSV; the header must match the schema exactly. */
export function parsePosteriorCsv(text: string): PosteriorRow[] {
  const lines = splitLines(text);
  if (lines.length === 0 || lines[0] !== POSTERIOR_HEADER) {
    throw new Error(`expected posterior header ${JSON.stringify(POSTERIOR_HEADER)}`);
  }
  return lines.slice(1).map((line, i) => {
    const where = `posterior row ${i + 1}`;
    const f = line.split(',');
    if (f.length !== 10) {
      throw new Error(`${where}: expected 10 fields, got ${f.length}`);
    }
    if (f[4] !== '0' && f[4] !== '1') {
      throw new Error(`${where}: is_observed must be 0 or 1, got ${JSON.stringify(f[4])}`);
    }
    return {
      method: f[0],
      gridIndex: num(f[1], where),
      position: num(f[2], where),
      truth: num(f[3], where),
      isObserved: f[4] === '1',
      obsValue: optionalNum(f[5], where),
      postMean: num(f[6], where),
      postStd: num(f[7], where),
      drawId: num(f[8], where),
      drawValue: optionalNum(f[9], where),
    };
  });
}

/** Parse a timing-sweep CSV; the header must match the schema exactly. */
export function parseTimingCsv(text: string): TimingRow[] {
  const lines = splitLines(text);
  if (lines.length === 0 || lines[0] !== TIMING_HEADER) {
    throw new Error(`expected timing header ${JSON.stringify(TIMING_HEADER)}`);
  }
  return lines.slice(1).map((line, i) => {
    const where = `timing row ${i + 1}`;
    const f = line.split(',');
    if (f.length !== 8) {
      throw new Error(`${where}: expected 8 fields, got ${f.length}`);
    }
    return {
      method: f[0],
      axis: f[1],
      axisValue: num(f[2], where),
      fitTimeS: num(f[3], where),
      predictTimeS: num(f[4], where),
      rmse: num(f[5], where),
      runs: num(f[6], where),
      seed: num(f[7], where),
    };
  });
}

/** Methods in first-appearance order. */
export function methodOrder(rows: { method: string }[]): string[] {
  const seen: string[] = [];
  for (const row of rows) {
    if (!seen.includes(row.method)) seen.push(row.method);
  }
  return seen;
}
