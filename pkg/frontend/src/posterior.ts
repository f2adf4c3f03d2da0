import { methodOrder, type PosteriorRow } from './csv.js';
import {
  type Doc,
  drawBand,
  drawFrame,
  drawLegend,
  drawMarkers,
  drawPolyline,
  drawXAxis,
  drawYAxis,
  methodColor,
  type Panel,
} from './draw.js';
import { linearScale, niceTicks } from './scale.js';

export const POSTERIOR_PAGE = { width: 900, height: 330 };

const MARGIN = { top: 26, right: 14, bottom: 40, left: 56 };
const PANEL_GAP = 58;

interface MethodSeries {
  method: string;
  positions: number[];
  truth: number[];
  mean: number[];
  std: number[];
  observed: Array<[number, number]>;
  draws: Map<number, Array<[number, number]>>;
}

function collect(rows: PosteriorRow[], method: string): MethodSeries {
  const summary = rows
    .filter((r) => r.method === method && r.drawId === -1)
    .sort((a, b) => a.gridIndex - b.gridIndex);
  if (summary.length === 0) {
    throw new Error(`no summary rows for method ${JSON.stringify(method)}`);
  }
  const series: MethodSeries = {
    method,
    positions: summary.map((r) => r.position),
    truth: summary.map((r) => r.truth),
    mean: summary.map((r) => r.postMean),
    std: summary.map((r) => r.postStd),
    observed: summary
      .filter((r) => r.isObserved && r.obsValue !== null)
      .map((r) => [r.position, r.obsValue as number]),
    draws: new Map(),
  };
  for (const row of rows) {
    if (row.method !== method || row.drawId < 0 || row.drawValue === null) continue;
    let path = series.draws.get(row.drawId);
    if (!path) {
      path = [];
      series.draws.set(row.drawId, path);
    }
    path.push([row.position, row.drawValue]);
  }
  for (const path of series.draws.values()) {
    path.sort((a, b) => a[0] - b[0]);
  }
  return series;
}

function valueExtent(series: MethodSeries[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (let i = 0; i < s.positions.length; i++) {
      lo = Math.min(lo, s.truth[i], s.mean[i] - 2 * s.std[i]);
      hi = Math.max(hi, s.truth[i], s.mean[i] + 2 * s.std[i]);
    }
    for (const [, v] of s.observed) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
    for (const path of s.draws.values()) {
      for (const [, v] of path) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  const pad = 0.05 * (hi - lo || 1);
  return [lo - pad, hi + pad];
}

/** One panel per method: band, draws, mean, truth, and observed points. */
export function renderPosteriorFigure(doc: Doc, rows: PosteriorRow[]): void {
  const methods = methodOrder(rows);
  if (methods.length === 0) throw new Error('posterior file has no data rows');
  const series = methods.map((m) => collect(rows, m));

  const innerWidth =
    POSTERIOR_PAGE.width - MARGIN.left - MARGIN.right - PANEL_GAP * (methods.length - 1);
  const panelWidth = innerWidth / methods.length;
  const panelHeight = POSTERIOR_PAGE.height - MARGIN.top - MARGIN.bottom;
  const [yLo, yHi] = valueExtent(series);

  series.forEach((s, idx) => {
    const panel: Panel = {
      x: MARGIN.left + idx * (panelWidth + PANEL_GAP),
      y: MARGIN.top,
      width: panelWidth,
      height: panelHeight,
    };
    const xs = linearScale(
      [s.positions[0], s.positions[s.positions.length - 1]],
      [panel.x, panel.x + panel.width],
    );
    const ys = linearScale([yLo, yHi], [panel.y + panel.height, panel.y]);
    const color = methodColor(s.method, idx);

    drawFrame(doc, panel, s.method);
    drawXAxis(doc, panel, xs, niceTicks(xs.domain[0], xs.domain[1], 5), 'position');
    drawYAxis(doc, panel, ys, niceTicks(yLo, yHi, 5), idx === 0 ? 'field value' : '');

    const upper: Array<[number, number]> = s.positions.map((p, i) => [
      xs.map(p),
      ys.map(s.mean[i] + 2 * s.std[i]),
    ]);
    const lower: Array<[number, number]> = s.positions.map((p, i) => [
      xs.map(p),
      ys.map(s.mean[i] - 2 * s.std[i]),
    ]);
    drawBand(doc, upper, lower, color, 0.15);

    for (const path of s.draws.values()) {
      drawPolyline(doc, path.map(([p, v]) => [xs.map(p), ys.map(v)]), '#999999', 0.4);
    }
    drawPolyline(
      doc,
      s.positions.map((p, i) => [xs.map(p), ys.map(s.truth[i])]),
      '#333333',
      0.9,
      true,
    );
    drawPolyline(
      doc,
      s.positions.map((p, i) => [xs.map(p), ys.map(s.mean[i])]),
      color,
      1.3,
    );
    drawMarkers(doc, s.observed.map(([p, v]) => [xs.map(p), ys.map(v)]), '#111111', 1.8);

    if (idx === 0) {
      drawLegend(doc, panel, [
        { label: 'posterior mean', color },
        { label: 'truth', color: '#333333', dashed: true },
        { label: 'observations', color: '#111111', marker: true },
        { label: 'draws', color: '#999999' },
      ]);
    }
  });
}
