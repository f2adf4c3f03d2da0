import { methodOrder, type TimingRow } from './csv.js';
import {
  type Doc,
  drawFrame,
  drawLegend,
  drawMarkers,
  drawPolyline,
  drawXAxis,
  drawYAxis,
  methodColor,
  type LegendEntry,
  type Panel,
} from './draw.js';
import { logLogSlope, logScale, logTicks } from './scale.js';

export const TIMING_PAGE = { width: 700, height: 330 };

const MARGIN = { top: 26, right: 16, bottom: 40, left: 60 };
const PANEL_GAP = 64;
const TIME_FLOOR = 1e-9; // clock-resolution zeros cannot sit on a log axis

const AXIS_LABELS: Record<string, string> = {
  observations: 'observations m',
  dimensions: 'grid size d',
};

type Phase = 'fitTimeS' | 'predictTimeS';

interface MethodCurve {
  method: string;
  xs: number[];
  ys: number[];
  slope: number;
}

function curves(rows: TimingRow[], phase: Phase): MethodCurve[] {
  return methodOrder(rows).map((method) => {
    const mine = rows
      .filter((r) => r.method === method)
      .sort((a, b) => a.axisValue - b.axisValue);
    const xs = mine.map((r) => r.axisValue);
    const ys = mine.map((r) => Math.max(r[phase], TIME_FLOOR));
    return { method, xs, ys, slope: xs.length >= 2 ? logLogSlope(xs, ys) : NaN };
  });
}

function drawPanel(
  doc: Doc,
  panel: Panel,
  title: string,
  xLabel: string,
  all: MethodCurve[],
): void {
  const xValues = all.flatMap((c) => c.xs);
  const yValues = all.flatMap((c) => c.ys);
  const xDomain: [number, number] = [Math.min(...xValues), Math.max(...xValues)];
  const yLo = Math.min(...yValues);
  const yHi = Math.max(...yValues);
  const yDomain: [number, number] = [yLo / 1.5, yHi * 1.5];

  const xs = logScale(xDomain, [panel.x, panel.x + panel.width]);
  const ys = logScale(yDomain, [panel.y + panel.height, panel.y]);

  drawFrame(doc, panel, title);
  // swept values are few and hand-picked, so tick exactly at them
  const xTicks = [...new Set(xValues)].sort((a, b) => a - b);
  drawXAxis(doc, panel, xs, xTicks, xLabel);
  drawYAxis(doc, panel, ys, logTicks(yDomain[0], yDomain[1]), 'wall time (s)');

  const legend: LegendEntry[] = [];
  all.forEach((curve, idx) => {
    const color = methodColor(curve.method, idx);
    const points: Array<[number, number]> = curve.xs.map((x, i) => [
      xs.map(x),
      ys.map(curve.ys[i]),
    ]);
    drawPolyline(doc, points, color, 1.2);
    drawMarkers(doc, points, color, 1.8);
    const slopeText = Number.isNaN(curve.slope) ? '' : ` (slope ${curve.slope.toFixed(2)})`;
    legend.push({ label: `${curve.method}${slopeText}`, color, marker: true });
  });
  drawLegend(doc, panel, legend);
}

/** Two log-log panels: fit time and predict time against the swept axis. */
export function renderTimingFigure(doc: Doc, rows: TimingRow[]): void {
  if (rows.length === 0) throw new Error('timing file has no data rows');
  const axes = [...new Set(rows.map((r) => r.axis))];
  if (axes.length !== 1) {
    throw new Error(`timing file mixes sweep axes: ${axes.join(', ')}`);
  }
  const xLabel = AXIS_LABELS[axes[0]] ?? axes[0];

  const panelWidth = (TIMING_PAGE.width - MARGIN.left - MARGIN.right - PANEL_GAP) / 2;
  const panelHeight = TIMING_PAGE.height - MARGIN.top - MARGIN.bottom;
  const left: Panel = { x: MARGIN.left, y: MARGIN.top, width: panelWidth, height: panelHeight };
  const right: Panel = {
    x: MARGIN.left + panelWidth + PANEL_GAP,
    y: MARGIN.top,
    width: panelWidth,
    height: panelHeight,
  };

  drawPanel(doc, left, 'fit', xLabel, curves(rows, 'fitTimeS'));
  drawPanel(doc, right, 'predict', xLabel, curves(rows, 'predictTimeS'));
}
