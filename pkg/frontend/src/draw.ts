import { fmtTick, type Scale } from './scale.js';

export type Doc = PDFKit.PDFDocument;

export interface Panel {
  x: number;
  y: number;
  width: number;
  height: number;
}

export const METHOD_COLORS: Record<string, string> = {
  gp: '#2266aa',
  enkf: '#cc3333',
  letkf: '#228844',
};

const FALLBACK_COLORS = ['#886600', '#663388', '#226666'];

export function methodColor(method: string, index: number): string {
  return METHOD_COLORS[method] ?? FALLBACK_COLORS[index % FALLBACK_COLORS.length];
}

export const AXIS_COLOR = '#444444';
export const GRID_COLOR = '#dddddd';
export const TEXT_COLOR = '#222222';

export function drawFrame(doc: Doc, panel: Panel, title?: string): void {
  doc.save();
  doc.lineWidth(0.8).rect(panel.x, panel.y, panel.width, panel.height).stroke(AXIS_COLOR);
  if (title) {
    doc.font('Helvetica-Bold').fontSize(9).fillColor(TEXT_COLOR);
    doc.text(title, panel.x, panel.y - 14, { width: panel.width, align: 'center' });
  }
  doc.restore();
}

export function drawXAxis(
  doc: Doc,
  panel: Panel,
  scale: Scale,
  ticks: number[],
  label: string,
): void {
  doc.save();
  doc.font('Helvetica').fontSize(7).fillColor(TEXT_COLOR);
  const y = panel.y + panel.height;
  for (const t of ticks) {
    const px = scale.map(t);
    if (px < panel.x - 0.5 || px > panel.x + panel.width + 0.5) continue;
    doc.lineWidth(0.5).moveTo(px, y).lineTo(px, y + 3).stroke(AXIS_COLOR);
    doc.lineWidth(0.4).moveTo(px, panel.y).lineTo(px, y).stroke(GRID_COLOR);
    doc.text(fmtTick(t), px - 20, y + 5, { width: 40, align: 'center' });
  }
  doc.fontSize(8);
  doc.text(label, panel.x, y + 18, { width: panel.width, align: 'center' });
  doc.restore();
}

export function drawYAxis(
  doc: Doc,
  panel: Panel,
  scale: Scale,
  ticks: number[],
  label: string,
): void {
  doc.save();
  doc.font('Helvetica').fontSize(7).fillColor(TEXT_COLOR);
  for (const t of ticks) {
    const py = scale.map(t);
    if (py < panel.y - 0.5 || py > panel.y + panel.height + 0.5) continue;
    doc.lineWidth(0.5).moveTo(panel.x - 3, py).lineTo(panel.x, py).stroke(AXIS_COLOR);
    doc.lineWidth(0.4).moveTo(panel.x, py).lineTo(panel.x + panel.width, py).stroke(GRID_COLOR);
    doc.text(fmtTick(t), panel.x - 40, py - 3, { width: 35, align: 'right' });
  }
  doc.fontSize(8);
  doc.save();
  doc.rotate(-90, { origin: [panel.x - 44, panel.y + panel.height / 2] });
  doc.text(label, panel.x - 44 - panel.height / 2, panel.y + panel.height / 2 - 9, {
    width: panel.height,
    align: 'center',
  });
  doc.restore();
  doc.restore();
}

export function drawPolyline(
  doc: Doc,
  points: Array<[number, number]>,
  color: string,
  width: number,
  dashed = false,
): void {
  if (points.length < 2) return;
  doc.save();
  doc.lineWidth(width);
  if (dashed) doc.dash(3, { space: 2 });
  doc.moveTo(points[0][0], points[0][1]);
  for (let i = 1; i < points.length; i++) {
    doc.lineTo(points[i][0], points[i][1]);
  }
  doc.stroke(color);
  doc.restore();
}

export function drawBand(
  doc: Doc,
  upper: Array<[number, number]>,
  lower: Array<[number, number]>,
  color: string,
  opacity: number,
): void {
  if (upper.length < 2) return;
  doc.save();
  doc.moveTo(upper[0][0], upper[0][1]);
  for (let i = 1; i < upper.length; i++) doc.lineTo(upper[i][0], upper[i][1]);
  for (let i = lower.length - 1; i >= 0; i--) doc.lineTo(lower[i][0], lower[i][1]);
  doc.closePath();
  doc.fillColor(color, opacity);
  doc.fill();
  doc.restore();
}

export function drawMarkers(
  doc: Doc,
  points: Array<[number, number]>,
  color: string,
  radius: number,
): void {
  doc.save();
  for (const [px, py] of points) {
    doc.circle(px, py, radius).fillColor(color).fill();
  }
  doc.restore();
}

export interface LegendEntry {
  label: string;
  color: string;
  dashed?: boolean;
  marker?: boolean;
}

export function drawLegend(
  doc: Doc,
  panel: Panel,
  entries: LegendEntry[],
): void {
  doc.save();
  doc.font('Helvetica').fontSize(7).fillColor(TEXT_COLOR);
  const x0 = panel.x + 6;
  let y = panel.y + 6;
  for (const entry of entries) {
    doc.lineWidth(1.4);
    if (entry.dashed) doc.dash(3, { space: 2 });
    doc.moveTo(x0, y + 3).lineTo(x0 + 14, y + 3).stroke(entry.color);
    doc.undash();
    if (entry.marker) {
      doc.circle(x0 + 7, y + 3, 1.6).fillColor(entry.color).fill();
    }
    doc.fillColor(TEXT_COLOR);
    doc.text(entry.label, x0 + 18, y, { lineBreak: false });
    y += 10;
  }
  doc.restore();
}
