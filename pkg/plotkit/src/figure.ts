/**
 * Two-panel SVG figures from coordination-run traces.
 *
 * Each input trace becomes one figure row: a transfer-price panel on the left
 * (one curve per commodity) and an excess-supply panel on the right (one curve
 * per commodity plus a dashed zero line). Output is deterministic — same
 * inputs, same bytes.
 */
import { TraceTable } from "./csv.js";

export interface FigureRow {
  title: string;
  table: TraceTable;
}

export interface FigureOptions {
  /** plot round numbers on a log axis (useful for long runs) */
  logX?: boolean;
}

const PANEL_W = 360;
const PANEL_H = 240;
const MARGIN = { left: 58, right: 16, top: 34, bottom: 42 };
const GAP_X = 28;
const PAD_Y = 14;

const PALETTE = ["#4361ee", "#e63946", "#2d6a4f", "#9d4edd", "#f77f00", "#577590"];

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((n) => n >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 0.01; v += step) {
    // cosmetic: snap -0 to 0
    ticks.push(Object.is(v, -0) ? 0 : Number(v.toFixed(12)));
  }
  return ticks;
}

function fmtTick(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e5 || Math.abs(v) < 1e-3)) return v.toExponential(0);
  return v % 1 === 0 ? String(v) : String(Number(v.toPrecision(4)));
}

interface Scale {
  (v: number): number;
}

function makeScale(min: number, max: number, outLo: number, outHi: number, log: boolean): Scale {
  if (log) {
    const lmin = Math.log10(min);
    const lmax = Math.log10(max);
    return (v) => outLo + ((Math.log10(v) - lmin) / (lmax - lmin || 1)) * (outHi - outLo);
  }
  return (v) => outLo + ((v - min) / (max - min || 1)) * (outHi - outLo);
}

/** One panel: series curves over rounds, axes, ticks, optional zero line. */
function buildPanel(
  x0: number,
  y0: number,
  title: string,
  t: number[],
  series: number[][],
  seriesClass: string,
  yLabel: string,
  logX: boolean,
  zeroLine: boolean
): string {
  const ml = x0 + MARGIN.left;
  const mt = y0 + MARGIN.top;
  const pw = PANEL_W - MARGIN.left - MARGIN.right;
  const ph = PANEL_H - MARGIN.top - MARGIN.bottom;

  const tMin = t[0];
  const tMax = t[t.length - 1];
  const xOf = makeScale(tMin, tMax, ml, ml + pw, logX && tMin > 0);

  const flat = series.flat();
  let yMin = Math.min(...flat);
  let yMax = Math.max(...flat);
  if (zeroLine) {
    yMin = Math.min(yMin, 0);
    yMax = Math.max(yMax, 0);
  }
  const span = yMax - yMin || 1;
  yMin -= span * 0.05;
  yMax += span * 0.05;
  const yOf = makeScale(yMin, yMax, mt + ph, mt, false);

  let s = "";
  s += `<text x="${ml}" y="${y0 + 16}" font-size="11" font-weight="600" fill="#222">${esc(title)}</text>\n`;

  const yTicks = niceTicks(yMin, yMax, 5);
  for (const v of yTicks) {
    const y = yOf(v).toFixed(1);
    s += `<line x1="${ml}" y1="${y}" x2="${ml + pw}" y2="${y}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<line x1="${ml - 3}" y1="${y}" x2="${ml}" y2="${y}" stroke="#333" stroke-width="0.5"/>\n`;
    s += `<text x="${ml - 5}" y="${(yOf(v) + 3).toFixed(1)}" text-anchor="end" font-size="7.5" fill="#555">${esc(fmtTick(v))}</text>\n`;
  }

  if (zeroLine) {
    const y = yOf(0).toFixed(1);
    s += `<line class="zero-line" x1="${ml}" y1="${y}" x2="${ml + pw}" y2="${y}" stroke="#999" stroke-width="1" stroke-dasharray="5,4"/>\n`;
  }

  series.forEach((values, k) => {
    const pts = values
      .map((v, i) => `${xOf(t[i]).toFixed(1)},${yOf(v).toFixed(1)}`)
      .join(" ");
    const color = PALETTE[k % PALETTE.length];
    s += `<polyline class="${seriesClass}" fill="none" stroke="${color}" stroke-width="1.1" points="${pts}"/>\n`;
  });

  // axes frame
  s += `<line x1="${ml}" y1="${mt}" x2="${ml}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<line x1="${ml}" y1="${mt + ph}" x2="${ml + pw}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;

  const xTickVals =
    logX && tMin > 0
      ? niceTicks(Math.log10(tMin), Math.log10(tMax), 5).map((e) => Math.pow(10, e))
      : niceTicks(tMin, tMax, 5);
  for (const v of xTickVals) {
    if (v < tMin || v > tMax) continue;
    const x = xOf(v).toFixed(1);
    s += `<line x1="${x}" y1="${mt + ph}" x2="${x}" y2="${mt + ph + 3}" stroke="#333" stroke-width="0.5"/>\n`;
    s += `<text x="${x}" y="${mt + ph + 13}" text-anchor="middle" font-size="7.5" fill="#555">${esc(fmtTick(v))}</text>\n`;
  }
  s += `<text x="${ml + pw / 2}" y="${y0 + PANEL_H - 6}" text-anchor="middle" font-size="9" fill="#444">round t</text>\n`;
  s += `<text x="${x0 + 14}" y="${mt + ph / 2}" text-anchor="middle" font-size="9" fill="#444" transform="rotate(-90,${x0 + 14},${mt + ph / 2})">${esc(yLabel)}</text>\n`;

  // per-commodity legend only when there is more than one curve
  if (series.length > 1) {
    series.forEach((_, k) => {
      const lx = ml + pw - 86;
      const ly = mt + 8 + k * 11;
      s += `<line x1="${lx}" y1="${ly}" x2="${lx + 14}" y2="${ly}" stroke="${PALETTE[k % PALETTE.length]}" stroke-width="1.4"/>\n`;
      s += `<text x="${lx + 18}" y="${ly + 3}" font-size="7.5" fill="#444">commodity ${k}</text>\n`;
    });
  }
  return s;
}

export function buildFigure(rows: FigureRow[], opts: FigureOptions = {}): string {
  if (rows.length === 0) throw new Error("nothing to plot: no input traces");
  const logX = opts.logX ?? false;

  const W = 2 * PANEL_W + GAP_X + 2 * PAD_Y;
  const H = rows.length * PANEL_H + (rows.length + 1) * PAD_Y;

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;

  rows.forEach((row, i) => {
    const y0 = PAD_Y + i * (PANEL_H + PAD_Y);
    const transposed = (cols: number[][]) =>
      Array.from({ length: row.table.d }, (_, k) => cols.map((r) => r[k]));
    s += buildPanel(
      PAD_Y,
      y0,
      `${row.title} — transfer prices`,
      row.table.t,
      transposed(row.table.lambda),
      "price-series",
      "price",
      logX,
      false
    );
    s += buildPanel(
      PAD_Y + PANEL_W + GAP_X,
      y0,
      `${row.title} — excess supply`,
      row.table.t,
      transposed(row.table.excess),
      "excess-series",
      "supply − demand",
      logX,
      true
    );
  });

  s += `</svg>\n`;
  return s;
}
