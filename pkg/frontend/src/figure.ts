/**
 * Pure SVG figure builder for log-log convergence data.
 *
 * Everything here is a deterministic function of the parsed rows and the
 * options: no clock, no randomness, no environment reads, so identical
 * inputs always produce the identical SVG string.
 */

import { StudyRow } from "./schema.js";

export interface FigureOptions {
  /** keep only these methods (empty = all) */
  methods: string[];
  /** dashed reference slopes anchored at the first plotted point */
  guides: number[];
  title?: string;
  width?: number;
  height?: number;
}

export const DEFAULT_GUIDES = [-0.5, -1.5];

const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const MARGIN = { top: 36, right: 168, bottom: 52, left: 76 };

interface Series {
  method: string;
  points: Array<{ n: number; err: number }>;
}

function collectSeries(rows: StudyRow[], methods: string[]): Series[] {
  const keep = new Set(methods);
  const byMethod = new Map<string, Array<{ n: number; err: number }>>();
  for (const row of rows) {
    if (keep.size > 0 && !keep.has(row.method)) continue;
    if (!byMethod.has(row.method)) byMethod.set(row.method, []);
    // log axes cannot place zero errors; skip those points
    if (row.mean_abs_error > 0) {
      byMethod.get(row.method)!.push({ n: row.n_budget, err: row.mean_abs_error });
    }
  }
  return Array.from(byMethod.entries()).map(([method, points]) => ({
    method,
    points: points.slice().sort((a, b) => a.n - b.n),
  }));
}

function log10(x: number): number {
  return Math.log(x) / Math.LN10;
}

/** Format a number for SVG coordinates: fixed precision, locale-free. */
function coord(x: number): string {
  return x.toFixed(2);
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(log10(lo) - 1e-9); e <= Math.floor(log10(hi) + 1e-9); e += 1) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

function formatTick(value: number): string {
  const e = Math.round(log10(value));
  if (e >= -3 && e <= 3) {
    return value >= 1 ? String(Math.round(value)) : value.toFixed(Math.min(3, -e));
  }
  return `1e${e}`;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Build the complete SVG document for the given rows. */
export function buildFigure(rows: StudyRow[], options: FigureOptions): string {
  const width = options.width ?? 760;
  const height = options.height ?? 480;
  const series = collectSeries(rows, options.methods);
  if (series.length === 0 || series.every((s) => s.points.length === 0)) {
    throw new Error("nothing to plot: no rows with positive error after filtering");
  }

  const xs = series.flatMap((s) => s.points.map((p) => p.n));
  const ys = series.flatMap((s) => s.points.map((p) => p.err));
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const anchor = series[0].points[0];

  // guides extend the y-range; include their endpoints before padding
  const guideEnds = options.guides.map((slope) => anchor.err * Math.pow(xHi / anchor.n, slope));
  const yLo = Math.min(...ys, ...guideEnds);
  const yHi = Math.max(...ys, ...guideEnds);

  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const xSpan = Math.max(log10(xHi) - log10(xLo), 1e-12);
  const padY = 0.05 * Math.max(log10(yHi) - log10(yLo), 1e-12);
  const yMinLog = log10(yLo) - padY;
  const ySpanLog = Math.max(log10(yHi) + padY - yMinLog, 1e-12);

  const px = (n: number) => MARGIN.left + ((log10(n) - log10(xLo)) / xSpan) * plotW;
  const py = (err: number) => MARGIN.top + plotH - ((log10(err) - yMinLog) / ySpanLog) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (options.title) {
    parts.push(
      `<text x="${width / 2}" y="20" text-anchor="middle" font-size="14">` +
        `${escapeXml(options.title)}</text>`,
    );
  }

  // frame
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333" stroke-width="1"/>`,
  );

  // x ticks: the budgets themselves when few, decades otherwise
  const xTickValues = new Set(xs).size <= 10 ? Array.from(new Set(xs)).sort((a, b) => a - b) : decadeTicks(xLo, xHi);
  for (const t of xTickValues) {
    const x = px(t);
    parts.push(
      `<line x1="${coord(x)}" y1="${MARGIN.top + plotH}" x2="${coord(x)}" ` +
        `y2="${MARGIN.top + plotH + 5}" stroke="#333"/>`,
    );
    parts.push(
      `<text x="${coord(x)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" ` +
        `font-size="10">${formatTick(t)}</text>`,
    );
  }
  for (const t of decadeTicks(Math.pow(10, yMinLog), Math.pow(10, yMinLog + ySpanLog))) {
    const y = py(t);
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${coord(y)}" x2="${MARGIN.left}" ` +
        `y2="${coord(y)}" stroke="#333"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${coord(y + 3)}" text-anchor="end" ` +
        `font-size="10">${formatTick(t)}</text>`,
    );
    parts.push(
      `<line x1="${MARGIN.left}" y1="${coord(y)}" x2="${MARGIN.left + plotW}" ` +
        `y2="${coord(y)}" stroke="#ddd" stroke-width="0.5"/>`,
    );
  }

  // axis labels
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 14}" text-anchor="middle" ` +
      `font-size="12">budget n (function values)</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">mean absolute error</text>`,
  );

  // guide lines, anchored at the first point of the first series
  for (const slope of options.guides) {
    const y1 = anchor.err;
    const y2 = anchor.err * Math.pow(xHi / anchor.n, slope);
    parts.push(
      `<line class="guide" x1="${coord(px(anchor.n))}" y1="${coord(py(y1))}" ` +
        `x2="${coord(px(xHi))}" y2="${coord(py(y2))}" stroke="#888" ` +
        `stroke-width="1" stroke-dasharray="6 4"/>`,
    );
    parts.push(
      `<text x="${coord(px(xHi) + 4)}" y="${coord(py(y2) + 3)}" font-size="10" ` +
        `fill="#666">slope ${slope}</text>`,
    );
  }

  // one polyline + markers per method
  series.forEach((s, i) => {
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    const path = s.points
      .map((p, j) => `${j === 0 ? "M" : "L"}${coord(px(p.n))} ${coord(py(p.err))}`)
      .join(" ");
    parts.push(
      `<path class="series" data-method="${escapeXml(s.method)}" d="${path}" ` +
        `fill="none" stroke="${color}" stroke-width="1.6"/>`,
    );
    for (const p of s.points) {
      parts.push(
        `<circle cx="${coord(px(p.n))}" cy="${coord(py(p.err))}" r="3" fill="${color}"/>`,
      );
    }
    const ly = MARGIN.top + 14 + i * 18;
    const lx = MARGIN.left + plotW + 12;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 20}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="${lx + 26}" y="${ly}" font-size="11">${escapeXml(s.method)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
