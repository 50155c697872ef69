/** Minimal deterministic SVG generation: multi-curve line charts with a
 * log ordinate. No DOM, no dependencies; output depends only on the input. */

import type { FigureData } from "./csv.js";

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  /** ordinate scale; the figure data spans hundreds of decades, so log is
   *  the default everywhere */
  logY: boolean;
  /** clamped rows are drawn as saturated markers pinned to the top edge
   *  (the divergence is the message; dropping them would hide it) */
  markClampedAtTop: boolean;
}

export const WIDTH = 900;
export const HEIGHT = 600;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 46 };
const FLOOR = 1e-320; // keep log scale finite for exact zeros

const fmt = (v: number): string => v.toFixed(2);

function seriesColor(index: number, total: number): string {
  const hue = total <= 1 ? 220 : Math.round((300 * index) / (total - 1));
  return `hsl(${hue},70%,45%)`;
}

export function renderChart(data: FigureData, opts: ChartOptions): string {
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;

  let nMax = 1;
  let vMin = Infinity;
  let vMax = -Infinity;
  for (const points of data.series.values()) {
    for (const pt of points) {
      if (pt.n > nMax) nMax = pt.n;
      if (pt.value !== null && pt.value > 0) {
        if (pt.value < vMin) vMin = pt.value;
        if (pt.value > vMax) vMax = pt.value;
      }
    }
  }
  if (!isFinite(vMin) || vMin <= 0) vMin = FLOOR;
  if (!isFinite(vMax) || vMax <= vMin) vMax = vMin * 10;

  const xPix = (n: number) => MARGIN.left + (n / nMax) * innerW;
  const yPix = (v: number) => {
    let t: number;
    if (opts.logY) {
      const lo = Math.log10(vMin);
      const hi = Math.log10(vMax);
      t = (Math.log10(Math.max(v, FLOOR)) - lo) / (hi - lo || 1);
    } else {
      t = (v - vMin) / (vMax - vMin || 1);
    }
    return MARGIN.top + (1 - t) * innerH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16" font-family="sans-serif">${opts.title}</text>`,
  );

  // axes
  const x0 = MARGIN.left;
  const y0 = HEIGHT - MARGIN.bottom;
  parts.push(
    `<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="black"/>`,
    `<line x1="${x0}" y1="${y0}" x2="${WIDTH - MARGIN.right}" y2="${y0}" stroke="black"/>`,
    `<text x="${MARGIN.left + innerW / 2}" y="${HEIGHT - 10}" text-anchor="middle" font-size="13" font-family="sans-serif">${opts.xLabel}</text>`,
    `<text x="16" y="${MARGIN.top + innerH / 2}" text-anchor="middle" font-size="13" font-family="sans-serif" transform="rotate(-90 16 ${MARGIN.top + innerH / 2})">${opts.yLabel}</text>`,
  );

  // x ticks every quarter, y ticks at log decades (at most 8 labels)
  for (let k = 0; k <= 4; k++) {
    const n = Math.round((k * nMax) / 4);
    const px = xPix(n);
    parts.push(
      `<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="black"/>`,
      `<text x="${fmt(px)}" y="${y0 + 18}" text-anchor="middle" font-size="11" font-family="sans-serif">${n}</text>`,
    );
  }
  if (opts.logY) {
    const loDec = Math.ceil(Math.log10(vMin));
    const hiDec = Math.floor(Math.log10(vMax));
    const step = Math.max(1, Math.ceil((hiDec - loDec) / 7));
    for (let d = loDec; d <= hiDec; d += step) {
      const py = yPix(Math.pow(10, d));
      parts.push(
        `<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="black"/>`,
        `<text x="${x0 - 8}" y="${fmt(py + 4)}" text-anchor="end" font-size="11" font-family="sans-serif">1e${d}</text>`,
      );
    }
  }

  // one curve per p value, in file order
  const total = data.series.size;
  let index = 0;
  for (const [p, points] of data.series) {
    const color = seriesColor(index, total);
    const coords: string[] = [];
    const clampedPix: number[] = [];
    for (const pt of points) {
      if (pt.clamped || pt.value === null) {
        if (opts.markClampedAtTop) clampedPix.push(xPix(pt.n));
        continue;
      }
      if (opts.logY && pt.value <= 0) continue;
      coords.push(`${fmt(xPix(pt.n))},${fmt(yPix(pt.value))}`);
    }
    if (coords.length > 0) {
      parts.push(
        `<path class="curve" data-p="${p}" fill="none" stroke="${color}" stroke-width="1.2" d="M${coords.join(" L")}"/>`,
      );
    } else {
      // a curve that clamped immediately still counts: draw a degenerate stub
      parts.push(
        `<path class="curve" data-p="${p}" fill="none" stroke="${color}" stroke-width="1.2" d="M${fmt(xPix(0))},${fmt(MARGIN.top)} h0"/>`,
      );
    }
    for (const px of clampedPix) {
      parts.push(
        `<circle class="clamped-marker" data-p="${p}" cx="${fmt(px)}" cy="${fmt(MARGIN.top)}" r="2.5" fill="${color}"/>`,
      );
    }
    index += 1;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
