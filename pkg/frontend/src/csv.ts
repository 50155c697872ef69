/** Parsing of the long-format figure CSVs written by the slowrate CLI. */

import { readFileSync } from "fs";

export interface CurvePoint {
  n: number;
  value: number | null; // null when the row is underflow-clamped
  clamped: boolean;
}

export interface FigureData {
  /** name of the value column: "x" or "quotient" */
  valueColumn: string;
  /** insertion order follows first appearance in the file */
  series: Map<string, CurvePoint[]>;
}

/**
 * Parse a `p,n,<value>[,clamped]` CSV. Throws on a missing file, an
 * unexpected header, or ragged rows.
 */
export function parseFigureCsv(path: string): FigureData {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new Error(`cannot read input CSV: ${path}`);
  }
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty CSV`);
  }
  const header = lines[0].split(",");
  if (header.length < 3 || header[0] !== "p" || header[1] !== "n") {
    throw new Error(`${path}: expected a p,n,x or p,n,quotient header, got "${lines[0]}"`);
  }
  const valueColumn = header[2];
  if (valueColumn !== "x" && valueColumn !== "quotient") {
    throw new Error(`${path}: value column must be x or quotient, got "${valueColumn}"`);
  }
  const hasFlag = header.length >= 4 && header[3] === "clamped";
  if (lines.length === 1) {
    throw new Error(`${path}: no data rows`);
  }

  const series = new Map<string, CurvePoint[]>();
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new Error(`${path}:${i + 1}: ragged row "${lines[i]}"`);
    }
    const [p, nRaw, vRaw] = parts;
    const n = Number(nRaw);
    if (!Number.isFinite(n)) {
      throw new Error(`${path}:${i + 1}: bad index "${nRaw}"`);
    }
    const clamped = hasFlag ? parts[3] === "1" : vRaw === "";
    let value: number | null = null;
    if (vRaw !== "") {
      value = Number(vRaw);
      if (!Number.isFinite(value)) {
        throw new Error(`${path}:${i + 1}: non-finite value "${vRaw}"`);
      }
    }
    let points = series.get(p);
    if (points === undefined) {
      points = [];
      series.set(p, points);
    }
    points.push({ n, value, clamped });
  }
  return { valueColumn, series };
}
