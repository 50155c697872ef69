/** Figure presets tying the CSV schemas to chart options. */

import { parseFigureCsv } from "./csv.js";
import { renderChart, type ChartOptions } from "./svg.js";

export type FigureKind = "fig1a" | "fig1b" | "fig2";

export interface FigureSpec {
  input: string;
  output: string;
  kind: FigureKind;
}

const PRESETS: Record<FigureKind, { valueColumn: string; options: ChartOptions }> = {
  fig1a: {
    valueColumn: "x",
    options: {
      title: "Alternating projections: first 100 iterates per p",
      xLabel: "n",
      yLabel: "x_n",
      logY: true,
      markClampedAtTop: false,
    },
  },
  fig1b: {
    valueColumn: "x",
    options: {
      title: "Douglas-Rachford: first 100 iterates per p",
      xLabel: "n",
      yLabel: "x_n",
      logY: true,
      markClampedAtTop: false,
    },
  },
  fig2: {
    valueColumn: "quotient",
    options: {
      title: "MAP iterate divided by DRA iterate",
      xLabel: "n",
      yLabel: "x_n(MAP) / x_n(DRA)",
      logY: true,
      markClampedAtTop: true,
    },
  },
};

/** Render one figure CSV to an SVG string. Pure: same input, same output. */
export function renderFigure(spec: FigureSpec): string {
  const preset = PRESETS[spec.kind];
  if (preset === undefined) {
    throw new Error(`unknown figure kind: ${spec.kind}`);
  }
  const data = parseFigureCsv(spec.input);
  if (data.valueColumn !== preset.valueColumn) {
    throw new Error(
      `${spec.input}: ${spec.kind} expects a ${preset.valueColumn} column, found ${data.valueColumn}`,
    );
  }
  return renderChart(data, preset.options);
}
