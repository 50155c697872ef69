/** plotkit CLI: render a slowrate figure CSV to an SVG file.
 *
 * Usage: node dist/cli.js --input fig1a.csv --output fig1a.svg --kind fig1a
 */

import { writeFileSync } from "fs";
import { renderFigure, type FigureKind } from "./figures.js";

function parseArgs(argv: string[]): { input: string; output: string; kind: FigureKind } {
  const args: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`bad argument pair: ${key} ${value ?? ""}`);
    }
    args[key.slice(2)] = value;
  }
  const { input, output, kind } = args;
  if (!input || !output || !kind) {
    throw new Error("required: --input <csv> --output <svg> --kind fig1a|fig1b|fig2");
  }
  if (kind !== "fig1a" && kind !== "fig1b" && kind !== "fig2") {
    throw new Error(`--kind must be fig1a, fig1b, or fig2, got ${kind}`);
  }
  return { input, output, kind };
}

export function main(argv: string[]): number {
  let spec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error(`plotkit: ${(err as Error).message}`);
    return 2;
  }
  try {
    const svg = renderFigure(spec);
    writeFileSync(spec.output, svg);
    console.log(spec.output);
    return 0;
  } catch (err) {
    console.error(`plotkit: ${(err as Error).message}`);
    return 1;
  }
}

process.exitCode = main(process.argv.slice(2));
