/** File-level rendering: parse a results CSV, build the chart, write the image. */

import { readFileSync, writeFileSync } from "fs";
import { extname } from "path";

import { ChartOptions, renderSvg } from "./chart";
import { parseCsv } from "./csv";

export interface RenderSpec {
  input: string;
  output: string;
  metric: "fer" | "ber";
  logY: boolean;
}

/**
 * Render the CSV at ``spec.input`` to ``spec.output``.
 *
 * Reads the CSV once (never modifies it), builds the full image in memory,
 * and only then touches the output path, so a failing run leaves no file.
 * ``.svg`` writes the SVG document; anything else is rasterized to PNG.
 */
export function render(spec: RenderSpec): void {
  const text = readFileSync(spec.input, "utf8");
  const rows = parseCsv(text);
  const opts: ChartOptions = {
    metric: spec.metric,
    logY: spec.logY,
    title: `${spec.metric.toUpperCase()} vs channel parameter`,
  };
  const svg = renderSvg(rows, opts);
  if (extname(spec.output).toLowerCase() === ".svg") {
    writeFileSync(spec.output, svg);
    return;
  }
  // resvg ships a prebuilt rasterizer; load lazily so SVG output works even
  // where the native module is unavailable
  const { Resvg } = require("@resvg/resvg-js");
  const png = new Resvg(svg, { fitTo: { mode: "width" as const, value: 1290 } }).render().asPng();
  writeFileSync(spec.output, png);
}
