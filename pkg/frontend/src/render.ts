/**
 * File-level rendering: read study CSVs, build the SVG, write one image.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { buildFigure, DEFAULT_GUIDES, FigureOptions } from "./figure.js";
import { parseStudyCsv, StudyRow } from "./schema.js";

export interface PlotSpec {
  /** study CSV files, each conforming to the producer schema */
  inputs: string[];
  /** keep only these methods (empty = all) */
  methods: string[];
  /** output image path (SVG) */
  output: string;
  /** dashed reference slopes anchored at the first data point */
  guides: number[];
  title?: string;
}

export function defaultSpec(inputs: string[], output: string): PlotSpec {
  return { inputs, methods: [], output, guides: [...DEFAULT_GUIDES] };
}

/** Render the figure described by the spec; returns the output path. */
export function render(spec: PlotSpec): string {
  if (spec.inputs.length === 0) {
    throw new Error("at least one input CSV is required");
  }
  const rows: StudyRow[] = [];
  for (const path of spec.inputs) {
    rows.push(...parseStudyCsv(readFileSync(path, "utf8")));
  }
  const options: FigureOptions = {
    methods: spec.methods,
    guides: spec.guides,
    title: spec.title,
  };
  const svg = buildFigure(rows, options);
  writeFileSync(spec.output, svg, "utf8");
  return spec.output;
}
