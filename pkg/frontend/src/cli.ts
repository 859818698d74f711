#!/usr/bin/env node
/**
 * frolov-plot: render a log-log convergence figure from study CSV files.
 *
 * Usage:
 *   frolov-plot --input study1.csv[,study2.csv] --output figure.svg
 *               [--methods mc,frolov_rand] [--guides -0.5,-1.5] [--title text]
 *
 * Exit status: 0 on success; 2 for bad flags or a CSV that violates the
 * study schema (the offending column is named on stderr); 1 otherwise.
 */

import { realpathSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { SchemaError } from "./schema.js";
import { DEFAULT_GUIDES } from "./figure.js";
import { render, PlotSpec } from "./render.js";

function usage(): string {
  return (
    "usage: frolov-plot --input <csv[,csv...]> --output <file.svg> " +
    "[--methods <m1,m2>] [--guides <s1,s2>] [--title <text>]"
  );
}

export function parseArgs(argv: string[]): PlotSpec {
  const spec: PlotSpec = {
    inputs: [],
    methods: [],
    output: "",
    guides: [...DEFAULT_GUIDES],
  };
  for (let i = 0; i < argv.length; i += 1) {
    const flag = argv[i];
    const next = (): string => {
      i += 1;
      if (i >= argv.length) throw new Error(`flag ${flag} needs a value\n${usage()}`);
      return argv[i];
    };
    switch (flag) {
      case "--input":
        spec.inputs.push(...next().split(",").filter((s) => s.length > 0));
        break;
      case "--output":
        spec.output = next();
        break;
      case "--methods":
        spec.methods = next().split(",").filter((s) => s.length > 0);
        break;
      case "--guides": {
        const parsed = next().split(",").map((tok) => Number(tok));
        if (parsed.some((g) => !Number.isFinite(g))) {
          throw new Error(`--guides expects comma-separated numbers\n${usage()}`);
        }
        spec.guides = parsed;
        break;
      }
      case "--title":
        spec.title = next();
        break;
      case "--help":
      case "-h":
        console.log(usage());
        process.exit(0);
        break;
      default:
        throw new Error(`unknown flag ${flag}\n${usage()}`);
    }
  }
  if (spec.inputs.length === 0 || spec.output === "") {
    throw new Error(`--input and --output are required\n${usage()}`);
  }
  return spec;
}

export function main(argv: string[]): number {
  let spec: PlotSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const out = render(spec);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error (column: ${err.column}): ${err.message}`);
      return 2;
    }
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

function invokedDirectly(): boolean {
  if (process.argv[1] === undefined) return false;
  try {
    // resolve bin symlinks before comparing against the module URL
    return import.meta.url === pathToFileURL(realpathSync(process.argv[1])).href;
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  process.exit(main(process.argv.slice(2)));
}
