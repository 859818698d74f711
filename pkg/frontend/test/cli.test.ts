import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { main, parseArgs } from "../src/cli.js";

const FIXTURES = join(__dirname, "fixtures");

let errSpy: ReturnType<typeof vi.spyOn>;
let outSpy: ReturnType<typeof vi.spyOn>;

beforeEach(() => {
  errSpy = vi.spyOn(console, "error").mockImplementation(() => {});
  outSpy = vi.spyOn(console, "log").mockImplementation(() => {});
});

afterEach(() => {
  errSpy.mockRestore();
  outSpy.mockRestore();
});

function tmpOut(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "frolov-plot-")), name);
}

describe("parseArgs", () => {
  it("builds a full spec", () => {
    const spec = parseArgs([
      "--input", "a.csv,b.csv",
      "--output", "fig.svg",
      "--methods", "mc,frolov_rand",
      "--guides", "-0.5,-1.5",
      "--title", "hello",
    ]);
    expect(spec.inputs).toEqual(["a.csv", "b.csv"]);
    expect(spec.methods).toEqual(["mc", "frolov_rand"]);
    expect(spec.guides).toEqual([-0.5, -1.5]);
    expect(spec.title).toBe("hello");
  });

  it("rejects unknown flags and missing values", () => {
    expect(() => parseArgs(["--nope"])).toThrowError(/unknown flag/);
    expect(() => parseArgs(["--input"])).toThrowError(/needs a value/);
    expect(() => parseArgs(["--input", "a.csv"])).toThrowError(/required/);
    expect(() => parseArgs(["--input", "a.csv", "--output", "o.svg", "--guides", "x"]))
      .toThrowError(/comma-separated numbers/);
  });
});

describe("main", () => {
  it("renders a two-series figure from a real study CSV", () => {
    const out = tmpOut("fig.svg");
    const status = main([
      "--input", join(FIXTURES, "combined.csv"),
      "--output", out,
      "--guides", "-0.5,-1.5",
    ]);
    expect(status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect((svg.match(/class="series"/g) ?? []).length).toBe(2);
    expect(svg).toContain("slope -0.5");
    expect(svg).toContain("slope -1.5");
  });

  it("merges multiple input files into one figure", () => {
    const out = tmpOut("merged.svg");
    const status = main([
      "--input", `${join(FIXTURES, "mc.csv")},${join(FIXTURES, "frolov_rand.csv")}`,
      "--output", out,
    ]);
    expect(status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect((svg.match(/class="series"/g) ?? []).length).toBe(2);
  });

  it("rejects a malformed CSV with the offending column named, exit 2", () => {
    const bad = tmpOut("bad.csv");
    writeFileSync(bad, "method,integrand,d,n_budget\nmc,f,2,64\n");
    const status = main(["--input", bad, "--output", tmpOut("x.svg")]);
    expect(status).toBe(2);
    const messages = errSpy.mock.calls.map((c) => String(c[0])).join("\n");
    expect(messages).toContain("n_nodes_mean");
  });

  it("rejects an empty CSV, exit 2", () => {
    const empty = tmpOut("empty.csv");
    writeFileSync(empty, "");
    const status = main(["--input", empty, "--output", tmpOut("y.svg")]);
    expect(status).toBe(2);
  });

  it("flag errors exit 2", () => {
    expect(main(["--whatever"])).toBe(2);
  });
});
