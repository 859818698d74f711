import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseStudyCsv, SchemaError } from "../src/schema.js";

const FIXTURES = join(__dirname, "fixtures");

const HEADER =
  "method,integrand,d,n_budget,n_nodes_mean,mean_abs_error,stderr,estimate_mean,seed";

describe("parseStudyCsv", () => {
  it("parses a real producer CSV", () => {
    const rows = parseStudyCsv(readFileSync(join(FIXTURES, "mc.csv"), "utf8"));
    expect(rows).toHaveLength(5);
    expect(rows[0].method).toBe("mc");
    expect(rows[0].n_budget).toBe(256);
    expect(rows.every((r) => r.seed === 424)).toBe(true);
    expect(rows.every((r) => r.mean_abs_error > 0)).toBe(true);
  });

  it("parses a combined two-method CSV", () => {
    const rows = parseStudyCsv(readFileSync(join(FIXTURES, "combined.csv"), "utf8"));
    const methods = new Set(rows.map((r) => r.method));
    expect(methods).toEqual(new Set(["mc", "frolov_rand"]));
  });

  it("names the missing column", () => {
    const text = "method,integrand,d,n_budget\nmc,f,2,64\n";
    expect(() => parseStudyCsv(text)).toThrowError(SchemaError);
    try {
      parseStudyCsv(text);
    } catch (err) {
      expect((err as SchemaError).column).toBe("n_nodes_mean");
      expect((err as SchemaError).message).toContain("n_nodes_mean");
    }
  });

  it("names the column with an unparseable value", () => {
    const text = `${HEADER}\nmc,f,2,64,10.0,oops,0.1,0.2,7\n`;
    try {
      parseStudyCsv(text);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
      expect((err as SchemaError).column).toBe("mean_abs_error");
    }
  });

  it("rejects non-integer budgets", () => {
    const text = `${HEADER}\nmc,f,2,64.5,10.0,0.5,0.1,0.2,7\n`;
    try {
      parseStudyCsv(text);
      expect.unreachable();
    } catch (err) {
      expect((err as SchemaError).column).toBe("n_budget");
    }
  });

  it("rejects an empty document", () => {
    expect(() => parseStudyCsv("")).toThrowError(SchemaError);
  });

  it("rejects a header-only document", () => {
    expect(() => parseStudyCsv(`${HEADER}\n`)).toThrowError(SchemaError);
  });

  it("rejects rows with the wrong field count", () => {
    const text = `${HEADER}\nmc,f,2,64\n`;
    expect(() => parseStudyCsv(text)).toThrowError(SchemaError);
  });

  it("accepts reordered columns", () => {
    const reordered =
      "seed,method,integrand,d,n_budget,n_nodes_mean,mean_abs_error,stderr,estimate_mean\n" +
      "7,mc,f,2,64,10.0,0.5,0.1,0.2\n";
    const rows = parseStudyCsv(reordered);
    expect(rows[0].n_budget).toBe(64);
    expect(rows[0].seed).toBe(7);
  });
});
