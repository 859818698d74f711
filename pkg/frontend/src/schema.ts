/**
 * Study CSV schema: parsing and validation.
 *
 * The producer writes one row per budget with the exact header
 *   method,integrand,d,n_budget,n_nodes_mean,mean_abs_error,stderr,estimate_mean,seed
 * Values never contain commas or quotes, so a line split is a full parser.
 * Schema violations throw SchemaError naming the offending column.
 */

export const CSV_COLUMNS = [
  "method",
  "integrand",
  "d",
  "n_budget",
  "n_nodes_mean",
  "mean_abs_error",
  "stderr",
  "estimate_mean",
  "seed",
] as const;

export type ColumnName = (typeof CSV_COLUMNS)[number];

const INT_COLUMNS: ReadonlySet<ColumnName> = new Set(["d", "n_budget", "seed"]);
const FLOAT_COLUMNS: ReadonlySet<ColumnName> = new Set([
  "n_nodes_mean",
  "mean_abs_error",
  "stderr",
  "estimate_mean",
]);

export interface StudyRow {
  method: string;
  integrand: string;
  d: number;
  n_budget: number;
  n_nodes_mean: number;
  mean_abs_error: number;
  stderr: number;
  estimate_mean: number;
  seed: number;
}

export class SchemaError extends Error {
  readonly column: string;

  constructor(column: string, detail: string) {
    super(`${detail}: ${column}`);
    this.name = "SchemaError";
    this.column = column;
  }
}

function parseNumber(raw: string, column: ColumnName): number {
  const value = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(value)) {
    throw new SchemaError(column, "unparseable value in column");
  }
  if (INT_COLUMNS.has(column) && !Number.isInteger(value)) {
    throw new SchemaError(column, "non-integer value in column");
  }
  return value;
}

/** Parse one CSV document; throws SchemaError on any deviation. */
export function parseStudyCsv(text: string): StudyRow[] {
  const lines = text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("header", "missing required column");
  }

  const header = lines[0].split(",");
  for (const column of CSV_COLUMNS) {
    if (!header.includes(column)) {
      throw new SchemaError(column, "missing required column");
    }
  }
  const index = new Map<ColumnName, number>(
    CSV_COLUMNS.map((column) => [column, header.indexOf(column)]),
  );

  const rows: StudyRow[] = [];
  for (const line of lines.slice(1)) {
    const fields = line.split(",");
    if (fields.length !== header.length) {
      throw new SchemaError("row", "wrong field count in data row");
    }
    const cell = (column: ColumnName): string => fields[index.get(column)!];
    rows.push({
      method: cell("method"),
      integrand: cell("integrand"),
      d: parseNumber(cell("d"), "d"),
      n_budget: parseNumber(cell("n_budget"), "n_budget"),
      n_nodes_mean: parseNumber(cell("n_nodes_mean"), "n_nodes_mean"),
      mean_abs_error: parseNumber(cell("mean_abs_error"), "mean_abs_error"),
      stderr: parseNumber(cell("stderr"), "stderr"),
      estimate_mean: parseNumber(cell("estimate_mean"), "estimate_mean"),
      seed: parseNumber(cell("seed"), "seed"),
    });
  }
  if (rows.length === 0) {
    throw new SchemaError("rows", "no data rows");
  }
  return rows;
}
