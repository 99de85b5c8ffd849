/**
 * Reader for the experiment CSV contract.
 *
 * Files may start with a `# generated: <timestamp>` comment line, followed by
 * a header row and RFC-4180 records. Every figure consumes only these rows;
 * nothing else about the producing library is assumed.
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

export interface ResultRow {
  experiment: string;
  arch: string;
  n: string;
  depth: string;
  d_star: string;
  ensemble: string;
  param: string;
  unit: string;
  metric: string;
  value: string;
  std_err: string;
  seed: string;
  master_seed: string;
  version: string;
}

export const REQUIRED_COLUMNS: (keyof ResultRow)[] = [
  "experiment", "arch", "n", "depth", "ensemble", "param", "unit",
  "metric", "value",
];

export class CsvError extends Error {}

export function parseResultCsv(text: string, source = "<csv>"): ResultRow[] {
  const body = text.startsWith("#")
    ? text.slice(text.indexOf("\n") + 1)
    : text;
  const parsed = Papa.parse<ResultRow>(body.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new CsvError(`${source}: ${first.message} (row ${first.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of REQUIRED_COLUMNS) {
    if (!fields.includes(column)) {
      throw new CsvError(`${source}: missing required column '${column}'`);
    }
  }
  if (parsed.data.length === 0) {
    throw new CsvError(`${source}: no data rows`);
  }
  return parsed.data;
}

export function readResultCsv(path: string): ResultRow[] {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err: any) {
    throw new CsvError(`${path}: ${err.message}`);
  }
  if (text.trim().length === 0) {
    throw new CsvError(`${path}: file is empty`);
  }
  return parseResultCsv(text, path);
}

export function hasStdErr(rows: ResultRow[]): boolean {
  return rows.some((r) => r.std_err !== undefined && r.std_err !== "");
}
