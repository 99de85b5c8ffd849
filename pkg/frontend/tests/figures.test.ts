/**
 * Data-series equality: every figure kind must plot exactly the rows present
 * in its golden fixture, no more, no fewer, values untouched.
 */

import { describe, expect, it } from "vitest";
import { join } from "path";
import { readResultCsv, ResultRow } from "../src/csv";
import { extractFigure, FigureError } from "../src/figures";

const FIXTURES = join(__dirname, "fixtures");

function load(name: string): ResultRow[] {
  return readResultCsv(join(FIXTURES, name));
}

function flatPoints(figure: { series: { points: { x: number; y: number }[] }[] }) {
  return figure.series
    .flatMap((s) => s.points.map((p) => [p.x, p.y]))
    .sort((a, b) => a[0] - b[0] || a[1] - b[1]);
}

function expectedPairs(rows: ResultRow[], metric: string,
                       x: (r: ResultRow) => number): number[][] {
  return rows
    .filter((r) => r.metric === metric)
    .map((r) => [x(r), Number(r.value)])
    .sort((a, b) => a[0] - b[0] || a[1] - b[1]);
}

describe("error-vs-depth", () => {
  it("plots exactly the mean error rows and Helstrom references", () => {
    const rows = load("discriminate.csv");
    const figure = extractFigure("error-vs-depth", rows);
    const means = rows.filter((r) => r.unit === "mean");
    expect(flatPoints(figure)).toEqual(
      expectedPairs(means, "mean_error_probability", (r) => Number(r.depth)),
    );
    const refRows = means.filter((r) => r.metric === "mean_helstrom");
    expect(figure.references.map((r) => r.y).sort()).toEqual(
      refRows.map((r) => Number(r.value)).sort(),
    );
    expect(figure.logY).toBe(true);
  });
});

describe("dc-vs-d0", () => {
  it("plots one point per preparation depth", () => {
    const rows = load("dc_scan.csv");
    const figure = extractFigure("dc-vs-d0", rows);
    expect(flatPoints(figure)).toEqual(
      expectedPairs(
        rows.filter((r) => r.value !== ""),
        "critical_depth",
        (r) => Number(r.param),
      ),
    );
    expect(figure.logY).toBe(false);
  });
});

describe("gradvar-vs-n", () => {
  it("plots the variance rows with their errors on a log axis", () => {
    const rows = load("gradvar.csv");
    const figure = extractFigure("gradvar-vs-n", rows);
    expect(flatPoints(figure)).toEqual(
      expectedPairs(rows, "gradient_variance", (r) => Number(r.n)),
    );
    const errs = figure.series.flatMap((s) => s.points.map((p) => p.err));
    expect(errs.every((e) => e !== undefined && e > 0)).toBe(true);
    expect(figure.logY).toBe(true);
  });
});

describe("opsize-vs-depth", () => {
  it("plots the mean size per depth", () => {
    const rows = load("opsize.csv");
    const figure = extractFigure("opsize-vs-depth", rows);
    expect(flatPoints(figure)).toEqual(
      expectedPairs(rows, "mean_operator_size", (r) => Number(r.depth)),
    );
  });
});

describe("arch-compare", () => {
  it("plots one series per architecture over depth", () => {
    const rows = load("arch_bench.csv");
    const figure = extractFigure("arch-compare", rows);
    const means = rows.filter((r) => r.unit === "mean");
    expect(figure.series.map((s) => s.label).sort()).toEqual(
      [...new Set(means.filter((r) => r.metric === "mean_cost_dis")
        .map((r) => r.arch))].sort(),
    );
    expect(flatPoints(figure)).toEqual(
      expectedPairs(means, "mean_cost_dis", (r) => Number(r.depth)),
    );
  });
});

describe("figure errors", () => {
  it("names the missing metric", () => {
    const rows = load("opsize.csv");
    expect(() => extractFigure("gradvar-vs-n", rows)).toThrowError(
      /gradient_variance/,
    );
  });

  it("rejects an unknown kind", () => {
    const rows = load("opsize.csv");
    expect(() => extractFigure("pie" as any, rows)).toThrow(FigureError);
  });
});
