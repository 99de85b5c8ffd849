/**
 * Figure definitions: pure extraction of plottable series from result rows.
 *
 * Each figure kind names the metric rows it consumes; everything else in the
 * CSV is ignored. Extraction is deterministic (series sorted by label,
 * points by x) so rendered output depends only on the file contents.
 */

import { ResultRow } from "./csv";

export type FigureKind =
  | "error-vs-depth"
  | "dc-vs-d0"
  | "gradvar-vs-n"
  | "opsize-vs-depth"
  | "arch-compare";

export const FIGURE_KINDS: FigureKind[] = [
  "error-vs-depth", "dc-vs-d0", "gradvar-vs-n", "opsize-vs-depth",
  "arch-compare",
];

export interface Point {
  x: number;
  y: number;
  err?: number;
}

export interface Series {
  label: string;
  points: Point[];
}

export interface ReferenceLine {
  label: string;
  y: number;
}

export interface FigureData {
  kind: FigureKind;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  series: Series[];
  references: ReferenceLine[];
}

export class FigureError extends Error {}

function num(text: string, what: string): number {
  const v = Number(text);
  if (!Number.isFinite(v)) {
    throw new FigureError(`${what}: not a number: '${text}'`);
  }
  return v;
}

function maybeErr(row: ResultRow): number | undefined {
  if (row.std_err === undefined || row.std_err === "") return undefined;
  const v = Number(row.std_err);
  return Number.isFinite(v) ? v : undefined;
}

function groupSeries(
  rows: ResultRow[],
  metric: string,
  x: (r: ResultRow) => number,
  label: (r: ResultRow) => string,
  figure: string,
): Series[] {
  const matching = rows.filter((r) => r.metric === metric);
  if (matching.length === 0) {
    throw new FigureError(
      `${figure}: no rows with metric '${metric}' in the input`,
    );
  }
  const groups = new Map<string, Point[]>();
  for (const row of matching) {
    const key = label(row);
    if (!groups.has(key)) groups.set(key, []);
    groups.get(key)!.push({
      x: x(row),
      y: num(row.value, `${figure}: metric '${metric}' value`),
      err: maybeErr(row),
    });
  }
  return [...groups.entries()]
    .map(([lab, points]) => ({
      label: lab,
      points: points.sort((a, b) => a.x - b.x),
    }))
    .sort((a, b) => a.label.localeCompare(b.label));
}

function meanRows(rows: ResultRow[]): ResultRow[] {
  const means = rows.filter((r) => r.unit === "mean");
  return means.length > 0 ? means : rows;
}

function errorVsDepth(rows: ResultRow[]): FigureData {
  const pool = meanRows(rows);
  const series = groupSeries(
    pool.filter((r) => r.depth !== ""),
    pool.some((r) => r.metric === "mean_error_probability")
      ? "mean_error_probability"
      : "error_probability",
    (r) => num(r.depth, "error-vs-depth: depth"),
    (r) => r.ensemble || r.arch,
    "error-vs-depth",
  );
  const references = pool
    .filter((r) => r.metric === "mean_helstrom" || r.metric === "helstrom")
    .map((r) => ({
      label: `Helstrom (${r.ensemble || r.arch})`,
      y: num(r.value, "error-vs-depth: Helstrom value"),
    }));
  return {
    kind: "error-vs-depth",
    xLabel: "circuit depth",
    yLabel: "error probability",
    logY: true,
    series,
    references,
  };
}

function dcVsD0(rows: ResultRow[]): FigureData {
  const usable = rows.filter(
    (r) => r.metric === "critical_depth" && r.value !== "",
  );
  if (usable.length === 0) {
    throw new FigureError(
      "dc-vs-d0: no rows with metric 'critical_depth' and a value " +
        "(censored scans have no critical depth)",
    );
  }
  const series = groupSeries(
    usable,
    "critical_depth",
    (r) => num(r.param, "dc-vs-d0: preparation depth"),
    (r) => r.arch || "critical depth",
    "dc-vs-d0",
  );
  return {
    kind: "dc-vs-d0",
    xLabel: "preparation depth",
    yLabel: "critical depth",
    logY: false,
    series,
    references: [],
  };
}

function gradvarVsN(rows: ResultRow[]): FigureData {
  const series = groupSeries(
    rows,
    "gradient_variance",
    (r) => num(r.n, "gradvar-vs-n: qubit count"),
    (r) => (r.param ? `${r.param} (${r.ensemble})` : r.ensemble),
    "gradvar-vs-n",
  );
  return {
    kind: "gradvar-vs-n",
    xLabel: "qubits",
    yLabel: "mean gradient variance",
    logY: true,
    series,
    references: [],
  };
}

function opsizeVsDepth(rows: ResultRow[]): FigureData {
  const series = groupSeries(
    rows,
    "mean_operator_size",
    (r) => num(r.depth, "opsize-vs-depth: depth"),
    (r) => r.arch || "operator size",
    "opsize-vs-depth",
  );
  return {
    kind: "opsize-vs-depth",
    xLabel: "circuit depth",
    yLabel: "mean operator size",
    logY: false,
    series,
    references: [],
  };
}

function archCompare(rows: ResultRow[]): FigureData {
  const pool = meanRows(rows);
  const metric = pool.some((r) => r.metric === "mean_cost_dis")
    ? "mean_cost_dis"
    : pool.some((r) => r.metric === "mean_cost_gen")
      ? "mean_cost_gen"
      : "mean_cost_dis";
  const series = groupSeries(
    pool,
    metric,
    (r) => num(r.depth, "arch-compare: depth"),
    (r) => r.arch,
    "arch-compare",
  );
  return {
    kind: "arch-compare",
    xLabel: "circuit depth",
    yLabel: metric === "mean_cost_dis"
      ? "discrimination cost"
      : "generation cost",
    logY: true,
    series,
    references: [],
  };
}

const EXTRACTORS: Record<FigureKind, (rows: ResultRow[]) => FigureData> = {
  "error-vs-depth": errorVsDepth,
  "dc-vs-d0": dcVsD0,
  "gradvar-vs-n": gradvarVsN,
  "opsize-vs-depth": opsizeVsDepth,
  "arch-compare": archCompare,
};

export function extractFigure(kind: FigureKind, rows: ResultRow[]): FigureData {
  const extractor = EXTRACTORS[kind];
  if (!extractor) {
    throw new FigureError(
      `unknown figure kind '${kind}'; options: ${FIGURE_KINDS.join(", ")}`,
    );
  }
  return extractor(rows);
}
