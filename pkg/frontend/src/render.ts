/**
 * Chart rendering: figure data -> echarts option -> SVG (and PNG via resvg).
 *
 * Rendering is read-only over the inputs; the option object carries exactly
 * the extracted series, so tests can assert data-series equality against the
 * source CSV without touching pixels.
 */

import { writeFileSync } from "fs";
import * as echarts from "echarts";
import { FigureData } from "./figures";

export interface RenderOptions {
  width?: number;
  height?: number;
  title?: string;
  warn?: (message: string) => void;
}

const PALETTE = [
  "#4165ab", "#c23f38", "#3f8f4a", "#8456a6", "#c98a2e", "#3b8ea5",
  "#b05f8c", "#6b6b6b",
];

export function buildOption(
  figure: FigureData,
  options: RenderOptions = {},
): echarts.EChartsOption {
  const warn = options.warn ?? ((msg) => console.warn(msg));
  const anyErrBars = figure.series.some((s) =>
    s.points.some((p) => p.err !== undefined),
  );
  if (!anyErrBars) {
    warn(`${figure.kind}: no std_err values; rendering without error bars`);
  }

  const series: echarts.SeriesOption[] = [];
  figure.series.forEach((s, index) => {
    const color = PALETTE[index % PALETTE.length];
    series.push({
      name: s.label,
      type: "line",
      data: s.points.map((p) => [p.x, p.y]),
      itemStyle: { color },
      lineStyle: { color },
      symbolSize: 7,
    });
    const withErr = s.points.filter((p) => p.err !== undefined && p.err > 0);
    if (withErr.length > 0) {
      series.push({
        name: `${s.label} (stderr)`,
        type: "custom",
        renderItem: errorBarRenderer,
        data: withErr.map((p) => [p.x, p.y - p.err!, p.y + p.err!]),
        itemStyle: { color },
        z: 3,
        silent: true,
      } as echarts.SeriesOption);
    }
  });

  if (figure.references.length > 0) {
    series.push({
      name: "reference",
      type: "line",
      data: [],
      markLine: {
        silent: true,
        symbol: "none",
        lineStyle: { type: "dashed", color: "#555" },
        label: { formatter: (p: any) => p.name, position: "insideEndTop" },
        data: figure.references.map((ref) => ({
          yAxis: ref.y,
          name: ref.label,
        })),
      },
    });
  }

  return {
    animation: false,
    backgroundColor: "#ffffff",
    title: options.title ? { text: options.title, left: "center" } : undefined,
    legend: {
      bottom: 0,
      data: figure.series.map((s) => s.label),
    },
    grid: { left: 70, right: 30, top: options.title ? 50 : 30, bottom: 60 },
    xAxis: {
      type: "value",
      name: figure.xLabel,
      nameLocation: "middle",
      nameGap: 28,
      minInterval: 1,
    },
    yAxis: {
      type: figure.logY ? "log" : "value",
      name: figure.yLabel,
      nameLocation: "middle",
      nameGap: 52,
    },
    series,
  };
}

function errorBarRenderer(
  params: any,
  api: any,
): any {
  const x = api.value(0);
  const low = api.coord([x, api.value(1)]);
  const high = api.coord([x, api.value(2)]);
  const halfWidth = 4;
  const style = { stroke: api.visual("color"), fill: undefined as any };
  return {
    type: "group",
    children: [
      {
        type: "line",
        shape: { x1: high[0], y1: high[1], x2: low[0], y2: low[1] },
        style,
      },
      {
        type: "line",
        shape: {
          x1: high[0] - halfWidth, y1: high[1],
          x2: high[0] + halfWidth, y2: high[1],
        },
        style,
      },
      {
        type: "line",
        shape: {
          x1: low[0] - halfWidth, y1: low[1],
          x2: low[0] + halfWidth, y2: low[1],
        },
        style,
      },
    ],
  };
}

export function renderSvg(
  figure: FigureData,
  options: RenderOptions = {},
): string {
  const width = options.width ?? 800;
  const height = options.height ?? 560;
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  try {
    chart.setOption(buildOption(figure, options));
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

export function renderToFile(
  figure: FigureData,
  outPath: string,
  options: RenderOptions = {},
): void {
  const svg = renderSvg(figure, options);
  if (outPath.toLowerCase().endsWith(".png")) {
    const { Resvg } = require("@resvg/resvg-js");
    const png = new Resvg(svg).render().asPng();
    writeFileSync(outPath, png);
  } else if (outPath.toLowerCase().endsWith(".svg")) {
    writeFileSync(outPath, svg, "utf-8");
  } else {
    throw new Error(
      `output path must end in .svg or .png, got '${outPath}'`,
    );
  }
}
