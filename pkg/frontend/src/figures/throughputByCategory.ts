/** Transaction counts per time window, stacked by action category. */

import { FigureOutput, FigureSpec } from "../spec.js";
import { loadInput } from "../schemas.js";
import { numeric, renderStacked } from "./stacked.js";

export function renderThroughputByCategory(spec: FigureSpec): FigureOutput {
  const rows = loadInput("throughput-by-category", spec.inputs["throughput-by-category"]);
  const points = rows.map((row) => ({
    window: row.window_start,
    series: row.category,
    count: numeric(row, "count"),
  }));
  const chain = rows[0]?.chain ?? "";
  const { svg, series } = renderStacked(points, {
    width: spec.style.width ?? 900,
    height: spec.style.height ?? 420,
    title: chain ? `${chain}: actions per window by category` : "actions per window by category",
  });
  return {
    main: svg,
    sidecarColumns: ["window_start", "series", "count"],
    sidecarRows: series,
    metadata: {
      figure: spec.figure,
      chain,
      windows: new Set(series.map((s) => s.window_start)).size,
      categories: new Set(series.map((s) => s.series)).size,
    },
  };
}
