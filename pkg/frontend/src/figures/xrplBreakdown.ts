/**
 * XRPL traffic per window split by transaction type, success and value
 * class. The series key folds the three attributes together; value-
 * carrying payments therefore stand out as their own band.
 */

import { FigureOutput, FigureSpec } from "../spec.js";
import { loadInput } from "../schemas.js";
import { numeric, renderStacked } from "./stacked.js";

export function renderXrplBreakdown(spec: FigureSpec): FigureOutput {
  const rows = loadInput("xrpl-breakdown", spec.inputs["xrpl-breakdown"]);
  const points = rows.map((row) => {
    const parts = [row.tx_type, row.status];
    if (row.value_class) parts.push(row.value_class);
    return { window: row.window_start, series: parts.join("/"), count: numeric(row, "count") };
  });
  const { svg, series } = renderStacked(points, {
    width: spec.style.width ?? 900,
    height: spec.style.height ?? 460,
    title: "XRPL throughput by type, success and value",
  });
  const carrying = series
    .filter((s) => s.series.endsWith("/VALUE_CARRYING"))
    .reduce((acc, s) => acc + Number(s.count), 0);
  const total = series.reduce((acc, s) => acc + Number(s.count), 0);
  return {
    main: svg,
    sidecarColumns: ["window_start", "series", "count"],
    sidecarRows: series,
    metadata: {
      figure: spec.figure,
      total_actions: total,
      value_carrying_actions: carrying,
    },
  };
}
