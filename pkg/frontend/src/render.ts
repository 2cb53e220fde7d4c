/** Figure dispatch and artifact writing (main file + sidecar + metadata). */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import { writeCsv } from "./csv.js";
import { renderDatasetTable, renderDistributionTable } from "./figures/tables.js";
import { renderThroughputByCategory } from "./figures/throughputByCategory.js";
import { renderValueFlow } from "./figures/valueFlow.js";
import { renderXrplBreakdown } from "./figures/xrplBreakdown.js";
import { FigureOutput, FigureSpec } from "./spec.js";

const RENDERERS: Record<FigureSpec["figure"], (spec: FigureSpec) => FigureOutput> = {
  "throughput-by-category": renderThroughputByCategory,
  "xrpl-success-value-breakdown": renderXrplBreakdown,
  "value-flow-diagram": renderValueFlow,
  "dataset-table": renderDatasetTable,
  "distribution-table": renderDistributionTable,
};

export interface RenderedPaths {
  output: string;
  sidecar: string;
  metadata: string;
}

export function render(spec: FigureSpec): RenderedPaths {
  const result = RENDERERS[spec.figure](spec);
  mkdirSync(dirname(spec.output) || ".", { recursive: true });
  const sidecar = spec.output + ".sidecar.csv";
  const metadata = spec.output + ".meta.json";
  writeFileSync(spec.output, result.main);
  writeFileSync(sidecar, writeCsv(result.sidecarColumns, result.sidecarRows));
  writeFileSync(metadata, JSON.stringify(result.metadata, null, 1) + "\n");
  return { output: spec.output, sidecar, metadata };
}
