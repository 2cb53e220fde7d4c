/** Figure specification loading and the common output bundle. */

import { readFileSync } from "node:fs";
import { Row } from "./csv.js";

export const FIGURE_IDS = [
  "throughput-by-category",
  "xrpl-success-value-breakdown",
  "value-flow-diagram",
  "dataset-table",
  "distribution-table",
] as const;

export type FigureId = (typeof FIGURE_IDS)[number];

export interface FigureSpec {
  figure: FigureId;
  inputs: Record<string, string>;
  output: string;
  style: { width?: number; height?: number };
}

export interface FigureOutput {
  main: string;
  sidecarColumns: string[];
  sidecarRows: Row[];
  metadata: Record<string, unknown>;
}

export class SpecError extends Error {}

/** Input keys each figure requires in spec.inputs. */
export const REQUIRED_INPUTS: Record<FigureId, string[]> = {
  "throughput-by-category": ["throughput-by-category"],
  "xrpl-success-value-breakdown": ["xrpl-breakdown"],
  "value-flow-diagram": ["flows"],
  "dataset-table": ["characterization"],
  "distribution-table": ["distribution"],
};

export function loadSpec(path: string): FigureSpec {
  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new SpecError(`cannot read spec ${path}: ${(err as Error).message}`);
  }
  return specFromObject(doc, path);
}

export function specFromObject(doc: unknown, source = "<spec>"): FigureSpec {
  if (typeof doc !== "object" || doc === null) {
    throw new SpecError(`${source}: spec must be a JSON object`);
  }
  const raw = doc as Record<string, unknown>;
  const figure = raw.figure as FigureId;
  if (!FIGURE_IDS.includes(figure)) {
    throw new SpecError(
      `${source}: unknown figure '${String(raw.figure)}' (known: ${FIGURE_IDS.join(", ")})`,
    );
  }
  if (typeof raw.output !== "string" || raw.output === "") {
    throw new SpecError(`${source}: 'output' path is required`);
  }
  const inputs = (raw.inputs ?? {}) as Record<string, string>;
  for (const key of REQUIRED_INPUTS[figure]) {
    if (typeof inputs[key] !== "string") {
      throw new SpecError(`${source}: figure ${figure} requires inputs.${key}`);
    }
  }
  return {
    figure,
    inputs,
    output: raw.output,
    style: (raw.style ?? {}) as FigureSpec["style"],
  };
}
