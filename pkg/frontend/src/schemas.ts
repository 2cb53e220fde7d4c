/**
 * Input contracts. Each figure names the CSV inputs it takes and the
 * columns those files must carry; a mismatch fails fast naming the
 * offending column rather than rendering garbage.
 */

import { readFileSync } from "node:fs";
import { parseCsv, Row } from "./csv.js";

export class SchemaMismatch extends Error {}

export const INPUT_COLUMNS: Record<string, string[]> = {
  distribution: ["chain", "category", "name", "count", "percent"],
  characterization: [
    "chain", "start_height", "end_height", "block_count", "transaction_count",
    "alleged_tps", "max_tps", "avg_tps", "max_window_start",
    "observation_start", "observation_end", "window_mode",
  ],
  "throughput-by-category": ["chain", "window_start", "category", "count"],
  "xrpl-breakdown": ["chain", "window_start", "tx_type", "status", "value_class", "count"],
  flows: ["sender_entity", "currency", "receiver_entity", "xrp_value"],
};

export function loadInput(kind: string, path: string): Row[] {
  const expected = INPUT_COLUMNS[kind];
  if (!expected) {
    throw new SchemaMismatch(`unknown input kind '${kind}'`);
  }
  const text = readFileSync(path, "utf8");
  const { columns, rows } = parseCsv(text);
  for (const column of expected) {
    if (!columns.includes(column)) {
      throw new SchemaMismatch(`${path}: missing column '${column}' (kind ${kind})`);
    }
  }
  return rows;
}
