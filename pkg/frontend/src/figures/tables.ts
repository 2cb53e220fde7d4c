/**
 * Publication tables as standalone HTML, with one-decimal percentages
 * recomputed from the raw counts. The sidecar CSV carries exactly the
 * numbers shown, so tests assert on digits rather than markup.
 */

import { FigureOutput, FigureSpec } from "../spec.js";
import { loadInput } from "../schemas.js";
import { percentHalfUp } from "../rounding.js";
import { Row } from "../csv.js";
import { esc } from "../svg.js";

const TABLE_CSS = [
  "table{border-collapse:collapse;font-family:sans-serif;font-size:13px}",
  "th,td{border:1px solid #999;padding:3px 8px;text-align:left}",
  "td.num{text-align:right}",
  "caption{font-weight:bold;padding:4px}",
].join("");

function htmlDocument(caption: string, header: string[], rows: string[][]): string {
  const head = header.map((h) => `<th>${esc(h)}</th>`).join("");
  const body = rows
    .map(
      (cells) =>
        "<tr>" +
        cells
          .map((cell, i) => (/^[\d,.]+$/.test(cell) && i >= 2
            ? `<td class="num">${esc(cell)}</td>`
            : `<td>${esc(cell)}</td>`))
          .join("") +
        "</tr>",
    )
    .join("\n");
  return [
    "<!DOCTYPE html>",
    `<html><head><meta charset="utf-8"><style>${TABLE_CSS}</style></head><body>`,
    `<table><caption>${esc(caption)}</caption>`,
    `<thead><tr>${head}</tr></thead>`,
    `<tbody>${body}</tbody>`,
    "</table></body></html>",
    "",
  ].join("\n");
}

export function renderDistributionTable(spec: FigureSpec): FigureOutput {
  const rows = loadInput("distribution", spec.inputs.distribution);
  const totals = new Map<string, bigint>();
  for (const row of rows) {
    totals.set(row.chain, (totals.get(row.chain) ?? 0n) + BigInt(row.count));
  }
  const ordered = [...rows].sort((a, b) =>
    a.chain.localeCompare(b.chain) ||
    a.category.localeCompare(b.category) ||
    Number(BigInt(b.count) - BigInt(a.count)) ||
    a.name.localeCompare(b.name),
  );
  const sidecar: Row[] = ordered.map((row) => ({
    chain: row.chain,
    category: row.category,
    name: row.name,
    count: row.count,
    percent: percentHalfUp(row.count, totals.get(row.chain) ?? 0n),
  }));
  const html = htmlDocument(
    "Distribution of action types per blockchain",
    ["chain", "category", "name", "count", "percent"],
    sidecar.map((r) => [r.chain, r.category, r.name, withThousands(r.count), r.percent]),
  );
  const sums: Record<string, string> = {};
  for (const [chain, total] of totals) {
    sums[chain] = sidecar
      .filter((r) => r.chain === chain)
      .reduce((acc, r) => acc + Number(r.percent), 0)
      .toFixed(1);
  }
  return {
    main: html,
    sidecarColumns: ["chain", "category", "name", "count", "percent"],
    sidecarRows: sidecar,
    metadata: { figure: spec.figure, percent_sums: sums },
  };
}

export function renderDatasetTable(spec: FigureSpec): FigureOutput {
  const rows = loadInput("characterization", spec.inputs.characterization);
  const ordered = [...rows].sort((a, b) => a.chain.localeCompare(b.chain));
  const columns = [
    "chain", "start_height", "end_height", "block_count", "transaction_count",
    "alleged_tps", "max_tps", "avg_tps",
  ];
  const html = htmlDocument(
    "Dataset characterization",
    columns,
    ordered.map((r) => columns.map((c, i) => (i >= 3 ? withThousands(r[c]) : r[c]))),
  );
  return {
    main: html,
    sidecarColumns: columns,
    sidecarRows: ordered.map((r) => Object.fromEntries(columns.map((c) => [c, r[c]]))),
    metadata: { figure: spec.figure, chains: ordered.map((r) => r.chain) },
  };
}

function withThousands(value: string): string {
  if (!/^\d+$/.test(value)) return value;
  return value.replace(/\B(?=(\d{3})+(?!\d))/g, ",");
}
