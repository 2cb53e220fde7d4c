/** Small deterministic SVG assembly helpers (no timestamps, no randomness). */

export const PALETTE = [
  "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
  "#b279a2", "#eeca3b", "#ff9da6", "#9d755d", "#bab0ac",
];

export function colorFor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function svgDocument(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}

export function rect(x: number, y: number, w: number, h: number, fill: string, title?: string): string {
  const core = `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`;
  return title ? `<g>${core}<title>${esc(title)}</title></g>` : core;
}

export function line(x1: number, y1: number, x2: number, y2: number, stroke = "#333"): string {
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="1"/>`;
}

export function text(x: number, y: number, content: string, size = 11, anchor = "start"): string {
  return `<text x="${fmt(x)}" y="${fmt(y)}" font-family="sans-serif" font-size="${size}" text-anchor="${anchor}">${esc(content)}</text>`;
}

export function polygon(points: [number, number][], fill: string, opacity = 0.8, title?: string): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  const core = `<polygon points="${pts}" fill="${fill}" fill-opacity="${opacity}"/>`;
  return title ? `<g>${core}<title>${esc(title)}</title></g>` : core;
}

/** Fixed-precision coordinates keep output byte-stable across platforms. */
export function fmt(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(3);
}
