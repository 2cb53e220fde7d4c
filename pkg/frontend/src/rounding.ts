/**
 * Integer-exact percentage formatting. Counts reach the billions, so the
 * math runs in BigInt and rounds half-up, matching the exporter's display
 * convention digit for digit.
 */

export function percentHalfUp(count: bigint | number | string, total: bigint | number | string): string {
  const c = BigInt(count);
  const t = BigInt(total);
  if (t === 0n) return "0.0";
  const scaled = c * 1000n;
  let q = scaled / t;
  const r = scaled % t;
  if (2n * r >= t) q += 1n;
  return `${q / 10n}.${q % 10n}`;
}

export function sumPercents(percents: string[]): number {
  return percents.reduce((acc, p) => acc + Number(p), 0);
}
