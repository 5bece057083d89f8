/** Display formatting. Undefined quantities render as an em dash so a
 * blank dashboard is clearly "no data yet", never a fake zero. */

export const DASH = "—";

export function fmtPct(value: number | null | undefined): string {
  if (value === null || value === undefined || !Number.isFinite(value)) return DASH;
  return value.toFixed(1);
}

export function fmtNumber(value: number, digits = 3): string {
  return value.toFixed(digits);
}

export function fmtPosition(p: readonly number[]): string {
  return `(${p.map((c) => c.toFixed(3)).join(", ")})`;
}

export function fmtMass(kg: number): string {
  return kg < 1 ? `${(kg * 1000).toFixed(0)} g` : `${kg.toFixed(2)} kg`;
}

export function fmtCount(n: number, noun: string): string {
  return `${n} ${noun}${n === 1 ? "" : "s"}`;
}
