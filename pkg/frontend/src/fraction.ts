import type { FractionPair } from "./types";

/** Exact display form: "3/2", or just "3" for whole numbers. */
export function formatFraction(f: FractionPair): string {
  return f.den === 1 ? String(f.num) : `${f.num}/${f.den}`;
}

/** Cosmetic decimal for tooltips only; the exact form stays on screen. */
export function approxDecimal(f: FractionPair, digits = 4): string {
  const value = f.num / f.den;
  return Number.isInteger(value)
    ? String(value)
    : value.toFixed(digits).replace(/0+$/, "").replace(/\.$/, "");
}
