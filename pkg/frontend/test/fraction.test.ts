import { describe, expect, it } from "vitest";

import { approxDecimal, formatFraction } from "../src/fraction";

describe("formatFraction", () => {
  it("renders whole numbers without a denominator", () => {
    expect(formatFraction({ num: 75, den: 1 })).toBe("75");
    expect(formatFraction({ num: 0, den: 1 })).toBe("0");
  });

  it("renders exact ratios verbatim", () => {
    expect(formatFraction({ num: 75, den: 2 })).toBe("75/2");
    expect(formatFraction({ num: 3, den: 2 })).toBe("3/2");
  });
});

describe("approxDecimal", () => {
  it("is only a display hint, trimmed of trailing zeros", () => {
    expect(approxDecimal({ num: 75, den: 2 })).toBe("37.5");
    expect(approxDecimal({ num: 1, den: 3 })).toBe("0.3333");
    expect(approxDecimal({ num: 4, den: 2 })).toBe("2");
  });
});
