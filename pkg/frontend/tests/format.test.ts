import { describe, expect, it } from "vitest";
import { DASH, fmtCount, fmtMass, fmtNumber, fmtPct, fmtPosition } from "../src/format.js";

describe("fmtPct", () => {
  it("renders a dash for missing values", () => {
    expect(fmtPct(null)).toBe(DASH);
    expect(fmtPct(undefined)).toBe(DASH);
    expect(fmtPct(Number.NaN)).toBe(DASH);
  });

  it("rounds to one decimal", () => {
    expect(fmtPct(84.84210526315789)).toBe("84.8");
    expect(fmtPct(84.87394957983193)).toBe("84.9");
    expect(fmtPct(100)).toBe("100.0");
    expect(fmtPct(0)).toBe("0.0");
    expect(fmtPct(99.57894736842105)).toBe("99.6");
  });
});

describe("small formatters", () => {
  it("formats numbers and positions", () => {
    expect(fmtNumber(0.123456)).toBe("0.123");
    expect(fmtNumber(0.5, 2)).toBe("0.50");
    expect(fmtPosition([0, 0.25, -0.1])).toBe("(0.000, 0.250, -0.100)");
  });

  it("formats mass in grams below a kilogram", () => {
    expect(fmtMass(0.108)).toBe("108 g");
    expect(fmtMass(1.5)).toBe("1.50 kg");
  });

  it("pluralizes counts", () => {
    expect(fmtCount(1, "verdict")).toBe("1 verdict");
    expect(fmtCount(3, "verdict")).toBe("3 verdicts");
  });
});
