import { readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";
import { parseTrace } from "../src/csv.js";

const FIXTURES = join(__dirname, "fixtures");

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

describe("parseTrace", () => {
  it("reads a one-commodity trace with an oracle gap column", () => {
    const table = parseTrace(fixture("static_power.csv"));
    expect(table.d).toBe(1);
    expect(table.t.length).toBe(300);
    expect(table.t[0]).toBe(1);
    expect(table.t[299]).toBe(300);
    expect(table.lambda[0]).toHaveLength(1);
    expect(table.oracleGap).not.toBeNull();
    expect(table.oracleGap!.length).toBe(300);
  });

  it("reads a two-commodity trace", () => {
    const table = parseTrace(fixture("static_quadratic.csv"));
    expect(table.d).toBe(2);
    expect(table.lambda[0]).toHaveLength(2);
    expect(table.excess[0]).toHaveLength(2);
    expect(table.avgExcess[0]).toHaveLength(2);
  });

  it("reads a trace without the oracle gap column", () => {
    const table = parseTrace(fixture("dynamic_power.csv"));
    expect(table.oracleGap).toBeNull();
    // the dynamic learner always opens at the zero price
    expect(table.lambda[0][0]).toBe(0);
  });

  it("round numbers and running averages are consistent", () => {
    const table = parseTrace(fixture("static_power.csv"));
    // spot-check the running average at t=3 against the raw rows
    const mean3 = (table.excess[0][0] + table.excess[1][0] + table.excess[2][0]) / 3;
    expect(table.avgExcess[2][0]).toBeCloseTo(mean3, 10);
  });

  it("rejects an unknown header", () => {
    expect(() => parseTrace("time,price\n1,2\n")).toThrow(/line 1/);
  });

  it("rejects an empty file and a header-only file", () => {
    expect(() => parseTrace("")).toThrow(/line 1/);
    expect(() => parseTrace("t,lambda_0,excess_0,F,G,avg_excess_0\n")).toThrow(/line 2/);
  });

  it("reports the offending line for short rows", () => {
    const text = "t,lambda_0,excess_0,F,G,avg_excess_0\n1,0,0,0,0,0\n2,0,0\n";
    expect(() => parseTrace(text)).toThrow(/line 3/);
  });

  it("reports the offending line for non-numeric fields", () => {
    const text = "t,lambda_0,excess_0,F,G,avg_excess_0\n1,0,zero,0,0,0\n";
    expect(() => parseTrace(text)).toThrow(/line 2.*zero/);
  });
});
