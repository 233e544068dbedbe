import { execFileSync } from "child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";
import { parseArgs } from "../src/cli.js";

const FIXTURES = join(__dirname, "fixtures");
const CLI = join(__dirname, "..", "dist", "cli.js");

function runCli(args: string[]): { status: number; stdout: string; stderr: string } {
  try {
    const stdout = execFileSync("node", [CLI, ...args], { encoding: "utf-8" });
    return { status: 0, stdout, stderr: "" };
  } catch (err: any) {
    return { status: err.status ?? 1, stdout: err.stdout ?? "", stderr: err.stderr ?? "" };
  }
}

describe("parseArgs", () => {
  it("accepts the documented flag set", () => {
    const args = parseArgs(["--static", "a.csv", "--dynamic", "b.csv", "--out", "f.svg"]);
    expect(args.staticPath).toBe("a.csv");
    expect(args.dynamicPath).toBe("b.csv");
    expect(args.out).toBe("f.svg");
    expect(args.logX).toBe(false);
  });

  it("requires at least one input and an svg output", () => {
    expect(() => parseArgs(["--out", "f.svg"])).toThrow(/at least one input/);
    expect(() => parseArgs(["--static", "a.csv"])).toThrow(/--out/);
    expect(() => parseArgs(["--static", "a.csv", "--out", "f.png"])).toThrow(/\.svg/);
    expect(() => parseArgs(["--static"])).toThrow(/missing value/);
    expect(() => parseArgs(["--wat"])).toThrow(/unknown flag/);
  });
});

describe("cli end to end", () => {
  it("renders a combined figure from two traces", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const out = join(dir, "fig.svg");
    const res = runCli([
      "--static", join(FIXTURES, "static_power.csv"),
      "--dynamic", join(FIXTURES, "dynamic_power.csv"),
      "--out", out,
    ]);
    expect(res.status).toBe(0);
    expect(existsSync(out)).toBe(true);
    const svg = readFileSync(out, "utf-8");
    expect(svg).toContain("</svg>");
    expect(svg.split('class="price-series"').length - 1).toBe(2);
  });

  it("fails with a named line on a malformed trace", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "t,lambda_0,excess_0,F,G,avg_excess_0\n1,0,x,0,0,0\n");
    const res = runCli(["--static", bad, "--out", join(dir, "f.svg")]);
    expect(res.status).toBe(1);
    expect(res.stderr).toMatch(/line 2/);
    expect(res.stderr).toContain("bad.csv");
  });

  it("refuses a non-svg output path", () => {
    const res = runCli(["--static", join(FIXTURES, "static_power.csv"), "--out", "fig.pdf"]);
    expect(res.status).toBe(1);
    expect(res.stderr).toMatch(/\.svg/);
  });
});
