/**
 * Reader for coordination-run trace files.
 *
 * Expected header (d = number of commodities, oracle_gap optional):
 *   t,lambda_0,...,lambda_{d-1},excess_0,...,excess_{d-1},F,G,
 *   avg_excess_0,...,avg_excess_{d-1}[,oracle_gap]
 */

export interface TraceTable {
  /** number of commodities (curves per panel) */
  d: number;
  t: number[];
  /** lambda[i] is the length-d price vector of row i */
  lambda: number[][];
  excess: number[][];
  F: number[];
  G: number[];
  avgExcess: number[][];
  oracleGap: number[] | null;
}

function expectedHeader(d: number, withGap: boolean): string {
  const cols = ["t"];
  for (let k = 0; k < d; k++) cols.push(`lambda_${k}`);
  for (let k = 0; k < d; k++) cols.push(`excess_${k}`);
  cols.push("F", "G");
  for (let k = 0; k < d; k++) cols.push(`avg_excess_${k}`);
  if (withGap) cols.push("oracle_gap");
  return cols.join(",");
}

/** Infer d from the header by counting lambda_* columns; throws on mismatch. */
function parseHeader(line: string): { d: number; withGap: boolean } {
  const cols = line.split(",");
  let d = 0;
  while (d < cols.length - 1 && cols[1 + d] === `lambda_${d}`) d++;
  const withGap = cols[cols.length - 1] === "oracle_gap";
  if (d === 0 || line !== expectedHeader(d, withGap)) {
    throw new Error(
      `line 1: unrecognized header "${line}" (expected "${expectedHeader(Math.max(d, 1), withGap)}")`
    );
  }
  return { d, withGap };
}

export function parseTrace(text: string): TraceTable {
  const lines = text.split(/\r?\n/);
  while (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length === 0) throw new Error("line 1: file is empty");

  const { d, withGap } = parseHeader(lines[0]);
  const width = 1 + 3 * d + 2 + (withGap ? 1 : 0);
  if (lines.length === 1) throw new Error("line 2: no data rows after the header");

  const table: TraceTable = {
    d,
    t: [],
    lambda: [],
    excess: [],
    F: [],
    G: [],
    avgExcess: [],
    oracleGap: withGap ? [] : null,
  };

  for (let i = 1; i < lines.length; i++) {
    const lineNo = i + 1;
    const parts = lines[i].split(",");
    if (parts.length !== width) {
      throw new Error(`line ${lineNo}: expected ${width} fields, got ${parts.length}`);
    }
    const nums = parts.map((p, j) => {
      const v = Number(p);
      if (p.trim() === "" || Number.isNaN(v)) {
        throw new Error(`line ${lineNo}: field ${j + 1} is not a number: "${p}"`);
      }
      return v;
    });
    table.t.push(nums[0]);
    table.lambda.push(nums.slice(1, 1 + d));
    table.excess.push(nums.slice(1 + d, 1 + 2 * d));
    table.F.push(nums[1 + 2 * d]);
    table.G.push(nums[2 + 2 * d]);
    table.avgExcess.push(nums.slice(3 + 2 * d, 3 + 3 * d));
    if (withGap) table.oracleGap!.push(nums[3 + 3 * d]);
  }
  return table;
}
