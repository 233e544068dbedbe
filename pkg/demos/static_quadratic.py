"""Two-commodity static run with quadratic revenue/cost models.

Each division's curvature matrix is sampled as C^T C + 0.1 I, and the linear
coefficients sit just above the smallest values that keep every function
non-decreasing on the box [0, 10]^2. Both price components must converge.

Writes out/static_quadratic.csv for the plotting tool.

Usage: python3 demos/static_quadratic.py [seed]
"""
import sys
from pathlib import Path

import numpy as np

from transferprices import ExperimentConfig, run_experiment

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

cfg = ExperimentConfig(
    mode="static",
    algo="solo",
    model="quadratic",
    d=2,
    m=15,
    n=25,
    c=10.0,
    delta=0.1,
    T=2000,
    seed=seed,
    with_oracle=True,
    out=str(out_dir / "static_quadratic.csv"),
)
out = run_experiment(cfg)

lam_star = np.array(out.report.oracle["lambda_star"])
print(f"instance seed {seed}: lambda* = ({lam_star[0]:.4f}, {lam_star[1]:.4f})")
print(f"final price:   ({out.result.final_price[0]:.4f}, {out.result.final_price[1]:.4f})")
print(f"average price: ({out.result.average_price[0]:.4f}, {out.result.average_price[1]:.4f})")

trace = out.result.trace
for t in (1, 10, 100, 2000):
    row = trace.record(t - 1)
    print(f"  t={t:5d}  excess=({row.excess[0]:10.3f}, {row.excess[1]:10.3f})")

print(f"bound checks: {'all pass' if out.report.passed else 'FAILURES'}")
print(f"trace written to {out.trace_path}")
