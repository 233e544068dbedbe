"""Empirical convergence rates of the averaged price.

Runs the scale-free learner at several horizons on one fixed instance and fits
a log-log slope to the residual excess supply at the averaged price. The
theory predicts the residual shrinks at least like T^(-1/4); in practice the
fit usually comes out much steeper.
"""
from pathlib import Path

import numpy as np

from transferprices import (
    Family,
    SamplerSpec,
    ScenarioStream,
    evaluate_price,
    rate_fit,
    run_static,
    sample_instance,
)

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

horizons = (16, 64, 256, 1024, 4096, 16384)

for family, d, label in ((Family.POWER, 1, "power d=1"), (Family.QUADRATIC, 2, "quadratic d=2")):
    spec = SamplerSpec(family=family, d=d, m=15, n=25, c=10.0, seed=0)
    inst = sample_instance(ScenarioStream(spec))

    # one long run; every shorter horizon is a prefix of it
    res = run_static(inst, "solo", T=max(horizons))
    lam_cum = np.cumsum(res.trace.lam, axis=0)

    points = []
    for T in horizons:
        avg_price = lam_cum[T - 1] / T
        resid = float(np.linalg.norm(evaluate_price(inst, avg_price).excess))
        points.append((float(T), resid))

    slope = rate_fit(points)
    print(f"{label}: residual at averaged price vs horizon")
    for T, resid in points:
        print(f"  T={int(T):6d}  residual={resid:.5f}")
    print(f"  fitted rate: T^({slope:.3f})\n")

    csv = out_dir / f"rates_{label.split()[0]}.csv"
    with csv.open("w") as fh:
        fh.write("T,value\n")
        for T, resid in points:
            fh.write(f"{int(T)},{resid!r}\n")
    print(f"  points written to {csv}\n")
