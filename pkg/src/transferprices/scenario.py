"""Random firm-instance generation and the dynamic run loop, in which every
round faces a freshly sampled instance."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .coordinators import RunResult, solo_init, solo_step
from .divisions import (
    DivisionModel,
    Family,
    PowerProductionParams,
    PowerSalesParams,
    QuadProductionParams,
    QuadSalesParams,
    Role,
    _require,
)
from .firm import FirmInstance, _batch_point, _PowerBatch, _QuadBatch
from .trace import Trace

__all__ = ["SamplerSpec", "ScenarioStream", "sample_instance", "run_dynamic"]

Range = tuple[float, float]

# Smallest uniform draw fed to the inverse normal CDF, so that normal variates
# stay finite.
_U_FLOOR = 2.0**-53


def _check_range(name: str, rng: Range) -> None:
    lo, hi = rng
    _require(math.isfinite(lo) and math.isfinite(hi), f"{name} bounds must be finite")
    _require(0.0 <= lo <= hi, f"{name} must satisfy 0 <= lo <= hi, got {rng}")


@dataclass(frozen=True)
class SamplerSpec:
    """Distribution over firm instances; every draw is a deterministic function
    of (seed, round index).

    Power-family laws: A ~ U(A_range); alpha = 1 - U(one_minus_alpha_range);
    eps1 = 0.1 + U(eps1_excess_range); B ~ U(B_range);
    beta = 1 + U(beta_minus_one_range); eps2 = 0.1 + U(eps2_excess_range).

    Quadratic-family law: curvature = C^T C + delta * I with C a d-by-d matrix
    of independent standard normals; the linear coefficients sit U(margin_range)
    above the smallest value keeping the function non-decreasing on the box.
    """

    family: Family
    d: int
    m: int
    n: int
    c: float
    seed: int
    delta: float = 0.1
    A_range: Range = (0.0, 15.0)
    one_minus_alpha_range: Range = (0.0, 1.0)
    eps1_excess_range: Range = (0.0, 1.0)
    B_range: Range = (0.0, 10.0)
    beta_minus_one_range: Range = (0.0, 3.0)
    eps2_excess_range: Range = (0.0, 1.0)
    margin_range: Range = (0.0, 1.0)

    def __post_init__(self) -> None:
        _require(self.family in (Family.POWER, Family.QUADRATIC), f"unknown family {self.family!r}")
        _require(self.d >= 1, f"d must be at least 1, got {self.d}")
        if self.family is Family.POWER:
            _require(self.d == 1, "the power family is defined for a single commodity")
        _require(self.m >= 1 and self.n >= 1, "need at least one division per side")
        _require(math.isfinite(self.c) and self.c > 0, f"c must be positive, got {self.c}")
        _require(math.isfinite(self.delta) and self.delta > 0, f"delta must be positive, got {self.delta}")
        _require(0 <= self.seed < 2**64, f"seed must fit in 64 bits, got {self.seed}")
        for name in (
            "A_range",
            "one_minus_alpha_range",
            "eps1_excess_range",
            "B_range",
            "beta_minus_one_range",
            "eps2_excess_range",
            "margin_range",
        ):
            _check_range(name, getattr(self, name))


class ScenarioStream:
    """Deterministic instance stream: round r draws from the substream keyed by
    (spec.seed, r), so identical seeds reproduce identical streams and a round
    can be regenerated independently of the others."""

    def __init__(self, spec: SamplerSpec, start_round: int = 0):
        _require(start_round >= 0, f"start_round must be nonnegative, got {start_round}")
        self.spec = spec
        self._round = start_round

    @property
    def next_round(self) -> int:
        return self._round

    def _generator(self, r: int) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.spec.seed, spawn_key=(r,))
        return np.random.Generator(np.random.PCG64(seq))


def _uniform(rng: np.random.Generator, bounds: Range, size) -> np.ndarray:
    lo, hi = bounds
    return lo + (hi - lo) * rng.random(size)


def _standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    u = np.maximum(rng.random(size), _U_FLOOR)
    return ndtri(u)


def _draw_power(spec: SamplerSpec, rng: np.random.Generator):
    """Stacked power-family parameters, in the fixed per-round draw order."""
    A = _uniform(rng, spec.A_range, spec.m)
    alpha = 1.0 - _uniform(rng, spec.one_minus_alpha_range, spec.m)
    eps1 = 0.1 + _uniform(rng, spec.eps1_excess_range, spec.m)
    B = _uniform(rng, spec.B_range, spec.n)
    beta = 1.0 + _uniform(rng, spec.beta_minus_one_range, spec.n)
    eps2 = 0.1 + _uniform(rng, spec.eps2_excess_range, spec.n)
    return (A, alpha, eps1), (B, beta, eps2)


def _draw_quadratic(spec: SamplerSpec, rng: np.random.Generator):
    """Stacked quadratic-family parameters, in the fixed per-round draw order:
    sales curvature factors, sales margins, production curvature factors,
    production margins."""
    d = spec.d
    eye = spec.delta * np.eye(d)
    C_s = _standard_normal(rng, (spec.m, d, d))
    margins_s = _uniform(rng, spec.margin_range, (spec.m, d))
    C_p = _standard_normal(rng, (spec.n, d, d))
    margins_p = _uniform(rng, spec.margin_range, (spec.n, d))

    A = np.einsum("kij,kil->kjl", C_s, C_s) + eye
    B = np.einsum("kij,kil->kjl", C_p, C_p) + eye
    a = spec.c * np.maximum(A, 0.0).sum(axis=2) + margins_s
    b = -spec.c * np.minimum(B, 0.0).sum(axis=2) + margins_p
    return (a, A), (b, B)


def _materialize_power(spec: SamplerSpec, drawn) -> FirmInstance:
    (A, alpha, eps1), (B, beta, eps2) = drawn
    sales = tuple(
        DivisionModel(
            Role.SALES,
            Family.POWER,
            PowerSalesParams(float(A[i]), float(alpha[i]), float(eps1[i])),
            spec.c,
            validate=False,
        )
        for i in range(spec.m)
    )
    production = tuple(
        DivisionModel(
            Role.PRODUCTION,
            Family.POWER,
            PowerProductionParams(float(B[j]), float(beta[j]), float(eps2[j])),
            spec.c,
            validate=False,
        )
        for j in range(spec.n)
    )
    return FirmInstance(d=1, sales=sales, production=production, c=spec.c)


def _materialize_quadratic(spec: SamplerSpec, drawn) -> FirmInstance:
    (a, A), (b, B) = drawn
    sales = tuple(
        DivisionModel(
            Role.SALES,
            Family.QUADRATIC,
            QuadSalesParams(a[i], A[i], validate=False),
            spec.c,
            validate=False,
        )
        for i in range(spec.m)
    )
    production = tuple(
        DivisionModel(
            Role.PRODUCTION,
            Family.QUADRATIC,
            QuadProductionParams(b[j], B[j], validate=False),
            spec.c,
            validate=False,
        )
        for j in range(spec.n)
    )
    return FirmInstance(d=spec.d, sales=sales, production=production, c=spec.c)


def sample_instance(stream: ScenarioStream) -> FirmInstance:
    """Draw one full instance and advance the stream by one round."""
    spec = stream.spec
    rng = stream._generator(stream._round)
    stream._round += 1
    if spec.family is Family.POWER:
        return _materialize_power(spec, _draw_power(spec, rng))
    return _materialize_quadratic(spec, _draw_quadratic(spec, rng))


def run_dynamic(spec: SamplerSpec, T: int, with_oracle: bool = False) -> RunResult:
    """SOLO FTRL against a freshly sampled instance every round.

    Round t plays the price implied by the gradients observed so far (zero in
    round 1), observes that round's excess supply, and logs realized values
    plus the running average of the excess. With ``with_oracle`` each round is
    also solved to optimality and the gap between the round's best attainable
    profit and the realized profit is logged.

    The realized sales-side Lipschitz ceiling across all rounds is reported on
    the result for iterate-bound diagnostics.
    """
    _require(T >= 1, f"T must be at least 1, got {T}")
    d = spec.d
    stream = ScenarioStream(spec)
    state = solo_init(d)
    lam_next = np.zeros(d)
    trace = Trace(T, d, oracle_gap=with_oracle)
    excess_sum = np.zeros(d)
    kprime_max = 0.0
    power = spec.family is Family.POWER

    if with_oracle:
        from .oracle import dual_bisection_1d, dual_descent_nd

    for t in range(1, T + 1):
        rng = stream._generator(stream._round)
        stream._round += 1
        drawn = _draw_power(spec, rng) if power else _draw_quadratic(spec, rng)
        if power:
            sbatch = _PowerBatch(np.arange(spec.m), *drawn[0], sales=True)
            pbatch = _PowerBatch(np.arange(spec.n), *drawn[1], sales=False)
        else:
            sbatch = _QuadBatch(np.arange(spec.m), *drawn[0], sales=True)
            pbatch = _QuadBatch(np.arange(spec.n), *drawn[1], sales=False)
        lam = lam_next
        excess, primal, dual = _batch_point(sbatch, pbatch, lam, spec.c)
        excess_sum += excess
        kprime_max = max(kprime_max, float(sbatch.lipschitz(spec.c).max()))
        gap = None
        if with_oracle:
            inst = (_materialize_power if power else _materialize_quadratic)(spec, drawn)
            sol = dual_bisection_1d(inst) if d == 1 else dual_descent_nd(inst)
            gap = sol.F_star - primal
        trace.append(t, lam, excess, primal, dual, excess_sum / t, oracle_gap=gap)
        state, lam_next = solo_step(state, excess)

    return RunResult(
        trace=trace,
        final_price=trace.lam[-1].copy(),
        average_price=trace.lam.mean(axis=0),
        converged=False,
        realized_kprime=kprime_max,
    )
