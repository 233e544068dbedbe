"""Transfer-price update rules (constant-step gradient descent, Nesterov
momentum, SOLO FTRL) and the driver that runs them on a fixed firm instance."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divisions import _require, regularity_constants
from .firm import FirmInstance, evaluate_price, excess_supply
from .trace import Trace

__all__ = [
    "ALGOS",
    "GDConfig",
    "NesterovState",
    "SoloState",
    "RunResult",
    "gd_step",
    "nesterov_step",
    "nesterov_init",
    "solo_step",
    "solo_init",
    "run_static",
]

ALGOS = ("gd", "nesterov", "solo")


def _finite_vector(v, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    _require(arr.ndim == 1, f"{name} must be a vector")
    _require(bool(np.all(np.isfinite(arr))), f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True)
class GDConfig:
    """Constant step size for plain gradient descent on the dual."""

    eta: float

    def __post_init__(self) -> None:
        _require(math.isfinite(self.eta) and self.eta > 0, f"eta must be positive, got {self.eta}")


@dataclass(frozen=True, eq=False)
class NesterovState:
    """Momentum iterate state: the last two prices, the look-ahead point mu at
    which the next gradient must be evaluated, the round count, and the step."""

    lambda_prev: np.ndarray
    lambda_cur: np.ndarray
    mu: np.ndarray
    t: int
    eta: float

    def __post_init__(self) -> None:
        _require(self.t >= 0, f"t must be nonnegative, got {self.t}")
        _require(math.isfinite(self.eta) and self.eta > 0, f"eta must be positive, got {self.eta}")
        if self.t == 0:
            same = np.array_equal(self.lambda_prev, self.lambda_cur) and np.array_equal(
                self.lambda_cur, self.mu
            )
            _require(same, "at t=0 the state must satisfy mu = lambda_cur = lambda_prev")


def nesterov_init(lambda0, eta: float) -> NesterovState:
    lam = _finite_vector(lambda0, "lambda0")
    return NesterovState(lambda_prev=lam, lambda_cur=lam, mu=lam, t=0, eta=eta)


@dataclass(frozen=True, eq=False)
class SoloState:
    """Accumulated gradient sum and squared-norm sum of SOLO FTRL."""

    grad_sum: np.ndarray
    sq_sum: float
    t: int

    def __post_init__(self) -> None:
        _require(self.sq_sum >= 0, f"sq_sum must be nonnegative, got {self.sq_sum}")
        _require(self.t >= 0, f"t must be nonnegative, got {self.t}")


def solo_init(d: int) -> SoloState:
    _require(d >= 1, f"d must be at least 1, got {d}")
    return SoloState(grad_sum=np.zeros(d), sq_sum=0.0, t=0)


def gd_step(lam, gradient, cfg: GDConfig) -> np.ndarray:
    """One descent step: lam - eta * gradient."""
    lam = _finite_vector(lam, "lam")
    g = _finite_vector(gradient, "gradient")
    _require(lam.shape == g.shape, "price and gradient dimensions differ")
    return lam - cfg.eta * g


def nesterov_step(state: NesterovState, gradient_at_mu) -> NesterovState:
    """Advance one round given the gradient evaluated at state.mu.

    The new price is mu - eta * gradient; the new look-ahead point adds the
    momentum term ((t-1)/(t+2)) * (price change), with t the new round count.
    """
    g = _finite_vector(gradient_at_mu, "gradient_at_mu")
    _require(g.shape == state.mu.shape, "gradient dimension does not match state")
    t_new = state.t + 1
    lam_new = state.mu - state.eta * g
    coef = (t_new - 1.0) / (t_new + 2.0)
    mu_new = lam_new + coef * (lam_new - state.lambda_cur)
    return NesterovState(
        lambda_prev=state.lambda_cur, lambda_cur=lam_new, mu=mu_new, t=t_new, eta=state.eta
    )


def solo_step(state: SoloState, gradient) -> tuple[SoloState, np.ndarray]:
    """Fold one observed gradient into the sums and emit the next price.

    The emitted price is -grad_sum / sqrt(sq_sum), or zero while sq_sum is
    zero. The caller must have evaluated ``gradient`` at the price the state
    last emitted (zero for a fresh state).
    """
    g = _finite_vector(gradient, "gradient")
    _require(g.shape == state.grad_sum.shape, "gradient dimension does not match state")
    grad_sum = state.grad_sum + g
    sq_sum = state.sq_sum + float(g @ g)
    new_state = SoloState(grad_sum=grad_sum, sq_sum=sq_sum, t=state.t + 1)
    if sq_sum > 0.0:
        price = -grad_sum / math.sqrt(sq_sum)
    else:
        price = np.zeros_like(grad_sum)
    return new_state, price


@dataclass(frozen=True, eq=False)
class RunResult:
    """A finished run: the trace, the last price, the average price over all
    logged rounds, and whether the run stopped early at an exact optimum.
    ``realized_kprime`` is populated by dynamic runs."""

    trace: Trace
    final_price: np.ndarray
    average_price: np.ndarray
    converged: bool = False
    realized_kprime: float | None = None


def _result(trace: Trace, converged: bool = False, realized_kprime: float | None = None) -> RunResult:
    return RunResult(
        trace=trace,
        final_price=trace.lam[-1].copy(),
        average_price=trace.lam.mean(axis=0),
        converged=converged,
        realized_kprime=realized_kprime,
    )


def run_static(instance: FirmInstance, algo: str, T: int, eta: float | None = None) -> RunResult:
    """Run T rounds of a price-update algorithm against a fixed instance.

    Round t emits the price lambda_t, observes the excess supply at it, and
    logs prices, excess, and both objective values. The run starts from
    lambda_0 = 0, whose excess seeds gd/solo; nesterov additionally evaluates
    the gradient at its look-ahead point, which is logged as the round's
    eval_point. eta defaults to 1/kappa for gd and nesterov and is unused by
    solo.
    """
    _require(algo in ALGOS, f"algo must be one of {ALGOS}, got {algo!r}")
    _require(T >= 1, f"T must be at least 1, got {T}")
    d = instance.d
    lam0 = np.zeros(d)
    point0 = evaluate_price(instance, lam0)

    if algo in ("gd", "nesterov") and eta is None:
        eta = 1.0 / regularity_constants(instance).kappa

    trace = Trace(T, d, eval_points=(algo == "nesterov"))
    excess_sum = np.zeros(d)

    if algo == "solo":
        if not np.any(point0.excess):
            # The zero price is already optimal; log it once and stop.
            trace.append(1, lam0, point0.excess, point0.primal, point0.dual, point0.excess.copy())
            return _result(trace, converged=True)
        state = solo_init(d)
        g = point0.excess
        for t in range(1, T + 1):
            state, lam = solo_step(state, g)
            point = evaluate_price(instance, lam)
            g = point.excess
            excess_sum += g
            trace.append(t, lam, g, point.primal, point.dual, excess_sum / t)
        return _result(trace)

    if algo == "gd":
        cfg = GDConfig(eta)
        lam = lam0
        g = point0.excess
        for t in range(1, T + 1):
            lam = gd_step(lam, g, cfg)
            point = evaluate_price(instance, lam)
            g = point.excess
            excess_sum += g
            trace.append(t, lam, g, point.primal, point.dual, excess_sum / t)
        return _result(trace)

    state = nesterov_init(lam0, eta)
    g_mu = point0.excess  # gradient at mu_0 = lambda_0
    for t in range(1, T + 1):
        mu_prev = state.mu
        state = nesterov_step(state, g_mu)
        lam = state.lambda_cur
        point = evaluate_price(instance, lam)
        excess_sum += point.excess
        trace.append(
            t, lam, point.excess, point.primal, point.dual, excess_sum / t, eval_point=mu_prev
        )
        if t < T:
            g_mu = excess_supply(instance, state.mu)
    return _result(trace)
