"""High-precision reference solutions for the firm problem and the closed-form
right-hand sides of the convergence bounds.

The reference solvers are deliberately independent of the coordinator
algorithms: a bisection on the scalar excess-supply map for one commodity, a
plain small-step descent for several, and an exhaustive grid search over
equal-trade plans for cross-checking tiny instances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divisions import ConvergenceError, RegularityConstants, _require, regularity_constants
from .firm import FirmInstance, Plan, evaluate_price, excess_supply

__all__ = [
    "OracleSolution",
    "dual_bisection_1d",
    "dual_descent_nd",
    "grid_bruteforce_primal",
    "theorem2_bound",
    "theorem3_bounds",
    "solo_regret_rhs",
    "expected_dual_saa",
]

# Bisection stops once the price bracket is this narrow, whatever the residual.
_BRACKET_FLOOR = 1e-12

_DESCENT_CAP = 10_000_000


@dataclass(frozen=True, eq=False)
class OracleSolution:
    """A solved instance: the optimal price, the plan it stimulates, both
    objective values there, and the residual excess-supply norm. at_boundary
    marks the degenerate case where the zero price already clears the market."""

    lambda_star: np.ndarray
    plan_star: Plan
    F_star: float
    G_star: float
    residual: float
    at_boundary: bool = False


def _solution_at(instance: FirmInstance, lam: np.ndarray, at_boundary: bool = False) -> OracleSolution:
    point = evaluate_price(instance, lam)
    return OracleSolution(
        lambda_star=np.asarray(lam, dtype=float),
        plan_star=point.plan,
        F_star=point.primal,
        G_star=point.dual,
        residual=float(np.linalg.norm(point.excess)),
        at_boundary=at_boundary,
    )


def dual_bisection_1d(instance: FirmInstance, tol: float = 1e-9) -> OracleSolution:
    """Bisect the monotone scalar excess-supply map on [0, Kprime + 1].

    Stops when |excess| <= tol or the bracket is narrower than 1e-12 (so
    tol = 0 forces the latter). If the zero price already has nonnegative
    excess the solution is returned at the boundary with a flag.
    """
    _require(instance.d == 1, f"bisection needs d = 1, got d = {instance.d}")
    _require(tol >= 0, f"tol must be nonnegative, got {tol}")
    consts = regularity_constants(instance)
    lo, hi = 0.0, consts.b_bound

    def ex(lam: float) -> float:
        return float(excess_supply(instance, np.array([lam]))[0])

    if ex(lo) >= 0.0:
        return _solution_at(instance, np.array([lo]), at_boundary=True)
    if ex(hi) < 0.0:  # pragma: no cover - excluded by the price ceiling
        raise RuntimeError("excess supply is negative at the price ceiling")
    while hi - lo > _BRACKET_FLOOR:
        mid = 0.5 * (lo + hi)
        e_mid = ex(mid)
        if abs(e_mid) <= tol:
            return _solution_at(instance, np.array([mid]))
        if e_mid < 0.0:
            lo = mid
        else:
            hi = mid
    return _solution_at(instance, np.array([0.5 * (lo + hi)]))


def dual_descent_nd(instance: FirmInstance, tol: float = 1e-7) -> OracleSolution:
    """Reference descent on the dual from the zero price with step 1/kappa,
    run until the excess-supply norm falls to tol (iteration cap 1e7)."""
    _require(tol > 0, f"tol must be positive, got {tol}")
    consts = regularity_constants(instance)
    step = 1.0 / consts.kappa
    lam = np.zeros(instance.d)
    for _ in range(_DESCENT_CAP):
        e = excess_supply(instance, lam)
        if float(np.linalg.norm(e)) <= tol:
            return _solution_at(instance, lam)
        lam = lam - step * e
    raise ConvergenceError(
        f"dual descent did not reach tol={tol} within {_DESCENT_CAP} iterations",
        iterations=_DESCENT_CAP,
    )


def grid_bruteforce_primal(instance: FirmInstance, step: float) -> tuple[Plan, float]:
    """Exhaustive search over equal-trade plans x = y on a uniform grid.

    Only meant for tiny instances (one division per side, at most two
    commodities); this is the primal cross-check for the dual solvers.
    """
    _require(step > 0, f"step must be positive, got {step}")
    _require(
        instance.m == 1 and instance.n == 1,
        "grid search needs exactly one division per side",
    )
    _require(instance.d <= 2, f"grid search supports d <= 2, got d = {instance.d}")
    c = instance.c
    axis = np.arange(0.0, c + 0.5 * step, step)
    axis[-1] = min(float(axis[-1]), c)
    if axis[-1] < c - 1e-15:
        axis = np.append(axis, c)
    if float(len(axis)) ** instance.d > 1e8:
        raise ValueError(f"grid of {len(axis)}^{instance.d} points exceeds the 1e8 cap")
    if instance.d == 1:
        pts = axis[:, None]
    else:
        g0, g1 = np.meshgrid(axis, axis, indexing="ij")
        pts = np.column_stack([g0.ravel(), g1.ravel()])
    sales_batch = instance._sales_batches[0]
    prod_batch = instance._production_batches[0]
    # The batches hold a single division each, so broadcast its parameters
    # across the grid by evaluating pointwise.
    f_vals = _batch_value_on_grid(sales_batch, pts)
    g_vals = _batch_value_on_grid(prod_batch, pts)
    total = f_vals - g_vals
    best = int(np.argmax(total))
    q = pts[best]
    plan = Plan(x=q[None, :], y=q[None, :])
    return plan, float(total[best])


def _batch_value_on_grid(batch, pts: np.ndarray) -> np.ndarray:
    from .firm import _PowerBatch

    if isinstance(batch, _PowerBatch):
        from .divisions import _power_value

        return _power_value(pts[:, 0], batch.scale[0], batch.expo[0], batch.shift[0])
    lin = pts @ batch.lin[0]
    quad = 0.5 * np.einsum("kd,de,ke->k", pts, batch.P[0], pts)
    return lin - quad if batch.sales else lin + quad


def theorem2_bound(
    consts: RegularityConstants, eta: float, lambda0_dist: float, t: int
) -> tuple[float, float]:
    """Right-hand sides of the momentum-method bounds at round t: the
    optimality-gap bound 2K/sqrt(sigma*eta) * dist/(t+1) and the feasibility
    bound 2*sqrt(kappa/eta) * dist/(t+1). Requires eta <= 1/kappa."""
    _require(math.isfinite(eta) and eta > 0, f"eta must be positive, got {eta}")
    _require(eta <= 1.0 / consts.kappa * (1.0 + 1e-12), f"eta={eta} exceeds 1/kappa={1.0 / consts.kappa}")
    _require(lambda0_dist >= 0, f"lambda0_dist must be nonnegative, got {lambda0_dist}")
    _require(t >= 0, f"t must be nonnegative, got {t}")
    gap = 2.0 * consts.K / math.sqrt(consts.sigma * eta) * lambda0_dist / (t + 1.0)
    feas = 2.0 * math.sqrt(consts.kappa / eta) * lambda0_dist / (t + 1.0)
    return gap, feas


def theorem3_bounds(
    consts: RegularityConstants,
    m: int,
    n: int,
    c: float,
    d: int,
    lambda_star_norm: float,
    T: int,
) -> tuple[float, float]:
    """Right-hand sides of the averaged-price bounds after T rounds: the
    optimality-gap bound K*sqrt((m+n)c/sigma) * sqrt(|lambda*|^2 + 12.5) *
    d^(1/4)/T^(1/4) and the residual bound with sqrt(kappa(m+n)c) in front."""
    _require(m >= 1 and n >= 1, "need at least one division per side")
    _require(c > 0, f"c must be positive, got {c}")
    _require(d >= 1, f"d must be at least 1, got {d}")
    _require(lambda_star_norm >= 0, f"lambda_star_norm must be nonnegative, got {lambda_star_norm}")
    _require(T >= 1, f"T must be at least 1, got {T}")
    factor = math.sqrt(lambda_star_norm**2 + 12.5) * d**0.25 / T**0.25
    gap = consts.K * math.sqrt((m + n) * c / consts.sigma) * factor
    resid = math.sqrt(consts.kappa * (m + n) * c) * factor
    return gap, resid


def solo_regret_rhs(lambda_norm: float, sq_sum: float, max_grad: float, T: int) -> float:
    """Regret ceiling of SOLO FTRL against a fixed comparator price, from the
    realized gradient statistics: (|lambda|^2/2 + 2.75) * sqrt(sq_sum) +
    3.5 * sqrt(T-1) * max_grad."""
    _require(T >= 1, f"T must be at least 1, got {T}")
    _require(lambda_norm >= 0, f"lambda_norm must be nonnegative, got {lambda_norm}")
    _require(sq_sum >= 0, f"sq_sum must be nonnegative, got {sq_sum}")
    _require(max_grad >= 0, f"max_grad must be nonnegative, got {max_grad}")
    return (lambda_norm**2 / 2.0 + 2.75) * math.sqrt(sq_sum) + 3.5 * math.sqrt(T - 1.0) * max_grad


def expected_dual_saa(spec, samples: int, tol: float = 1e-7) -> np.ndarray:
    """Estimate the price minimizing the expected dual by descending the
    sample-average dual over a fixed pool of drawn instances.

    The pool uses the first ``samples`` rounds of ``spec``'s stream, so
    enlarging the pool keeps the earlier draws (prefix stability). Diagnostic
    only: returns the price at which the pooled average excess has norm <= tol.
    """
    from .scenario import ScenarioStream, sample_instance

    _require(samples >= 1, f"samples must be at least 1, got {samples}")
    _require(tol > 0, f"tol must be positive, got {tol}")
    stream = ScenarioStream(spec)
    pool = [sample_instance(stream) for _ in range(samples)]
    kappa_bar = float(np.mean([regularity_constants(inst).kappa for inst in pool]))
    step = 1.0 / kappa_bar
    lam = np.zeros(spec.d)
    for _ in range(_DESCENT_CAP):
        g = np.mean([excess_supply(inst, lam) for inst in pool], axis=0)
        if float(np.linalg.norm(g)) <= tol:
            return lam
        lam = lam - step * g
    raise ConvergenceError(
        f"sample-average descent did not reach tol={tol} within {_DESCENT_CAP} iterations",
        iterations=_DESCENT_CAP,
    )
