"""Division (agent) models: revenue/cost evaluation, best responses to a
transfer price, and the regularity constants that drive every bound."""
from __future__ import annotations

import enum
import math
from dataclasses import InitVar, dataclass
from typing import TYPE_CHECKING, Union

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .firm import FirmInstance

__all__ = [
    "Role",
    "Family",
    "ConvergenceError",
    "PowerSalesParams",
    "PowerProductionParams",
    "QuadSalesParams",
    "QuadProductionParams",
    "DivisionModel",
    "RegularityConstants",
    "evaluate",
    "best_response_sales",
    "best_response_production",
    "box_qp_maximize",
    "strong_modulus",
    "lipschitz_bound",
    "regularity_constants",
]

# Numerical slack when testing membership in the box [0, c]^d.
_BOX_SLACK = 1e-12


class Role(enum.Enum):
    SALES = "sales"
    PRODUCTION = "production"


class Family(enum.Enum):
    POWER = "power"
    QUADRATIC = "quadratic"


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget."""

    def __init__(self, message: str, iterations: int) -> None:
        super().__init__(message)
        self.iterations = iterations


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


def _readonly_array(values, name: str, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    _require(arr.ndim == ndim, f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    _require(bool(np.all(np.isfinite(arr))), f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PowerSalesParams:
    """Revenue f(x) = (A/alpha)*((x + eps1)**alpha - eps1**alpha), one commodity."""

    A: float
    alpha: float
    eps1: float

    def __post_init__(self) -> None:
        _require(math.isfinite(self.A) and self.A > 0, f"A must be positive, got {self.A}")
        _require(0.0 < self.alpha < 1.0, f"alpha must lie in (0, 1), got {self.alpha}")
        _require(math.isfinite(self.eps1) and self.eps1 > 0, f"eps1 must be positive, got {self.eps1}")


@dataclass(frozen=True)
class PowerProductionParams:
    """Cost g(y) = (B/beta)*((y + eps2)**beta - eps2**beta), one commodity."""

    B: float
    beta: float
    eps2: float

    def __post_init__(self) -> None:
        _require(math.isfinite(self.B) and self.B > 0, f"B must be positive, got {self.B}")
        _require(math.isfinite(self.beta) and self.beta > 1.0, f"beta must exceed 1, got {self.beta}")
        _require(math.isfinite(self.eps2) and self.eps2 > 0, f"eps2 must be positive, got {self.eps2}")


def _check_spd(mat: np.ndarray, name: str) -> None:
    scale = float(np.max(np.abs(mat))) or 1.0
    _require(
        bool(np.all(np.abs(mat - mat.T) <= 1e-10 * scale)),
        f"{name} must be symmetric",
    )
    smallest = float(np.linalg.eigvalsh(mat)[0])
    _require(smallest > 0.0, f"{name} must be positive definite (smallest eigenvalue {smallest})")


@dataclass(frozen=True, eq=False)
class QuadSalesParams:
    """Revenue f(x) = <a, x> - 0.5*<A x, x> with symmetric positive definite A."""

    a: np.ndarray
    A: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        object.__setattr__(self, "a", _readonly_array(self.a, "a", 1))
        object.__setattr__(self, "A", _readonly_array(self.A, "A", 2))
        d = self.a.size
        _require(self.A.shape == (d, d), f"A must have shape ({d}, {d}), got {self.A.shape}")
        if validate:
            _check_spd(self.A, "A")


@dataclass(frozen=True, eq=False)
class QuadProductionParams:
    """Cost g(y) = <b, y> + 0.5*<B y, y> with symmetric positive definite B."""

    b: np.ndarray
    B: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        object.__setattr__(self, "b", _readonly_array(self.b, "b", 1))
        object.__setattr__(self, "B", _readonly_array(self.B, "B", 2))
        d = self.b.size
        _require(self.B.shape == (d, d), f"B must have shape ({d}, {d}), got {self.B.shape}")
        if validate:
            _check_spd(self.B, "B")


Params = Union[PowerSalesParams, PowerProductionParams, QuadSalesParams, QuadProductionParams]

_EXPECTED_PARAMS = {
    (Role.SALES, Family.POWER): PowerSalesParams,
    (Role.PRODUCTION, Family.POWER): PowerProductionParams,
    (Role.SALES, Family.QUADRATIC): QuadSalesParams,
    (Role.PRODUCTION, Family.QUADRATIC): QuadProductionParams,
}


@dataclass(frozen=True, eq=False)
class DivisionModel:
    """One agent: a sales division (revenue f) or production division (cost g)
    acting on the box [0, c]^d.

    The functions are normalized so f(0) = g(0) = 0 and are non-decreasing on
    the box; for the quadratic family the latter is the margin condition on the
    linear coefficients and can be skipped with ``validate=False`` (sampled
    instances satisfy it by construction).
    """

    role: Role
    family: Family
    params: Params
    c: float
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool) -> None:
        expected = _EXPECTED_PARAMS[(self.role, self.family)]
        _require(
            isinstance(self.params, expected),
            f"{self.role.value}/{self.family.value} model requires {expected.__name__}, "
            f"got {type(self.params).__name__}",
        )
        _require(math.isfinite(self.c) and self.c > 0, f"c must be positive, got {self.c}")
        if validate and self.family is Family.QUADRATIC:
            self._check_monotone()

    def _check_monotone(self) -> None:
        # Non-decreasing on the box means the gradient stays nonnegative at the
        # worst corner: a(k) >= c * sum_{j: A(k,j) > 0} A(k,j) for sales and
        # b(k) >= -c * sum_{j: B(k,j) < 0} B(k,j) for production.
        if self.role is Role.SALES:
            margin = self.params.a - self.c * np.maximum(self.params.A, 0.0).sum(axis=1)
        else:
            margin = self.params.b + self.c * np.minimum(self.params.B, 0.0).sum(axis=1)
        _require(
            bool(np.all(margin >= -1e-9)),
            f"{self.role.value} model is not non-decreasing on the box "
            f"(worst margin {float(margin.min())})",
        )

    @property
    def d(self) -> int:
        if self.family is Family.POWER:
            return 1
        if self.role is Role.SALES:
            return int(self.params.a.size)
        return int(self.params.b.size)


@dataclass(frozen=True)
class RegularityConstants:
    """Curvature and Lipschitz summary of a firm instance.

    sigma: smallest strong convexity/concavity modulus across divisions.
    K: Lipschitz constant of the total profit on the product of the boxes.
    kappa: smoothness of the dual objective (sum of reciprocal moduli).
    Kprime: largest sales-side Lipschitz constant; b_bound = Kprime + 1 caps
    the price iterates.
    """

    sigma: float
    K: float
    kappa: float
    Kprime: float
    b_bound: float

    def __post_init__(self) -> None:
        for name in ("sigma", "K", "kappa", "Kprime", "b_bound"):
            value = getattr(self, name)
            _require(math.isfinite(value) and value > 0, f"{name} must be positive, got {value}")
        _require(
            abs(self.b_bound - (self.Kprime + 1.0)) <= 1e-12 * max(1.0, self.Kprime),
            "b_bound must equal Kprime + 1",
        )


# ---------------------------------------------------------------------------
# Vectorized closed forms shared by the per-division API and the firm batches.
# ---------------------------------------------------------------------------


def _power_value(q, scale, expo, shift):
    return (scale / expo) * ((q + shift) ** expo - shift**expo)


def _power_sales_response(lam, A, alpha, eps1, c):
    """Maximizer of f(x) - lam*x over [0, c] for the power revenue family.

    Marginal revenue runs from A*eps1**(alpha-1) at x = 0 down to
    A*(c+eps1)**(alpha-1) at x = c; prices above the first give x = 0, prices
    below the second give x = c, and in between the first-order condition pins
    x = (A/lam)**(1/(1-alpha)) - eps1.
    """
    hi = A * eps1 ** (alpha - 1.0)
    lo = A * (c + eps1) ** (alpha - 1.0)
    lam_safe = np.clip(lam, lo, hi)
    interior = np.clip((A / lam_safe) ** (1.0 / (1.0 - alpha)) - eps1, 0.0, c)
    return np.where(lam >= hi, 0.0, np.where(lam <= lo, c, interior))


def _power_production_response(lam, B, beta, eps2, c):
    """Maximizer of lam*y - g(y) over [0, c] for the power cost family."""
    lo = B * eps2 ** (beta - 1.0)
    hi = B * (c + eps2) ** (beta - 1.0)
    lam_safe = np.clip(lam, lo, hi)
    interior = np.clip((lam_safe / B) ** (1.0 / (beta - 1.0)) - eps2, 0.0, c)
    return np.where(lam <= lo, 0.0, np.where(lam >= hi, c, interior))


def _box_qp_exact_batch(linear: np.ndarray, P: np.ndarray, Pinv, c: float) -> np.ndarray:
    """Exact maximizers of <q, x> - 0.5 <P x, x> over [0, c]^d for a batch, d <= 2.

    Concavity means the optimum is either the unconstrained stationary point or
    the optimum of a one-dimensional face restriction, so taking the best of
    that candidate set is exact up to rounding.
    """
    count, d = linear.shape
    if d == 1:
        x = np.clip(linear[:, 0] / P[:, 0, 0], 0.0, c)
        return x[:, None]
    if d != 2:
        raise ValueError("exact box-QP path only supports d <= 2")
    if Pinv is None:
        Pinv = np.linalg.inv(P)
    q1, q2 = linear[:, 0], linear[:, 1]
    p11, p22 = P[:, 0, 0], P[:, 1, 1]
    p12, p21 = P[:, 0, 1], P[:, 1, 0]
    cand = np.empty((count, 5, 2))
    cand[:, 0, :] = np.clip(np.einsum("kij,kj->ki", Pinv, linear), 0.0, c)
    cand[:, 1, 0] = 0.0
    cand[:, 1, 1] = np.clip(q2 / p22, 0.0, c)
    cand[:, 2, 0] = c
    cand[:, 2, 1] = np.clip((q2 - c * p21) / p22, 0.0, c)
    cand[:, 3, 1] = 0.0
    cand[:, 3, 0] = np.clip(q1 / p11, 0.0, c)
    cand[:, 4, 1] = c
    cand[:, 4, 0] = np.clip((q1 - c * p12) / p11, 0.0, c)
    values = np.einsum("kd,kjd->kj", linear, cand) - 0.5 * np.einsum(
        "kjd,kde,kje->kj", cand, P, cand
    )
    best = np.argmax(values, axis=1)
    return cand[np.arange(count), best, :]


def box_qp_maximize(linear, curvature, c: float, tol: float = 1e-7, max_iter: int = 100_000) -> np.ndarray:
    """Approximate maximizer of <linear, x> - 0.5 <curvature x, x> over [0, c]^d.

    Projected gradient ascent with step 1/L, where L is the Gershgorin row-sum
    bound on the top eigenvalue of ``curvature``; stops once the projected
    gradient norm falls to ``tol``.

    Raises ConvergenceError (carrying the iteration count) if the cap is hit.
    """
    q = np.atleast_1d(np.asarray(linear, dtype=float))
    P = np.asarray(curvature, dtype=float)
    d = q.size
    _require(q.ndim == 1, "linear must be a vector")
    _require(P.shape == (d, d), f"curvature must have shape ({d}, {d}), got {P.shape}")
    _require(bool(np.all(np.isfinite(q))) and bool(np.all(np.isfinite(P))), "non-finite inputs")
    scale = float(np.max(np.abs(P))) or 1.0
    _require(bool(np.all(np.abs(P - P.T) <= 1e-10 * scale)), "curvature must be symmetric")
    _require(math.isfinite(c) and c > 0, f"c must be positive, got {c}")
    _require(tol > 0, f"tol must be positive, got {tol}")
    step = 1.0 / float(np.max(np.sum(np.abs(P), axis=1)))
    x = np.zeros(d)
    for _ in range(max_iter):
        grad = q - P @ x
        x_next = np.clip(x + step * grad, 0.0, c)
        if float(np.linalg.norm((x_next - x) / step)) <= tol:
            return x_next
        x = x_next
    raise ConvergenceError(
        f"projected gradient did not reach tol={tol} within {max_iter} iterations",
        iterations=max_iter,
    )


# ---------------------------------------------------------------------------
# Per-division API.
# ---------------------------------------------------------------------------


def _as_bundle(q, d: int, c: float) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(q, dtype=float))
    _require(arr.shape == (d,), f"bundle must have shape ({d},), got {arr.shape}")
    _require(bool(np.all(np.isfinite(arr))), "bundle has non-finite entries")
    _require(
        bool(np.all(arr >= -_BOX_SLACK)) and bool(np.all(arr <= c + _BOX_SLACK)),
        f"bundle lies outside the box [0, {c}]^{d}",
    )
    return arr


def _as_price(lam, d: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(lam, dtype=float))
    _require(arr.shape == (d,), f"price must have shape ({d},), got {arr.shape}")
    _require(bool(np.all(np.isfinite(arr))), "price has non-finite entries")
    return arr


def evaluate(model: DivisionModel, q) -> float:
    """Revenue f(q) of a sales model or cost g(q) of a production model."""
    q = _as_bundle(q, model.d, model.c)
    p = model.params
    if model.family is Family.POWER:
        if model.role is Role.SALES:
            return float(_power_value(q[0], p.A, p.alpha, p.eps1))
        return float(_power_value(q[0], p.B, p.beta, p.eps2))
    if model.role is Role.SALES:
        return float(p.a @ q - 0.5 * (q @ p.A @ q))
    return float(p.b @ q + 0.5 * (q @ p.B @ q))


def best_response_sales(model: DivisionModel, lam) -> np.ndarray:
    """Unique maximizer of f(x) - <lam, x> over the box for a sales model."""
    _require(model.role is Role.SALES, "model role must be sales")
    lam = _as_price(lam, model.d)
    p = model.params
    if model.family is Family.POWER:
        x = _power_sales_response(lam[0], p.A, p.alpha, p.eps1, model.c)
        return np.atleast_1d(np.asarray(x, dtype=float))
    linear = p.a - lam
    if model.d <= 2:
        return _box_qp_exact_batch(linear[None, :], p.A[None, :, :], None, model.c)[0]
    return box_qp_maximize(linear, p.A, model.c)


def best_response_production(model: DivisionModel, lam) -> np.ndarray:
    """Unique maximizer of <lam, y> - g(y) over the box for a production model."""
    _require(model.role is Role.PRODUCTION, "model role must be production")
    lam = _as_price(lam, model.d)
    p = model.params
    if model.family is Family.POWER:
        y = _power_production_response(lam[0], p.B, p.beta, p.eps2, model.c)
        return np.atleast_1d(np.asarray(y, dtype=float))
    linear = lam - p.b
    if model.d <= 2:
        return _box_qp_exact_batch(linear[None, :], p.B[None, :, :], None, model.c)[0]
    return box_qp_maximize(linear, p.B, model.c)


# ---------------------------------------------------------------------------
# Regularity constants.
# ---------------------------------------------------------------------------


def strong_modulus(model: DivisionModel) -> float:
    """Strong concavity (sales) or convexity (production) modulus on the box."""
    p = model.params
    if model.family is Family.POWER:
        if model.role is Role.SALES:
            # |f''| = A (1-alpha) (x+eps1)**(alpha-2) is smallest at x = c.
            return float(p.A * (1.0 - p.alpha) * (model.c + p.eps1) ** (p.alpha - 2.0))
        # g'' = B (beta-1) (y+eps2)**(beta-2); the minimizing endpoint depends
        # on the sign of beta - 2.
        return float(
            p.B
            * (p.beta - 1.0)
            * min(p.eps2 ** (p.beta - 2.0), (model.c + p.eps2) ** (p.beta - 2.0))
        )
    mat = p.A if model.role is Role.SALES else p.B
    return float(np.linalg.eigvalsh(mat)[0])


def lipschitz_bound(model: DivisionModel) -> float:
    """Upper bound on the gradient norm of f or g over the box."""
    p = model.params
    if model.family is Family.POWER:
        if model.role is Role.SALES:
            return float(p.A * p.eps1 ** (p.alpha - 1.0))  # f' peaks at x = 0
        return float(p.B * (model.c + p.eps2) ** (p.beta - 1.0))  # g' peaks at y = c
    # Componentwise extremes of the affine gradient over the box; with the
    # monotone margin the lower extreme is nonnegative, so the upper one
    # dominates in absolute value.
    if model.role is Role.SALES:
        hi = p.a - model.c * np.minimum(p.A, 0.0).sum(axis=1)
    else:
        hi = p.b + model.c * np.maximum(p.B, 0.0).sum(axis=1)
    return float(np.linalg.norm(hi))


def regularity_constants(instance: "FirmInstance") -> RegularityConstants:
    """Aggregate curvature/Lipschitz constants of a firm instance."""
    moduli = [strong_modulus(m) for m in instance.sales + instance.production]
    sigma = min(moduli)
    if not (math.isfinite(sigma) and sigma > 0):
        raise ValueError(f"degenerate strong-convexity modulus {sigma}")
    k_sales = [lipschitz_bound(m) for m in instance.sales]
    k_prod = [lipschitz_bound(m) for m in instance.production]
    total = math.sqrt(sum(k * k for k in k_sales) + sum(k * k for k in k_prod))
    kappa = sum(1.0 / s for s in moduli)
    kprime = max(k_sales)
    return RegularityConstants(sigma=sigma, K=total, kappa=kappa, Kprime=kprime, b_bound=kprime + 1.0)
