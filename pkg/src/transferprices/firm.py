"""Firm-level aggregation: stimulated plans, excess supply (the dual gradient),
primal and dual objective values, and the Lagrangian.

Divisions are grouped by (role, family) at construction time so that firm-wide
queries run as a handful of vectorized operations instead of per-division
Python loops.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .divisions import (
    DivisionModel,
    Family,
    Role,
    _as_price,
    _box_qp_exact_batch,
    _power_production_response,
    _power_sales_response,
    _power_value,
    _require,
    box_qp_maximize,
)

__all__ = [
    "FirmInstance",
    "Plan",
    "PricePoint",
    "stimulated_plan",
    "excess_supply",
    "primal_value",
    "dual_value",
    "lagrangian",
    "evaluate_price",
    "max_sales_lipschitz",
]

_BOX_SLACK = 1e-12


class _PowerBatch:
    """All power-family divisions of one role, stacked."""

    __slots__ = ("idx", "scale", "expo", "shift", "sales")

    def __init__(self, idx, scale, expo, shift, sales: bool):
        self.idx = np.asarray(idx, dtype=np.intp)
        self.sales = sales
        self.scale = np.asarray(scale, dtype=float)
        self.expo = np.asarray(expo, dtype=float)
        self.shift = np.asarray(shift, dtype=float)

    @classmethod
    def from_models(cls, idx, models, sales: bool) -> "_PowerBatch":
        if sales:
            params = [(m.params.A, m.params.alpha, m.params.eps1) for m in models]
        else:
            params = [(m.params.B, m.params.beta, m.params.eps2) for m in models]
        scale, expo, shift = (np.array(col) for col in zip(*params))
        return cls(idx, scale, expo, shift, sales)

    def respond(self, lam: np.ndarray, c: float) -> np.ndarray:
        if self.sales:
            q = _power_sales_response(lam[0], self.scale, self.expo, self.shift, c)
        else:
            q = _power_production_response(lam[0], self.scale, self.expo, self.shift, c)
        return q[:, None]

    def value(self, q: np.ndarray) -> np.ndarray:
        return _power_value(q[:, 0], self.scale, self.expo, self.shift)

    def lipschitz(self, c: float) -> np.ndarray:
        if self.sales:
            return self.scale * self.shift ** (self.expo - 1.0)
        return self.scale * (c + self.shift) ** (self.expo - 1.0)


class _QuadBatch:
    """All quadratic-family divisions of one role, stacked."""

    __slots__ = ("idx", "lin", "P", "Pinv", "sales")

    def __init__(self, idx, lin, P, sales: bool):
        self.idx = np.asarray(idx, dtype=np.intp)
        self.sales = sales
        self.lin = np.asarray(lin, dtype=float)
        self.P = np.asarray(P, dtype=float)
        d = self.lin.shape[1]
        self.Pinv = np.linalg.inv(self.P) if d == 2 else None

    @classmethod
    def from_models(cls, idx, models, sales: bool) -> "_QuadBatch":
        if sales:
            lin = np.stack([m.params.a for m in models])
            P = np.stack([m.params.A for m in models])
        else:
            lin = np.stack([m.params.b for m in models])
            P = np.stack([m.params.B for m in models])
        return cls(idx, lin, P, sales)

    def respond(self, lam: np.ndarray, c: float) -> np.ndarray:
        linear = (self.lin - lam[None, :]) if self.sales else (lam[None, :] - self.lin)
        d = linear.shape[1]
        if d <= 2:
            return _box_qp_exact_batch(linear, self.P, self.Pinv, c)
        return np.stack([box_qp_maximize(linear[i], self.P[i], c) for i in range(linear.shape[0])])

    def value(self, q: np.ndarray) -> np.ndarray:
        quad = 0.5 * np.einsum("kd,kde,ke->k", q, self.P, q)
        lin = np.einsum("kd,kd->k", self.lin, q)
        return lin - quad if self.sales else lin + quad

    def lipschitz(self, c: float) -> np.ndarray:
        if self.sales:
            hi = self.lin - c * np.minimum(self.P, 0.0).sum(axis=2)
        else:
            hi = self.lin + c * np.maximum(self.P, 0.0).sum(axis=2)
        return np.linalg.norm(hi, axis=1)


def _build_batches(models: tuple[DivisionModel, ...], sales: bool):
    power_idx = [i for i, m in enumerate(models) if m.family is Family.POWER]
    quad_idx = [i for i, m in enumerate(models) if m.family is Family.QUADRATIC]
    batches = []
    if power_idx:
        batches.append(_PowerBatch.from_models(power_idx, [models[i] for i in power_idx], sales))
    if quad_idx:
        batches.append(_QuadBatch.from_models(quad_idx, [models[i] for i in quad_idx], sales))
    return tuple(batches)


@dataclass(frozen=True, eq=False)
class FirmInstance:
    """A static firm: m sales and n production divisions trading d commodities,
    every division constrained to the box [0, c]^d."""

    d: int
    sales: tuple[DivisionModel, ...]
    production: tuple[DivisionModel, ...]
    c: float
    eps: float = 0.1

    def __post_init__(self) -> None:
        object.__setattr__(self, "sales", tuple(self.sales))
        object.__setattr__(self, "production", tuple(self.production))
        _require(self.d >= 1, f"d must be at least 1, got {self.d}")
        _require(len(self.sales) >= 1, "need at least one sales division")
        _require(len(self.production) >= 1, "need at least one production division")
        _require(self.c > 0, f"c must be positive, got {self.c}")
        _require(0 < self.eps <= self.c, f"eps must lie in (0, c], got {self.eps}")
        for role, models in ((Role.SALES, self.sales), (Role.PRODUCTION, self.production)):
            for m in models:
                _require(m.role is role, f"{role.value} list contains a {m.role.value} model")
                _require(m.d == self.d, f"model dimension {m.d} does not match firm d={self.d}")
                _require(m.c == self.c, f"model box bound {m.c} does not match firm c={self.c}")
        object.__setattr__(self, "_sales_batches", _build_batches(self.sales, sales=True))
        object.__setattr__(self, "_production_batches", _build_batches(self.production, sales=False))

    @property
    def m(self) -> int:
        return len(self.sales)

    @property
    def n(self) -> int:
        return len(self.production)


@dataclass(frozen=True, eq=False)
class Plan:
    """Quantities chosen by every division: x is (m, d) sales, y is (n, d)
    production. Feasibility (total sales = total production) is not required of
    an arbitrary plan."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        _require(x.ndim == 2 and y.ndim == 2, "plan arrays must be 2-D (divisions, commodities)")
        _require(x.shape[1] == y.shape[1], "sales and production commodity counts differ")
        _require(bool(np.all(np.isfinite(x))) and bool(np.all(np.isfinite(y))), "plan has non-finite entries")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True, eq=False)
class PricePoint:
    """Everything the coordinator needs at one price: the stimulated plan, the
    excess supply (dual gradient), and the primal/dual objective values."""

    plan: Plan
    excess: np.ndarray
    primal: float
    dual: float


def _respond_all(instance: FirmInstance, lam: np.ndarray):
    x = np.empty((instance.m, instance.d))
    for batch in instance._sales_batches:
        x[batch.idx] = batch.respond(lam, instance.c)
    y = np.empty((instance.n, instance.d))
    for batch in instance._production_batches:
        y[batch.idx] = batch.respond(lam, instance.c)
    return x, y


def _check_plan(instance: FirmInstance, plan: Plan) -> None:
    _require(
        plan.x.shape == (instance.m, instance.d),
        f"plan.x has shape {plan.x.shape}, expected {(instance.m, instance.d)}",
    )
    _require(
        plan.y.shape == (instance.n, instance.d),
        f"plan.y has shape {plan.y.shape}, expected {(instance.n, instance.d)}",
    )
    hi = instance.c + _BOX_SLACK
    ok = (
        bool(np.all(plan.x >= -_BOX_SLACK))
        and bool(np.all(plan.x <= hi))
        and bool(np.all(plan.y >= -_BOX_SLACK))
        and bool(np.all(plan.y <= hi))
    )
    _require(ok, f"plan lies outside the box [0, {instance.c}]^{instance.d}")


def _primal(instance: FirmInstance, x: np.ndarray, y: np.ndarray) -> float:
    total = 0.0
    for batch in instance._sales_batches:
        total += float(np.sum(batch.value(x[batch.idx])))
    for batch in instance._production_batches:
        total -= float(np.sum(batch.value(y[batch.idx])))
    return total


def stimulated_plan(instance: FirmInstance, lam) -> Plan:
    """Component-wise best responses of every division to the price lam."""
    lam = _as_price(lam, instance.d)
    x, y = _respond_all(instance, lam)
    return Plan(x=x, y=y)


def excess_supply(instance: FirmInstance, lam) -> np.ndarray:
    """Total production minus total sales at the stimulated plan.

    This is the gradient of the dual objective at lam.
    """
    lam = _as_price(lam, instance.d)
    x, y = _respond_all(instance, lam)
    return y.sum(axis=0) - x.sum(axis=0)


def primal_value(instance: FirmInstance, plan: Plan) -> float:
    """Total profit F(x, y) = sum_i f_i(x_i) - sum_j g_j(y_j)."""
    _check_plan(instance, plan)
    return _primal(instance, plan.x, plan.y)


def lagrangian(instance: FirmInstance, plan: Plan, lam) -> float:
    """F(x, y) + <lam, total production - total sales>."""
    lam = _as_price(lam, instance.d)
    _check_plan(instance, plan)
    F = _primal(instance, plan.x, plan.y)
    return F + float(lam @ (plan.y.sum(axis=0) - plan.x.sum(axis=0)))


def dual_value(instance: FirmInstance, lam) -> float:
    """G(lam): the Lagrangian evaluated at the stimulated plan."""
    lam = _as_price(lam, instance.d)
    return lagrangian(instance, stimulated_plan(instance, lam), lam)


def evaluate_price(instance: FirmInstance, lam) -> PricePoint:
    """Stimulated plan plus excess supply and both objective values, in one pass."""
    lam = _as_price(lam, instance.d)
    x, y = _respond_all(instance, lam)
    excess = y.sum(axis=0) - x.sum(axis=0)
    F = _primal(instance, x, y)
    G = F + float(lam @ excess)
    return PricePoint(plan=Plan(x=x, y=y), excess=excess, primal=F, dual=G)


def max_sales_lipschitz(instance: FirmInstance) -> float:
    """Largest sales-side gradient bound, computed on the batched parameters."""
    best = 0.0
    for batch in instance._sales_batches:
        best = max(best, float(batch.lipschitz(instance.c).max()))
    return best


def _batch_point(sales_batch, production_batch, lam: np.ndarray, c: float):
    """(excess, F, G) for a firm given as one batch per role.

    Same arithmetic as evaluate_price on an instance whose divisions sit in a
    single batch each, so results match that path bit for bit.
    """
    x = sales_batch.respond(lam, c)
    y = production_batch.respond(lam, c)
    excess = y.sum(axis=0) - x.sum(axis=0)
    F = float(np.sum(sales_batch.value(x))) - float(np.sum(production_batch.value(y)))
    G = F + float(lam @ excess)
    return excess, F, G
