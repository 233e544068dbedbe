"""Columnar per-round run logs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["TraceRecord", "Trace"]


@dataclass(frozen=True, eq=False)
class TraceRecord:
    """One round of a run: price played, observed excess supply, objective
    values, the running average of the excess, and optional diagnostics."""

    t: int
    lam: np.ndarray
    excess: np.ndarray
    primal: float
    dual: float
    avg_excess: np.ndarray
    oracle_gap: float | None = None
    eval_point: np.ndarray | None = None


class Trace:
    """Per-round log stored column-wise.

    Columns are preallocated to ``capacity`` rows and trimmed views are exposed
    once rows are appended; ``record(i)`` assembles a TraceRecord on demand.
    """

    def __init__(self, capacity: int, d: int, oracle_gap: bool = False, eval_points: bool = False):
        if capacity < 1:
            raise ValueError(f"capacity must be at least 1, got {capacity}")
        if d < 1:
            raise ValueError(f"d must be at least 1, got {d}")
        self.d = d
        self._n = 0
        self._t = np.zeros(capacity, dtype=np.int64)
        self._lam = np.zeros((capacity, d))
        self._excess = np.zeros((capacity, d))
        self._primal = np.zeros(capacity)
        self._dual = np.zeros(capacity)
        self._avg_excess = np.zeros((capacity, d))
        self._oracle_gap = np.zeros(capacity) if oracle_gap else None
        self._eval = np.zeros((capacity, d)) if eval_points else None

    def append(self, t, lam, excess, primal, dual, avg_excess, oracle_gap=None, eval_point=None) -> None:
        i = self._n
        if i >= self._t.size:
            raise ValueError("trace capacity exhausted")
        if i > 0 and t <= self._t[i - 1]:
            raise ValueError(f"round indices must increase, got {t} after {self._t[i - 1]}")
        lam = np.asarray(lam, dtype=float)
        excess = np.asarray(excess, dtype=float)
        if lam.shape != (self.d,):
            raise ValueError(f"price must have shape ({self.d},), got {lam.shape}")
        if excess.shape != (self.d,):
            raise ValueError(f"excess must have shape ({self.d},), got {excess.shape}")
        self._t[i] = t
        self._lam[i] = lam
        self._excess[i] = excess
        self._primal[i] = primal
        self._dual[i] = dual
        self._avg_excess[i] = avg_excess
        if self._oracle_gap is not None:
            if oracle_gap is None:
                raise ValueError("trace expects an oracle_gap value per row")
            self._oracle_gap[i] = oracle_gap
        elif oracle_gap is not None:
            raise ValueError("trace was created without an oracle_gap column")
        if self._eval is not None:
            if eval_point is None:
                raise ValueError("trace expects an eval_point value per row")
            self._eval[i] = eval_point
        self._n = i + 1

    def __len__(self) -> int:
        return self._n

    @property
    def has_oracle_gap(self) -> bool:
        return self._oracle_gap is not None

    @property
    def t(self) -> np.ndarray:
        return self._t[: self._n]

    @property
    def lam(self) -> np.ndarray:
        return self._lam[: self._n]

    @property
    def excess(self) -> np.ndarray:
        return self._excess[: self._n]

    @property
    def primal(self) -> np.ndarray:
        return self._primal[: self._n]

    @property
    def dual(self) -> np.ndarray:
        return self._dual[: self._n]

    @property
    def avg_excess(self) -> np.ndarray:
        return self._avg_excess[: self._n]

    @property
    def oracle_gap(self) -> np.ndarray | None:
        return None if self._oracle_gap is None else self._oracle_gap[: self._n]

    @property
    def eval_points(self) -> np.ndarray | None:
        return None if self._eval is None else self._eval[: self._n]

    def record(self, i: int) -> TraceRecord:
        if not -self._n <= i < self._n:
            raise IndexError(f"row {i} out of range for trace of length {self._n}")
        if i < 0:
            i += self._n
        return TraceRecord(
            t=int(self._t[i]),
            lam=self._lam[i].copy(),
            excess=self._excess[i].copy(),
            primal=float(self._primal[i]),
            dual=float(self._dual[i]),
            avg_excess=self._avg_excess[i].copy(),
            oracle_gap=None if self._oracle_gap is None else float(self._oracle_gap[i]),
            eval_point=None if self._eval is None else self._eval[i].copy(),
        )

    def __iter__(self):
        for i in range(self._n):
            yield self.record(i)

    def with_oracle_gap(self, values) -> "Trace":
        """Copy of this trace with the oracle_gap column set to ``values``."""
        gaps = np.asarray(values, dtype=float)
        if gaps.shape != (self._n,):
            raise ValueError(f"expected {self._n} gap values, got shape {gaps.shape}")
        out = Trace(max(self._n, 1), self.d, oracle_gap=True, eval_points=self._eval is not None)
        out._t[: self._n] = self.t
        out._lam[: self._n] = self.lam
        out._excess[: self._n] = self.excess
        out._primal[: self._n] = self.primal
        out._dual[: self._n] = self.dual
        out._avg_excess[: self._n] = self.avg_excess
        out._oracle_gap[: self._n] = gaps
        if self._eval is not None:
            out._eval[: self._n] = self.eval_points
        out._n = self._n
        return out
