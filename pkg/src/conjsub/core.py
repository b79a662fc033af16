"""Vectors, the counting subgradient oracle, and run/trace records.

Vectors are plain 1-D ``float64`` numpy arrays.  Objectives are pure
callables ``x -> (value, subgradient)``; :class:`SubgradientOracle` wraps
one and counts calls so that problem definitions stay side-effect free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

__all__ = [
    "DimensionError",
    "NonFiniteError",
    "Evaluation",
    "SubgradientOracle",
    "StoppingRule",
    "IterationRecord",
    "RunResult",
    "as_vector",
    "dot",
    "norm",
    "evaluate",
]


class DimensionError(ValueError):
    """Vectors of incompatible dimension were combined."""


class NonFiniteError(ArithmeticError):
    """A NaN or infinity showed up in solver state."""


def as_vector(x, dimension: Optional[int] = None) -> np.ndarray:
    """Copy `x` into a finite 1-D float64 array, checking its dimension."""
    v = np.array(x, dtype=np.float64).reshape(-1)
    if dimension is not None and v.shape[0] != dimension:
        raise DimensionError(f"expected dimension {dimension}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"vector has non-finite entries: {v}")
    return v


def dot(a: np.ndarray, b: np.ndarray) -> float:
    if np.shape(a) != np.shape(b):
        raise DimensionError(f"dimension mismatch: {np.shape(a)} vs {np.shape(b)}")
    return float(np.dot(a, b))


def norm(a: np.ndarray) -> float:
    return float(np.sqrt(np.dot(a, a)))


class Evaluation(NamedTuple):
    value: float
    subgradient: np.ndarray


class SubgradientOracle:
    """Counting wrapper around an objective ``x -> (f(x), g)`` with g in the subdifferential.

    Parameters
    ----------
    objective : callable
        Pure function returning the value and one subgradient at ``x``.
    dimension : int
        Dimension of the domain.
    known_optimum : float, optional
        Optimal value f*, when known; used by gap-based stopping rules.
    """

    def __init__(
        self,
        objective: Callable[[np.ndarray], tuple[float, np.ndarray]],
        dimension: int,
        known_optimum: Optional[float] = None,
    ):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.objective = objective
        self.dimension = int(dimension)
        self.known_optimum = known_optimum
        self.eval_count = 0

    def __call__(self, x: np.ndarray) -> Evaluation:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dimension,):
            raise DimensionError(f"expected shape ({self.dimension},), got {x.shape}")
        if not all_finite(x):
            raise ValueError(f"oracle queried at non-finite point {x}")
        self.eval_count += 1
        value, g = self.objective(x)
        return Evaluation(float(value), np.asarray(g, dtype=np.float64))

    def __repr__(self) -> str:
        return (
            f"SubgradientOracle({self.objective!r}, dimension={self.dimension}, "
            f"eval_count={self.eval_count})"
        )


def evaluate(oracle: SubgradientOracle, x: np.ndarray) -> Evaluation:
    return oracle(x)


@dataclass(frozen=True)
class StoppingRule:
    """When a run ends.

    The methods never terminate on their own: a run stops when the
    evaluation budget is spent or, if `f_star` is known, once the record
    value is within the smallest of `targets` of it.  First-hit evaluation
    counts are recorded for every target along the way.
    """

    max_evals: int
    f_star: Optional[float] = None
    targets: tuple[float, ...] = ()

    def __post_init__(self):
        if self.max_evals < 1:
            raise ValueError("max_evals must be >= 1")
        if self.targets and self.f_star is None:
            raise ValueError("gap targets require a known optimal value")
        if any(not (e > 0) for e in self.targets):
            raise ValueError("targets must be positive")
        object.__setattr__(self, "targets", tuple(float(e) for e in self.targets))


class Progress:
    """Per-run bookkeeping of the record value against a :class:`StoppingRule`."""

    def __init__(self, rule: StoppingRule, oracle: SubgradientOracle):
        self.rule = rule
        self.oracle = oracle
        self.start = oracle.eval_count
        self.best = math.inf
        self.hits: dict[float, int] = {}
        self._pending = sorted(rule.targets, reverse=True)

    @property
    def evals(self) -> int:
        return self.oracle.eval_count - self.start

    def budget_left(self) -> bool:
        return self.evals < self.rule.max_evals

    def record(self, phi: float) -> None:
        """Note the record value right after an oracle call."""
        self.best = phi
        if self._pending and phi - self.rule.f_star <= self._pending[0]:
            n = self.evals
            while self._pending and phi - self.rule.f_star <= self._pending[0]:
                self.hits[self._pending.pop(0)] = n

    def done(self) -> bool:
        return bool(self.rule.targets) and not self._pending

    def termination(self) -> str:
        return "target" if self.done() else "budget"


@dataclass(slots=True)
class IterationRecord:
    """One trace row.

    For the conjugate subgradient engine a row describes one trial step:
    `f_x` is the value at the iterate the step starts from, `f_y` the
    trial value, `gp` the inner product of the new subgradient with the
    direction used, `b` the path length after the step, and `eta`/`d` the
    thresholds in force.  The baselines fill only the common fields.
    """

    k: int
    f_x: float
    phi_k: float
    p_norm: float
    lam: float
    events: tuple[str, ...]
    eval_count: int
    f_y: float = math.nan
    gp: float = math.nan
    b: float = math.nan
    eta: float = math.nan
    d: float = math.nan


@dataclass
class RunResult:
    best_point: np.ndarray
    best_value: float
    total_evals: int
    termination: str
    first_hits: dict[float, int] = field(default_factory=dict)
    trace: list[IterationRecord] = field(default_factory=list)
    trace_truncated: bool = False
    extras: dict = field(default_factory=dict)

    def gap(self, f_star: float) -> float:
        return self.best_value - f_star


class TraceBuffer:
    """List of records capped at `limit` entries (``None`` keeps everything)."""

    def __init__(self, limit: Optional[int] = None):
        self.limit = limit
        self.rows: list[IterationRecord] = []
        self.truncated = False

    def append(self, row: IterationRecord) -> None:
        if self.limit is not None and len(self.rows) >= self.limit:
            self.truncated = True
            return
        self.rows.append(row)


def all_finite(a) -> bool:
    # a finite sum implies finite entries; the full scan only runs otherwise
    if isinstance(a, float):
        return math.isfinite(a)
    return math.isfinite(a.sum()) or bool(np.isfinite(a).all())


def check_finite(name: str, k: int, *values) -> None:
    for a in values:
        if not all_finite(a):
            raise NonFiniteError(f"non-finite {name} at iteration {k}: {a}")
