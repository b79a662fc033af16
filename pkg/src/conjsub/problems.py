"""Test problems with known optimal values.

Every objective is an immutable callable ``x -> (value, subgradient)``;
:meth:`ProblemSpec.oracle` wraps it in a fresh counting oracle.  At kinks
of max-type functions the smallest maximizing index is used, so values
and subgradients are fully deterministic.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import SubgradientOracle, as_vector

__all__ = [
    "ProblemSpec",
    "ShorObjective",
    "L1Objective",
    "MaxQObjective",
    "QuadraticObjective",
    "shor_problem",
    "l1_problem",
    "maxq_problem",
    "quadratic_problem",
    "get_problem",
    "PROBLEMS",
    "SHOR_A",
    "SHOR_B",
    "SHOR_CHECKSUM",
]

# Shor's piecewise quadratic test problem: 10 weighted squared distances in R^5.
SHOR_A = np.array(
    [
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [2.0, 1.0, 1.0, 1.0, 3.0],
        [1.0, 2.0, 1.0, 1.0, 2.0],
        [1.0, 4.0, 1.0, 2.0, 2.0],
        [3.0, 2.0, 1.0, 0.0, 1.0],
        [0.0, 2.0, 1.0, 0.0, 1.0],
        [1.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, 1.0, 2.0, 1.0],
        [0.0, 0.0, 2.0, 1.0, 0.0],
        [1.0, 1.0, 2.0, 0.0, 0.0],
    ]
)
SHOR_B = np.array([1.0, 5.0, 10.0, 2.0, 4.0, 3.0, 1.7, 2.5, 6.0, 3.5])
SHOR_F_STAR = 22.60016
# KKT point of the active pieces 2, 4, 5, 9 (1-based); f there is 22.6001620957709
SHOR_X_STAR = np.array(
    [
        1.1243510101866154,
        0.9794615993136555,
        1.4777077519642634,
        0.9202334858848576,
        1.1242915880048427,
    ]
)
SHOR_X0 = np.array([0.0, 0.0, 0.0, 0.0, 1.0])
SHOR_CHECKSUM = "125466629399cdf546d263a9f60d561b"


def _data_checksum(a: np.ndarray, b: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(a, dtype="<f8").tobytes())
    h.update(np.ascontiguousarray(b, dtype="<f8").tobytes())
    return h.hexdigest()[:32]


@dataclass(frozen=True, eq=False)
class ShorObjective:
    """``f(x) = max_i b_i ||x - a_i||^2``."""

    centers: np.ndarray = SHOR_A
    weights: np.ndarray = SHOR_B

    def __call__(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        diff = x - self.centers
        vals = self.weights * np.einsum("ij,ij->i", diff, diff)
        i = int(np.argmax(vals))
        return float(vals[i]), 2.0 * self.weights[i] * diff[i]

    def pieces(self, x: np.ndarray) -> np.ndarray:
        diff = np.asarray(x) - self.centers
        return self.weights * np.einsum("ij,ij->i", diff, diff)


@dataclass(frozen=True)
class L1Objective:
    """``f(x) = sum |x_i|`` with ``sign(0) = 0``."""

    def __call__(self, x):
        return float(np.sum(np.abs(x))), np.sign(x)


@dataclass(frozen=True)
class MaxQObjective:
    """``f(x) = max_i x_i^2``."""

    def __call__(self, x):
        sq = x * x
        i = int(np.argmax(sq))
        g = np.zeros_like(x)
        g[i] = 2.0 * x[i]
        return float(sq[i]), g


@dataclass(frozen=True, eq=False)
class QuadraticObjective:
    """``f(x) = 0.5 * sum c_i x_i^2``."""

    curvatures: np.ndarray

    def __call__(self, x):
        cx = self.curvatures * x
        return 0.5 * float(np.dot(cx, x)), cx


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    name: str
    dimension: int
    objective: Callable[[np.ndarray], tuple[float, np.ndarray]]
    x0_default: np.ndarray
    f_star: Optional[float] = None
    x_star: Optional[np.ndarray] = None

    def oracle(self) -> SubgradientOracle:
        """A fresh counting oracle for one run."""
        return SubgradientOracle(self.objective, self.dimension, self.f_star)

    def value(self, x) -> float:
        return self.objective(as_vector(x, self.dimension))[0]


def shor_problem() -> ProblemSpec:
    return ProblemSpec(
        name="shor",
        dimension=5,
        objective=ShorObjective(),
        x0_default=SHOR_X0.copy(),
        f_star=SHOR_F_STAR,
        x_star=SHOR_X_STAR.copy(),
    )


def _check_dim(dimension: int) -> int:
    if int(dimension) < 1:
        raise ValueError("dimension must be >= 1")
    return int(dimension)


def l1_problem(dimension: int = 3) -> ProblemSpec:
    n = _check_dim(dimension)
    x0 = np.linspace(1.0, -2.0, n) if n > 1 else np.ones(1)
    return ProblemSpec(f"l1:{n}", n, L1Objective(), x0, 0.0, np.zeros(n))


def maxq_problem(dimension: int = 5) -> ProblemSpec:
    n = _check_dim(dimension)
    x0 = np.arange(1.0, n + 1.0)
    return ProblemSpec(f"maxq:{n}", n, MaxQObjective(), x0, 0.0, np.zeros(n))


def quadratic_problem(dimension: int = 2, kappa: float = 1.0, L: Optional[float] = None) -> ProblemSpec:
    """Separable quadratic with curvatures spread evenly over ``[kappa, L]``.

    ``L`` defaults to ``4 * kappa``.
    """
    n = _check_dim(dimension)
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    L = 4.0 * kappa if L is None else float(L)
    if L < kappa:
        raise ValueError("L must be >= kappa")
    c = np.linspace(kappa, L, n) if n > 1 else np.array([kappa])
    return ProblemSpec(f"quadratic:{n}", n, QuadraticObjective(c), np.ones(n), 0.0, np.zeros(n))


PROBLEMS = {
    "shor": shor_problem,
    "l1": l1_problem,
    "maxq": maxq_problem,
    "quadratic": quadratic_problem,
}


def get_problem(name: str, dimension: Optional[int] = None) -> ProblemSpec:
    """Look up a catalog problem; ``"l1:4"`` is shorthand for ``("l1", 4)``."""
    base, _, suffix = name.partition(":")
    if base not in PROBLEMS:
        raise KeyError(f"unknown problem {name!r}; available: {', '.join(PROBLEMS)}")
    if suffix:
        if dimension is not None and int(suffix) != dimension:
            raise ValueError(f"conflicting dimensions for {name!r}: {dimension}")
        dimension = int(suffix)
    if base == "shor":
        if dimension not in (None, 5):
            raise ValueError("shor is defined in dimension 5 only")
        return shor_problem()
    factory = PROBLEMS[base]
    return factory() if dimension is None else factory(dimension)
