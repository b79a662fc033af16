"""Reference subgradient schemes used for comparison.

All four evaluate the oracle once per iteration, at the current iterate,
and track the best value seen.

* :func:`run_sgm`: plain subgradient steps with ``lam0 / (k + 1)``.
* :func:`run_sgmt`: plain steps with ``lam / sqrt(k + 1)``,
  ``lam = ||x0 - x*|| / L``.
* :func:`run_asg`: simple dual averaging, ``x^{k+1} = x0 - lam_k * sum g``.
* :func:`run_dasg`: double averaging, a running convex combination of the
  dual-averaging points.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from ..core import (
    IterationRecord,
    Progress,
    RunResult,
    StoppingRule,
    SubgradientOracle,
    TraceBuffer,
    as_vector,
    check_finite,
    norm,
)

__all__ = ["run_sgm", "run_sgmt", "run_asg", "run_dasg"]

# update(k, x, g) -> (next iterate, step size used, norm of the direction used)
Update = Callable[[int, np.ndarray, np.ndarray], tuple[np.ndarray, float, float]]


def _iterate(oracle, x0, stop, update: Update, trace_limit) -> RunResult:
    x = as_vector(x0, oracle.dimension)
    progress = Progress(stop, oracle)
    trace = TraceBuffer(trace_limit)
    best_x, best_f = x, math.inf
    k = 0
    while progress.budget_left() and not progress.done():
        fx, g = oracle(x)
        check_finite("oracle output", k, g, fx)
        if fx < best_f:
            best_x, best_f = x, fx
        progress.record(best_f)
        if progress.done():
            trace.append(IterationRecord(k, fx, best_f, norm(g), 0.0, (), progress.evals))
            break
        x_next, lam, pn = update(k, x, g)
        check_finite("iterate", k, x_next)
        trace.append(IterationRecord(k, fx, best_f, pn, lam, (), progress.evals))
        x = x_next
        k += 1
    return RunResult(
        best_point=best_x.copy(),
        best_value=best_f,
        total_evals=progress.evals,
        termination=progress.termination(),
        first_hits=dict(progress.hits),
        trace=trace.rows,
        trace_truncated=trace.truncated,
        extras={"iterations": k},
    )


def run_sgm(
    oracle: SubgradientOracle,
    x0,
    lambda0: float,
    stop: StoppingRule,
    *,
    index_offset: int = 0,
    trace_limit: Optional[int] = None,
) -> RunResult:
    """Subgradient method with the divergent-series step ``lambda0 / (k + 1 + index_offset)``.

    ``index_offset=1`` starts the harmonic sequence at ``lambda0 / 2``.
    """
    if not lambda0 > 0:
        raise ValueError("lambda0 must be positive")
    if index_offset < 0:
        raise ValueError("index_offset must be non-negative")

    def update(k, x, g):
        lam = lambda0 / (k + 1 + index_offset)
        return x - lam * g, lam, norm(g)

    return _iterate(oracle, x0, stop, update, trace_limit)


def _theory_step(x_star_dist: float, L: float) -> float:
    if not x_star_dist > 0 or not L > 0:
        raise ValueError("x_star_dist and L must be positive")
    return x_star_dist / L


def run_sgmt(
    oracle: SubgradientOracle,
    x0,
    x_star_dist: float,
    L: float,
    stop: StoppingRule,
    *,
    trace_limit: Optional[int] = None,
) -> RunResult:
    """Subgradient method with the worst-case optimal step ``(x_star_dist / L) / sqrt(k + 1)``."""
    lam0 = _theory_step(x_star_dist, L)

    def update(k, x, g):
        lam = lam0 / math.sqrt(k + 1)
        return x - lam * g, lam, norm(g)

    return _iterate(oracle, x0, stop, update, trace_limit)


def run_asg(
    oracle: SubgradientOracle,
    x0,
    x_star_dist: float,
    L: float,
    stop: StoppingRule,
    *,
    trace_limit: Optional[int] = None,
) -> RunResult:
    """Simple dual averaging: every iterate is ``x0 - lam_k * (g^0 + ... + g^k)``."""
    lam0 = _theory_step(x_star_dist, L)
    origin = as_vector(x0, oracle.dimension)
    total = np.zeros(oracle.dimension)

    def update(k, x, g):
        nonlocal total
        total = total + g
        lam = lam0 / math.sqrt(k + 1)
        return origin - lam * total, lam, norm(total)

    return _iterate(oracle, x0, stop, update, trace_limit)


def run_dasg(
    oracle: SubgradientOracle,
    x0,
    x_star_dist: float,
    L: float,
    stop: StoppingRule,
    *,
    trace_limit: Optional[int] = None,
) -> RunResult:
    """Double averaging.

    The subgradient is taken at the averaged iterate ``x^k``; the dual
    averaging point ``y^k = x0 - lam_k * (g^0 + ... + g^k)`` is then mixed
    in with weight ``1 / (k + 2)``.
    """
    lam0 = _theory_step(x_star_dist, L)
    origin = as_vector(x0, oracle.dimension)
    total = np.zeros(oracle.dimension)

    def update(k, x, g):
        nonlocal total
        total = total + g
        lam = lam0 / math.sqrt(k + 1)
        y = origin - lam * total
        w = (k + 1) / (k + 2)
        return w * x + (1 - w) * y, lam, norm(total)

    return _iterate(oracle, x0, stop, update, trace_limit)
