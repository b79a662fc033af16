"""Non-monotone conjugate subgradient method without line search.

One engine runs both the abstract method, where the norm thresholds and
distance budgets are free sequences indexed by the threshold counter, and
its implementable instance, where those quantities are re-seeded from
products of shrink factors and epoch seeds.  The two differ only in the
:class:`_Wiring` they plug into :func:`_run`.

Each iteration makes exactly one trial step ``y = x - lam * p`` and one
oracle call at ``y``.  Depending on the outcome the step size is kept
(descent) or shrunk, and the direction is either averaged with the new
subgradient or reset by one of three restarts:

* norm restart: ``||p|| <= eta`` at the top of the loop;
* function value restart: the trial value exceeds the level ``mu``;
* distance restart: the path length since the last restart exceeds ``d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

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
from ..direction import ConvexCertificate, nr_conv2
from ..schedules import CsgiParams, ScheduleSpec

__all__ = ["run_csgi", "run_csgm", "CsgState", "RestartEvent", "CertificateSnapshot"]

SequenceLike = Union[ScheduleSpec, Callable[[int], float], Sequence[float]]


@dataclass(frozen=True)
class CsgState:
    """Snapshot of the engine state.

    `k`, `l`, `m`, `s` and `t` count iterations, norm restarts since the
    last epoch change, restart epochs, failed descents since the last
    epoch change, and threshold updates.  `b` is the path length since
    the last restart, `g_last` a subgradient at `x`.
    """

    k: int
    l: int
    m: int
    s: int
    t: int
    b: float
    x: np.ndarray
    f_x: float
    u: np.ndarray
    f_u: float
    p: np.ndarray
    g_last: np.ndarray
    lam: float
    eta: float
    d: float
    mu: float


@dataclass(frozen=True)
class RestartEvent:
    tag: str  # "norm", "function-value" or "distance"
    at_k: int


@dataclass(frozen=True)
class CertificateSnapshot:
    """Direction at the start of iteration `k` as a tracked convex combination.

    `b` is the path length walked since the last restart, which bounds the
    distance from `center` to every atom's evaluation point.
    """

    k: int
    center: np.ndarray
    direction: np.ndarray
    certificate: ConvexCertificate
    b: float


class _Wiring:
    """How lam, eta and d are chosen at the start and after each event."""

    resets_l = True

    def start(self) -> tuple[float, float, float]:
        raise NotImplementedError

    def norm_restart(self, l: int, m: int, t: int) -> tuple[float, float]:
        raise NotImplementedError

    def epoch_restart(self, m: int, t: int) -> tuple[float, float, float]:
        raise NotImplementedError

    def failed_step(self, s: int, m: int) -> float:
        raise NotImplementedError


class _CoupledWiring(_Wiring):
    def __init__(self, params: CsgiParams):
        self.p = params

    def start(self):
        p = self.p
        return p.beta_prime(0), p.beta_dprime(0), p.beta_tprime(0)

    def norm_restart(self, l, m, t):
        a = self.p.alpha_dprime(l)
        return a * self.p.beta_dprime(m), a * self.p.beta_tprime(m)

    def epoch_restart(self, m, t):
        p = self.p
        return p.beta_prime(m), p.beta_dprime(m), p.beta_tprime(m)

    def failed_step(self, s, m):
        return self.p.alpha_prime(s) * self.p.beta_prime(m)


class _FreeWiring(_Wiring):
    resets_l = False

    def __init__(self, alpha, beta, eta_seq, d_seq):
        self.alpha = _indexable(alpha, "alpha")
        self.beta = _indexable(beta, "beta")
        self.eta = _indexable(eta_seq, "eta_seq")
        self.d = _indexable(d_seq, "d_seq")

    def start(self):
        return self.beta(0), self.eta(0), self.d(0)

    def norm_restart(self, l, m, t):
        return self.eta(t), self.d(t)

    def epoch_restart(self, m, t):
        return self.beta(m), self.eta(t), self.d(t)

    def failed_step(self, s, m):
        return self.alpha(s) * self.beta(m)


def _indexable(seq: SequenceLike, name: str) -> Callable[[int], float]:
    if callable(seq):
        return seq
    values = list(seq)

    def lookup(i: int) -> float:
        if i >= len(values):
            raise ValueError(f"{name} has only {len(values)} terms; index {i} requested")
        return float(values[i])

    return lookup


def run_csgi(
    oracle: SubgradientOracle,
    x0,
    params: Union[CsgiParams, Callable[[float], CsgiParams]],
    stop: StoppingRule,
    *,
    trace_limit: Optional[int] = None,
    track_certificate: bool = False,
) -> RunResult:
    """Run the coupled conjugate subgradient method.

    `params` may also be a factory taking ``||g0||`` (the norm of the
    subgradient at `x0`), such as :func:`~conjsub.schedules.paper_csgi_params`;
    it is called after the first oracle evaluation so no call is wasted.
    """

    def wiring(g0_norm: float):
        p = params if isinstance(params, CsgiParams) else params(g0_norm)
        return _CoupledWiring(p), p.theta, p.mu, p.mu_increment

    return _run(oracle, x0, wiring, stop, trace_limit, track_certificate)


def run_csgm(
    oracle: SubgradientOracle,
    x0,
    theta: float,
    mu: float,
    alpha: SequenceLike,
    beta: SequenceLike,
    eta_seq: SequenceLike,
    d_seq: SequenceLike,
    stop: StoppingRule,
    *,
    mu_increment: Optional[float] = None,
    trace_limit: Optional[int] = None,
    track_certificate: bool = False,
) -> RunResult:
    """Run the method with free threshold sequences.

    ``eta_seq`` and ``d_seq`` are indexed by the threshold counter ``t``,
    which advances at every restart; ``alpha`` by the failed-descent
    counter and ``beta`` by the restart epoch.  Each may be a
    :class:`ScheduleSpec`, any callable of the index, or a finite list.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")

    def wiring(_g0_norm: float):
        return _FreeWiring(alpha, beta, eta_seq, d_seq), theta, mu, mu_increment

    return _run(oracle, x0, wiring, stop, trace_limit, track_certificate)


def _run(oracle, x0, make_wiring, stop, trace_limit, track_certificate) -> RunResult:
    x = as_vector(x0, oracle.dimension)
    progress = Progress(stop, oracle)
    trace = TraceBuffer(trace_limit)
    snapshots: list[CertificateSnapshot] = []
    restarts = {"norm": 0, "function-value": 0, "distance": 0}
    restart_log: list[RestartEvent] = []

    fx, g = oracle(x)
    check_finite("subgradient", 0, g, fx)
    progress.record(fx)
    if not g.any():
        # 0 is a subgradient, so x0 is already a minimizer
        return RunResult(best_point=x.copy(), best_value=fx, total_evals=progress.evals,
                         termination="stationary", first_hits=dict(progress.hits))
    wiring, theta, mu, mu_increment = make_wiring(norm(g))

    k = l = m = s = t = 0
    b = 0.0
    u, fu = x, fx
    p = g
    g_last = g
    lam, eta, d = wiring.start()
    cert = ConvexCertificate.single(g, x) if track_certificate else None

    while progress.budget_left() and not progress.done():
        events = []
        pn = norm(p)
        # norm restart
        if pn <= eta:
            p = g_last
            pn = norm(p)
            eta, d = wiring.norm_restart(l, m, t + 1)
            l += 1
            t += 1
            b = 0.0
            events.append("norm")
            restarts["norm"] += 1
            restart_log.append(RestartEvent("norm", k))
            if track_certificate:
                cert = ConvexCertificate.single(g_last, x)
        if track_certificate:
            snapshots.append(CertificateSnapshot(k, x, p, cert, b))

        # trial step
        lam_k = lam
        y = x - lam_k * p
        check_finite("trial point", k, y)
        b += lam_k * pn
        fy, gy = oracle(y)
        check_finite("oracle output", k, gy, fy)
        gp = float(np.dot(gy, p))
        row = dict(k=k, f_x=fx, p_norm=pn, lam=lam_k, f_y=fy, gp=gp, b=b, eta=eta, d=d)

        if fy <= fx - theta * lam_k * pn * pn:
            events.append("descent")
        else:
            # failed descent: shrink the step
            events.append("non-descent")
            lam = wiring.failed_step(s, m)
            s += 1
            if fy > mu:
                progress.record(fu)
                events.append("function-value")
                restarts["function-value"] += 1
                restart_log.append(RestartEvent("function-value", k))
                if not progress.budget_left():
                    trace.append(IterationRecord(phi_k=fu, events=tuple(events),
                                                 eval_count=progress.evals, **row))
                    break
                _, g_last = oracle(u)
                check_finite("subgradient", k, g_last)
                progress.record(fu)
                x, fx, p = u, fu, g_last
                m += 1
                t += 1
                lam, eta, d = wiring.epoch_restart(m, t)
                s = 0
                if wiring.resets_l:
                    l = 0
                b = 0.0
                if mu_increment is not None and math.isfinite(mu):
                    mu += mu_increment
                if track_certificate:
                    cert = ConvexCertificate.single(g_last, x)
                trace.append(IterationRecord(phi_k=fu, events=tuple(events),
                                             eval_count=progress.evals, **row))
                k += 1
                continue

        # accept the trial point
        x, fx, g_last = y, fy, gy
        if fx < fu:
            u, fu = x, fx
        progress.record(fu)
        if b > d:
            p = gy
            m += 1
            t += 1
            lam, eta, d = wiring.epoch_restart(m, t)
            s = 0
            if wiring.resets_l:
                l = 0
            b = 0.0
            events.append("distance")
            restarts["distance"] += 1
            restart_log.append(RestartEvent("distance", k))
            if track_certificate:
                cert = ConvexCertificate.single(gy, y)
        else:
            # average the direction
            p, tau = nr_conv2(p, gy)
            if track_certificate:
                cert = cert.merge(tau, gy, y)
        trace.append(IterationRecord(phi_k=fu, events=tuple(events),
                                     eval_count=progress.evals, **row))
        k += 1

    extras = dict(
        state=CsgState(k, l, m, s, t, b, x.copy(), fx, u.copy(), fu, p.copy(), g_last.copy(), lam, eta, d, mu),
        counters=dict(k=k, l=l, m=m, s=s, t=t),
        restarts=restarts,
        restart_log=restart_log,
        final_step=lam,
        final_eta=eta,
        final_d=d,
        mu=mu,
    )
    if track_certificate:
        extras["certificates"] = snapshots
    return RunResult(
        best_point=u.copy(),
        best_value=fu,
        total_evals=progress.evals,
        termination=progress.termination(),
        first_hits=dict(progress.hits),
        trace=trace.rows,
        trace_truncated=trace.truncated,
        extras=extras,
    )
