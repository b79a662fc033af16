"""Parameter sequences for the conjugate subgradient methods.

A :class:`ScheduleSpec` is a tiny declarative description of a sequence
indexed from 0:

* ``harmonic(c)``: ``c / (m + 1)``, positive, vanishing, with divergent sum;
* ``geometric(c, sigma)``: ``c * sigma**s``, the shrink factors;
* ``constant(c)``: ``c``, for experiments only.

Specs round-trip through strings such as ``"harmonic:0.05"`` or
``"geometric:0.8:0.8"`` so they fit in flat config files and CLI flags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

__all__ = [
    "ScheduleSpec",
    "harmonic",
    "geometric",
    "constant",
    "term",
    "divergence_witness",
    "index_below",
    "CsgiParams",
    "paper_csgi_params",
]

KINDS = ("harmonic", "geometric", "constant")


@dataclass(frozen=True)
class ScheduleSpec:
    kind: str
    scale: float
    ratio: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}; expected one of {KINDS}")
        if not self.scale > 0:
            raise ValueError("schedule scale must be positive")
        if self.kind == "geometric":
            if self.ratio is None or not 0.0 < self.ratio < 1.0:
                raise ValueError("geometric schedules need a ratio in (0, 1)")
        elif self.ratio is not None:
            raise ValueError(f"{self.kind} schedules take no ratio")

    def term(self, index: int) -> float:
        if index < 0:
            raise ValueError("schedule index must be non-negative")
        if self.kind == "harmonic":
            return self.scale / (index + 1)
        if self.kind == "geometric":
            return self.scale * self.ratio**index
        return self.scale

    __call__ = term

    def scaled(self, factor: float) -> "ScheduleSpec":
        return ScheduleSpec(self.kind, self.scale * factor, self.ratio)

    def __str__(self) -> str:
        if self.kind == "geometric":
            return f"geometric:{self.scale!r}:{self.ratio!r}"
        return f"{self.kind}:{self.scale!r}"

    @classmethod
    def parse(cls, text: str) -> "ScheduleSpec":
        """Inverse of ``str()``: ``kind:scale[:ratio]``."""
        parts = text.strip().split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"cannot parse schedule {text!r}; use kind:scale[:ratio]")
        ratio = float(parts[2]) if len(parts) == 3 else None
        return cls(parts[0], float(parts[1]), ratio)


def harmonic(scale: float) -> ScheduleSpec:
    return ScheduleSpec("harmonic", scale)


def geometric(scale: float, ratio: float) -> ScheduleSpec:
    return ScheduleSpec("geometric", scale, ratio)


def constant(scale: float) -> ScheduleSpec:
    return ScheduleSpec("constant", scale)


def term(spec: ScheduleSpec, index: int) -> float:
    return spec.term(index)


def divergence_witness(spec: ScheduleSpec, target: float) -> int:
    """Smallest ``N`` with ``sum(term(m) for m < N) >= target``.

    A finite witness of the divergent-sum condition; only meaningful for
    harmonic schedules.
    """
    if spec.kind != "harmonic":
        raise ValueError(f"{spec.kind} schedules have no divergence witness")
    if not target > 0 or math.isinf(target):
        raise ValueError("target must be positive and finite")
    total = 0.0
    n = 0
    while total < target:
        total += spec.term(n)
        n += 1
    return n


def index_below(spec: ScheduleSpec, eps: float) -> int:
    """An index beyond which every term is below `eps`."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if spec.kind == "harmonic":
        return max(0, math.ceil(spec.scale / eps))
    if spec.kind == "geometric":
        if spec.scale < eps:
            return 0
        return math.ceil(math.log(eps / spec.scale) / math.log(spec.ratio)) + 1
    raise ValueError("constant schedules do not vanish")


@dataclass(frozen=True)
class CsgiParams:
    """Parameters of the coupled (implementable) conjugate subgradient method.

    Attributes
    ----------
    theta : float
        Descent-test constant in (0, 1).
    mu : float
        Level above which a trial point triggers a return to the best point;
        ``inf`` disables these restarts.
    mu_increment : float or None
        If set (and `mu` finite), `mu` grows by this amount at every such
        restart.
    alpha_prime : ScheduleSpec
        Step shrink factors after failed descent, indexed by the failure count.
    alpha_dprime : ScheduleSpec
        Threshold shrink factors after norm restarts, indexed by their count.
    beta_prime, beta_dprime, beta_tprime : ScheduleSpec
        Seeds for the step, norm threshold and distance budget, indexed by
        the restart epoch.
    """

    theta: float
    alpha_prime: ScheduleSpec
    alpha_dprime: ScheduleSpec
    beta_prime: ScheduleSpec
    beta_dprime: ScheduleSpec
    beta_tprime: ScheduleSpec
    mu: float = math.inf
    mu_increment: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")
        if math.isnan(self.mu):
            raise ValueError("mu must not be NaN")
        if self.mu_increment is not None and not self.mu_increment > 0:
            raise ValueError("mu_increment must be positive")
        for name in ("alpha_prime", "alpha_dprime"):
            spec = getattr(self, name)
            if spec.term(0) >= 1.0:
                raise ValueError(f"{name} must map into (0, 1)")


def paper_csgi_params(
    g0_norm: float,
    *,
    theta: float = 0.3,
    sigma: float = 0.8,
    beta_prime: float = 0.05,
    eta_factor: float = 0.4,
    d_divisor: float = 0.7,
    mu: float = math.inf,
    mu_increment: Optional[float] = None,
) -> CsgiParams:
    """The benchmark settings, scaled by the norm of the first subgradient.

    Step seed ``beta_prime/(m+1)``, norm threshold seed
    ``eta_factor*||g0||/(m+1)``, distance budget seed
    ``beta_prime*||g0||/d_divisor/(m+1)``, and both shrink sequences
    ``sigma**(s+1)``.
    """
    if not g0_norm > 0:
        raise ValueError("g0_norm must be positive")
    shrink = geometric(sigma, sigma)
    return CsgiParams(
        theta=theta,
        mu=mu,
        mu_increment=mu_increment,
        alpha_prime=shrink,
        alpha_dprime=shrink,
        beta_prime=harmonic(beta_prime),
        beta_dprime=harmonic(eta_factor * g0_norm),
        beta_tprime=harmonic(beta_prime * g0_norm / d_divisor),
    )
