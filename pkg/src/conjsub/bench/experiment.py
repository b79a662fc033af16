"""Experiment configuration, method registry and table reproduction."""

from __future__ import annotations

import dataclasses
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from ..core import RunResult, StoppingRule, as_vector
from ..problems import PROBLEMS, ProblemSpec, get_problem
from ..schedules import ScheduleSpec, paper_csgi_params
from ..solvers import run_asg, run_csgi, run_csgm, run_dasg, run_sgm, run_sgmt
from .report import write_trace

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "TableEntry",
    "TableRow",
    "METHODS",
    "load_config",
    "solve",
    "run_experiment",
    "reproduce_table",
    "REFERENCE_TABLES",
]


class ConfigError(ValueError):
    """Bad experiment configuration (unknown names, malformed values)."""


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    method: str
    method_params: dict[str, Any] = field(default_factory=dict)
    x0: Optional[tuple[float, ...]] = None
    eps_ladder: tuple[float, ...] = ()
    max_evals: int = 10000
    trace_path: Optional[str] = None
    dimension: Optional[int] = None

    def __post_init__(self):
        ladder = tuple(float(e) for e in self.eps_ladder)
        if any(not e > 0 for e in ladder):
            raise ConfigError("eps ladder entries must be positive")
        if any(a <= b for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("eps ladder must be strictly decreasing")
        if int(self.max_evals) < 1:
            raise ConfigError("max_evals must be >= 1")
        object.__setattr__(self, "eps_ladder", ladder)
        object.__setattr__(self, "max_evals", int(self.max_evals))
        if self.x0 is not None:
            object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))


@dataclass(frozen=True)
class TableEntry:
    eps: float
    it: Optional[int]
    reference_it: Optional[int] = None

    @property
    def ratio(self) -> Optional[float]:
        if self.it is None or not self.reference_it:
            return None
        return self.it / self.reference_it


@dataclass(frozen=True)
class TableRow:
    method: str
    entries: tuple[TableEntry, ...]
    best_gap: float = math.nan
    total_evals: int = 0
    reference_best_gap: Optional[float] = None

    def its(self) -> list[Optional[int]]:
        return [e.it for e in self.entries]


# ---------------------------------------------------------------------------
# parameter parsing


def _float(v) -> float:
    if isinstance(v, str) and v.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return float(v)


def _int(v) -> int:
    f = float(v)
    if f != int(f):
        raise ValueError(f"expected an integer, got {v!r}")
    return int(f)


def _schedule(v) -> ScheduleSpec:
    return v if isinstance(v, ScheduleSpec) else ScheduleSpec.parse(str(v))


def _float_or_schedule(v):
    if isinstance(v, ScheduleSpec) or (isinstance(v, str) and ":" in v):
        return _schedule(v)
    return _float(v)


def _opt_float(v):
    return None if v in (None, "", "none", "None") else _float(v)


@dataclass(frozen=True)
class Method:
    name: str
    runner: Callable[..., RunResult]
    params: dict[str, tuple[Callable[[Any], Any], Any]]
    description: str

    def parse(self, raw: dict[str, Any]) -> dict[str, Any]:
        unknown = set(raw) - set(self.params)
        if unknown:
            raise ConfigError(
                f"unknown parameter(s) for {self.name}: {', '.join(sorted(unknown))}; "
                f"accepted: {', '.join(self.params)}"
            )
        out = {k: default for k, (_, default) in self.params.items()}
        for key, value in raw.items():
            conv = self.params[key][0]
            try:
                out[key] = conv(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {self.name}.{key}: {value!r} ({exc})") from None
        return out


def _g0_norm(problem: ProblemSpec, x0: np.ndarray) -> float:
    # uncounted: the solver evaluates x0 itself
    return float(np.linalg.norm(problem.objective(x0)[1]))


def _run_csgi(problem, oracle, x0, prm, stop, trace_limit):
    scalars = {k: prm[k] for k in ("theta", "sigma", "eta_factor", "d_divisor", "mu", "mu_increment")}
    overrides = {k: prm[k] for k in ("alpha_prime", "alpha_dprime", "beta_dprime", "beta_tprime") if prm[k] is not None}
    beta_prime = prm["beta_prime"]
    if isinstance(beta_prime, ScheduleSpec):
        overrides["beta_prime"] = beta_prime
        beta_prime = beta_prime.term(0)

    def factory(g0_norm: float):
        params = paper_csgi_params(g0_norm, beta_prime=beta_prime, **scalars)
        return dataclasses.replace(params, **overrides) if overrides else params

    return run_csgi(oracle, x0, factory, stop, trace_limit=trace_limit)


def _run_csgm(problem, oracle, x0, prm, stop, trace_limit):
    return run_csgm(
        oracle, x0, prm["theta"], prm["mu"], prm["alpha"], prm["beta"], prm["eta"], prm["d"], stop,
        mu_increment=prm["mu_increment"], trace_limit=trace_limit,
    )


def _run_sgm(problem, oracle, x0, prm, stop, trace_limit):
    return run_sgm(oracle, x0, prm["lambda0"], stop, index_offset=prm["index_offset"], trace_limit=trace_limit)


def _theory_args(problem: ProblemSpec, x0, prm) -> tuple[float, float]:
    dist = prm["x_star_dist"]
    if dist is None:
        if problem.x_star is None:
            raise ConfigError(f"{problem.name} has no known minimizer; pass x_star_dist")
        dist = float(np.linalg.norm(x0 - problem.x_star))
    L = prm["L"] if prm["L"] is not None else _g0_norm(problem, x0)
    return dist, L


def _theory_runner(fn):
    def run(problem, oracle, x0, prm, stop, trace_limit):
        dist, L = _theory_args(problem, x0, prm)
        return fn(oracle, x0, dist, L, stop, trace_limit=trace_limit)

    return run


_THEORY_PARAMS = {"x_star_dist": (_opt_float, None), "L": (_opt_float, None)}

METHODS: dict[str, Method] = {
    "csgi": Method(
        "csgi",
        _run_csgi,
        {
            "theta": (_float, 0.3),
            "sigma": (_float, 0.8),
            "beta_prime": (_float_or_schedule, 0.05),
            "eta_factor": (_float, 0.4),
            "d_divisor": (_float, 0.7),
            "mu": (_float, math.inf),
            "mu_increment": (_opt_float, None),
            "alpha_prime": (_schedule, None),
            "alpha_dprime": (_schedule, None),
            "beta_dprime": (_schedule, None),
            "beta_tprime": (_schedule, None),
        },
        "conjugate subgradient method, coupled thresholds (benchmark settings by default)",
    ),
    "csgm": Method(
        "csgm",
        _run_csgm,
        {
            "theta": (_float, 0.3),
            "mu": (_float, math.inf),
            "mu_increment": (_opt_float, None),
            "alpha": (_schedule, ScheduleSpec("geometric", 0.8, 0.8)),
            "beta": (_schedule, ScheduleSpec("harmonic", 0.05)),
            "eta": (_schedule, ScheduleSpec("harmonic", 1.0)),
            "d": (_schedule, ScheduleSpec("harmonic", 1.0)),
        },
        "conjugate subgradient method, free threshold sequences",
    ),
    "sgm": Method(
        "sgm",
        _run_sgm,
        {"lambda0": (_float, 0.1), "index_offset": (_int, 0)},
        "subgradient method, step lambda0/(k+1)",
    ),
    "sgmt": Method("sgmt", _theory_runner(run_sgmt), _THEORY_PARAMS,
                   "subgradient method, step (||x0-x*||/L)/sqrt(k+1)"),
    "asg": Method("asg", _theory_runner(run_asg), _THEORY_PARAMS, "simple dual averaging"),
    "dasg": Method("dasg", _theory_runner(run_dasg), _THEORY_PARAMS, "double averaging"),
}


# ---------------------------------------------------------------------------
# running


def _resolve(config: ExperimentConfig) -> tuple[ProblemSpec, Method, np.ndarray]:
    try:
        problem = get_problem(config.problem, config.dimension)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if config.method not in METHODS:
        raise ConfigError(f"unknown method {config.method!r}; available: {', '.join(METHODS)}")
    if config.eps_ladder and problem.f_star is None:
        raise ConfigError(f"{problem.name} has no known optimal value; eps targets unavailable")
    try:
        x0 = as_vector(problem.x0_default if config.x0 is None else config.x0, problem.dimension)
    except ValueError as exc:
        raise ConfigError(f"bad x0: {exc}") from None
    return problem, METHODS[config.method], x0


def solve(config: ExperimentConfig, trace_limit: Optional[int] = None) -> RunResult:
    """One solver run as described by `config`; writes the trace if requested."""
    problem, method, x0 = _resolve(config)
    params = method.parse(config.method_params)
    stop = StoppingRule(config.max_evals, problem.f_star, config.eps_ladder)
    keep = trace_limit if config.trace_path is not None or trace_limit is not None else 0
    oracle = problem.oracle()
    result = method.runner(problem, oracle, x0, params, stop, keep)
    if config.trace_path is not None:
        write_trace(result.trace, config.trace_path)
    return result


def table_row(config: ExperimentConfig, result: RunResult, references=None, reference_best_gap=None) -> TableRow:
    f_star = get_problem(config.problem, config.dimension).f_star
    refs = references or [None] * len(config.eps_ladder)
    entries = tuple(
        TableEntry(eps, result.first_hits.get(eps), ref) for eps, ref in zip(config.eps_ladder, refs)
    )
    gap = result.best_value - f_star if f_star is not None else math.nan
    return TableRow(config.method, entries, gap, result.total_evals, reference_best_gap)


def run_experiment(config: ExperimentConfig) -> TableRow:
    """First-hit evaluation counts for each accuracy of the ladder.

    An entry is the cumulative number of oracle calls after which the best
    value found is within ``eps`` of the optimum; ``None`` if the budget ran
    out first.
    """
    return table_row(config, solve(config))


def load_config(path) -> ExperimentConfig:
    """Read a flat TOML experiment file (see README for the keys)."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    return config_from_mapping(data)


CONFIG_KEYS = ("problem", "dimension", "method", "params", "x0", "eps", "max_evals", "trace")


def config_from_mapping(data: dict[str, Any], **overrides) -> ExperimentConfig:
    """Build a config from file keys; non-None `overrides` take precedence.

    ``params`` entries from the file and the overrides are merged key by key.
    """
    unknown = set(data) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    merged = dict(data)
    params = dict(merged.get("params", {}))
    params.update(overrides.pop("params", None) or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    for key in ("problem", "method"):
        if key not in merged:
            raise ConfigError(f"missing required key {key!r}")
    eps = merged.get("eps", ())
    if isinstance(eps, (int, float)):
        eps = (eps,)
    try:
        return ExperimentConfig(
            problem=str(merged["problem"]),
            method=str(merged["method"]),
            method_params=params,
            x0=merged.get("x0"),
            eps_ladder=tuple(eps),
            max_evals=merged.get("max_evals", 10000),
            trace_path=merged.get("trace"),
            dimension=merged.get("dimension"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# table reproduction

# (method, ladder, budget, reference counts, reference best gap)
REFERENCE_TABLES: dict[str, list[tuple[str, tuple[float, ...], int, tuple, Optional[float]]]] = {
    "table1": [
        ("sgm", (0.1, 0.01, 0.001, 1e-4, 2e-5), 70000, (81, 320, 1645, 8243, 35000), None),
        ("csgi", (0.1, 0.01, 0.001, 1e-4, 1e-5), 20000, (141, 253, 466, 640, 860), None),
    ],
    "table2": [
        ("sgmt", (0.1, 0.01, 0.001), 35000, (116, 4510, None), 0.0013),
        ("asg", (0.1, 0.01, 0.001), 10000, (None, None, None), 2.038),
        ("dasg", (0.1, 0.01, 0.001), 70000, (324, 3254, 34169), None),
    ],
}

# Published columns that have no runnable counterpart here, kept for context.
REFERENCE_CONTEXT = {
    "table1": {
        "nasgm": ((0.1, 30), (0.01, 63), (0.004, 10000)),
        "dsgm": ((0.1, 92), (0.01, 352), (0.001, 1058), (1e-4, 2809), (1e-5, 5909)),
    },
    "table2": {"sgmt": ((0.0013, 35000),), "asg": ((2.038, 10000),)},
}


def table_configs(which: str) -> list[tuple[ExperimentConfig, tuple, Optional[float]]]:
    if which not in REFERENCE_TABLES:
        raise ConfigError(f"unknown table {which!r}; expected one of {', '.join(REFERENCE_TABLES)}")
    return [
        (ExperimentConfig("shor", method, eps_ladder=ladder, max_evals=budget), refs, ref_gap)
        for method, ladder, budget, refs, ref_gap in REFERENCE_TABLES[which]
    ]


def _reproduce_one(item) -> TableRow:
    config, refs, ref_gap = item
    return table_row(config, solve(config), refs, ref_gap)


def reproduce_table(which: str, workers: int = 1) -> list[TableRow]:
    """Re-run the in-scope columns of a benchmark table on Shor's problem.

    Rows come back in table order with the published counts attached and
    the ratio ours/published for every entry both reached.  Independent
    columns may run in separate processes (`workers` > 1); each run is
    itself sequential, so results do not depend on `workers`.
    """
    items = table_configs(which)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_reproduce_one, items))
    else:
        rows = [_reproduce_one(item) for item in items]
    for row in rows:
        for e in row.entries:
            if e.ratio is not None:
                log.info("%s eps=%g it=%d published=%d ratio=%.3f", row.method, e.eps, e.it, e.reference_it, e.ratio)
    return rows


def available_problems() -> list[str]:
    return list(PROBLEMS)
