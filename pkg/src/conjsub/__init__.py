"""Non-monotone conjugate subgradient methods for nonsmooth convex minimization."""

from .core import (
    DimensionError,
    Evaluation,
    IterationRecord,
    NonFiniteError,
    RunResult,
    StoppingRule,
    SubgradientOracle,
    dot,
    evaluate,
    norm,
)
from .direction import BoundCheck, ConvexCertificate, lemma22_bound_check, lemma23_check, nr_conv2
from .problems import ProblemSpec, get_problem, l1_problem, maxq_problem, quadratic_problem, shor_problem
from .schedules import CsgiParams, ScheduleSpec, paper_csgi_params
from .solvers import run_asg, run_csgi, run_csgm, run_dasg, run_sgm, run_sgmt

__version__ = "0.1.0"
