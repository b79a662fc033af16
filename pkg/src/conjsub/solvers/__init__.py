from .baselines import run_asg, run_dasg, run_sgm, run_sgmt
from .csg import CertificateSnapshot, CsgState, RestartEvent, run_csgi, run_csgm

__all__ = [
    "run_csgi",
    "run_csgm",
    "run_sgm",
    "run_sgmt",
    "run_asg",
    "run_dasg",
    "CsgState",
    "RestartEvent",
    "CertificateSnapshot",
]
