"""Gaussian conditioning, pathwise updates, ensemble analysis, and benchmarks.

The exact machinery lives in gaussian_core; ensemble_da carries the
stochastic analysis and its independently coded pathwise twin; letkf the
localized transform; gp_kriging the exact field solver; experiment the
timing harness. A FastAPI app (service.app) exposes the benchmark surface
and the CLI (cli) is a thin client over it.
"""

__version__ = "0.1.0"

from .errors import ContractViolationError, SingularCovarianceError
from .gaussian_core import (GaussianBelief, JointGaussian, LinearObservation,
                            condition, kalman_gain, make_joint, matheron_exact,
                            moment_check, sample)
from .ensemble_da import (EnkfConfig, Ensemble, EnsembleMoments,
                          apply_observation, empirical_matheron, enkf_analysis,
                          ensemble_gain, equivalence_report, equivalence_suite,
                          moments)
from .letkf import (GridGeometry, LocalizationConfig, letkf_analysis,
                    taper_weight)
from .gp_kriging import (KernelParams, KrigingProblem, gp_fit_predict,
                         gp_posterior_draws, gram, se_kernel)
from .experiment import (ExperimentConfig, TimingRecord, rmse, run_method,
                         solve_method, sweep)

__all__ = [
    "ContractViolationError",
    "SingularCovarianceError",
    "GaussianBelief",
    "JointGaussian",
    "LinearObservation",
    "condition",
    "kalman_gain",
    "make_joint",
    "matheron_exact",
    "moment_check",
    "sample",
    "EnkfConfig",
    "Ensemble",
    "EnsembleMoments",
    "apply_observation",
    "empirical_matheron",
    "enkf_analysis",
    "ensemble_gain",
    "equivalence_report",
    "equivalence_suite",
    "moments",
    "GridGeometry",
    "LocalizationConfig",
    "letkf_analysis",
    "taper_weight",
    "KernelParams",
    "KrigingProblem",
    "gp_fit_predict",
    "gp_posterior_draws",
    "gram",
    "se_kernel",
    "ExperimentConfig",
    "TimingRecord",
    "rmse",
    "run_method",
    "solve_method",
    "sweep",
    "__version__",
]
