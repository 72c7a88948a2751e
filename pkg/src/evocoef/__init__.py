"""Recovery of time-dependent coefficients in evolution equations from point traces."""
__version__ = "0.1.0"

from .core import (ClosedForm, CoefficientFn, Field, ObservationPoint, SpaceGrid,
                   TimeGrid, Trace, antiderivative, apply_polyharmonic, bump_datum,
                   gaussian_datum, mode_datum, trace_at)
from .errors import (ConfigError, EvocoefError, HypothesisError, QuadratureError,
                     StabilityError)
from .spectral import (MultiplierSymbol, SpacetimeSolution, solve_general_first,
                       solve_general_second, solve_heat, solve_wave, symbol_from_id)
from .green import KernelQuery, QuadratureSpec, eval_kernel, poisson_solve
from .bessel import bessel_j
from .recovery import (DifferentiationSpec, RecoveryResult, differentiate, recover,
                       validate_hypotheses)
from .config import ExperimentConfig, load_config
from .harness import (add_noise, build_pair, convergence_study, error_metrics,
                      run_experiment)
