"""ASE, mean local delay and ASE/delay utility of ALOHA ad-hoc links under PPP interference."""

from .core import (
    DerivedConstants,
    NetworkParams,
    affected_area,
    c_of_delta,
    conditional_success_probability,
    max_range_d0,
    sir_ccdf,
)
from .errors import (
    ConfigurationError,
    DomainError,
    NoSignChangeError,
    NumericalError,
    QuadratureError,
    SeriesDivergenceError,
    SingularTermError,
)
from .metrics import (
    MetricReport,
    QuadratureConfig,
    ase,
    capacity,
    evaluate,
    mean_local_delay,
    psi_n_quadrature,
    psi_n_series,
    utility,
)
from .mcsim import (
    McEstimate,
    PppRealization,
    RadiusPolicy,
    aggregate_interference,
    estimate_capacity,
    estimate_mean_delay,
    estimate_sir_ccdf,
    sample_ppp,
)
from .optimizer import (
    OptimResult,
    adaptive_frontier,
    delay_optimal_p,
    frontier_gains,
    joint_optimum,
    optimal_p,
    optimal_tau,
)

__version__ = "0.1.0"
