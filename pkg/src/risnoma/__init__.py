"""Coverage analysis of RIS-aided two-user NOMA downlinks in Poisson networks.

The analytic engine evaluates closed-form coverage probabilities; the Monte
Carlo engine simulates the same model trial by trial.
"""

from .analytic import (
    CoveragePair, coverage_connected_closed, coverage_pair, coverage_typical,
    coverage_typical_closed, gamma_c_e, gamma_t_e, laplace_connected,
    laplace_typical_ris, mean_interference_connected, upsilon,
)
from .channel import (
    FadingSpec, RisConfig, c_ris_e, gamma_cdf_bound, pathloss_direct,
    pathloss_ris_approx, pathloss_ris_exact, sample_fading_power,
)
from .config import RunConfig, SweepSpec, load_config, parse_config, serialize_config
from .errors import ConfigError, DomainError, NumericalError
from .estimators import AnalyticCoverage, MonteCarloCoverage
from .geometry import (
    LinkGeometry, Point, Realization, compute_link_angle, sample_ppp_annulus,
    sample_realization, sample_ris, split_angle,
)
from .mcsim import (
    CoverageEstimate, GainSamples, ScenarioMode, estimate_coverage,
    estimate_expectations, run_trial, simulate_gains,
)
from .params import NetworkParams
from .sgkernel import chebyshev_gauss, erfc, erfcx, gamma_fn, gauss2f1, integrate_1d

__version__ = "0.1.0"
