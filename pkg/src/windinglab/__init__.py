"""Monte Carlo and closed-form tools for the winding of planar Brownian motion."""

from .analytic import (
    AlphaFamily,
    IntegralTestVerdict,
    Verdict,
    adaptive_simpson,
    cauchy_cdf,
    integral_test,
    maxtime_cdf,
    maxtime_density,
    q_prob,
    spitzer_cdf,
    v_of,
    v_prime,
)
from .batch import BatchResult, batch_run
from .config import ExperimentConfig
from .errors import (
    CensoredSampleError,
    CensoringError,
    ConfigError,
    ContractError,
    DataError,
    DomainError,
    InconsistentPathError,
    InvalidFamilyError,
    PathAbortError,
    WindingLabError,
)
from .euler import PlanarState, direct_observables, simulate_direct
from .rng import SeedStream
from .runner import BatchCache, ClaimId, ClaimReport, emit_samples, file_checksums, run_claim
from .simcore import (
    ClockPath,
    WindingObservables,
    default_u_cap,
    observables_at,
    sample_hits,
    sample_theta_at_hit,
    simulate_clock_path,
    simulate_observables,
)
from .stats import (
    EmpiricalCdf,
    KsReport,
    ProportionReport,
    dkw_band,
    ecdf,
    kolmogorov_sf,
    ks_one_sample,
    ks_two_sample,
    proportion_check,
    sup_distance,
)

__version__ = "0.1.0"
