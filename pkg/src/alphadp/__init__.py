"""Alpha differential privacy accounting."""
from ._backend import backend_name
from .accounting import (
    AdpGuarantee,
    ApproxDpGuarantee,
    CompositionLedger,
    RdpGuarantee,
    ZcdpGuarantee,
    adp_to_approx,
    compose_adp,
    compose_adp_literal,
    compose_adp_n,
    compose_advanced,
    compose_rdp,
    compose_zcdp,
    group_privacy_adp,
    rdp_to_approx,
    zcdp_to_approx,
)
from .divergence import (
    Channel,
    DensitySpec,
    DiscreteDistribution,
    alpha_divergence_discrete,
    alpha_divergence_quadrature,
    apply_channel,
    kl_divergence_discrete,
    max_divergence_discrete,
    renyi_divergence_discrete,
    renyi_divergence_quadrature,
)
from .errors import (
    AbsoluteContinuityViolation,
    AlphaDPError,
    DimensionMismatch,
    DomainError,
    GroupTooLarge,
    NoFeasibleAlpha,
    NoFeasibleSigma,
    NumericOverflow,
    QuadratureDivergence,
)
from .mechanisms import (
    GaussianMech,
    LaplaceMech,
    RandomizedResponse,
    gaussian_adp_epsilon,
    gaussian_sigma_for_adp,
    laplace_adp_epsilon,
    rr_adp_epsilon,
)
from .optimizer import AlphaSearchConfig, OptimizationResult, find_alpha_min_epsilon, find_alpha_min_sigma
from .sweep import (
    SweepTable,
    sweep_cumulative_vs_iterations,
    sweep_mechanism_vs_alpha,
    sweep_optimizer_curves,
)

__version__ = "0.1.0"
