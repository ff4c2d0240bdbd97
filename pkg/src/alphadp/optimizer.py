"""Grid searches over alpha for the Gaussian mechanism.

``find_alpha_min_epsilon`` minimises the converted cumulative epsilon for a
fixed sigma; ``find_alpha_min_sigma`` finds the smallest sigma that keeps the
converted cumulative epsilon within a bound. Both are exhaustive over the grid
(no unimodality assumption); the sigma search keeps the two early exits of the
textbook loop, which never change the answer.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .accounting import (
    AdpGuarantee,
    adp_log_moment,
    adp_log_moment_to_approx,
    adp_to_approx,
    compose_adp_literal,
    compose_adp_n,
    _check_conversion,
)
from .errors import DomainError, NoFeasibleAlpha, NoFeasibleSigma, NumericOverflow
from .mechanisms import gaussian_adp_epsilon, gaussian_rdp_epsilon


def _grid(lo, hi, step):
    # index-based so grid points carry no accumulated rounding
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


@dataclass(frozen=True)
class AlphaSearchConfig:
    alpha_min: float = 2.0
    alpha_max: float = 300.0
    alpha_step: float = 1.0
    sigma_min: float = 1.0
    sigma_max: float = 500.0
    sigma_step: float = 1.0

    def __post_init__(self):
        for name in ("alpha_min", "alpha_max", "alpha_step", "sigma_min", "sigma_max", "sigma_step"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise DomainError(f"{name} must be a finite number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.alpha_min <= 1.0:
            raise DomainError(f"alpha_min must be > 1, got {self.alpha_min!r}")
        if self.alpha_max < self.alpha_min:
            raise DomainError("alpha_max must be >= alpha_min")
        if self.sigma_min <= 0.0:
            raise DomainError(f"sigma_min must be > 0, got {self.sigma_min!r}")
        if self.sigma_max < self.sigma_min:
            raise DomainError("sigma_max must be >= sigma_min")
        if self.alpha_step <= 0.0 or self.sigma_step <= 0.0:
            raise DomainError("grid steps must be > 0")

    def alpha_grid(self) -> list[float]:
        return _grid(self.alpha_min, self.alpha_max, self.alpha_step)

    def sigma_grid(self) -> list[float]:
        return _grid(self.sigma_min, self.sigma_max, self.sigma_step)


@dataclass(frozen=True)
class OptimizationResult:
    alpha_star: Optional[float]
    objective: float
    converted_epsilon: float
    feasible: bool
    skipped_alphas: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _validate(iterations, delta, l2_sensitivity):
    if isinstance(iterations, bool) or not isinstance(iterations, int) or iterations < 1:
        raise DomainError(f"iterations must be a positive integer, got {iterations!r}")
    if not (isinstance(delta, (int, float)) and 0.0 < delta < 1.0):
        raise DomainError(f"delta must lie strictly between 0 and 1, got {delta!r}")
    if not (isinstance(l2_sensitivity, (int, float)) and math.isfinite(l2_sensitivity)
            and l2_sensitivity >= 0.0):
        raise DomainError(f"l2_sensitivity must be >= 0, got {l2_sensitivity!r}")


def adp_cumulative_converted(alpha, iterations, sigma, delta, l2_sensitivity, conversion="proof"):
    """Converted (eps, delta)-DP epsilon after ``iterations`` Gaussian queries at ``alpha``.

    Raises ``NumericOverflow`` when the single-query epsilon is not
    representable. The proof form composes in the log domain, so a cumulative
    epsilon beyond double range still converts to a finite value; the
    statement form needs the cumulative epsilon itself and raises instead.
    """
    eps = gaussian_adp_epsilon(sigma, l2_sensitivity, alpha)
    if conversion == "proof":
        return adp_log_moment_to_approx(adp_log_moment(eps, iterations, alpha), alpha, delta)
    total = compose_adp_n(eps, iterations, alpha)
    return adp_to_approx(AdpGuarantee(alpha, total), delta, "statement").epsilon


def adp_cumulative_converted_literal(alpha, iterations, sigma, delta, l2_sensitivity):
    """Same objective via the step-by-step recursion (inf when it overflows)."""
    eps = gaussian_adp_epsilon(sigma, l2_sensitivity, alpha)
    total = compose_adp_literal(eps, iterations, alpha)
    c = alpha * (alpha - 1.0)
    scaled = total * c
    # the product can overflow while total itself is still finite
    log_moment = math.log1p(scaled) if math.isfinite(scaled) else math.log(total) + math.log(c)
    return (log_moment - math.log(delta)) / (alpha - 1.0)


def rdp_cumulative_converted(alpha, iterations, sigma, delta, l2_sensitivity):
    eps_bar = iterations * gaussian_rdp_epsilon(sigma, l2_sensitivity, alpha)
    return eps_bar + math.log(1.0 / delta) / (alpha - 1.0)


def _argmin_over_alpha(objective, cfg):
    best_alpha, best, skipped = None, math.inf, 0
    for alpha in cfg.alpha_grid():
        try:
            value = objective(alpha)
        except NumericOverflow:
            skipped += 1
            continue
        if value < best:  # strict: ties keep the smaller alpha
            best_alpha, best = alpha, value
    if best_alpha is None:
        raise NoFeasibleAlpha("every alpha on the grid overflowed")
    return OptimizationResult(best_alpha, best, best, True, skipped)


def find_alpha_min_epsilon(iterations: int, sigma: float, delta: float, l2_sensitivity: float,
                           cfg: Optional[AlphaSearchConfig] = None,
                           conversion: str = "proof") -> OptimizationResult:
    """Alpha on the grid minimising the converted cumulative ADP epsilon.

    Zero sensitivity releases the query exactly, so the cost is 0 and the
    search stops at ``alpha_min``.
    """
    cfg = cfg or AlphaSearchConfig()
    _validate(iterations, delta, l2_sensitivity)
    _check_conversion(conversion)
    if l2_sensitivity == 0.0:
        return OptimizationResult(cfg.alpha_min, 0.0, 0.0, True)
    return _argmin_over_alpha(
        lambda a: adp_cumulative_converted(a, iterations, sigma, delta, l2_sensitivity, conversion), cfg)


def find_alpha_min_epsilon_rdp(iterations: int, sigma: float, delta: float, l2_sensitivity: float,
                               cfg: Optional[AlphaSearchConfig] = None) -> OptimizationResult:
    """RDP counterpart of :func:`find_alpha_min_epsilon` on the same grid."""
    cfg = cfg or AlphaSearchConfig()
    _validate(iterations, delta, l2_sensitivity)
    return _argmin_over_alpha(
        lambda a: rdp_cumulative_converted(a, iterations, sigma, delta, l2_sensitivity), cfg)


def find_alpha_min_sigma(iterations: int, epsilon_bound: float, delta: float, l2_sensitivity: float,
                         cfg: Optional[AlphaSearchConfig] = None,
                         conversion: str = "proof") -> OptimizationResult:
    """Smallest grid sigma (and its alpha) whose converted cumulative epsilon is <= the bound.

    For each alpha the sigma loop ascends, stops once sigma reaches the best
    sigma found so far, and stops at the first feasible sigma. Ties go to the
    smaller alpha.
    """
    cfg = cfg or AlphaSearchConfig()
    _validate(iterations, delta, l2_sensitivity)
    _check_conversion(conversion)
    if not (isinstance(epsilon_bound, (int, float)) and epsilon_bound > 0.0):
        raise DomainError(f"epsilon_bound must be > 0, got {epsilon_bound!r}")
    sigmas = cfg.sigma_grid()
    if l2_sensitivity == 0.0:
        return OptimizationResult(cfg.alpha_min, sigmas[0], 0.0, True)
    best_sigma, best_alpha, best_eps = math.inf, None, math.nan
    for alpha in cfg.alpha_grid():
        for sigma in sigmas:
            if sigma >= best_sigma:
                break
            try:
                eps = adp_cumulative_converted(alpha, iterations, sigma, delta, l2_sensitivity, conversion)
            except NumericOverflow:
                continue
            if eps <= epsilon_bound:
                best_sigma, best_alpha, best_eps = sigma, alpha, eps
                break
    if best_alpha is None:
        raise NoFeasibleSigma(f"no grid point meets epsilon <= {epsilon_bound!r}")
    return OptimizationResult(best_alpha, best_sigma, best_eps, True)


def min_sigma_at_alpha(alpha, iterations, epsilon_bound, delta, l2_sensitivity, sigmas, conversion="proof"):
    """Smallest sigma in ``sigmas`` feasible at a fixed alpha, or None."""
    for sigma in sigmas:
        try:
            eps = adp_cumulative_converted(alpha, iterations, sigma, delta, l2_sensitivity, conversion)
        except NumericOverflow:
            continue
        if eps <= epsilon_bound:
            return sigma
    return None
