"""Per-query privacy consumption of randomized response, Laplace and Gaussian.

All ADP formulas assume the worst-case adjacent pair: for randomized response
the true bits differ, for Laplace/Gaussian the output distributions are shifted
by exactly the sensitivity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .divergence import alpha_divergence_from_terms, check_alpha, power_term
from .errors import DomainError, NumericOverflow

# exponent arguments above this raise instead of returning inf
EXP_LIMIT = 700.0


@dataclass(frozen=True)
class RandomizedResponse:
    p: float

    def __post_init__(self):
        _check_probability(self.p, "p")


@dataclass(frozen=True)
class LaplaceMech:
    scale_b: float
    l1_sensitivity: float = 1.0

    def __post_init__(self):
        _check_positive(self.scale_b, "scale_b")
        _check_sensitivity(self.l1_sensitivity, "l1_sensitivity")


@dataclass(frozen=True)
class GaussianMech:
    sigma: float
    l2_sensitivity: float = 1.0

    def __post_init__(self):
        _check_positive(self.sigma, "sigma")
        _check_sensitivity(self.l2_sensitivity, "l2_sensitivity")


MechanismSpec = RandomizedResponse | LaplaceMech | GaussianMech


def _check_probability(p, name="p"):
    if not (isinstance(p, (int, float)) and 0.0 < p < 1.0):
        raise DomainError(f"{name} must lie strictly between 0 and 1, got {p!r}")
    return float(p)


def _check_positive(v, name):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0.0):
        raise DomainError(f"{name} must be a positive finite number, got {v!r}")
    return float(v)


def _check_sensitivity(v, name):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0.0):
        raise DomainError(f"{name} must be a finite number >= 0, got {v!r}")
    return float(v)


def _check_exponent(x, what):
    if x > EXP_LIMIT:
        raise NumericOverflow(f"{what}: exponent {x:.6g} exceeds {EXP_LIMIT:g}")


# -- randomized response ----------------------------------------------------

def rr_adp_epsilon(p: float, alpha: float) -> float:
    """ADP epsilon of randomized response with truth probability ``p``.

    Uses the same term and summation arithmetic as
    :func:`alphadp.divergence.alpha_divergence_discrete` on the pair
    ``(p, 1-p)`` vs ``(1-p, p)``, so the two agree bit for bit.
    """
    p = _check_probability(p)
    alpha = check_alpha(alpha)
    q = 1.0 - p
    return alpha_divergence_from_terms([power_term(p, q, alpha), power_term(q, p, alpha)], alpha, (q, p))


def rr_pure_epsilon(p: float) -> float:
    p = _check_probability(p)
    return math.log(max(p, 1.0 - p) / min(p, 1.0 - p))


# -- Laplace ----------------------------------------------------------------

def laplace_adp_epsilon(scale_b: float, l1_sensitivity: float, alpha: float) -> float:
    """ADP epsilon of the Laplace mechanism.

    Algebraically equal to
    ``e^{(a-1)x}/((a-1)(2a-1)) + e^{-ax}/(a(2a-1)) - 1/(a(a-1))`` with
    ``x = sensitivity / b``; evaluated through ``expm1`` so small shifts keep
    their relative precision.
    """
    b = _check_positive(scale_b, "scale_b")
    mu = _check_sensitivity(l1_sensitivity, "l1_sensitivity")
    alpha = check_alpha(alpha)
    x = mu / b
    _check_exponent((alpha - 1.0) * x, "Laplace ADP epsilon")
    num = alpha * math.expm1((alpha - 1.0) * x) + (alpha - 1.0) * math.expm1(-alpha * x)
    return max(num, 0.0) / (alpha * (alpha - 1.0) * (2.0 * alpha - 1.0))


def laplace_log_moment(scale_b: float, l1_sensitivity: float, alpha: float) -> float:
    """``log(a(a-1) * eps + 1)`` for the Laplace mechanism; finite past overflow."""
    b = _check_positive(scale_b, "scale_b")
    mu = _check_sensitivity(l1_sensitivity, "l1_sensitivity")
    alpha = check_alpha(alpha)
    x = mu / b
    hi = math.log(alpha) + (alpha - 1.0) * x
    lo = math.log(alpha - 1.0) - alpha * x
    top = max(hi, lo)
    return top + math.log(math.exp(hi - top) + math.exp(lo - top)) - math.log(2.0 * alpha - 1.0)


def laplace_pure_epsilon(scale_b: float, l1_sensitivity: float) -> float:
    b = _check_positive(scale_b, "scale_b")
    mu = _check_sensitivity(l1_sensitivity, "l1_sensitivity")
    return mu / b


# -- Gaussian ---------------------------------------------------------------

def gaussian_log_moment(sigma: float, l2_sensitivity: float, alpha: float) -> float:
    """``log(a(a-1) * eps + 1) = a(a-1) * sens**2 / (2 sigma**2)``."""
    sigma = _check_positive(sigma, "sigma")
    sens = _check_sensitivity(l2_sensitivity, "l2_sensitivity")
    alpha = check_alpha(alpha)
    return alpha * (alpha - 1.0) * sens * sens / (2.0 * sigma * sigma)


def gaussian_adp_epsilon(sigma: float, l2_sensitivity: float, alpha: float) -> float:
    exponent = gaussian_log_moment(sigma, l2_sensitivity, alpha)
    _check_exponent(exponent, "Gaussian ADP epsilon")
    alpha = float(alpha)
    return math.expm1(exponent) / (alpha * (alpha - 1.0))


def gaussian_sigma_for_adp(alpha: float, epsilon: float, l2_sensitivity: float) -> float:
    """Smallest Gaussian sigma that meets ``(alpha, epsilon)``-ADP."""
    alpha = check_alpha(alpha)
    epsilon = _check_positive(epsilon, "epsilon")
    sens = _check_positive(l2_sensitivity, "l2_sensitivity")
    c = alpha * (alpha - 1.0)
    return math.sqrt(c * sens * sens / (2.0 * math.log1p(c * epsilon)))


def gaussian_rdp_epsilon(sigma: float, l2_sensitivity: float, alpha: float) -> float:
    sigma = _check_positive(sigma, "sigma")
    sens = _check_sensitivity(l2_sensitivity, "l2_sensitivity")
    alpha = check_alpha(alpha)
    return alpha * sens * sens / (2.0 * sigma * sigma)


def gaussian_zcdp_rho(sigma: float, l2_sensitivity: float) -> float:
    sigma = _check_positive(sigma, "sigma")
    sens = _check_sensitivity(l2_sensitivity, "l2_sensitivity")
    return sens * sens / (2.0 * sigma * sigma)


def gaussian_approx_epsilon(sigma: float, l2_sensitivity: float, delta: float) -> float:
    """Per-query (eps, delta) cost: ``sens * sqrt(2 log(1.25/delta)) / sigma``."""
    sigma = _check_positive(sigma, "sigma")
    sens = _check_sensitivity(l2_sensitivity, "l2_sensitivity")
    delta = _check_probability(delta, "delta")
    return sens * math.sqrt(2.0 * math.log(1.25 / delta)) / sigma


# -- dispatch on MechanismSpec ------------------------------------------------

def adp_epsilon(mech: MechanismSpec, alpha: float) -> float:
    if isinstance(mech, RandomizedResponse):
        return rr_adp_epsilon(mech.p, alpha)
    if isinstance(mech, LaplaceMech):
        return laplace_adp_epsilon(mech.scale_b, mech.l1_sensitivity, alpha)
    if isinstance(mech, GaussianMech):
        return gaussian_adp_epsilon(mech.sigma, mech.l2_sensitivity, alpha)
    raise DomainError(f"unknown mechanism {mech!r}")


def baseline_epsilon(mech: MechanismSpec, delta: float) -> float:
    """Pure-DP epsilon (RR, Laplace) or per-query (eps, delta) epsilon (Gaussian)."""
    if isinstance(mech, RandomizedResponse):
        return rr_pure_epsilon(mech.p)
    if isinstance(mech, LaplaceMech):
        return laplace_pure_epsilon(mech.scale_b, mech.l1_sensitivity)
    if isinstance(mech, GaussianMech):
        return gaussian_approx_epsilon(mech.sigma, mech.l2_sensitivity, delta)
    raise DomainError(f"unknown mechanism {mech!r}")
