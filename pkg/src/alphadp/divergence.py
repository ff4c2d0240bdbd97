"""Divergence oracles: alpha, Renyi, KL and max divergence.

Discrete distributions are evaluated by direct summation. The Gaussian and
Laplace families are integrated numerically with the adaptive Simpson kernel,
which gives an oracle independent of the closed forms in
:mod:`alphadp.mechanisms`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from . import _backend
from ._kernels_py import FAMILY_GAUSSIAN, FAMILY_LAPLACE, MODE_GENERATOR, MODE_MOMENT
from ._kernels_py import log_density as _log_density
from ._kernels_py import log_ratio as _log_ratio
from .errors import (
    AbsoluteContinuityViolation,
    DimensionMismatch,
    DomainError,
    NumericOverflow,
    QuadratureDivergence,
)

SUM_TOL = 1e-12
ALPHA_FLOOR = 1.0 + 1e-12
# window half-width, in units of the widest scale around every feature
WINDOW_SCALES = 40.0
QUAD_RTOL = 1e-11
MAX_DEPTH = 30


@dataclass(frozen=True)
class DiscreteDistribution:
    probs: tuple

    def __post_init__(self):
        probs = tuple(float(v) for v in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) < 1:
            raise DomainError("distribution must have at least one outcome")
        for v in probs:
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"probabilities must be finite and >= 0, got {v!r}")
        total = math.fsum(probs)
        if abs(total - 1.0) > SUM_TOL:
            raise DomainError(f"probabilities sum to {total!r}, not 1")

    def __len__(self):
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)


@dataclass(frozen=True)
class DensitySpec:
    """A Gaussian (scale = sigma) or Laplace (scale = b) density."""

    family: str
    location: float
    scale: float

    def __post_init__(self):
        family = str(self.family).lower()
        if family not in ("gaussian", "laplace"):
            raise DomainError(f"unknown family {self.family!r}; expected 'gaussian' or 'laplace'")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "location", float(self.location))
        object.__setattr__(self, "scale", float(self.scale))
        if not math.isfinite(self.location):
            raise DomainError("location must be finite")
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise DomainError(f"scale must be a positive finite number, got {self.scale!r}")

    @classmethod
    def gaussian(cls, mean: float, sigma: float) -> "DensitySpec":
        return cls("gaussian", mean, sigma)

    @classmethod
    def laplace(cls, location: float, b: float) -> "DensitySpec":
        return cls("laplace", location, b)

    @property
    def family_code(self) -> int:
        return FAMILY_GAUSSIAN if self.family == "gaussian" else FAMILY_LAPLACE

    def log_pdf(self, x: float) -> float:
        return _log_density(self.family_code, float(x), self.location, self.scale)


@dataclass(frozen=True)
class Channel:
    """Row-stochastic matrix: row i is the output law given input outcome i."""

    matrix: tuple

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        if not rows or not rows[0]:
            raise DomainError("channel needs at least one row and one column")
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise DimensionMismatch("channel rows have different lengths")
            if any(not math.isfinite(v) or v < 0.0 for v in row):
                raise DomainError("channel entries must be finite and >= 0")
            if abs(math.fsum(row) - 1.0) > SUM_TOL:
                raise DomainError("every channel row must sum to 1")

    @property
    def n_inputs(self) -> int:
        return len(self.matrix)

    @property
    def n_outputs(self) -> int:
        return len(self.matrix[0])


DistLike = Union[DiscreteDistribution, Sequence[float]]


def as_distribution(p: DistLike) -> DiscreteDistribution:
    return p if isinstance(p, DiscreteDistribution) else DiscreteDistribution(tuple(p))


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= ALPHA_FLOOR:
        raise DomainError(f"alpha must be a finite number > 1, got {alpha!r}")
    return alpha


def _pair(p: DistLike, q: DistLike):
    p, q = as_distribution(p), as_distribution(q)
    if len(p) != len(q):
        raise DimensionMismatch(f"distributions have lengths {len(p)} and {len(q)}")
    for i, (pi, qi) in enumerate(zip(p.probs, q.probs)):
        if qi == 0.0 and pi > 0.0:
            raise AbsoluteContinuityViolation(f"q[{i}] = 0 but p[{i}] = {pi!r}")
    return p.probs, q.probs


def power_term(pi: float, qi: float, alpha: float) -> float:
    """``pi**alpha * qi**(1 - alpha)`` with the convention 0**alpha * q**(1-alpha) = 0."""
    if pi == 0.0:
        return 0.0
    if pi == qi:
        return pi
    try:
        return pi ** alpha * qi ** (1.0 - alpha)
    except OverflowError:
        raise NumericOverflow(f"p**alpha * q**(1-alpha) overflows at alpha={alpha!r}") from None


def alpha_divergence_from_terms(terms: Sequence[float], alpha: float, q_mass: Sequence[float]) -> float:
    """``(sum(terms) - 1) / (alpha (alpha - 1))`` with a correctly rounded sum.

    The 1 is taken as ``sum(q_mass)``, so identical distributions give exactly 0
    even when their entries do not sum to 1 in binary.
    """
    value = math.fsum([*terms, *(-v for v in q_mass)]) / (alpha * (alpha - 1.0))
    if not math.isfinite(value):
        raise NumericOverflow("alpha divergence is not finite")
    return value


def alpha_divergence_discrete(p: DistLike, q: DistLike, alpha: float) -> float:
    alpha = check_alpha(alpha)
    ps, qs = _pair(p, q)
    return alpha_divergence_from_terms([power_term(pi, qi, alpha) for pi, qi in zip(ps, qs)], alpha, qs)


def _log_moment_discrete(ps, qs, alpha):
    logs = [alpha * math.log(pi) + (1.0 - alpha) * math.log(qi) for pi, qi in zip(ps, qs) if pi > 0.0]
    top = max(logs)
    return top + math.log(math.fsum(math.exp(v - top) for v in logs))


def renyi_divergence_discrete(p: DistLike, q: DistLike, alpha: float) -> float:
    alpha = check_alpha(alpha)
    ps, qs = _pair(p, q)
    try:
        excess = math.fsum([*(power_term(pi, qi, alpha) for pi, qi in zip(ps, qs)), *(-v for v in qs)])
    except NumericOverflow:
        excess = math.inf
    if math.isfinite(excess):
        # log1p keeps precision when the moment is close to 1 (alpha near 1)
        return math.log1p(excess) / (alpha - 1.0)
    return _log_moment_discrete(ps, qs, alpha) / (alpha - 1.0)


def kl_divergence_discrete(p: DistLike, q: DistLike) -> float:
    ps, qs = _pair(p, q)
    return math.fsum(pi * math.log(pi / qi) for pi, qi in zip(ps, qs) if pi > 0.0)


def max_divergence_discrete(p: DistLike, q: DistLike) -> float:
    ps, qs = _pair(p, q)
    return math.log(max(pi / qi for pi, qi in zip(ps, qs) if pi > 0.0))


def apply_channel(p: DistLike, c: Channel) -> DiscreteDistribution:
    p = as_distribution(p)
    if not isinstance(c, Channel):
        c = Channel(c)
    if c.n_inputs != len(p):
        raise DimensionMismatch(f"channel has {c.n_inputs} rows, distribution has {len(p)} outcomes")
    out = [math.fsum(pi * row[j] for pi, row in zip(p.probs, c.matrix)) for j in range(c.n_outputs)]
    return DiscreteDistribution(tuple(out))


# -- continuous families ----------------------------------------------------

def _layout(p: DensitySpec, q: DensitySpec, alpha: float):
    """Breakpoints and log-integrand peak for ``p**alpha * q**(1-alpha)``."""
    if p.family != q.family:
        raise DomainError("p and q must belong to the same family")
    mp, sp, mq, sq = p.location, p.scale, q.location, q.scale
    if p.family == "gaussian":
        curvature = alpha / sp ** 2 - (alpha - 1.0) / sq ** 2
        if curvature <= 0.0:
            raise QuadratureDivergence("integral diverges: q is too narrow relative to p for this alpha")
        peak = (alpha * mp / sp ** 2 - (alpha - 1.0) * mq / sq ** 2) / curvature
        width = max(sp, sq, 1.0 / math.sqrt(curvature))
        features = sorted({mp, mq, peak})
        candidates = [peak]
    else:
        decay = alpha / sp - (alpha - 1.0) / sq
        if decay <= 0.0:
            raise QuadratureDivergence("integral diverges: q is too narrow relative to p for this alpha")
        width = max(sp, sq, 1.0 / decay)
        features = sorted({mp, mq})
        candidates = features
    lo = features[0] - WINDOW_SCALES * width
    hi = features[-1] + WINDOW_SCALES * width
    breaks = [lo, *features, hi]
    shift = max(q.log_pdf(x) + alpha * _log_ratio(p.family_code, x, mp, sp, mq, sq) for x in candidates)
    return breaks, shift


def _run(mode, p, q, alpha, shift, breaks):
    value, _evals, unconverged = _backend.integrate(
        mode, p.family_code, p.location, p.scale, q.location, q.scale,
        alpha, shift, breaks, 64, QUAD_RTOL, MAX_DEPTH,
    )
    if not math.isfinite(value):
        raise QuadratureDivergence("integrand overflowed; use log_alpha_moment_quadrature")
    if unconverged:
        raise QuadratureDivergence(f"{unconverged} panels hit the refinement depth limit")
    return value


def alpha_divergence_quadrature(p: DensitySpec, q: DensitySpec, alpha: float) -> float:
    """Alpha divergence of two same-family densities by adaptive quadrature.

    The integrand is ``q * f(p/q)`` with the alpha-divergence generator, which
    is pointwise nonnegative; this keeps relative accuracy when the divergence
    is many orders of magnitude below 1.

    Raises:
        QuadratureDivergence: the integral is infinite, overflows, or the
            refinement did not converge.
    """
    alpha = check_alpha(alpha)
    breaks, _ = _layout(p, q, alpha)
    return _run(MODE_GENERATOR, p, q, alpha, 0.0, breaks)


def log_alpha_moment_quadrature(p: DensitySpec, q: DensitySpec, alpha: float) -> float:
    """``log of the integral of p**alpha * q**(1 - alpha)``, evaluated with a peak shift.

    Stays finite when the divergence itself overflows a double.
    """
    alpha = check_alpha(alpha)
    breaks, shift = _layout(p, q, alpha)
    scaled = _run(MODE_MOMENT, p, q, alpha, shift, breaks)
    if scaled <= 0.0:
        raise QuadratureDivergence("scaled moment integral is not positive")
    return shift + math.log(scaled)


def renyi_divergence_quadrature(p: DensitySpec, q: DensitySpec, alpha: float) -> float:
    alpha = check_alpha(alpha)
    return log_alpha_moment_quadrature(p, q, alpha) / (alpha - 1.0)
