"""Guarantee records, composition rules, conversions to (eps, delta)-DP and group privacy."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import _backend
from .divergence import check_alpha
from .errors import DomainError, GroupTooLarge, NumericOverflow

CONVERSIONS = ("proof", "statement")
FRAMEWORKS = ("ADP", "RDP", "zCDP", "Advanced")


def _nonneg(v, name):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0.0):
        raise DomainError(f"{name} must be a finite number >= 0, got {v!r}")
    return float(v)


def _prob(v, name="delta"):
    if not (isinstance(v, (int, float)) and 0.0 < v < 1.0):
        raise DomainError(f"{name} must lie strictly between 0 and 1, got {v!r}")
    return float(v)


def _count(n, name="n"):
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"{name} must be a positive integer, got {n!r}")
    return n


@dataclass(frozen=True)
class AdpGuarantee:
    alpha: float
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "epsilon", _nonneg(self.epsilon, "epsilon"))


@dataclass(frozen=True)
class RdpGuarantee:
    alpha: float
    epsilon_bar: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "epsilon_bar", _nonneg(self.epsilon_bar, "epsilon_bar"))


@dataclass(frozen=True)
class ZcdpGuarantee:
    rho: float

    def __post_init__(self):
        object.__setattr__(self, "rho", _nonneg(self.rho, "rho"))


@dataclass(frozen=True)
class ApproxDpGuarantee:
    epsilon: float
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "epsilon", _nonneg(self.epsilon, "epsilon"))
        object.__setattr__(self, "delta", _prob(self.delta))


# -- composition ---------------------------------------------------------------

def compose_adp(e1: float, e2: float, alpha: float) -> float:
    alpha = check_alpha(alpha)
    e1, e2 = _nonneg(e1, "e1"), _nonneg(e2, "e2")
    value = e1 + e2 + alpha * (alpha - 1.0) * (e1 * e2)
    if not math.isfinite(value):
        raise NumericOverflow("composed ADP epsilon overflows")
    return value


def adp_log_moment(eps: float, n: int, alpha: float) -> float:
    """``n * log(a(a-1) eps + 1)``: log of the composed moment bound, always finite."""
    alpha = check_alpha(alpha)
    eps = _nonneg(eps, "eps")
    n = _count(n)
    return n * math.log1p(alpha * (alpha - 1.0) * eps)


def compose_adp_n(eps: float, n: int, alpha: float) -> float:
    """n-fold ADP composition, ``((a(a-1) eps + 1)**n - 1) / (a(a-1))``."""
    log_moment = adp_log_moment(eps, n, alpha)
    c = alpha * (alpha - 1.0)
    try:
        if log_moment > 700.0:
            # e**L - 1 == e**L here; dividing in the log domain keeps the quotient finite
            value = math.exp(log_moment - math.log(c))
        else:
            value = math.expm1(log_moment) / c
    except OverflowError:
        raise NumericOverflow(f"composed ADP epsilon overflows (log moment {log_moment:.6g})") from None
    if not math.isfinite(value):
        raise NumericOverflow("composed ADP epsilon overflows")
    return value


def compose_adp_literal(eps: float, n: int, alpha: float) -> float:
    """Step-by-step recursion, one composition per iteration. Returns inf on overflow."""
    alpha = check_alpha(alpha)
    eps = _nonneg(eps, "eps")
    n = _count(n)
    return _backend.adp_recursion(eps, alpha, n)


def compose_rdp(e1: float, e2: float) -> float:
    return _nonneg(e1, "e1") + _nonneg(e2, "e2")


def compose_zcdp(r1: float, r2: float) -> float:
    return _nonneg(r1, "r1") + _nonneg(r2, "r2")


def advanced_delta_split(delta: float, n: int) -> tuple[float, float]:
    """Split an overall delta into ``(delta_per_query, delta_slack)``: half to the slack."""
    delta = _prob(delta)
    n = _count(n)
    return delta / (2.0 * n), delta / 2.0


def compose_advanced(eps_per_query: float, delta_per_query: float, n: int,
                     delta_slack: float) -> ApproxDpGuarantee:
    eps = _nonneg(eps_per_query, "eps_per_query")
    delta_per_query = _prob(delta_per_query, "delta_per_query")
    delta_slack = _prob(delta_slack, "delta_slack")
    n = _count(n)
    total_delta = n * delta_per_query + delta_slack
    if total_delta >= 1.0:
        raise DomainError(f"total delta {total_delta!r} is not below 1")
    total_eps = eps * math.sqrt(2.0 * n * math.log(1.0 / delta_slack)) + n * eps * math.expm1(eps)
    return ApproxDpGuarantee(total_eps, total_delta)


def _compose_advanced_hetero(eps_list, delta_per_query, delta_slack):
    total_delta = len(eps_list) * delta_per_query + delta_slack
    if total_delta >= 1.0:
        raise DomainError(f"total delta {total_delta!r} is not below 1")
    sq = math.fsum(e * e for e in eps_list)
    drift = math.fsum(e * math.expm1(e) for e in eps_list)
    return math.sqrt(2.0 * sq * math.log(1.0 / delta_slack)) + drift


# -- conversions ---------------------------------------------------------------

def _check_conversion(conversion):
    if conversion not in CONVERSIONS:
        raise DomainError(f"conversion must be one of {CONVERSIONS}, got {conversion!r}")


def adp_log_moment_to_approx(log_moment: float, alpha: float, delta: float) -> float:
    """Proof-form conversion from ``log(a(a-1) eps + 1)``."""
    return (log_moment - math.log(delta)) / (alpha - 1.0)


def adp_to_approx(g: AdpGuarantee, delta: float, conversion: str = "proof") -> ApproxDpGuarantee:
    """Convert an ADP guarantee to (eps, delta)-DP via the Markov bound.

    ``proof``: ``log((a(a-1) eps + 1) / delta) / (a - 1)``.
    ``statement``: ``log((e**eps a(a-1) + 1) / delta) / (a - 1)`` (looser;
    kept for side-by-side comparison).
    """
    delta = _prob(delta)
    _check_conversion(conversion)
    a, eps = g.alpha, g.epsilon
    c = a * (a - 1.0)
    if conversion == "proof":
        log_moment = math.log1p(c * eps)
    else:
        # log(e^eps * c + 1) without overflowing e^eps
        x = eps + math.log(c)
        log_moment = x + math.log1p(math.exp(-x)) if x > 0 else math.log1p(math.exp(x))
    value = adp_log_moment_to_approx(log_moment, a, delta)
    if not math.isfinite(value):
        raise NumericOverflow("converted epsilon is not finite")
    return ApproxDpGuarantee(value, delta)


def rdp_to_approx(g: RdpGuarantee, delta: float) -> ApproxDpGuarantee:
    delta = _prob(delta)
    return ApproxDpGuarantee(g.epsilon_bar + math.log(1.0 / delta) / (g.alpha - 1.0), delta)


def zcdp_to_approx(g: ZcdpGuarantee, delta: float) -> ApproxDpGuarantee:
    delta = _prob(delta)
    return ApproxDpGuarantee(g.rho + 2.0 * math.sqrt(g.rho * math.log(1.0 / delta)), delta)


# -- group privacy ---------------------------------------------------------------

def group_privacy_adp(g: AdpGuarantee, k: int) -> AdpGuarantee:
    """Guarantee for datasets differing in at most ``2**k`` entries."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise DomainError(f"k must be a nonnegative integer, got {k!r}")
    if k == 0:
        return g
    a = g.alpha
    if a <= 2.0 ** k:
        raise GroupTooLarge(f"alpha={a!r} must exceed 2**k={2 ** k}")
    a_new = a / 2.0 ** k
    if a_new <= 1.0 + 1e-12:
        raise GroupTooLarge(f"reduced alpha {a_new!r} is too close to 1")
    return AdpGuarantee(a_new, a * (a - 1.0) / (a_new * (a_new - 1.0)) * g.epsilon)


def group_exponent(group_size: int) -> int:
    """Smallest k with ``2**k >= group_size`` (sizes round up to a power of two)."""
    if isinstance(group_size, bool) or not isinstance(group_size, int) or group_size < 1:
        raise DomainError(f"group_size must be a positive integer, got {group_size!r}")
    return (group_size - 1).bit_length()


def group_privacy_adp_for_size(g: AdpGuarantee, group_size: int) -> AdpGuarantee:
    return group_privacy_adp(g, group_exponent(group_size))


# -- ledger ------------------------------------------------------------------------

@dataclass(frozen=True)
class CompositionLedger:
    """Immutable record of per-step guarantees and their running total.

    ``steps`` holds per-step epsilons (ADP, RDP, Advanced) or rhos (zCDP).
    For ``Advanced`` the cumulative value is the heterogeneous advanced
    composition epsilon at ``delta_per_query`` / ``delta_slack``.
    """

    framework: str
    alpha: Optional[float] = None
    steps: tuple = ()
    cumulative: float = 0.0
    delta_per_query: Optional[float] = None
    delta_slack: Optional[float] = None

    def __post_init__(self):
        if self.framework not in FRAMEWORKS:
            raise DomainError(f"framework must be one of {FRAMEWORKS}, got {self.framework!r}")
        if self.framework in ("ADP", "RDP"):
            if self.alpha is None:
                raise DomainError(f"{self.framework} ledger needs alpha")
            object.__setattr__(self, "alpha", check_alpha(self.alpha))
        elif self.alpha is not None:
            raise DomainError(f"{self.framework} ledger takes no alpha")
        if self.framework == "Advanced":
            if self.delta_per_query is None or self.delta_slack is None:
                raise DomainError("Advanced ledger needs delta_per_query and delta_slack")
            _prob(self.delta_per_query, "delta_per_query")
            _prob(self.delta_slack, "delta_slack")
        object.__setattr__(self, "steps", tuple(_nonneg(s, "step") for s in self.steps))

    @classmethod
    def empty(cls, framework, alpha=None, delta_per_query=None, delta_slack=None):
        return cls(framework, alpha, (), 0.0, delta_per_query, delta_slack)

    def _fold(self, acc, step, steps_so_far):
        if self.framework == "ADP":
            return compose_adp(acc, step, self.alpha)
        if self.framework == "RDP":
            return compose_rdp(acc, step)
        if self.framework == "zCDP":
            return compose_zcdp(acc, step)
        return _compose_advanced_hetero(steps_so_far, self.delta_per_query, self.delta_slack)

    def append(self, step: float, alpha: Optional[float] = None) -> "CompositionLedger":
        if alpha is not None and self.alpha is not None and float(alpha) != self.alpha:
            raise DomainError(f"step alpha {alpha!r} differs from ledger alpha {self.alpha!r}")
        step = _nonneg(step, "step")
        steps = self.steps + (step,)
        cumulative = self._fold(self.cumulative, step, steps)
        return CompositionLedger(self.framework, self.alpha, steps, cumulative,
                                 self.delta_per_query, self.delta_slack)

    def extend(self, steps) -> "CompositionLedger":
        ledger = self
        for s in steps:
            ledger = ledger.append(s)
        return ledger

    def replay(self) -> float:
        """Recompute the cumulative value from ``steps`` in order."""
        acc = 0.0
        for i, s in enumerate(self.steps):
            acc = self._fold(acc, s, self.steps[: i + 1])
        return acc

    def total_delta(self) -> Optional[float]:
        if self.framework != "Advanced":
            return None
        return len(self.steps) * self.delta_per_query + self.delta_slack

    def to_approx(self, delta: float, conversion: str = "proof") -> ApproxDpGuarantee:
        if self.framework == "ADP":
            return adp_to_approx(AdpGuarantee(self.alpha, self.cumulative), delta, conversion)
        if self.framework == "RDP":
            return rdp_to_approx(RdpGuarantee(self.alpha, self.cumulative), delta)
        if self.framework == "zCDP":
            return zcdp_to_approx(ZcdpGuarantee(self.cumulative), delta)
        return ApproxDpGuarantee(self.cumulative, self.total_delta())

    def to_dict(self) -> dict:
        record = {
            "framework": self.framework,
            "alpha": self.alpha,
            "steps": list(self.steps),
            "cumulative": self.cumulative,
        }
        if self.framework == "Advanced":
            record["delta_per_query"] = self.delta_per_query
            record["delta_slack"] = self.delta_slack
            record["total_delta"] = self.total_delta()
        return record

    @classmethod
    def from_dict(cls, record: dict) -> "CompositionLedger":
        ledger = cls(record["framework"], record.get("alpha"), tuple(record["steps"]),
                     float(record["cumulative"]), record.get("delta_per_query"),
                     record.get("delta_slack"))
        if ledger.replay() != ledger.cumulative:
            raise DomainError("ledger cumulative does not match its steps")
        return ledger
