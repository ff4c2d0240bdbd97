"""Pure-Python kernels. Mirrors ``_kernels.pyx`` operation for operation.

Integrand modes:

* ``MODE_GENERATOR``: ``q(x) * f(p(x)/q(x))`` with the alpha-divergence
  generator ``f(u) = (u**a - a*u - (1 - a)) / (a*(a - 1))``. Nonnegative, so
  the integral keeps full relative precision even when the divergence is tiny.
* ``MODE_MOMENT``: ``exp(log q + a*log(p/q) - shift)``, the scaled
  moment integrand used for log-domain evaluation.

Families: ``FAMILY_GAUSSIAN`` (scale = sigma), ``FAMILY_LAPLACE`` (scale = b).
"""
import math

MODE_GENERATOR = 0
MODE_MOMENT = 1
FAMILY_GAUSSIAN = 0
FAMILY_LAPLACE = 1

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_SERIES_CUTOFF = 0.1
_EXP_MAX = 709.0


def log_density(family, x, mu, s):
    if family == FAMILY_GAUSSIAN:
        z = (x - mu) / s
        return -0.5 * z * z - math.log(s) - _HALF_LOG_2PI
    return -abs(x - mu) / s - math.log(2.0 * s)


def log_ratio(family, x, mu_p, s_p, mu_q, s_q):
    """``log p(x) - log q(x)`` without cancelling two large quadratics."""
    if family == FAMILY_GAUSSIAN:
        if s_p == s_q:
            return (mu_p - mu_q) * ((x - mu_p) + (x - mu_q)) / (2.0 * s_p * s_p)
        zq = (x - mu_q) / s_q
        zp = (x - mu_p) / s_p
        return 0.5 * (zq - zp) * (zq + zp) + math.log(s_q / s_p)
    if s_p == s_q:
        return (abs(x - mu_q) - abs(x - mu_p)) / s_p
    return abs(x - mu_q) / s_q - abs(x - mu_p) / s_p + math.log(s_q / s_p)


def _safe_exp(v):
    if v > _EXP_MAX:
        return math.inf
    return math.exp(v)


def generator_term(alpha, t, lq):
    """``q * f(p/q)`` from ``t = log(p/q)`` and ``lq = log q``."""
    at = alpha * t
    if abs(at) <= _SERIES_CUTOFF:
        # sum_{k>=2} (1 + a + ... + a**(k-2)) t**k / k!
        geo = 1.0
        tk = t * t * 0.5
        g = tk
        k = 2
        while k < 40:
            k += 1
            geo = geo * alpha + 1.0
            tk = tk * t / k
            c = geo * tk
            g += c
            if abs(c) <= 1e-18 * abs(g):
                break
        return math.exp(lq) * g
    aa = alpha * (alpha - 1.0)
    if at > 30.0:
        return (_safe_exp(lq + at) - alpha * math.exp(lq + t) + (alpha - 1.0) * math.exp(lq)) / aa
    return math.exp(lq) * (math.expm1(at) - alpha * math.expm1(t)) / aa


def integrand(mode, family, mu_p, s_p, mu_q, s_q, alpha, shift, x):
    lq = log_density(family, x, mu_q, s_q)
    t = log_ratio(family, x, mu_p, s_p, mu_q, s_q)
    if mode == MODE_MOMENT:
        return _safe_exp(lq + alpha * t - shift)
    return generator_term(alpha, t, lq)


def _adaptive(f, a, b, fa, fm, fb, whole, tol, depth, state):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    state[0] += 2
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    both = left + right
    delta = both - whole
    if abs(delta) <= 15.0 * tol or abs(delta) <= 4e-16 * abs(both):
        return both + delta / 15.0
    if depth <= 0:
        state[1] += 1
        return both + delta / 15.0
    return (_adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, state)
            + _adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, state))


def integrate(mode, family, mu_p, s_p, mu_q, s_q, alpha, shift, breaks,
              n_panels=64, rtol=1e-11, max_depth=50):
    """Adaptive Simpson over the pieces delimited by ``breaks``.

    Returns ``(value, evaluations, unconverged_panels)``. A non-finite value or
    a nonzero panel count means the caller should reject the result.
    """
    def f(x):
        return integrand(mode, family, mu_p, s_p, mu_q, s_q, alpha, shift, x)

    # coarse pass sets the absolute tolerance
    panels = []
    estimate = 0.0
    evals = 0
    for i in range(len(breaks) - 1):
        lo, hi = breaks[i], breaks[i + 1]
        if hi <= lo:
            continue
        h = (hi - lo) / n_panels
        fa = f(lo)
        evals += 1
        for j in range(n_panels):
            a = lo + j * h
            b = hi if j == n_panels - 1 else lo + (j + 1) * h
            m = 0.5 * (a + b)
            fm = f(m)
            fb = f(b)
            evals += 2
            whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
            panels.append((a, b, fa, fm, fb, whole))
            estimate += whole
            fa = fb
    if not math.isfinite(estimate):
        return estimate, evals, len(panels)
    if estimate == 0.0:
        return 0.0, evals, 0
    span = breaks[-1] - breaks[0]
    abs_tol = rtol * abs(estimate)
    state = [evals, 0]
    total = 0.0
    for a, b, fa, fm, fb, whole in panels:
        total += _adaptive(f, a, b, fa, fm, fb, whole, abs_tol * (b - a) / span, max_depth, state)
    return total, state[0], state[1]


def adp_recursion(eps, alpha, n):
    """Literal loop ``acc <- acc + eps + a(a-1) (acc eps)`` run ``n`` times."""
    c = alpha * (alpha - 1.0)
    acc = 0.0
    for _ in range(n):
        acc = acc + eps + c * (acc * eps)
    return acc
