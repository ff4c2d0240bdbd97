# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same algorithms, same operation order as ``_kernels_py``."""
from libc.math cimport exp, expm1, log, fabs, INFINITY, M_PI, isfinite

cdef enum:
    MODE_MOMENT = 1
    FAMILY_GAUSSIAN = 0

cdef double SERIES_CUTOFF = 0.1
cdef double EXP_MAX = 709.0

cdef double HALF_LOG_2PI = 0.5 * log(2.0 * M_PI)


cdef struct Params:
    int mode
    int family
    double mu_p
    double s_p
    double mu_q
    double s_q
    double alpha
    double shift


cdef inline double _log_density(int family, double x, double mu, double s) nogil:
    cdef double z
    if family == FAMILY_GAUSSIAN:
        z = (x - mu) / s
        return -0.5 * z * z - log(s) - HALF_LOG_2PI
    return -fabs(x - mu) / s - log(2.0 * s)


cdef inline double _log_ratio(int family, double x, double mu_p, double s_p,
                              double mu_q, double s_q) nogil:
    cdef double zq, zp
    if family == FAMILY_GAUSSIAN:
        if s_p == s_q:
            return (mu_p - mu_q) * ((x - mu_p) + (x - mu_q)) / (2.0 * s_p * s_p)
        zq = (x - mu_q) / s_q
        zp = (x - mu_p) / s_p
        return 0.5 * (zq - zp) * (zq + zp) + log(s_q / s_p)
    if s_p == s_q:
        return (fabs(x - mu_q) - fabs(x - mu_p)) / s_p
    return fabs(x - mu_q) / s_q - fabs(x - mu_p) / s_p + log(s_q / s_p)


cdef inline double _safe_exp(double v) nogil:
    if v > EXP_MAX:
        return INFINITY
    return exp(v)


cdef double _generator_term(double alpha, double t, double lq) nogil:
    cdef double at = alpha * t
    cdef double geo, tk, g, c, aa
    cdef int k
    if fabs(at) <= SERIES_CUTOFF:
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
            if fabs(c) <= 1e-18 * fabs(g):
                break
        return exp(lq) * g
    aa = alpha * (alpha - 1.0)
    if at > 30.0:
        return (_safe_exp(lq + at) - alpha * exp(lq + t) + (alpha - 1.0) * exp(lq)) / aa
    return exp(lq) * (expm1(at) - alpha * expm1(t)) / aa


cdef double _integrand(Params* P, double x) nogil:
    cdef double lq = _log_density(P.family, x, P.mu_q, P.s_q)
    cdef double t = _log_ratio(P.family, x, P.mu_p, P.s_p, P.mu_q, P.s_q)
    if P.mode == MODE_MOMENT:
        return _safe_exp(lq + P.alpha * t - P.shift)
    return _generator_term(P.alpha, t, lq)


def log_density(int family, double x, double mu, double s):
    return _log_density(family, x, mu, s)


def log_ratio(int family, double x, double mu_p, double s_p, double mu_q, double s_q):
    return _log_ratio(family, x, mu_p, s_p, mu_q, s_q)


def generator_term(double alpha, double t, double lq):
    return _generator_term(alpha, t, lq)


def integrand(int mode, int family, double mu_p, double s_p, double mu_q,
              double s_q, double alpha, double shift, double x):
    cdef Params P
    P.mode = mode; P.family = family
    P.mu_p = mu_p; P.s_p = s_p; P.mu_q = mu_q; P.s_q = s_q
    P.alpha = alpha; P.shift = shift
    return _integrand(&P, x)


cdef double _adaptive(Params* P, double a, double b, double fa, double fm,
                      double fb, double whole, double tol, int depth,
                      long* evals, long* unconverged) nogil:
    cdef double m = 0.5 * (a + b)
    cdef double lm = 0.5 * (a + m)
    cdef double rm = 0.5 * (m + b)
    cdef double flm = _integrand(P, lm)
    cdef double frm = _integrand(P, rm)
    cdef double left, right, both, delta
    evals[0] += 2
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    both = left + right
    delta = both - whole
    if fabs(delta) <= 15.0 * tol or fabs(delta) <= 4e-16 * fabs(both):
        return both + delta / 15.0
    if depth <= 0:
        unconverged[0] += 1
        return both + delta / 15.0
    return (_adaptive(P, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals, unconverged)
            + _adaptive(P, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals, unconverged))


cdef double _coarse(Params* P, double lo, double hi, int n_panels, long* evals) nogil:
    cdef double h = (hi - lo) / n_panels
    cdef double fa = _integrand(P, lo)
    cdef double a, b, fm, fb, s = 0.0
    cdef int j
    evals[0] += 1
    for j in range(n_panels):
        a = lo + j * h
        b = hi if j == n_panels - 1 else lo + (j + 1) * h
        fm = _integrand(P, 0.5 * (a + b))
        fb = _integrand(P, b)
        evals[0] += 2
        s += (b - a) / 6.0 * (fa + 4.0 * fm + fb)
        fa = fb
    return s


cdef double _refine(Params* P, double lo, double hi, int n_panels, double abs_tol,
                    double span, int max_depth, long* evals, long* unconverged) nogil:
    cdef double h = (hi - lo) / n_panels
    cdef double fa = _integrand(P, lo)
    cdef double a, b, fm, fb, whole, total = 0.0
    cdef int j
    for j in range(n_panels):
        a = lo + j * h
        b = hi if j == n_panels - 1 else lo + (j + 1) * h
        fm = _integrand(P, 0.5 * (a + b))
        fb = _integrand(P, b)
        whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
        total += _adaptive(P, a, b, fa, fm, fb, whole, abs_tol * (b - a) / span,
                           max_depth, evals, unconverged)
        fa = fb
    return total


def integrate(int mode, int family, double mu_p, double s_p, double mu_q,
              double s_q, double alpha, double shift, breaks,
              int n_panels=64, double rtol=1e-11, int max_depth=50):
    """Adaptive Simpson over the pieces delimited by ``breaks``.

    Returns ``(value, evaluations, unconverged_panels)``.
    """
    cdef Params P
    cdef long evals = 0, unconverged = 0
    cdef double estimate = 0.0, total = 0.0, lo, hi, span, abs_tol
    cdef Py_ssize_t i, n = len(breaks)
    cdef list pts = [float(v) for v in breaks]
    P.mode = mode; P.family = family
    P.mu_p = mu_p; P.s_p = s_p; P.mu_q = mu_q; P.s_q = s_q
    P.alpha = alpha; P.shift = shift
    for i in range(n - 1):
        lo = pts[i]; hi = pts[i + 1]
        if hi > lo:
            estimate += _coarse(&P, lo, hi, n_panels, &evals)
    if not isfinite(estimate):
        return estimate, evals, (n - 1) * n_panels
    if estimate == 0.0:
        return 0.0, evals, 0
    span = pts[n - 1] - pts[0]
    abs_tol = rtol * fabs(estimate)
    for i in range(n - 1):
        lo = pts[i]; hi = pts[i + 1]
        if hi > lo:
            total += _refine(&P, lo, hi, n_panels, abs_tol, span, max_depth,
                             &evals, &unconverged)
    return total, evals, unconverged


def adp_recursion(double eps, double alpha, long n):
    """Literal loop ``acc <- acc + eps + a(a-1) (acc eps)`` run ``n`` times."""
    cdef double c = alpha * (alpha - 1.0)
    cdef double acc = 0.0
    cdef long i
    with nogil:
        for i in range(n):
            acc = acc + eps + c * (acc * eps)
    return acc
