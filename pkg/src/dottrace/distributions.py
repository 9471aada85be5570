"""Probability distribution functions used by the analysis and power code.

Everything is built on the regularized incomplete beta function, evaluated
with a modified Lentz continued fraction. Central t and F values are good to
well below 1e-8 absolute; the noncentral F CDF (Poisson mixture of incomplete
betas) is truncated so its absolute error stays below 1e-10.
"""

import math

from .errors import DomainError

_CF_EPS = 1e-16
_CF_MAX_ITER = 500
_TINY = 1e-300


def log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the continued fraction for I_x(a, b).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        num = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + num * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + num / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + num * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + num / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise DomainError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"beta parameters must be positive, got a={a}, b={b}")
    if x < 0.0 or x > 1.0:
        raise DomainError(f"incomplete beta argument must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(a * math.log(x) + b * math.log1p(-x) - log_beta(a, b))
    # The continued fraction converges fast only on one side of the mean.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: float) -> float:
    """P(T > t) for Student's t with df degrees of freedom."""
    if df <= 0.0:
        raise DomainError(f"degrees of freedom must be positive, got {df}")
    x = df / (df + t * t)
    half_tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x)
    return half_tail if t >= 0.0 else 1.0 - half_tail


def student_t_cdf(t: float, df: float) -> float:
    return 1.0 - student_t_sf(t, df)


def student_t_two_sided_p(t: float, df: float) -> float:
    """Two-sided p-value for an observed t statistic."""
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(0.5 * df, 0.5, x)


def f_cdf(x: float, df1: float, df2: float) -> float:
    """P(F <= x) for the central F distribution."""
    if df1 <= 0.0 or df2 <= 0.0:
        raise DomainError(f"degrees of freedom must be positive, got ({df1}, {df2})")
    if x <= 0.0:
        return 0.0
    y = df1 * x / (df1 * x + df2)
    return regularized_incomplete_beta(0.5 * df1, 0.5 * df2, y)


def f_sf(x: float, df1: float, df2: float) -> float:
    """P(F > x) for the central F distribution."""
    if df1 <= 0.0 or df2 <= 0.0:
        raise DomainError(f"degrees of freedom must be positive, got ({df1}, {df2})")
    if x <= 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    y = df2 / (df1 * x + df2)
    return regularized_incomplete_beta(0.5 * df2, 0.5 * df1, y)


def f_isf(alpha: float, df1: float, df2: float) -> float:
    """Upper-alpha quantile of the central F distribution (bisection on f_sf)."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    lo, hi = 0.0, 1.0
    while f_sf(hi, df1, df2) > alpha:
        hi *= 2.0
        if hi > 1e12:
            raise DomainError("F quantile bracket exceeded 1e12")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f_sf(mid, df1, df2) > alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def noncentral_f_cdf(x: float, df1: float, df2: float, nc: float) -> float:
    """P(F <= x) for the noncentral F distribution with noncentrality nc.

    Poisson mixture of central incomplete betas, summed outward from the
    Poisson mode so large noncentralities do not underflow.
    """
    if df1 <= 0.0 or df2 <= 0.0:
        raise DomainError(f"degrees of freedom must be positive, got ({df1}, {df2})")
    if nc < 0.0:
        raise DomainError(f"noncentrality must be non-negative, got {nc}")
    if x <= 0.0:
        return 0.0
    if nc == 0.0:
        return f_cdf(x, df1, df2)

    half = 0.5 * nc
    y = df1 * x / (df1 * x + df2)
    log_half = math.log(half)

    def weight(j: int) -> float:
        return math.exp(-half + j * log_half - math.lgamma(j + 1.0))

    mode = int(half)
    total = 0.0
    cum_weight = 0.0
    # downward sweep from the mode, then upward above it
    for j in range(mode, -1, -1):
        w = weight(j)
        cum_weight += w
        total += w * regularized_incomplete_beta(0.5 * df1 + j, 0.5 * df2, y)
        if w < 1e-17 and j < mode:
            break
    j = mode + 1
    while cum_weight < 1.0 - 1e-12 and j < mode + 100000:
        w = weight(j)
        cum_weight += w
        total += w * regularized_incomplete_beta(0.5 * df1 + j, 0.5 * df2, y)
        if w < 1e-17:
            break
        j += 1
    return min(1.0, total)
