"""Statistical tests for cohort analyses.

The Student-t CDF is evaluated through the regularized incomplete beta
function with a modified Lentz continued fraction, which keeps this module
dependency-light and pins the numerics to a single primitive shared by the
Pearson, t- and Williams tests.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import StatsError

_BETA_EPS = 1e-15
_BETA_MAX_ITER = 500


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: float
    p_value: float
    method: str

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise StatsError(f"p-value out of range: {self.p_value}")


def _betacf(a, b, x):
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_EPS:
        d = _BETA_EPS
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_EPS:
            d = _BETA_EPS
        c = 1.0 + aa / c
        if abs(c) < _BETA_EPS:
            c = _BETA_EPS
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_EPS:
            d = _BETA_EPS
        c = 1.0 + aa / c
        if abs(c) < _BETA_EPS:
            c = _BETA_EPS
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-14:
            return h
    raise StatsError("incomplete beta continued fraction did not converge")


def betainc_reg(a, b, x):
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise StatsError("beta parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_cdf(t, df):
    """CDF of Student's t with `df` degrees of freedom."""
    if df <= 0:
        raise StatsError(f"df must be positive, got {df}")
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * betainc_reg(df / 2.0, 0.5, x)
    return tail if t < 0 else 1.0 - tail


def t_p_value(t, df, tails=2):
    """One- or two-tailed p-value for a t statistic.

    One-tailed is the probability of a value at least as extreme in the
    observed direction.
    """
    if tails == 2:
        x = df / (df + t * t)
        return min(1.0, betainc_reg(df / 2.0, 0.5, x)) if t != 0.0 else 1.0
    if tails == 1:
        return student_t_cdf(t, df) if t < 0 else 1.0 - student_t_cdf(t, df)
    raise StatsError(f"tails must be 1 or 2, got {tails}")


def _as_finite(seq, name):
    arr = np.asarray(seq, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise StatsError(f"{name} contains non-finite values")
    return arr


def pearson(x, y, tails=2):
    """Pearson correlation with a Student-t significance test."""
    x = _as_finite(x, "x")
    y = _as_finite(y, "y")
    if x.size != y.size:
        raise StatsError("paired sample lengths differ")
    n = x.size
    if n < 3:
        raise StatsError(f"need n >= 3, got {n}")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = dx @ dx
    syy = dy @ dy
    if sxx == 0.0 or syy == 0.0:
        raise StatsError("constant input: zero variance")
    r = float((dx @ dy) / math.sqrt(sxx * syy))
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return TestResult(r, n - 2, 0.0, "pearson")
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return TestResult(r, n - 2, t_p_value(t, n - 2, tails), "pearson")


def unpaired_t(a, b, pooled=True, tails=2):
    """Two-sample t-test; pooled variance by default (df = na + nb - 2)."""
    a = _as_finite(a, "a")
    b = _as_finite(b, "b")
    if a.size < 2 or b.size < 2:
        raise StatsError("each group needs at least 2 observations")
    na, nb = a.size, b.size
    va = a.var(ddof=1)
    vb = b.var(ddof=1)
    if va == 0.0 and vb == 0.0 and a.mean() == b.mean():
        raise StatsError("all values identical in both groups")
    if pooled:
        sp2 = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2)
        if sp2 == 0.0:
            raise StatsError("zero pooled variance with unequal means")
        t = (a.mean() - b.mean()) / math.sqrt(sp2 * (1.0 / na + 1.0 / nb))
        df = na + nb - 2
        method = "t-pooled"
    else:
        se2 = va / na + vb / nb
        if se2 == 0.0:
            raise StatsError("zero variance with unequal means")
        t = (a.mean() - b.mean()) / math.sqrt(se2)
        df = se2**2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
        method = "t-welch"
    return TestResult(float(t), float(df), t_p_value(float(t), df, tails), method)


def williams_t(r13, r23, r12, n):
    """Williams' test for two dependent correlations sharing variable 3.

    t = (r13 - r23) * sqrt((n-1)(1+r12) /
        (2K(n-1)/(n-3) + rbar^2 (1-r12)^3)),   df = n - 3,
    with K = 1 - r12^2 - r13^2 - r23^2 + 2 r12 r13 r23 and
    rbar = (r13 + r23)/2.
    """
    for name, r in (("r13", r13), ("r23", r23), ("r12", r12)):
        if not (-1.0 < r < 1.0):
            raise StatsError(f"{name} must lie in (-1, 1), got {r}")
    if n < 4:
        raise StatsError(f"need n >= 4, got {n}")
    det = 1.0 - r12**2 - r13**2 - r23**2 + 2.0 * r12 * r13 * r23
    if det <= 0.0:
        raise StatsError(f"impossible correlation triple (K = {det:.3g})")
    rbar = (r13 + r23) / 2.0
    denom = 2.0 * det * (n - 1) / (n - 3) + rbar * rbar * (1.0 - r12) ** 3
    t = (r13 - r23) * math.sqrt((n - 1) * (1.0 + r12) / denom)
    df = n - 3
    return TestResult(float(t), df, t_p_value(float(t), df, tails=2), "williams")


def bonferroni(p_values, m):
    """Adjusted p-values min(1, p*m)."""
    if m < 1:
        raise StatsError(f"m must be >= 1, got {m}")
    for p in p_values:
        if not (0.0 <= p <= 1.0):
            raise StatsError(f"p must be in [0, 1], got {p}")
    return [min(1.0, p * m) for p in p_values]


def group_summary(values):
    """(mean, sample standard deviation) with the n-1 denominator."""
    arr = _as_finite(values, "values")
    if arr.size < 2:
        raise StatsError(f"need n >= 2, got {arr.size}")
    return float(arr.mean()), float(arr.std(ddof=1))


def significance_stars(p):
    """Star label at the conventional .05/.01/.001 thresholds."""
    if not (0.0 <= p <= 1.0):
        raise StatsError(f"p must be in [0, 1], got {p}")
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""
