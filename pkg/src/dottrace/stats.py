"""Statistics for a two-factor (2x2) fully repeated-measures design.

Implements descriptive summaries, the Shapiro-Wilk normality test
(Royston's AS R94 approximation, n in [3, 5000]), a two-way
repeated-measures ANOVA with generalized eta squared, paired t tests, and
Bonferroni correction. Distribution tails come from the local incomplete
beta routines, so results are deterministic across platforms.
"""

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .distributions import f_sf, student_t_two_sided_p
from .errors import DegenerateDataError, EmptyDataError, ParameterError

_NORMAL = NormalDist()


@dataclass(frozen=True)
class Descriptives:
    n: int
    mean: float
    sd: float
    se: float


def descriptives(values) -> Descriptives:
    """Sample mean, sd (ddof=1), and standard error; n = 1 gives NaN spread."""
    x = np.asarray(list(values), dtype=float)
    if x.size == 0:
        raise EmptyDataError("descriptives need at least one value")
    if not np.all(np.isfinite(x)):
        raise ParameterError("values must be finite")
    n = int(x.size)
    mean = float(np.mean(x))
    if n == 1:
        return Descriptives(n=1, mean=mean, sd=float("nan"), se=float("nan"))
    sd = float(np.std(x, ddof=1))
    return Descriptives(n=n, mean=mean, sd=sd, se=sd / math.sqrt(n))


@dataclass(frozen=True)
class ShapiroResult:
    n: int
    w: float
    p: float


def shapiro_wilk(values) -> ShapiroResult:
    """Shapiro-Wilk W and p via Royston's polynomial approximations."""
    x = np.sort(np.asarray(list(values), dtype=float))
    n = int(x.size)
    if n < 3 or n > 5000:
        raise ParameterError(f"shapiro_wilk supports 3 <= n <= 5000, got {n}")
    if not np.all(np.isfinite(x)):
        raise ParameterError("values must be finite")
    if x[-1] == x[0]:
        raise DegenerateDataError("all values identical; W is undefined")

    # expected normal order statistics (Blom scores)
    m = np.array([_NORMAL.inv_cdf((i - 0.375) / (n + 0.25))
                  for i in range(1, n + 1)])
    msq = float(np.dot(m, m))
    if n == 3:
        a = np.array([-math.sqrt(0.5), 0.0, math.sqrt(0.5)])
    else:
        c = m / math.sqrt(msq)
        u = 1.0 / math.sqrt(n)
        a_n = _poly([-2.706056, 4.434685, -2.071190, -0.147981, 0.221157,
                     c[-1]], u)
        a = np.empty(n)
        if n > 5:
            a_n1 = _poly([-3.582633, 5.682633, -1.752461, -0.293762, 0.042981,
                          c[-2]], u)
            phi = ((msq - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2)
                   / (1.0 - 2.0 * a_n ** 2 - 2.0 * a_n1 ** 2))
            a[2:-2] = m[2:-2] / math.sqrt(phi)
            a[-1], a[-2], a[0], a[1] = a_n, a_n1, -a_n, -a_n1
        else:
            phi = (msq - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n ** 2)
            a[1:-1] = m[1:-1] / math.sqrt(phi)
            a[-1], a[0] = a_n, -a_n

    ssd = float(np.sum((x - np.mean(x)) ** 2))
    w = float(np.dot(a, x)) ** 2 / ssd
    w = min(w, 1.0)
    if w == 1.0:
        return ShapiroResult(n=n, w=w, p=1.0)

    if n == 3:
        p = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        p = min(1.0, max(0.0, p))
        return ShapiroResult(n=n, w=w, p=p)
    y = math.log(1.0 - w)
    if n <= 11:
        gamma = 0.459 * n - 2.273
        if y >= gamma:
            return ShapiroResult(n=n, w=w, p=0.0)
        y = -math.log(gamma - y)
        mu = _poly([-0.0006714, 0.025054, -0.39978, 0.5440], n)
        sigma = math.exp(_poly([-0.0020322, 0.062767, -0.77857, 1.3822], n))
    else:
        ln_n = math.log(n)
        mu = _poly([0.0038915, -0.083751, -0.31082, -1.5861], ln_n)
        sigma = math.exp(_poly([0.0030302, -0.082676, -0.4803], ln_n))
    z = (y - mu) / sigma
    p = 1.0 - _NORMAL.cdf(z)
    return ShapiroResult(n=n, w=w, p=min(1.0, max(0.0, p)))


def _poly(coeffs, x):
    """Horner evaluation, highest-order coefficient first."""
    acc = 0.0
    for cf in coeffs:
        acc = acc * x + cf
    return acc


@dataclass(frozen=True)
class CellTable:
    """Complete 2x2 within-subject table: values[participant, a_level, b_level]."""
    values: np.ndarray
    a_levels: tuple = ("vertical", "horizontal")
    b_levels: tuple = ("flat", "curved")

    def validate(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 3 or v.shape[1:] != (2, 2):
            raise ParameterError(f"table must be (n, 2, 2), got {v.shape}")
        if v.shape[0] < 2:
            raise ParameterError("need at least 2 participants")
        if not np.all(np.isfinite(v)):
            raise ParameterError("table values must be finite")
        if len(self.a_levels) != 2 or len(self.b_levels) != 2:
            raise ParameterError("both factors must have exactly 2 levels")


@dataclass(frozen=True)
class AnovaEffect:
    name: str
    df1: int
    df2: int
    ss_effect: float
    ss_error: float
    f: float
    p: float
    eta2: float    # generalized eta squared


def eta2_label(eta2: float) -> str:
    """Effect-size band: small < 0.06 <= medium < 0.14 <= large."""
    if eta2 >= 0.14:
        return "large"
    if eta2 >= 0.06:
        return "medium"
    return "small"


def ss_decomposition(table: CellTable) -> dict:
    """All seven sums of squares, each from its own mean contrast (the
    residual term is computed directly, not by subtraction, so additivity
    is a checkable property rather than an identity)."""
    table.validate()
    y = np.asarray(table.values, dtype=float)
    p = y.shape[0]
    grand = y.mean()
    m_s = y.mean(axis=(1, 2))            # per subject
    m_a = y.mean(axis=(0, 2))            # per level of A
    m_b = y.mean(axis=(0, 1))
    m_ab = y.mean(axis=0)                # 2x2 cell means
    m_sa = y.mean(axis=2)                # subject x A
    m_sb = y.mean(axis=1)

    resid = (y - m_sa[:, :, None] - m_sb[:, None, :] - m_ab[None, :, :]
             + m_s[:, None, None] + m_a[None, :, None] + m_b[None, None, :]
             - grand)
    return {
        "total": float(np.sum((y - grand) ** 2)),
        "subjects": 4.0 * float(np.sum((m_s - grand) ** 2)),
        "a": 2.0 * p * float(np.sum((m_a - grand) ** 2)),
        "b": 2.0 * p * float(np.sum((m_b - grand) ** 2)),
        "ab": p * float(np.sum((m_ab - m_a[:, None] - m_b[None, :] + grand) ** 2)),
        "a_subjects": 2.0 * float(np.sum((m_sa - m_s[:, None] - m_a[None, :] + grand) ** 2)),
        "b_subjects": 2.0 * float(np.sum((m_sb - m_s[:, None] - m_b[None, :] + grand) ** 2)),
        "ab_subjects": float(np.sum(resid ** 2)),
    }


def rm_anova_2x2(table: CellTable, name_a: str = "orientation",
                 name_b: str = "configuration") -> list:
    """Two-way fully repeated-measures ANOVA on a complete 2x2 table.

    Each effect is tested against its own effect-by-subject interaction
    (df 1, n-1). eta2 is generalized eta squared: SS_effect over SS_effect
    plus every subject-containing SS term.
    """
    ss = ss_decomposition(table)
    p = np.asarray(table.values).shape[0]
    ss_a, ss_b, ss_ab = ss["a"], ss["b"], ss["ab"]
    ss_as, ss_bs, ss_abs = ss["a_subjects"], ss["b_subjects"], ss["ab_subjects"]
    ss_subj = ss["subjects"]

    if ss["total"] == 0.0:
        raise DegenerateDataError("all table values identical; no variance to test")
    denom_extra = ss_subj + ss_as + ss_bs + ss_abs
    effects = []
    for name, ss_eff, ss_err in ((name_a, ss_a, ss_as),
                                 (name_b, ss_b, ss_bs),
                                 (f"{name_a}*{name_b}", ss_ab, ss_abs)):
        df2 = p - 1
        if ss_err <= 0.0:
            raise DegenerateDataError(
                f"zero error variance for effect {name!r}; F is undefined")
        f_val = ss_eff / (ss_err / df2)
        effects.append(AnovaEffect(
            name=name, df1=1, df2=df2, ss_effect=ss_eff, ss_error=ss_err,
            f=f_val, p=f_sf(f_val, 1, df2),
            eta2=ss_eff / (ss_eff + denom_extra) if ss_eff + denom_extra > 0 else 0.0))
    return effects


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float


def paired_t(x, y) -> TTestResult:
    """Two-sided paired t test on matched arrays."""
    x = np.asarray(list(x), dtype=float)
    y = np.asarray(list(y), dtype=float)
    if x.shape != y.shape:
        raise ParameterError(f"paired arrays differ in length: {x.size} vs {y.size}")
    if x.size < 2:
        raise ParameterError("paired t needs at least 2 pairs")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ParameterError("values must be finite")
    d = x - y
    sd = float(np.std(d, ddof=1))
    mean_d = float(np.mean(d))
    # a spread at float-rounding scale is measurement-identical data
    if sd <= 1e-12 * abs(mean_d):
        raise DegenerateDataError("differences have zero variance")
    n = d.size
    t = float(np.mean(d)) / (sd / math.sqrt(n))
    return TTestResult(t=t, df=n - 1, p=student_t_two_sided_p(t, n - 1))


def bonferroni(p_values, k: int | None = None) -> list:
    """Multiply by family size and clamp to 1."""
    ps = list(p_values)
    if k is None:
        k = len(ps)
    if k < 1:
        raise ParameterError(f"family size must be >= 1, got {k}")
    for p in ps:
        if not (math.isfinite(p) and 0.0 <= p <= 1.0):
            raise ParameterError(f"p-values must lie in [0, 1], got {p}")
    return [min(1.0, p * k) for p in ps]


@dataclass(frozen=True)
class LikertSummary:
    scale_min: float
    scale_max: float
    conditions: dict    # label -> Descriptives


def likert_descriptives(responses: dict, bounds=(1, 5)) -> LikertSummary:
    """Per-condition summaries of bounded ordinal ratings."""
    lo, hi = bounds
    if not lo < hi:
        raise ParameterError(f"bounds must satisfy lo < hi, got {bounds}")
    out = {}
    for label, scores in responses.items():
        scores = list(scores)
        for s in scores:
            if not lo <= s <= hi:
                raise ParameterError(
                    f"rating {s} for {label!r} outside scale [{lo}, {hi}]")
        out[label] = descriptives(scores)
    return LikertSummary(scale_min=float(lo), scale_max=float(hi), conditions=out)
