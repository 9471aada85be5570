"""Experiment design: condition counterbalancing and a-priori power.

Counterbalancing uses a balanced Latin square (Williams construction), in
which every condition appears once per row and column and every ordered
pair of conditions is immediately adjacent exactly once across rows.
Sample size comes from repeated-measures ANOVA power with the
noncentrality convention

    lambda = f^2 * n * m * epsilon / (1 - corr)

on df1 = epsilon*(m-1), df2 = epsilon*(m-1)*(n-1), where m is the number
of repeated measurements and corr the assumed correlation among them.
"""

import math
from dataclasses import dataclass

from .distributions import f_isf, noncentral_f_cdf
from .errors import (DomainError, InfeasibleDesignError, ParameterError,
                     UnsupportedOrderError)


@dataclass(frozen=True)
class LatinSquare:
    order: int
    rows: tuple    # tuple of rows, each a tuple of 1-based condition numbers

    def validate(self):
        n = self.order
        if len(self.rows) != n or any(len(r) != n for r in self.rows):
            raise ParameterError(f"square must be {n}x{n}")
        want = set(range(1, n + 1))
        for r in self.rows:
            if set(r) != want:
                raise ParameterError(f"row {r} is not a permutation of 1..{n}")
        for j in range(n):
            if {r[j] for r in self.rows} != want:
                raise ParameterError(f"column {j} is not a permutation of 1..{n}")
        if n % 2 == 0:
            pairs = set()
            for r in self.rows:
                for a, b in zip(r, r[1:]):
                    if (a, b) in pairs:
                        raise ParameterError(f"adjacent pair {(a, b)} repeats")
                    pairs.add((a, b))
            if len(pairs) != n * (n - 1):
                raise ParameterError("square is not first-order balanced")


def balanced_latin_square(n: int) -> LatinSquare:
    """Williams square of even order n; odd n > 2 would need two squares."""
    if not isinstance(n, int) or n < 2:
        raise UnsupportedOrderError(f"order must be an integer >= 2, got {n}")
    if n % 2 != 0:
        raise UnsupportedOrderError(
            f"odd order {n} has no single balanced square")
    first = []
    for j in range(n):
        if j == 0:
            first.append(1)
        elif j % 2 == 1:
            first.append(j // 2 + 2)
        else:
            first.append(n - j // 2 + 1)
    rows = tuple(tuple((x - 1 + i) % n + 1 for x in first) for i in range(n))
    square = LatinSquare(order=n, rows=rows)
    square.validate()
    return square


def assign_conditions(participant_ids, square: LatinSquare, labels) -> dict:
    """Cycle participants through square rows; returns id -> ordered labels."""
    labels = list(labels)
    if len(labels) != square.order:
        raise ParameterError(
            f"need {square.order} condition labels, got {len(labels)}")
    if len(set(labels)) != len(labels):
        raise ParameterError("condition labels must be unique")
    ids = list(participant_ids)
    if len(set(ids)) != len(ids):
        raise ParameterError("participant ids must be unique")
    return {pid: [labels[k - 1] for k in square.rows[i % square.order]]
            for i, pid in enumerate(ids)}


@dataclass(frozen=True)
class PowerSpec:
    effect_size_f: float
    alpha: float = 0.05
    target_power: float = 0.80
    groups: int = 1
    measurements: int = 4
    corr: float = 0.5
    epsilon: float = 1.0

    def validate(self):
        if not (math.isfinite(self.effect_size_f) and self.effect_size_f > 0):
            raise ParameterError(f"effect_size_f must be > 0, got {self.effect_size_f}")
        if not 0 < self.alpha < 1:
            raise ParameterError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0 < self.target_power < 1:
            raise ParameterError(f"target_power must be in (0, 1), got {self.target_power}")
        if self.groups != 1:
            raise ParameterError("only single-group within-subject designs are supported")
        if self.measurements < 2:
            raise ParameterError(f"measurements must be >= 2, got {self.measurements}")
        if not 0 <= self.corr < 1:
            raise ParameterError(f"corr must be in [0, 1), got {self.corr}")
        m = self.measurements
        if not 1.0 / (m - 1) <= self.epsilon <= 1.0:
            raise ParameterError(
                f"epsilon must lie in [1/(m-1), 1] = [{1.0 / (m - 1):.4f}, 1], "
                f"got {self.epsilon}")


def eta2_to_f(eta_p2: float) -> float:
    """Cohen's f from partial eta squared: f = sqrt(eta2 / (1 - eta2))."""
    if not (math.isfinite(eta_p2) and 0 <= eta_p2 < 1):
        raise DomainError(f"partial eta squared must be in [0, 1), got {eta_p2}")
    return math.sqrt(eta_p2 / (1.0 - eta_p2))


def rm_anova_power(spec: PowerSpec, n: int) -> float:
    """Achieved power of the within-factor test at sample size n."""
    spec.validate()
    if n < 2:
        raise ParameterError(f"sample size must be >= 2, got {n}")
    m, eps = spec.measurements, spec.epsilon
    df1 = eps * (m - 1)
    df2 = eps * (m - 1) * (n - 1)
    lam = spec.effect_size_f ** 2 * n * m * eps / (1.0 - spec.corr)
    f_crit = f_isf(spec.alpha, df1, df2)
    return 1.0 - noncentral_f_cdf(f_crit, df1, df2, lam)


def required_sample_size(spec: PowerSpec, n_cap: int = 10000) -> tuple:
    """Smallest n with power >= target; returns (n, achieved_power)."""
    spec.validate()
    for n in range(2, n_cap + 1):
        power = rm_anova_power(spec, n)
        if power >= spec.target_power:
            return n, power
    raise InfeasibleDesignError(
        f"target power {spec.target_power} not reached by n = {n_cap}")


def power_table(spec: PowerSpec, n_values) -> list:
    """[(n, power)] rows for reporting."""
    return [(n, rm_anova_power(spec, n)) for n in n_values]


def power_from_eta2(eta_p2: float, **kwargs) -> PowerSpec:
    """Convenience constructor taking partial eta squared."""
    return PowerSpec(effect_size_f=eta2_to_f(eta_p2), **kwargs)
