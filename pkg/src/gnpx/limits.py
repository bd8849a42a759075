"""Normalizing constants, limit laws and finite-n references for the maximum
number of common neighbors of k vertices in G(n, p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .binomial import BinomialParams, log_binom_tail

# Advisory thresholds marking a parameter point as plausibly asymptotic.
RATIO1_THRESHOLD = 10.0
RATIO2_THRESHOLD = 3.0


def _check(n: int, p: float, k: int, n_min: int = 3) -> None:
    if int(n) != n or n < n_min:
        raise ValueError(f"n must be an integer >= {n_min}, got {n!r}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")


def _power_and_complement(p: float, k: int) -> tuple[float, float]:
    log_pk = k * math.log(p)
    return math.exp(log_pk), -math.expm1(log_pk)


@dataclass(frozen=True)
class NormalizationParams:
    """Centering ``a`` and scale ``sigma`` for the k-set common-neighbor maximum."""

    n: int
    p: float
    k: int
    a: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")
        pk, _ = _power_and_complement(self.p, self.k)
        if not self.a > self.n * pk:
            raise ValueError(
                f"a={self.a!r} does not exceed n p^k={self.n * pk!r}; "
                "the correction factor is not positive at these parameters"
            )

    def threshold(self, y: float) -> float:
        return threshold_b(self, y)

    def normalize(self, value: float) -> float:
        return (value - self.a) / self.sigma


def normalization(n: int, p: float, k: int) -> NormalizationParams:
    """Closed-form ``a_{k;n}`` and ``sigma_{k;n}``.

    ``a = n p^k + sqrt(2k p^k (1-p^k) n ln n) * (1 - ln(k!)/(2k ln n)
    - ln(4 pi k ln n)/(4k ln n))`` and ``sigma = sqrt(p^k (1-p^k) n / (2k ln n))``.
    """
    _check(n, p, k)
    pk, qk = _power_and_complement(p, k)
    ln_n = math.log(n)
    correction = (
        1.0
        - math.lgamma(k + 1) / (2 * k * ln_n)
        - math.log(4.0 * math.pi * k * ln_n) / (4 * k * ln_n)
    )
    a = n * pk + math.sqrt(2 * k * pk * qk * n * ln_n) * correction
    sigma = math.sqrt(pk * qk * n / (2 * k * ln_n))
    return NormalizationParams(int(n), float(p), int(k), a, sigma)


def max_degree_normalization(n: int, p: float) -> NormalizationParams:
    """Maximum-degree constants ``a_n``, ``sigma_n`` written out directly."""
    _check(n, p, 1)
    ln_n = math.log(n)
    a = p * n + math.sqrt(2 * p * (1 - p) * n * ln_n) * (
        1 - math.log(ln_n) / (4 * ln_n) - math.log(2 * math.sqrt(math.pi)) / (2 * ln_n)
    )
    sigma = math.sqrt(p * (1 - p) * n / (2 * ln_n))
    return NormalizationParams(int(n), float(p), 1, a, sigma)


def threshold_b(params: NormalizationParams, y: float) -> float:
    return params.a + y * params.sigma


def gumbel_limit_cdf(y: float, m: int = 1) -> float:
    """Limit CDF ``exp(-e^{-y}) * sum_{i<m} e^{-yi}/i!`` of the m-th maximum."""
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if -y > 700.0:
        return 0.0
    rate = math.exp(-y)

    def term(i: int) -> float:
        # exp of the log term, so large |y| neither overflows nor loses terms
        return math.exp(-rate - y * i - math.lgamma(i + 1))

    if rate >= m:
        return min(1.0, math.fsum(term(i) for i in range(int(m))))
    # Near 1, sum the (decreasing) Poisson upper tail instead so the result
    # stays monotone after rounding.
    tail, i = [], int(m)
    while True:
        t = term(i)
        tail.append(t)
        if t < 1e-17 * tail[0] or t == 0.0:
            break
        i += 1
    return 1.0 - math.fsum(tail)


def gamma_ell(n: int, p: float, ell: int) -> float:
    """Cutoff ``n p^l + sqrt(2 l) sqrt(n p^l (1 - p^l) ln n)`` for l-sets."""
    _check(n, p, ell)
    pl, ql = _power_and_complement(p, ell)
    return n * pl + math.sqrt(2 * ell) * math.sqrt(n * pl * ql * math.log(n))


@dataclass(frozen=True)
class ConditionReport:
    ratio1: float
    ratio2: float
    ratio1_ok: bool
    ratio2_ok: bool

    @property
    def satisfied_hint(self) -> bool:
        return self.ratio1_ok and self.ratio2_ok


def check_conditions(
    n: int,
    p: float,
    k: int,
    ratio1_threshold: float = RATIO1_THRESHOLD,
    ratio2_threshold: float = RATIO2_THRESHOLD,
) -> ConditionReport:
    """How far ``(n, p, k)`` sits inside the regime where the limit law applies.

    ``ratio1 = p^k n / ln^3 n`` and ``ratio2 = (1-p) sqrt(ln n / ln ln n)``
    must both be large.  The flags are advisory only.
    """
    _check(n, p, k, n_min=16)
    ln_n = math.log(n)
    pk, _ = _power_and_complement(p, k)
    ratio1 = pk * n / ln_n**3
    ratio2 = (1.0 - p) * math.sqrt(ln_n / math.log(ln_n))
    return ConditionReport(ratio1, ratio2, ratio1 >= ratio1_threshold, ratio2 >= ratio2_threshold)


@dataclass(frozen=True)
class JansonReport:
    """Expected number of exceeding k-sets and the resulting lower bound.

    ``lower_bound = exp(-lam)`` bounds ``P(no k-set exceeds b)`` from below up
    to a vanishing correction, and approximates it at finite n.
    """

    y: float
    b: float
    lam: float
    lower_bound: float
    gumbel_ref: float


def log_lambda(n: int, p: float, k: int, b: float) -> float:
    """``ln(C(n,k) P(Bin(n-k, p^k) > b))``."""
    log_comb = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    bp = BinomialParams.from_power(n - k, p, k)
    return log_comb + log_binom_tail(bp, b)


def lambda_exact(n: int, p: float, k: int, y: float) -> JansonReport:
    """Exact expected count of k-sets with more than ``b(y)`` common neighbors."""
    params = normalization(n, p, k)
    b = threshold_b(params, y)
    if k >= n:
        raise ValueError(f"k must be smaller than n, got k={k}, n={n}")
    log_lam = log_lambda(n, p, k, b)
    lam = math.exp(log_lam) if log_lam > -math.inf else 0.0
    return JansonReport(
        y=float(y),
        b=b,
        lam=lam,
        lower_bound=math.exp(-lam),
        gumbel_ref=gumbel_limit_cdf(y, 1),
    )
