"""Exact binomial probabilities in log space and their Gaussian approximations.

The log-pmf uses Loader's saddle-point form (Stirling remainders plus the
deviance term ``bd0``) rather than differences of ``lgamma``, which lose about
``1e-8`` relative accuracy once the number of trials reaches ``1e7``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Stirling remainders ln(n!) - (n + 1/2) ln n + n - ln sqrt(2 pi) for n = 0..15.
_STIRLERR_SMALL = np.array(
    [0.0] + [math.lgamma(i + 1.0) - (i + 0.5) * math.log(i) + i - _LN_SQRT_2PI for i in range(1, 16)]
)
_S0, _S1, _S2, _S3, _S4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188


@dataclass(frozen=True)
class BinomialParams:
    """Number of trials and success probability ``q`` in (0, 1).

    ``q_complement`` defaults to ``1 - q``; pass a value computed stably (see
    ``from_power``) when ``q`` is close to 1.
    """

    trials: int
    q: float
    q_complement: float = field(default=float("nan"))

    def __post_init__(self) -> None:
        if int(self.trials) != self.trials or self.trials < 0:
            raise ValueError(f"trials must be a nonnegative integer, got {self.trials!r}")
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0, 1), got {self.q!r}")
        object.__setattr__(self, "trials", int(self.trials))
        if math.isnan(self.q_complement):
            object.__setattr__(self, "q_complement", 1.0 - self.q)
        elif not 0.0 < self.q_complement < 1.0:
            raise ValueError(f"q_complement must lie in (0, 1), got {self.q_complement!r}")

    @classmethod
    def from_power(cls, trials: int, p: float, k: int) -> BinomialParams:
        """Parameters for ``Bin(trials, p**k)`` with ``1 - p**k`` kept accurate."""
        log_q = k * math.log(p)
        return cls(trials, math.exp(log_q), -math.expm1(log_q))

    @property
    def mean(self) -> float:
        return self.trials * self.q

    @property
    def variance(self) -> float:
        return self.trials * self.q * self.q_complement


@dataclass(frozen=True)
class TailComparison:
    exact: float
    approx: float
    rel_error: float | None

    @classmethod
    def of(cls, exact: float, approx: float) -> TailComparison:
        rel = abs(approx - exact) / exact if exact > 0 else None
        return cls(exact, approx, rel)


def _stirlerr(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x <= 15
    out[small] = _STIRLERR_SMALL[x[small].astype(np.int64)]
    big = x[~small]
    inv2 = 1.0 / (big * big)
    series = np.where(
        big > 500,
        _S0 - _S1 * inv2,
        np.where(
            big > 80,
            _S0 - (_S1 - _S2 * inv2) * inv2,
            np.where(
                big > 35,
                _S0 - (_S1 - (_S2 - _S3 * inv2) * inv2) * inv2,
                _S0 - (_S1 - (_S2 - (_S3 - _S4 * inv2) * inv2) * inv2) * inv2,
            ),
        ),
    )
    out[~small] = series / big
    return out


def _bd0(x: np.ndarray, mu: float) -> np.ndarray:
    """Deviance ``x ln(x/mu) + mu - x`` without cancellation near ``x = mu``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    near = np.abs(x - mu) < 0.1 * (x + mu)
    xs = x[near]
    v = (xs - mu) / (xs + mu)
    s = (xs - mu) * v
    ej = 2.0 * xs * v
    v2 = v * v
    # |v| < 1/21 here, so 20 terms are far past double precision.
    for j in range(1, 21):
        ej = ej * v2
        s = s + ej / (2 * j + 1)
    out[near] = s
    xf = x[~near]
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~near] = np.where(xf > 0, xf * np.log(xf / mu) + mu - xf, mu)
    return out


def log_pmf_array(bp: BinomialParams, a: np.ndarray) -> np.ndarray:
    """Vectorized ``ln P(xi = a)`` for integer ``0 <= a <= trials``."""
    n = bp.trials
    a = np.asarray(a, dtype=np.float64)
    out = np.empty_like(a)
    lo, hi = a == 0, a == n
    out[lo] = n * math.log1p(-bp.q) if bp.q < 0.5 else n * math.log(bp.q_complement)
    out[hi] = n * math.log(bp.q)
    mid = ~(lo | hi)
    am = a[mid]
    if am.size:
        rest = n - am
        lc = (
            _stirlerr(np.array([n], dtype=np.float64))[0]
            - _stirlerr(am)
            - _stirlerr(rest)
            - _bd0(am, n * bp.q)
            - _bd0(rest, n * bp.q_complement)
        )
        lf = math.log(2.0 * math.pi) + np.log(am) + np.log1p(-am / n)
        out[mid] = lc - 0.5 * lf
    return out


def log_binom_pmf(bp: BinomialParams, a: int) -> float:
    """Natural log of ``C(trials, a) q^a (1-q)^(trials-a)``."""
    if int(a) != a or not 0 <= a <= bp.trials:
        raise ValueError(f"a must be an integer in [0, {bp.trials}], got {a!r}")
    return float(log_pmf_array(bp, np.array([a]))[0])


def _log_sum(logs: np.ndarray) -> float:
    if not logs.size:
        return -math.inf
    top = float(logs.max())
    # fsum keeps the accumulation compensated over up to 1e7 terms.
    return top + math.log(math.fsum(np.exp(logs - top).tolist()))


def log_binom_tail(bp: BinomialParams, threshold: float) -> float:
    """``ln P(xi > threshold)``, finite even when the tail underflows a double.

    The smaller side of the distribution is summed directly and the other
    side, when requested, is obtained as its complement.
    """
    if math.isnan(threshold):
        raise ValueError("threshold must not be NaN")
    n = bp.trials
    if threshold < 0:
        return 0.0
    if threshold >= n:
        return -math.inf
    first = math.floor(threshold) + 1
    if first > bp.mean:
        return _log_sum(log_pmf_array(bp, np.arange(n, first - 1, -1)))
    lower = _log_sum(log_pmf_array(bp, np.arange(0, first)))
    return math.log1p(-math.exp(lower)) if lower < 0 else -math.inf


def binom_tail(bp: BinomialParams, threshold: float) -> float:
    """``P(xi > threshold)`` for a real threshold."""
    return min(1.0, math.exp(log_binom_tail(bp, threshold)))


def binom_lower_tail(bp: BinomialParams, threshold: float) -> float:
    """``P(xi < threshold)``, via the upper tail of ``trials - xi ~ Bin(trials, 1-q)``."""
    mirrored = BinomialParams(bp.trials, bp.q_complement, bp.q)
    return binom_tail(mirrored, bp.trials - threshold)


def demoivre_pmf_approx(bp: BinomialParams, a: int) -> float:
    """Gaussian pointwise approximation to ``P(xi = a)``."""
    var = bp.variance
    return math.exp(-((a - bp.mean) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)


def deviation_threshold(bp: BinomialParams, x: float, n_for_log: int | None = None) -> float:
    """The point ``nq + x sqrt(n ln n q(1-q))`` used to parametrize tails."""
    n_log = bp.trials if n_for_log is None else n_for_log
    return bp.mean + x * math.sqrt(bp.variance * math.log(n_log))


def tail_approx(bp: BinomialParams, x: float, n_for_log: int) -> float:
    """Asymptotic ``P(xi > nq + x sqrt(n ln n q(1-q)))``.

    Evaluates ``exp(-x^2 ln n / 2) / (x sqrt(2 pi ln n))``.  By symmetry the
    same value approximates ``P(xi < nq - x sqrt(n ln n q(1-q)))``.  The
    formula is evaluated whether or not its asymptotic hypotheses hold; see
    ``tail_diagnostics``.
    """
    if not x > 0:
        raise ValueError(f"x must be positive, got {x!r}")
    if n_for_log < 2:
        raise ValueError(f"n_for_log must be at least 2, got {n_for_log!r}")
    ln_n = math.log(n_for_log)
    return math.exp(-x * x * ln_n / 2.0) / (x * math.sqrt(2.0 * math.pi * ln_n))


def tail_diagnostics(bp: BinomialParams, x: float, n_for_log: int) -> dict[str, float]:
    """Size of the quantities the tail asymptotics require to be large / small.

    ``spread`` (``x sqrt(ln n)``) should be large; ``skew`` (``x^3
    sqrt(ln^3 n / (n q(1-q)))``) and ``lattice`` (``ln^3 n / (n q(1-q))``)
    should be small.
    """
    ln_n = math.log(n_for_log)
    lattice = ln_n**3 / bp.variance if bp.variance > 0 else math.inf
    return {
        "spread": x * math.sqrt(ln_n),
        "skew": abs(x) ** 3 * math.sqrt(lattice),
        "lattice": lattice,
    }


def compare_tail(bp: BinomialParams, x: float, n_for_log: int | None = None) -> TailComparison:
    """Exact upper tail at the deviation point versus ``tail_approx``."""
    n_log = bp.trials if n_for_log is None else n_for_log
    exact = binom_tail(bp, deviation_threshold(bp, x, n_log))
    return TailComparison.of(exact, tail_approx(bp, x, n_log))


def chernoff_tail_bound(bp: BinomialParams, t: float) -> float:
    """Upper bound ``2 exp(-t^2 / (2 (nq + t/3)))`` on ``P(|xi - nq| > t)``."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t!r}")
    return 2.0 * math.exp(-t * t / (2.0 * (bp.mean + t / 3.0)))


def two_sided_tail(bp: BinomialParams, t: float) -> float:
    """Exact ``P(|xi - nq| > t)``."""
    return binom_tail(bp, bp.mean + t) + binom_lower_tail(bp, bp.mean - t)


def normal_cdf(t: float) -> float:
    """Standard normal CDF via the complementary error function.

    ``erfc`` keeps full relative precision in both tails, so the absolute
    error stays near machine epsilon everywhere.
    """
    return 0.5 * math.erfc(-t / math.sqrt(2.0))


def mills_tail(t: float) -> float:
    """``exp(-t^2/2) / (t sqrt(2 pi))``, asymptotic to ``1 - normal_cdf(t)``."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t!r}")
    return math.exp(-t * t / 2.0) / (t * math.sqrt(2.0 * math.pi))
