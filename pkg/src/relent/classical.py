"""Classical distinguishability: relative entropy, exact binomial
inference probabilities, the large-deviation exponent from Stirling's
approximation, and a Monte Carlo simulator of maximum-likelihood
confusion between two coins.

The central quantity is the relative entropy (Kullback-Leibler
divergence)

    D(q||p) = sum_i q_i ln q_i - q_i ln p_i   (nats),

which governs the exponential rate exp(-N D(q||p)) at which N samples
from ``p`` are wrongly inferred to come from ``q``. Support mismatch
(q_i > 0 where p_i = 0) genuinely yields +inf; ``math.inf`` is the
sentinel throughout, distinguishable from any finite value.

All probabilities are computed in log space and exponentiated last, so
counts up to N = 10^6 are safe from underflow.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedConfigError, ValidationError

# Trials are split into fixed-size shards with one RNG stream per shard,
# so results do not depend on how many workers execute them.
SHARD_SIZE = 1 << 16


@dataclass(frozen=True)
class ProbDist:
    """A finite probability distribution: entries in [0, 1], summing to 1."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValidationError("probs must be a nonempty 1-d vector", invariant="shape")
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise ValidationError("entries must lie in [0, 1]", invariant="range")
        s = float(p.sum())
        if abs(s - 1.0) > 1e-12:
            raise ValidationError(f"entries sum to {s}, not 1", invariant="normalization")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __len__(self) -> int:
        return self.probs.size


def as_dist(x) -> ProbDist:
    """Coerce a sequence (or ProbDist) to a validated ProbDist."""
    if isinstance(x, ProbDist):
        return x
    return ProbDist(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ConfusionReport:
    """Outcome of a Monte Carlo confusion experiment.

    ``empirical_rate`` is the fraction of simulated N-toss experiments
    whose success count hit the target; ``exact_prob`` the exact binomial
    probability of that count; ``asymptotic_prob`` the large-deviation
    estimate exp(-N D(q||p)); ``exponent_gap`` the distance (nats)
    between the exact exponent and the divergence.
    """

    n_trials: int
    n_confused: int
    empirical_rate: float
    exact_prob: float
    asymptotic_prob: float
    exponent_gap: float

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValidationError("n_trials must be positive", invariant="counts")
        if not 0 <= self.n_confused <= self.n_trials:
            raise ValidationError("n_confused out of range", invariant="counts")
        if self.empirical_rate != self.n_confused / self.n_trials:
            raise ValidationError("empirical_rate != n_confused / n_trials",
                                  invariant="empirical-rate")
        for name in ("empirical_rate", "exact_prob", "asymptotic_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name}={v} outside [0, 1]", invariant="range")


def kl_divergence(q, p) -> float:
    """Relative entropy D(q||p) in nats; +inf when q has mass outside p's support."""
    q = as_dist(q).probs
    p = as_dist(p).probs
    if q.size != p.size:
        raise DomainError(f"length mismatch: {q.size} vs {p.size}")
    support = q > 0.0
    if np.any(p[support] == 0.0):
        return math.inf
    qs = q[support]
    return float(np.sum(qs * (np.log(qs) - np.log(p[support]))))


def binomial_exact_prob(p: float, n: int, big_n: int) -> float:
    """Exact binomial probability C(N, n) p^n (1-p)^(N-n), in log space.

    Safe for N up to 10^6: the log of the binomial coefficient comes
    from lgamma, and only the final result is exponentiated.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must be in [0, 1], got {p}")
    if not 0 <= n <= big_n:
        raise DomainError(f"need 0 <= n <= N, got n={n}, N={big_n}")
    if p == 0.0:
        return 1.0 if n == 0 else 0.0
    if p == 1.0:
        return 1.0 if n == big_n else 0.0
    log_coeff = math.lgamma(big_n + 1) - math.lgamma(n + 1) - math.lgamma(big_n - n + 1)
    return math.exp(log_coeff + n * math.log(p) + (big_n - n) * math.log1p(-p))


def stirling_exponent(p: float, q: float, big_n: int) -> float:
    """Large-deviation exponent ln P ~ -N D((q,1-q)||(p,1-p)).

    This is the exponent obtained by dropping the sub-exponential
    binomial prefactor; it is exact at N = 1 for the deterministic
    inference q = 1 (where it gives -ln 2 against a fair coin).
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must be strictly inside (0, 1), got {p}")
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must be in [0, 1], got {q}")
    return -big_n * kl_divergence((q, 1.0 - q), (p, 1.0 - p))


def confusion_probability(p_true, q_inferred, big_n: int) -> float:
    """exp(-N D(q||p)): the chance of inferring ``q`` from N samples of ``p``.

    Zero when the divergence is infinite (the supports rule the
    confusion out entirely).
    """
    p = as_dist(p_true)
    q = as_dist(q_inferred)
    div = kl_divergence(q, p)
    if math.isinf(div):
        return 0.0
    return math.exp(-big_n * div)


def _shard_counts(trials: int):
    starts = range(0, trials, SHARD_SIZE)
    return [(i, min(SHARD_SIZE, trials - s)) for i, s in enumerate(starts)]


def simulate_inference(p_true, q_target, big_n: int, trials: int, seed: int,
                       workers: int = 1) -> ConfusionReport:
    """Monte Carlo estimate of the chance that max-likelihood inference lands on q.

    Runs ``trials`` independent experiments of N tosses from ``p_true``
    and counts those whose success count equals n* = round(N * q[0]),
    the only count at which the maximum-likelihood estimate is (close
    to) the target distribution. Alongside the empirical rate the report
    carries the exact binomial probability of n*, the asymptotic rate
    exp(-N D(q||p)), and the gap between exact and asymptotic exponents.

    Reproducible: the seed fully determines the outcome. Trials are
    drawn in fixed-size shards with per-shard RNG streams derived from
    (seed, shard index), so the result is independent of ``workers``.
    """
    p = as_dist(p_true)
    q = as_dist(q_target)
    if len(p) != 2 or len(q) != 2:
        raise UnsupportedConfigError("simulation supports binary distributions only")
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if big_n < 1:
        raise DomainError(f"N must be >= 1, got {big_n}")
    p1 = float(p.probs[0])
    q1 = float(q.probs[0])
    n_star = int(round(big_n * q1))

    def shard(args):
        idx, size = args
        rng = np.random.default_rng([seed, idx])
        counts = rng.binomial(big_n, p1, size=size)
        return int(np.count_nonzero(counts == n_star))

    shards = _shard_counts(trials)
    if workers > 1 and len(shards) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            confused = sum(pool.map(shard, shards))
    else:
        confused = sum(map(shard, shards))

    exact = binomial_exact_prob(p1, n_star, big_n)
    div = kl_divergence(q, p)
    asymptotic = 0.0 if math.isinf(div) else math.exp(stirling_exponent(p1, q1, big_n))
    if exact == 0.0:
        gap = math.inf if not math.isinf(div) else 0.0
    elif math.isinf(div):
        gap = math.inf
    else:
        gap = abs(-math.log(exact) / big_n - div)
    return ConfusionReport(
        n_trials=trials,
        n_confused=confused,
        empirical_rate=confused / trials,
        exact_prob=exact,
        asymptotic_prob=asymptotic,
        exponent_gap=gap,
    )
