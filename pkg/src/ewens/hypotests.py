"""Hypothesis tests on the dispersal parameter and on distributional shape.

Four tests share the :class:`TestResult` container:

* :func:`score_test` - Lagrange multiplier (Rao score) test of a point null
  psi = psi0, with S = U(psi0)^2 / I(psi0) referred to chi-square(1).
* :func:`lrt_samples` - likelihood-ratio test that d >= 2 samples share one
  psi, referred to chi-square(d - 1); the two-sample test is the d = 2 case.
* :func:`watterson_test` - goodness-of-fit test of the Poisson-Dirichlet
  shape itself, calibrated against an empirical null distribution of the
  homozygosity statistic W = sum(n_i^2) / n simulated at the fitted psi.

The score function of the psi log-likelihood is
U(psi) = K/psi - sum_{i=0}^{n-1} 1/(psi + i), and the expected Fisher
information is I(psi) = sum_{i=0}^{n-1} i / (psi * (psi + i)^2).
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
from scipy.special import gammaincc

from ._validation import check_seed
from .esf import log_rising_factorial, resolve_psi
from .estimate import MleBoundaryError, mle_psi, mle_psi_pooled
from .partitions import Abundance, compute_abundance
from .urn import _hoppe_urn

__all__ = [
    "TestResult",
    "score_function",
    "fisher_information",
    "score_test",
    "lrt_samples",
    "watterson_statistic",
    "watterson_test",
    "chisq_upper_tail",
]


@dataclass(frozen=True)
class TestResult:
    """Outcome of one hypothesis test.

    ``df`` is None for the empirical W test, which has no asymptotic
    reference distribution.  ``extras`` carries the psi values the test
    used or estimated.
    """

    statistic_name: str
    statistic: float
    p_value: float
    df: int | None
    extras: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")
        if not math.isfinite(self.statistic):
            raise ValueError(f"statistic {self.statistic} is not finite")
        object.__setattr__(self, "extras", MappingProxyType(dict(self.extras)))


def score_function(psi: float, abund: Abundance) -> float:
    """Score U(psi) = K/psi - sum_{i=0}^{n-1} 1/(psi + i); zero at the MLE."""
    value = resolve_psi(psi, abund.n)
    if abund.n < 1:
        raise ValueError("need a nonempty abundance")
    base = np.arange(abund.n, dtype=np.float64)
    return float(abund.k / value - np.sum(1.0 / (value + base)))


def fisher_information(psi: float, n: int) -> float:
    """Expected Fisher information I(psi) = sum_{i=0}^{n-1} i/(psi*(psi+i)^2).

    Equals the variance of the score under the Ewens sampling formula; zero
    for n = 1 because a single observation carries no information about psi.
    """
    value = resolve_psi(psi, n)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    base = np.arange(int(n), dtype=np.float64)
    return float(np.sum(base / (value * (value + base) ** 2)))


def chisq_upper_tail(x: float, df: int) -> float:
    """Upper-tail probability of the chi-square distribution,
    1 - F(x; df), via the regularized upper incomplete gamma Q(df/2, x/2)."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if df < 1:
        raise ValueError(f"df must be a positive integer, got {df}")
    return float(gammaincc(df / 2.0, x / 2.0))


def score_test(abund: Abundance, psi0="a") -> TestResult:
    """Lagrange multiplier test of the point null psi = psi0.

    ``psi0`` accepts "a" (the absolute default 1), "r" (the sample size), or
    a positive number.  The statistic S = U(psi0)^2 / I(psi0) is two-sided
    by construction and referred to chi-square with 1 degree of freedom.
    """
    n = abund.n
    if n < 2:
        raise ValueError(
            f"the score test needs n >= 2 (information is zero at n = {n})"
        )
    value = resolve_psi(psi0, n)
    u = score_function(value, abund)
    info = fisher_information(value, n)
    statistic = u * u / info
    return TestResult(
        statistic_name="S",
        statistic=statistic,
        p_value=chisq_upper_tail(statistic, 1),
        df=1,
        extras={"psi0": value, "score": u, "information": info},
    )


def _psi_log_likelihood(psi: float, abund: Abundance) -> float:
    # psi-dependent part of the ESF log-likelihood; the rest cancels in ratios.
    return abund.k * math.log(psi) - log_rising_factorial(psi, abund.n)


def lrt_samples(abunds: Sequence[Abundance]) -> TestResult:
    """Likelihood-ratio test that d >= 2 samples share a single psi.

    Lambda = -2 [ l(shared psi_hat) - sum_j l_j(psi_hat_j) ] referred to
    chi-square with d - 1 degrees of freedom.  Every sample must admit an
    interior MLE; a boundary species count raises an error naming the
    offending sample.  Tiny negative statistics from solver tolerance are
    clamped to zero.
    """
    d = len(abunds)
    if d < 2:
        raise ValueError(f"need at least two samples, got {d}")
    separate = []
    for j, abund in enumerate(abunds):
        try:
            separate.append(mle_psi(abund))
        except (MleBoundaryError, ValueError) as exc:
            raise type(exc)(f"sample {j}: {exc}") from exc
    pooled = mle_psi_pooled(abunds)
    log_ratio = sum(
        _psi_log_likelihood(pooled.psi_hat, a) - _psi_log_likelihood(est.psi_hat, a)
        for a, est in zip(abunds, separate)
    )
    statistic = max(0.0, -2.0 * log_ratio)
    extras = {"psi_shared": pooled.psi_hat}
    for j, est in enumerate(separate, start=1):
        extras[f"psi_{j}"] = est.psi_hat
    return TestResult(
        statistic_name="Lambda",
        statistic=statistic,
        p_value=chisq_upper_tail(statistic, d - 1),
        df=d - 1,
        extras=extras,
    )


def _token_frequencies(sample) -> np.ndarray:
    if isinstance(sample, np.ndarray) and sample.dtype != object:
        _, counts = np.unique(sample, return_counts=True)
        return counts.astype(np.float64)
    return np.asarray(list(Counter(sample).values()), dtype=np.float64)


def watterson_statistic(sample: Iterable) -> float:
    """Homozygosity statistic W = sum over distinct values of
    (frequency^2) / n; ranges from 1 (all distinct) to n (constant)."""
    counts = _token_frequencies(sample)
    n = counts.sum()
    if n < 1:
        raise ValueError("need a nonempty sample")
    return float(np.sum(counts * counts) / n)


def watterson_test(sample: Sequence, rounds: int, seed: int = 0) -> TestResult:
    """Empirical two-sided test of the Poisson-Dirichlet shape.

    Fits psi by maximum likelihood, simulates ``rounds`` urn samples of the
    same size at that estimate, and locates the observed W in the simulated
    distribution.  Both tail ranks are add-one smoothed, so the p-value is
    min(1, 2 * min(below + 1, rounds - below + 1) / (rounds + 1)) with
    below = #{simulated W < observed W}; it can never reach 0 and bottoms
    out at 2 / (rounds + 1).

    The sample must admit an interior MLE; ``rounds`` must be >= 10.
    """
    if rounds < 10:
        raise ValueError(f"rounds must be >= 10, got {rounds}")
    if not isinstance(sample, np.ndarray):
        sample = list(sample)
    abund = compute_abundance(sample)
    try:
        est = mle_psi(abund)
    except MleBoundaryError as exc:
        raise MleBoundaryError(f"cannot estimate psi for the shape test: {exc}") from exc
    observed = watterson_statistic(sample)
    n = abund.n
    below = 0
    for child in np.random.SeedSequence(check_seed(seed)).spawn(rounds):
        sim = _hoppe_urn(np.random.default_rng(child), n, est.psi_hat)
        sim_counts = np.bincount(sim)
        w = float(np.sum(sim_counts * sim_counts) / n)
        if w < observed:
            below += 1
    p_value = min(1.0, 2.0 * min(below + 1, rounds - below + 1) / (rounds + 1))
    return TestResult(
        statistic_name="W",
        statistic=observed,
        p_value=p_value,
        df=None,
        extras={"psi_hat": est.psi_hat},
    )
