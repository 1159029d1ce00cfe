"""Maximum-likelihood estimation of the dispersal parameter psi.

The MLE solves K = sum_{i=1}^{n} psi / (psi + i - 1) for psi, where K is the
observed number of distinct species.  The right-hand side is strictly
increasing in psi with range (1, n), so the root is unique and a plain
bracketed binary search finds it.  An estimate exists only for interior
species counts 2 <= K <= n - 1; the boundary cases raise
:class:`MleBoundaryError` so that callers (the hypothesis tests, the
classifier, the bootstrap) can apply their own documented fallbacks.

Acceptance rule for the root: |f(psi) - K| <= 1e-10 * K, or bracket width
<= 1e-12 * psi, whichever happens first, with a hard cap of 200 bisection
steps.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ._validation import check_seed
from .partitions import Abundance

__all__ = [
    "MleBoundaryError",
    "PsiEstimate",
    "BootstrapCI",
    "expected_species",
    "mle_psi",
    "mle_psi_pooled",
    "bootstrap_ci",
]

_RESIDUAL_RTOL = 1e-10
_BRACKET_RTOL = 1e-12
_MAX_BISECTIONS = 200
_BRACKET_CAP = 2.0**70
_MAX_RETRIES_PER_ROUND = 100


class MleBoundaryError(ValueError):
    """The species count sits on the boundary, so no finite positive MLE
    exists (all tokens distinct: psi -> +inf; all tokens identical:
    psi -> 0)."""


@dataclass(frozen=True)
class PsiEstimate:
    """A psi estimate with the solver diagnostics that produced it."""

    psi_hat: float
    n: int
    k: int
    iterations: int
    residual: float


@dataclass(frozen=True)
class BootstrapCI:
    """Percentile bootstrap interval around a full-sample psi estimate."""

    psi_hat: float
    lower: float
    upper: float
    level: float
    rounds: int
    frac: float


def expected_species(psi: float, n: int) -> float:
    """Expected number of distinct species in a sample of size n,
    sum_{i=1}^{n} psi / (psi + i - 1).

    Strictly increasing in psi, with range (1, n) over finite positive psi.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    base = np.arange(int(n), dtype=np.float64)
    return float(np.sum(psi / (psi + base)))


def _solve_k_equation(offsets: np.ndarray, k_target: int) -> tuple[float, int, float]:
    """Root of sum(psi / (psi + offsets)) = k_target by bracketed bisection.

    ``offsets`` is the concatenation of 0..n_j-1 over the participating
    samples, so the same routine serves the single-sample and pooled
    equations.  Assumes the target is interior (root exists).
    """

    def f(psi: float) -> float:
        return float(np.sum(psi / (psi + offsets)))

    lo, hi = 1e-8, 1.0
    iterations = 0
    while f(hi) < k_target:
        lo = hi
        hi *= 2.0
        iterations += 1
        if hi > _BRACKET_CAP:
            raise RuntimeError("failed to bracket the MLE below 2**70")
    mid = hi
    residual = abs(f(mid) - k_target)
    for _ in range(_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        value = f(mid)
        residual = abs(value - k_target)
        iterations += 1
        if residual <= _RESIDUAL_RTOL * k_target:
            break
        if (hi - lo) <= _BRACKET_RTOL * mid:
            break
        if value < k_target:
            lo = mid
        else:
            hi = mid
    return mid, iterations, residual


def _check_interior(n: int, k: int) -> None:
    if n < 2:
        raise ValueError(f"need a sample of size n >= 2 to estimate psi, got n = {n}")
    if k >= n:
        raise MleBoundaryError(
            f"all {n} tokens are distinct (K = n): the MLE diverges to +inf"
        )
    if k <= 1:
        raise MleBoundaryError(
            "all tokens are identical (K = 1): the MLE is 0, outside the parameter space"
        )


def mle_psi(abund: Abundance) -> PsiEstimate:
    """Maximum-likelihood estimate of psi from one abundance vector.

    Raises :class:`MleBoundaryError` for boundary species counts (K = n or
    K = 1) and ValueError for n < 2.
    """
    n, k = abund.n, abund.k
    _check_interior(n, k)
    psi_hat, iterations, residual = _solve_k_equation(
        np.arange(n, dtype=np.float64), k
    )
    return PsiEstimate(psi_hat=psi_hat, n=n, k=k, iterations=iterations, residual=residual)


def mle_psi_pooled(abunds: Sequence[Abundance]) -> PsiEstimate:
    """MLE of a single psi shared by several independent samples.

    Solves sum_j K_j = sum_j sum_{i=1}^{n_j} psi / (psi + i - 1), the
    stationary point of the summed log-likelihoods.  Boundary errors mirror
    :func:`mle_psi`: everything distinct everywhere, or every sample
    constant.
    """
    if len(abunds) == 0:
        raise ValueError("need at least one abundance vector")
    for idx, abund in enumerate(abunds):
        if abund.n < 2:
            raise ValueError(f"sample {idx} has n = {abund.n}; need n >= 2")
    total_n = sum(a.n for a in abunds)
    total_k = sum(a.k for a in abunds)
    d = len(abunds)
    if total_k >= total_n:
        raise MleBoundaryError(
            "all tokens are distinct in every sample: the pooled MLE diverges to +inf"
        )
    if total_k <= d:
        raise MleBoundaryError(
            "every sample is constant (K_j = 1 throughout): the pooled MLE is 0, "
            "outside the parameter space"
        )
    offsets = np.concatenate([np.arange(a.n, dtype=np.float64) for a in abunds])
    psi_hat, iterations, residual = _solve_k_equation(offsets, total_k)
    return PsiEstimate(
        psi_hat=psi_hat, n=total_n, k=total_k, iterations=iterations, residual=residual
    )


def bootstrap_ci(
    sample: Sequence,
    level: float = 0.95,
    rounds: int = 1000,
    frac: float = 0.8,
    seed: int = 0,
) -> BootstrapCI:
    """Percentile bootstrap confidence interval for the psi MLE.

    Each round draws a subsample of size max(2, floor(frac * n)) uniformly
    without replacement, estimates psi on it, and the interval is the
    empirical (alpha/2, 1 - alpha/2) quantile pair of the round estimates
    (alpha = 1 - level).  Rounds whose subsample has a boundary species
    count are redrawn, up to a per-round retry cap.

    Parameters
    ----------
    sample : sequence of tokens
        The raw data vector (n >= 3).
    level : float in (0, 1)
        Confidence level, default 0.95.
    rounds : int >= 2
        Number of bootstrap rounds, default 1000.
    frac : float in (0, 1]
        Fraction of the data drawn in each round, default 0.8.
    seed : int
        Master seed; per-round generators are derived from it, so results
        are reproducible and independent of evaluation order.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    if rounds < 2:
        raise ValueError(f"rounds must be >= 2, got {rounds}")
    if not 0.0 < frac <= 1.0:
        raise ValueError(f"frac must lie in (0, 1], got {frac}")
    tokens = list(sample)
    n = len(tokens)
    if n < 3:
        raise ValueError(f"need a sample of size n >= 3, got {n}")

    # Integer-code the tokens once so subsample species counts reduce to bincounts.
    code_of: dict = {}
    codes = np.empty(n, dtype=np.int64)
    for i, tok in enumerate(tokens):
        codes[i] = code_of.setdefault(tok, len(code_of))
    n_distinct = len(code_of)

    full = mle_psi(_abundance_from_codes(codes, n_distinct))

    m = max(2, int(frac * n))
    master = np.random.SeedSequence(check_seed(seed))
    estimates = np.empty(rounds, dtype=np.float64)
    degenerate = 0
    for r, child in enumerate(master.spawn(rounds)):
        rng = np.random.default_rng(child)
        for _ in range(_MAX_RETRIES_PER_ROUND):
            idx = rng.choice(n, size=m, replace=False)
            sub_counts = np.bincount(codes[idx], minlength=n_distinct)
            sub_k = int(np.count_nonzero(sub_counts))
            if 2 <= sub_k <= m - 1:
                psi_hat, _, _ = _solve_k_equation(np.arange(m, dtype=np.float64), sub_k)
                estimates[r] = psi_hat
                break
            degenerate += 1
        else:
            raise ValueError(
                f"bootstrap round {r} exhausted its retry cap; "
                f"{degenerate} degenerate resamples so far"
            )
    alpha = 1.0 - level
    lower, upper = np.quantile(estimates, [alpha / 2.0, 1.0 - alpha / 2.0])
    return BootstrapCI(
        psi_hat=full.psi_hat,
        lower=float(lower),
        upper=float(upper),
        level=level,
        rounds=rounds,
        frac=frac,
    )


def _abundance_from_codes(codes: np.ndarray, n_distinct: int) -> Abundance:
    counts = np.bincount(codes, minlength=n_distinct)
    counts = counts[counts > 0]
    freqs, mults = np.unique(counts, return_counts=True)
    return Abundance({int(j): int(a) for j, a in zip(freqs, mults)})
