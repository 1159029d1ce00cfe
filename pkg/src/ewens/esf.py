"""Ewens sampling formula: abundance probabilities under the
Poisson-Dirichlet distribution with dispersal parameter psi.

The probability of an abundance vector a with n = sum(j * a_j) is

    P(a; psi) = n! * prod_j [ psi**a_j / (j**a_j * a_j!) ] / (psi)_n

where (psi)_n = psi * (psi + 1) * ... * (psi + n - 1) is the rising
factorial.  All arithmetic is carried out in natural-log space, with
factorials as log-gamma values, so nothing overflows before n ~ 1e4 and
beyond.

The dispersal parameter accepts three spellings everywhere: a positive
number, the string ``"a"`` for the absolute default psi = 1, or the string
``"r"`` for the relative value psi = n (resolved against the sample size at
the point of use).
"""

from __future__ import annotations

import math
from numbers import Real

from scipy.special import gammaln

from .partitions import Abundance

__all__ = [
    "resolve_psi",
    "log_rising_factorial",
    "esf_log_probability",
    "esf_probability",
]


def resolve_psi(psi, n: int | None = None) -> float:
    """Resolve a dispersal-parameter spec to a positive float.

    ``"a"`` means the absolute value 1.0; ``"r"`` means the relative value n
    (the sample size, which must therefore be supplied and >= 1); a number is
    validated and passed through.
    """
    if isinstance(psi, str):
        if psi == "a":
            return 1.0
        if psi == "r":
            if n is None or n < 1:
                raise ValueError('psi "r" needs a sample size n >= 1 to resolve')
            return float(n)
        raise ValueError(f'psi spec must be "a", "r", or a positive number, got {psi!r}')
    if isinstance(psi, bool) or not isinstance(psi, Real):
        raise ValueError(f"psi must be a positive real number, got {psi!r}")
    value = float(psi)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"psi must be positive and finite, got {value}")
    return value


def log_rising_factorial(psi: float, n: int) -> float:
    """log of psi * (psi + 1) * ... * (psi + n - 1), i.e.
    sum_{i=0}^{n-1} log(psi + i).  Zero for n = 0."""
    psi = resolve_psi(psi, n)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if n == 0:
        return 0.0
    if n == 1:
        # one-term product; avoids the rounding of a gammaln difference
        return math.log(psi)
    return float(gammaln(psi + n) - gammaln(psi))


def esf_log_probability(abund: Abundance, psi) -> float:
    """Log probability of an abundance vector under the Ewens sampling
    formula with dispersal parameter ``psi`` ("a", "r", or a number)."""
    n = abund.n
    if n < 1:
        raise ValueError("the probability of an empty abundance is undefined")
    value = resolve_psi(psi, n)
    log_psi = math.log(value)
    logp = float(gammaln(n + 1)) - log_rising_factorial(value, n)
    for j, a in abund.entries.items():
        logp += a * (log_psi - math.log(j)) - float(gammaln(a + 1))
    return logp


def esf_probability(abund: Abundance, psi) -> float:
    """Probability of an abundance vector under the Ewens sampling formula;
    exp of :func:`esf_log_probability`."""
    return math.exp(esf_log_probability(abund, psi))
