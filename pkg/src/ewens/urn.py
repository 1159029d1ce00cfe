"""Poisson-Dirichlet sampling by simulation of the Hoppe urn.

Draw i (1-based) emits a brand-new species with probability
psi / (psi + i - 1), and otherwise copies one of the i - 1 earlier draws
chosen uniformly at random.  Species labels are the integers 1..K in order
of first appearance.

Randomness comes from numpy's PCG64 generator.  Each public call owns its
own generator seeded from the caller's 64-bit seed, so identical
(n, psi, seed) triples reproduce bit-identical samples within a release.
One uniform variate decides new-vs-copy at every draw and, on copy, a
second uniform picks the ancestor; at most 2n variates are consumed.
"""

from __future__ import annotations

import numpy as np

from ._validation import check_positive_int, check_seed
from .esf import resolve_psi
from .partitions import Abundance, compute_abundance

__all__ = ["sample_hoppe_urn", "sample_partition"]


def _hoppe_urn(rng: np.random.Generator, n: int, psi: float) -> np.ndarray:
    """Core urn walk on an externally owned generator."""
    u = rng.random(2 * n).tolist()
    out = [0] * n
    pos = 0
    k = 0
    for i in range(n):
        # New species iff u < psi / (psi + i); multiplied out to skip the division.
        cut = u[pos]
        pos += 1
        if cut * (psi + i) < psi:
            k += 1
            out[i] = k
        else:
            out[i] = out[int(u[pos] * i)]
            pos += 1
    return np.asarray(out, dtype=np.int64)


def sample_hoppe_urn(n: int, psi: float, seed: int = 0) -> np.ndarray:
    """Sample n tokens from the Poisson-Dirichlet distribution with
    dispersal parameter psi via the Hoppe urn.

    Returns an int64 array whose values are the species labels 1..K in
    order of first appearance.  Deterministic given (n, psi, seed).
    """
    n = check_positive_int(n, "n")
    value = resolve_psi(psi)
    rng = np.random.default_rng(check_seed(seed))
    return _hoppe_urn(rng, n, value)


def sample_partition(n: int, psi: float, seed: int = 0) -> Abundance:
    """Abundance vector of one Hoppe-urn sample; convenience composition of
    :func:`sample_hoppe_urn` and :func:`compute_abundance`."""
    return compute_abundance(sample_hoppe_urn(n, psi, seed))
