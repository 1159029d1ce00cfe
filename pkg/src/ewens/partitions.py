"""Samples, abundance vectors, and exact integer-partition enumeration.

A sample is any ordered sequence of hashable tokens (ints, strings, ...).
Tokens compare by exact equality only; numeric and string tokens are never
coerced into each other.  The abundance vector of a sample records, for each
frequency j, how many distinct tokens occur exactly j times.  Everything
downstream (probabilities, estimation, testing) consumes abundances.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType

import numpy as np

__all__ = [
    "Abundance",
    "compute_abundance",
    "enumerate_partitions",
    "partition_abundance",
    "DEFAULT_ENUMERATION_CAP",
]

# p(25) = 1958 partitions; enumeration beyond this is refused so brute-force
# oracles stay sub-second.
DEFAULT_ENUMERATION_CAP = 25


@dataclass(frozen=True)
class Abundance:
    """Frequencies of frequencies of a sample.

    ``entries`` maps each frequency j >= 1 to the number of distinct tokens
    a_j >= 1 occurring exactly j times.  Zero counts are never stored.  The
    sample size ``n`` and the species count ``k`` are derived:
    n = sum(j * a_j), k = sum(a_j).

    Instances are immutable and safe to share across threads.
    """

    entries: Mapping[int, int]

    def __post_init__(self) -> None:
        clean: dict[int, int] = {}
        for j, a in self.entries.items():
            if not isinstance(j, (int, np.integer)) or isinstance(j, bool):
                raise ValueError(f"frequency {j!r} is not an integer")
            if not isinstance(a, (int, np.integer)) or isinstance(a, bool):
                raise ValueError(f"count {a!r} for frequency {j} is not an integer")
            if j < 1:
                raise ValueError(f"frequency {j} must be >= 1")
            if a < 1:
                raise ValueError(f"count {a} for frequency {j} must be >= 1")
            clean[int(j)] = int(a)
        object.__setattr__(self, "entries", MappingProxyType(dict(sorted(clean.items()))))

    @cached_property
    def n(self) -> int:
        """Sample size, sum of j * a_j."""
        return sum(j * a for j, a in self.entries.items())

    @cached_property
    def k(self) -> int:
        """Number of distinct species, sum of a_j."""
        return sum(self.entries.values())

    def __repr__(self) -> str:
        return f"Abundance({dict(self.entries)!r})"


def compute_abundance(sample: Iterable) -> Abundance:
    """Abundance vector of a sample: for each frequency j, the number of
    distinct tokens occurring exactly j times.

    An empty sample yields an empty abundance (n = 0, k = 0).
    """
    if isinstance(sample, np.ndarray) and sample.dtype != object:
        _, counts = np.unique(sample, return_counts=True)
        freqs, mults = np.unique(counts, return_counts=True)
        return Abundance({int(j): int(a) for j, a in zip(freqs, mults)})
    token_counts = Counter(sample)
    return Abundance(Counter(token_counts.values()))


def partition_abundance(parts: Iterable[int]) -> Abundance:
    """Recode an integer partition (multiset of positive parts) into
    frequency-count form, e.g. (3, 1) -> {3: 1, 1: 1}."""
    parts = list(parts)
    for p in parts:
        if not isinstance(p, (int, np.integer)) or isinstance(p, bool) or p < 1:
            raise ValueError(f"partition part {p!r} must be a positive integer")
    return Abundance(Counter(int(p) for p in parts))


def enumerate_partitions(
    n: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[tuple[int, ...]]:
    """All integer partitions of n, each as a nonincreasing tuple of parts.

    Partitions are produced in descending lexicographic order, starting at
    (n,) and ending at (1,) * n.  Enumeration is refused for n > cap to keep
    brute-force sweeps bounded.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"n must be an integer, got {n!r}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if n > cap:
        raise ValueError(f"refusing to enumerate partitions of {n} (cap is {cap})")
    return list(_descending_partitions(int(n), int(n)))


def _descending_partitions(n: int, largest: int):
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _descending_partitions(n - first, first):
            yield (first,) + rest
