"""Streaming enumeration of ordered integer compositions.

A composition of n into l parts is an ordered l-tuple of positive integers
summing to n; there are C(n-1, l-1) of them.  These index every
coefficient-matching sum in the package, so the enumerator is kept as a
plain, correctness-first generator (memory O(n), lexicographic order).
"""

from __future__ import annotations

import math
from typing import Callable, Iterator

# Composition-sum work grows like 2^n; larger degrees must go through the
# convolution fast paths instead.
MAX_COMPOSITION_DEGREE = 24


def compositions(n: int, l: int) -> Iterator[tuple[int, ...]]:
    """Yield every ordered l-part composition of n, lexicographically.

    Out-of-range l (l < 1 or l > n) yields nothing rather than raising.
    """
    if l < 1 or l > n:
        return
    if l == 1:
        yield (n,)
        return
    for head in range(1, n - l + 2):
        for tail in compositions(n - head, l - 1):
            yield (head,) + tail


def composition_count(n: int, l: int) -> int:
    """C(n-1, l-1): how many compositions `compositions(n, l)` yields."""
    if l < 1 or l > n:
        return 0
    return math.comb(n - 1, l - 1)


def composition_sum(n: int, l: int, weight: Callable[[tuple[int, ...]], float]) -> float:
    """Compensated sum of weight over all l-part compositions of n."""
    if n > MAX_COMPOSITION_DEGREE:
        raise ValueError(
            f"composition sums are capped at degree {MAX_COMPOSITION_DEGREE} (got n={n}); "
            "use the series fast paths for higher degrees"
        )
    return math.fsum(weight(parts) for parts in compositions(n, l))
