"""Bit-level codecs: fixed-width field packing, permutation and k-subset ranking.

All codecs operate on non-negative integers so that a whole solution
configuration can live in a single fixed-width bitstring value.
"""

from __future__ import annotations

from math import comb, factorial
from typing import Sequence

from .errors import InvalidArgumentError


def bits_for(count: int) -> int:
    """Width needed to store the values 0..count-1 (zero for a trivial field)."""
    if count < 1:
        raise InvalidArgumentError(f"field must admit at least one value, got {count}")
    return (count - 1).bit_length()


def pack_fields(values: Sequence[int], widths: Sequence[int]) -> int:
    """Pack field values into one integer; the first field lands in the high bits."""
    if len(values) != len(widths):
        raise InvalidArgumentError("values/widths length mismatch")
    packed = 0
    for value, width in zip(values, widths):
        if not 0 <= value < (1 << width):
            raise InvalidArgumentError(f"field value {value} out of range for width {width}")
        packed = (packed << width) | value
    return packed


def unpack_fields(packed: int, widths: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`pack_fields`."""
    values = []
    shift = sum(widths)
    for width in widths:
        shift -= width
        values.append((packed >> shift) & ((1 << width) - 1))
    return tuple(values)


def rank_permutation(perm: Sequence[int]) -> int:
    """Lexicographic rank of a permutation of 0..n-1 (Lehmer code)."""
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise InvalidArgumentError("not a permutation of 0..n-1")
    rank = 0
    for i in range(n):
        smaller = sum(1 for j in range(i + 1, n) if perm[j] < perm[i])
        rank += smaller * factorial(n - 1 - i)
    return rank


def unrank_permutation(rank: int, n: int) -> tuple[int, ...]:
    """Permutation of 0..n-1 with the given lexicographic rank."""
    if not 0 <= rank < factorial(n):
        raise InvalidArgumentError(f"permutation rank {rank} out of range for n={n}")
    pool = list(range(n))
    perm = []
    for i in range(n):
        f = factorial(n - 1 - i)
        idx, rank = divmod(rank, f)
        perm.append(pool.pop(idx))
    return tuple(perm)


def rank_subset(positions: Sequence[int], m: int) -> int:
    """Lexicographic rank of a sorted k-subset of 0..m-1 (combinadic)."""
    k = len(positions)
    if list(positions) != sorted(set(positions)) or (k and not 0 <= positions[-1] < m):
        raise InvalidArgumentError("positions must be a sorted subset of 0..m-1")
    rank = 0
    prev = -1
    for idx, c in enumerate(positions):
        for x in range(prev + 1, c):
            rank += comb(m - 1 - x, k - idx - 1)
        prev = c
    return rank


def unrank_subset(rank: int, m: int, k: int) -> tuple[int, ...]:
    """Sorted k-subset of 0..m-1 with the given lexicographic rank."""
    if not 0 <= rank < comb(m, k):
        raise InvalidArgumentError(f"subset rank {rank} out of range for C({m},{k})")
    positions = []
    c = 0
    for slot in range(k):
        while True:
            block = comb(m - 1 - c, k - slot - 1)
            if rank < block:
                break
            rank -= block
            c += 1
        positions.append(c)
        c += 1
    return tuple(positions)
