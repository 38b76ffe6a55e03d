"""Shared oracles and generators for the test suite.

The oracles here deliberately avoid the library's algorithms: cycles are
counted by enumerating cyclic arrangements, and 4-vertex types are matched
by explicit isomorphism search, so they can vouch for the faster paths.
"""

from __future__ import annotations

from itertools import combinations, permutations

import numpy as np
import pytest

from tourcycles.tournaments import Tournament


def brute_cycle_count(t: Tournament, length: int) -> int:
    """Count directed cycles by checking every cyclic arrangement directly."""
    total = 0
    for subset in combinations(range(t.n), length):
        anchor = subset[0]
        for rest in permutations(subset[1:]):
            cycle = (anchor,) + rest
            if all(
                t.beats(cycle[i], cycle[(i + 1) % length]) for i in range(length)
            ):
                total += 1
    return total


def tournament_from_bits(n: int, bits: int) -> Tournament:
    """Tournament from one bit per pair (i < j), bit 1 meaning i beats j."""
    out = [0] * n
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            if (bits >> idx) & 1:
                out[i] |= 1 << j
            else:
                out[j] |= 1 << i
            idx += 1
    return Tournament(n, tuple(out))


def all_tournaments(n: int):
    for bits in range(1 << (n * (n - 1) // 2)):
        yield tournament_from_bits(n, bits)


def random_tournament(n: int, rng: np.random.Generator) -> Tournament:
    flags = rng.integers(0, 2, size=n * (n - 1) // 2)
    bits = sum(1 << i for i, f in enumerate(flags) if f)
    return tournament_from_bits(n, bits)


def random_skew_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Skew matrix with entries uniform in [-1, 1]."""
    a = rng.uniform(-1.0, 1.0, size=(n, n))
    a = np.triu(a, 1)
    return a - a.T


def tournament_from_edges(n: int, edges) -> Tournament:
    out = [0] * n
    for a, b in edges:
        out[a] |= 1 << b
    return Tournament(n, tuple(out))


# the four 4-vertex tournament types as explicit edge lists
_REFS_4 = {
    "t4": [(i, j) for i in range(4) for j in range(i + 1, 4)],
    "c4": [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)],
    "l4": [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)],
    "w4": [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (3, 1)],
}


def _iso_class(t: Tournament) -> str:
    """Classify a 4-vertex tournament by brute-force isomorphism."""
    assert t.n == 4
    refs = {name: tournament_from_edges(4, e) for name, e in _REFS_4.items()}
    for name, ref in refs.items():
        for perm in permutations(range(4)):
            if all(
                t.beats(perm[a], perm[b]) == ref.beats(a, b)
                for a in range(4)
                for b in range(4)
                if a != b
            ):
                return name
    raise AssertionError("unclassifiable 4-vertex tournament")


@pytest.fixture(scope="session")
def iso_class_of():
    return _iso_class
