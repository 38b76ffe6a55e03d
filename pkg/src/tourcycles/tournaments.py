"""Tournaments, generators and exact directed-cycle counting.

A tournament on n vertices is an orientation of the complete graph K_n.
Adjacency is stored as one out-neighbour bitset per vertex, which keeps
subset manipulation cheap for the subset dynamic programs used below.

Exact counting works at desk scale (n <= 20, cycle length <= 9): cycles of
length ``l`` are counted by iterating over l-subsets and counting directed
Hamiltonian cycles of each induced subtournament with a DP over
(visited-subset, last-vertex) states anchored at the subset's least vertex,
O(binom(n,l) * 2^l * l^2) overall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Tournament",
    "DegreeSequence",
    "FourProfile",
    "make_carousel",
    "make_transitive",
    "sample_random",
    "sample_w_random",
    "exact_cycle_count",
    "goodman_count3",
    "expected_random_cycles",
    "normalized_density",
    "four_profile",
    "parse_tournament",
    "format_tournament",
]


@dataclass(frozen=True)
class Tournament:
    """Orientation of a complete graph; ``out[i]`` is the bitset of vertices beaten by i."""

    n: int
    out: tuple[int, ...]

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise ValueError(f"tournament needs at least one vertex, got n={n}")
        if len(self.out) != n:
            raise ValueError("out-set list length does not match vertex count")
        total = 0
        for i, bits in enumerate(self.out):
            if bits >> n:
                raise ValueError(f"out-set of vertex {i} references vertices >= n")
            if bits & (1 << i):
                raise ValueError(f"vertex {i} is in its own out-set")
            total += bits.bit_count()
        if total != n * (n - 1) // 2:
            raise ValueError("edge count differs from n(n-1)/2; not a tournament")
        for i in range(n):
            for j in range(i + 1, n):
                ij = bool(self.out[i] & (1 << j))
                ji = bool(self.out[j] & (1 << i))
                if ij == ji:
                    raise ValueError(f"pair ({i},{j}) must have exactly one orientation")

    def beats(self, i: int, j: int) -> bool:
        return bool(self.out[i] & (1 << j))

    def out_degree(self, i: int) -> int:
        return self.out[i].bit_count()

    def degree_sequence(self) -> "DegreeSequence":
        return DegreeSequence([self.out_degree(i) for i in range(self.n)])

    def reverse(self) -> "Tournament":
        """Tournament with every edge orientation flipped."""
        n = self.n
        full = (1 << n) - 1
        rev = [full & ~(1 << i) & ~self.out[i] for i in range(n)]
        return Tournament(n, tuple(rev))

    def induced(self, vertices: Sequence[int]) -> "Tournament":
        """Subtournament on ``vertices``, relabelled 0..m-1 in the given order."""
        m = len(vertices)
        out = []
        for a in range(m):
            bits = 0
            for b in range(m):
                if a != b and self.beats(vertices[a], vertices[b]):
                    bits |= 1 << b
            out.append(bits)
        return Tournament(m, tuple(out))

    def adjacency(self) -> np.ndarray:
        """0/1 adjacency matrix, A[i, j] = 1 iff i beats j."""
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for i in range(self.n):
            bits = self.out[i]
            while bits:
                j = (bits & -bits).bit_length() - 1
                a[i, j] = 1
                bits &= bits - 1
        return a


@dataclass(frozen=True)
class DegreeSequence:
    """Out-degrees of a tournament; they always sum to n(n-1)/2."""

    out_degrees: tuple[int, ...]

    def __init__(self, out_degrees: Iterable[int]):
        object.__setattr__(self, "out_degrees", tuple(out_degrees))
        n = len(self.out_degrees)
        if any(d < 0 or d >= n for d in self.out_degrees):
            raise ValueError("each out-degree must lie in [0, n-1]")
        if sum(self.out_degrees) != n * (n - 1) // 2:
            raise ValueError("out-degrees must sum to n(n-1)/2")


@dataclass(frozen=True)
class FourProfile:
    """Counts of induced 4-vertex subtournaments by isomorphism type.

    t4: transitive, c4: strongly connected (the unique hamiltonian type),
    l4: 3-cycle plus a sink, w4: 3-cycle plus a source.
    """

    t4: int
    c4: int
    l4: int
    w4: int

    @property
    def total(self) -> int:
        return self.t4 + self.c4 + self.l4 + self.w4


def make_carousel(n: int) -> Tournament:
    """Carousel tournament: vertex i beats i+1, ..., i+(n-1)/2 (mod n); n odd >= 3."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"carousel tournament needs odd n >= 3, got {n}")
    half = (n - 1) // 2
    out = []
    for i in range(n):
        bits = 0
        for step in range(1, half + 1):
            bits |= 1 << ((i + step) % n)
        out.append(bits)
    return Tournament(n, tuple(out))


def make_transitive(n: int) -> Tournament:
    """Transitive tournament: i beats j iff i < j."""
    if n < 1:
        raise ValueError(f"transitive tournament needs n >= 1, got {n}")
    full = (1 << n) - 1
    return Tournament(n, tuple((full >> (i + 1)) << (i + 1) for i in range(n)))


def sample_random(n: int, seed: int) -> Tournament:
    """Uniformly random tournament; fixed seed gives a fixed tournament."""
    if n < 1:
        raise ValueError(f"random tournament needs n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    out = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                out[i] |= 1 << j
            else:
                out[j] |= 1 << i
    return Tournament(n, tuple(out))


def sample_w_random(w, n: int, seed: int) -> Tournament:
    """Tournament sampled from a step kernel ``w``.

    Draws n uniform coordinates and orients each edge i -> j (i < j) with
    probability w(x_i, x_j), where ``w`` is a k x k grid of probabilities
    (any array-like, or an object with a ``values`` array attribute).
    """
    if n < 1:
        raise ValueError(f"w-random tournament needs n >= 1, got {n}")
    grid = np.asarray(getattr(w, "values", w), dtype=float)
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
        raise ValueError("step kernel must be a square grid")
    if np.any(grid < 0) or np.any(grid > 1):
        raise ValueError("step kernel values must lie in [0, 1]")
    k = grid.shape[0]
    rng = np.random.default_rng(seed)
    xs = rng.random(n)
    cells = np.minimum((xs * k).astype(int), k - 1)
    out = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < grid[cells[i], cells[j]]:
                out[i] |= 1 << j
            else:
                out[j] |= 1 << i
    return Tournament(n, tuple(out))


def _hamiltonian_cycle_count(out: Sequence[int], m: int) -> int:
    """Directed Hamiltonian cycles of an m-vertex tournament given as bitsets.

    Subset DP anchored at vertex 0: dp[(mask, last)] counts directed paths
    0 -> ... -> last visiting exactly ``mask``; each full path is closed by
    the edge last -> 0.  Anchoring fixes the rotation, and the reverse
    traversal is impossible in a tournament, so each cycle is counted once.
    """
    full = (1 << m) - 1
    dp = [[0] * m for _ in range(1 << m)]
    dp[1][0] = 1
    for mask in range(1, 1 << m):
        if not mask & 1:
            continue
        row = dp[mask]
        for last in range(m):
            cnt = row[last]
            if not cnt:
                continue
            free = full & ~mask & out[last]
            while free:
                low = free & -free
                nxt = low.bit_length() - 1
                dp[mask | low][nxt] += cnt
                free &= free - 1
    final = dp[full]
    return sum(final[v] for v in range(1, m) if out[v] & 1)


def exact_cycle_count(t: Tournament, length: int) -> int:
    """Exact number of directed cycles of the given length in ``t``."""
    if length < 3:
        raise ValueError(f"cycle length must be >= 3, got {length}")
    if length > t.n:
        return 0
    total = 0
    for subset in combinations(range(t.n), length):
        out = []
        for a in range(length):
            bits = 0
            for b in range(length):
                if a != b and t.out[subset[a]] & (1 << subset[b]):
                    bits |= 1 << b
            out.append(bits)
        total += _hamiltonian_cycle_count(out, length)
    return total


def goodman_count3(t: Tournament) -> int:
    """3-cycle count from the degree sequence: binom(n,3) - sum_i binom(d_i, 2)."""
    if t.n < 3:
        raise ValueError("needs at least 3 vertices")
    return math.comb(t.n, 3) - sum(
        math.comb(t.out_degree(i), 2) for i in range(t.n)
    )


def expected_random_cycles(n: int, length: int) -> float:
    """Expected number of length-l cycles in a uniformly random n-vertex tournament.

    Each of binom(n,l) * (l-1)!/2 undirected cyclic arrangements is a directed
    cycle with probability 2/2^l, giving (l-1)!/2^l * binom(n,l).
    """
    if length < 3:
        raise ValueError(f"cycle length must be >= 3, got {length}")
    return math.factorial(length - 1) / 2**length * math.comb(n, length)


def normalized_density(t: Tournament, length: int) -> float:
    """Cycle count divided by the random-tournament expectation."""
    if length > t.n:
        raise ValueError(f"cycle length {length} exceeds vertex count {t.n}")
    return exact_cycle_count(t, length) / expected_random_cycles(t.n, length)


def four_profile(t: Tournament) -> FourProfile:
    """Classify every induced 4-vertex subtournament.

    The key is the number of cyclic triangles on the 4 vertices (0, 1 or 2);
    the single-triangle types are split by whether the off-triangle vertex is
    a source (beats the other three) or a sink.
    """
    if t.n < 4:
        raise ValueError("four_profile needs at least 4 vertices")
    t4 = c4 = l4 = w4 = 0
    for quad in combinations(range(t.n), 4):
        triangles = 0
        for a, b, c in combinations(quad, 3):
            # cyclic iff the three orientations along a->b->c->a all agree
            ab, bc, ca = t.beats(a, b), t.beats(b, c), t.beats(c, a)
            if ab == bc == ca:
                triangles += 1
        if triangles == 0:
            t4 += 1
        elif triangles == 2:
            c4 += 1
        else:
            degs = [sum(1 for v in quad if u != v and t.beats(u, v)) for u in quad]
            if 3 in degs:
                w4 += 1
            else:
                l4 += 1
    return FourProfile(t4, c4, l4, w4)


def format_tournament(t: Tournament) -> str:
    """Text form: first line n, then n rows of 0/1 characters (row i col j = 1 iff i beats j)."""
    lines = [str(t.n)]
    for i in range(t.n):
        lines.append("".join("1" if t.beats(i, j) else "0" for j in range(t.n)))
    return "\n".join(lines) + "\n"


def parse_tournament(text: str) -> Tournament:
    """Parse the text form, validating the exactly-one-orientation invariant."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty tournament file")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be the vertex count, got {lines[0]!r}")
    if len(lines) != n + 1:
        raise ValueError(f"expected {n} matrix rows, found {len(lines) - 1}")
    out = []
    for i, row in enumerate(lines[1:]):
        if len(row) != n or set(row) - {"0", "1"}:
            raise ValueError(f"row {i} must be {n} characters over 0/1")
        if row[i] != "0":
            raise ValueError(f"diagonal entry of row {i} must be 0")
        out.append(sum(1 << j for j in range(n) if row[j] == "1"))
    return Tournament(n, tuple(out))
