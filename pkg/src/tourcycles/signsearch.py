"""Cyclic index of skew sign matrices, sign-equivalence, exhaustive maxima.

The cyclic index of a square matrix A of order n is

    Cycl A = sum over permutations pi of prod_i A[pi(i), pi(i+1)]   (pi(n+1)=pi(1)),

i.e. the signed count of closed tours through all vertices.  For skew
matrices with +/-1 off-diagonal entries the maximum of Cycl over a fixed
order is found by exhausting all matrices whose first row is +1 (every
sign-equivalence class has such representatives), which leaves 2^binom(n-1,2)
candidates: 8 at order 4 and 2 097 152 at order 8.

Sign-equivalence means symmetric row/column permutation combined with
flipping the signs of a set of rows and the same set of columns; the cyclic
index is invariant under it.
"""

from __future__ import annotations

import itertools
import json
import os
import time
from dataclasses import dataclass
from functools import lru_cache
from multiprocessing import get_context

import numpy as np

from .tournaments import Tournament

__all__ = [
    "SkewSignMatrix",
    "SearchReport",
    "Fixtures",
    "cyclic_index_def",
    "cyclic_index_fast",
    "sign_equivalent",
    "canonical_form",
    "transform_sign_matrix",
    "search_max_cyclic_index",
    "dominant_sign",
    "fixtures",
]

MAX_ORDER = 12
ORACLE_MAX_ORDER = 8
CHECKPOINT_SCHEMA = "cyclic-index-search/v1"


@lru_cache(maxsize=None)
def _pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


@lru_cache(maxsize=None)
def _pair_index(n: int) -> dict[tuple[int, int], int]:
    return {p: t for t, p in enumerate(_pairs(n))}


@dataclass(frozen=True)
class SkewSignMatrix:
    """Skew matrix with +/-1 off-diagonal entries, upper triangle packed as bits.

    Pair (i, j), i < j, in row-major order occupies bit M-1-t (M = binom(n,2),
    t the pair's rank), so comparing ``bits`` as integers compares the sign
    patterns lexicographically; bit 1 means entry +1.
    """

    n: int
    bits: int

    def __post_init__(self):
        if not 2 <= self.n <= MAX_ORDER:
            raise ValueError(f"order must be in [2, {MAX_ORDER}], got {self.n}")
        m = self.n * (self.n - 1) // 2
        if not 0 <= self.bits < (1 << m):
            raise ValueError(f"bit packing needs exactly {m} bits")

    @property
    def num_pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    def entry(self, i: int, j: int) -> int:
        if i == j:
            return 0
        if i > j:
            return -self.entry(j, i)
        t = _pair_index(self.n)[(i, j)]
        return 1 if (self.bits >> (self.num_pairs - 1 - t)) & 1 else -1

    def to_array(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        m = self.num_pairs
        for t, (i, j) in enumerate(_pairs(self.n)):
            s = 1 if (self.bits >> (m - 1 - t)) & 1 else -1
            a[i, j] = s
            a[j, i] = -s
        return a

    @classmethod
    def from_array(cls, a) -> "SkewSignMatrix":
        a = np.asarray(a)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("sign matrix must be square")
        if np.any(a != -a.T) or np.any(np.diag(a) != 0):
            raise ValueError("matrix is not skew-symmetric with zero diagonal")
        off = a[~np.eye(n, dtype=bool)]
        if np.any(np.abs(off) != 1):
            raise ValueError("off-diagonal entries must be +1 or -1")
        m = n * (n - 1) // 2
        bits = 0
        for t, (i, j) in enumerate(_pairs(n)):
            if a[i, j] > 0:
                bits |= 1 << (m - 1 - t)
        return cls(n, bits)

    @classmethod
    def from_rows(cls, rows: list[str]) -> "SkewSignMatrix":
        """Rows as strings over {0, +, -}, e.g. '0++-'."""
        lookup = {"0": 0, "+": 1, "-": -1}
        a = [[lookup[c] for c in row] for row in rows]
        return cls.from_array(np.array(a))


def dominant_sign(n: int) -> SkewSignMatrix:
    """All entries above the diagonal +1 (sign matrix of the transitive tournament)."""
    m = n * (n - 1) // 2
    return SkewSignMatrix(n, (1 << m) - 1)


def cyclic_index_def(b: SkewSignMatrix) -> int:
    """Cyclic index by the literal sum over all n! permutations (oracle, n <= 8)."""
    if b.n > ORACLE_MAX_ORDER:
        raise ValueError(f"permutation-sum oracle limited to order {ORACLE_MAX_ORDER}")
    a = b.to_array()
    n = b.n
    total = 0
    for perm in itertools.permutations(range(n)):
        prod = 1
        for i in range(n):
            prod *= a[perm[i], perm[(i + 1) % n]]
        total += prod
    return int(total)


def cyclic_index_fast(b: SkewSignMatrix) -> int:
    """Cyclic index via subset DP.

    Signed path products from anchor vertex 0 are accumulated over
    (visited-subset, last-vertex) states; each full path is closed with the
    edge back to 0, and the resulting sum over cyclic orders is multiplied
    by n since each of the n rotations of a cyclic sequence is a distinct
    permutation in the defining sum.
    """
    a = b.to_array()
    n = b.n
    size = 1 << n
    dp = [[0] * n for _ in range(size)]
    dp[1][0] = 1
    for mask in range(1, size):
        if not mask & 1:
            continue
        row = dp[mask]
        for last in range(n):
            val = row[last]
            if not val:
                continue
            arow = a[last]
            for nxt in range(1, n):
                bit = 1 << nxt
                if mask & bit:
                    continue
                dp[mask | bit][nxt] += val * arow[nxt]
    final = dp[size - 1]
    return int(b.n * sum(final[v] * a[v, 0] for v in range(1, n)))


# ---------------------------------------------------------------------------
# sign-equivalence and canonical forms
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _all_perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


def _permuted_stack(a: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Stack of symmetrically permuted copies, shape (P, n, n)."""
    return a[perms[:, :, None], perms[:, None, :]]


def transform_sign_matrix(b: SkewSignMatrix, perm, flips) -> SkewSignMatrix:
    """Apply a sign-equivalence transformation.

    ``perm`` relabels vertices (entry (i, j) is taken from (perm[i], perm[j]))
    and ``flips`` is the set of positions whose row and column change sign.
    """
    a = b.to_array()
    perm = list(perm)
    s = np.ones(b.n, dtype=np.int64)
    for i in flips:
        s[i] = -1
    c = a[np.ix_(perm, perm)] * s[None, :] * s[:, None]
    return SkewSignMatrix.from_array(c)


def sign_equivalent(b1: SkewSignMatrix, b2: SkewSignMatrix) -> bool:
    """Whether some symmetric permutation plus sign flips maps b1 to b2.

    For each permutation the flip pattern is forced by matching the first
    row, so the scan is over n! candidates rather than n! * 2^n.
    """
    if b1.n != b2.n:
        raise ValueError(f"order mismatch: {b1.n} vs {b2.n}")
    if b1.n > ORACLE_MAX_ORDER:
        raise ValueError(f"sign-equivalence scan limited to order {ORACLE_MAX_ORDER}")
    a1 = b1.to_array().astype(np.int8)
    a2 = b2.to_array().astype(np.int8)
    stack = _permuted_stack(a1, _all_perms(b1.n))
    s = a2[0] * stack[:, 0, :]
    s[:, 0] = 1
    c = stack * s[:, None, :] * s[:, :, None]
    return bool(np.any(np.all(c == a2, axis=(1, 2))))


def _codes_over_perms(a: np.ndarray, n: int, force_plus: bool) -> np.ndarray:
    """Packed codes of all permuted copies with the first row forced to one sign.

    With the first row forced to -1 (``force_plus=False``) the minimum code
    over permutations is the minimum over the whole sign-equivalence orbit,
    because for a fixed permutation the lexicographically smallest packing
    necessarily zeroes the leading first-row bits and that choice pins every
    flip sign (up to the global flip, which acts trivially).
    """
    perms = _all_perms(n)
    stack = _permuted_stack(a.astype(np.int8), perms)
    s = stack[:, 0, :].copy()
    if not force_plus:
        s = -s
    s[:, 0] = 1
    c = stack * s[:, None, :] * s[:, :, None]
    m = n * (n - 1) // 2
    codes = np.zeros(len(perms), dtype=np.int64)
    for t, (i, j) in enumerate(_pairs(n)):
        codes |= (c[:, i, j] > 0).astype(np.int64) << (m - 1 - t)
    return codes


def canonical_form(b: SkewSignMatrix) -> SkewSignMatrix:
    """Lexicographically smallest packed encoding over the sign-equivalence orbit."""
    if b.n > ORACLE_MAX_ORDER:
        raise ValueError(f"canonicalization limited to order {ORACLE_MAX_ORDER}")
    codes = _codes_over_perms(b.to_array(), b.n, force_plus=False)
    return SkewSignMatrix(b.n, int(codes.min()))


# ---------------------------------------------------------------------------
# exhaustive search
# ---------------------------------------------------------------------------

def _free_pairs(n: int, restrict: bool) -> tuple[tuple[int, int], ...]:
    if restrict:
        return tuple((i, j) for i in range(1, n) for j in range(i + 1, n))
    return _pairs(n)


def mask_to_matrix(n: int, mask: int, restrict: bool = True) -> SkewSignMatrix:
    """Matrix for an enumeration mask; bit t of ``mask`` is the t-th free pair, 1 = +1."""
    free = _free_pairs(n, restrict)
    m = n * (n - 1) // 2
    bits = 0
    if restrict:
        for j in range(1, n):  # first row fixed to +1
            t = _pair_index(n)[(0, j)]
            bits |= 1 << (m - 1 - t)
    for t, pair in enumerate(free):
        if (mask >> t) & 1:
            bits |= 1 << (m - 1 - _pair_index(n)[pair])
    return SkewSignMatrix(n, bits)


def matrix_to_mask(b: SkewSignMatrix, restrict: bool = True) -> int:
    if restrict and any(b.entry(0, j) != 1 for j in range(1, b.n)):
        raise ValueError("matrix is outside the first-row +1 slice")
    mask = 0
    for t, (i, j) in enumerate(_free_pairs(b.n, restrict)):
        if b.entry(i, j) > 0:
            mask |= 1 << t
    return mask


def batch_cyclic_index(n: int, masks: np.ndarray, restrict: bool = True) -> np.ndarray:
    """Cyclic indices for a batch of enumeration masks (vectorized subset DP)."""
    free = _free_pairs(n, restrict)
    masks = np.asarray(masks, dtype=np.int64)
    m = masks.shape[0]
    sgn: dict[tuple[int, int], np.ndarray | None] = {p: None for p in _pairs(n)}
    for t, pair in enumerate(free):
        sgn[pair] = (((masks >> t) & 1) * 2 - 1).astype(np.int32)
    half = 1 << (n - 1)
    dp = np.zeros((half, n, m), dtype=np.int32)
    dp[0, 0, :] = 1
    tmp = np.empty(m, dtype=np.int32)
    for r in range(half):
        lasts = [0] if r == 0 else [v for v in range(1, n) if r & (1 << (v - 1))]
        for last in lasts:
            src = dp[r, last]
            for v in range(1, n):
                if v == last or r & (1 << (v - 1)):
                    continue
                pair = (last, v) if last < v else (v, last)
                sg = sgn[pair]
                dst = dp[r | (1 << (v - 1)), v]
                if sg is None:  # fixed +1 entry
                    if last < v:
                        np.add(dst, src, out=dst)
                    else:
                        np.subtract(dst, src, out=dst)
                elif last < v:
                    np.multiply(src, sg, out=tmp)
                    np.add(dst, tmp, out=dst)
                else:
                    np.multiply(src, sg, out=tmp)
                    np.subtract(dst, tmp, out=dst)
    closing = np.zeros(m, dtype=np.int64)
    for v in range(1, n):
        sg = sgn[(0, v)]
        contrib = dp[half - 1, v].astype(np.int64)
        if sg is None:
            closing -= contrib  # entry (v, 0) = -1
        else:
            closing -= contrib * sg
    return n * closing


def _slice_orbit_masks(b: SkewSignMatrix) -> np.ndarray:
    """Enumeration masks of every first-row-+1 representative of b's class."""
    n = b.n
    codes = _codes_over_perms(b.to_array(), n, force_plus=True)
    m = n * (n - 1) // 2
    free = _free_pairs(n, restrict=True)
    masks = np.zeros(len(codes), dtype=np.int64)
    for t, pair in enumerate(free):
        bitpos = m - 1 - _pair_index(n)[pair]
        masks |= ((codes >> bitpos) & 1) << t
    return np.unique(masks)


@dataclass(frozen=True)
class SearchReport:
    """Outcome of an exhaustive cyclic-index search over one matrix order."""

    order: int
    max_cyclic_index: int
    min_cyclic_index: int
    achiever_count: int
    achiever_classes: tuple[SkewSignMatrix, ...]
    matrices_scanned: int
    elapsed_seconds: float
    restricted_first_row: bool = True

    def __post_init__(self):
        reps = self.achiever_classes
        for a in reps:
            if cyclic_index_fast(a) != self.max_cyclic_index:
                raise ValueError("achiever class representative misses the maximum")
        for x, y in itertools.combinations(reps, 2):
            if sign_equivalent(x, y):
                raise ValueError("achiever class representatives must be inequivalent")

    def to_json_dict(self, include_elapsed: bool = True) -> dict:
        d = {
            "order": self.order,
            "max_cyclic_index": self.max_cyclic_index,
            "min_cyclic_index": self.min_cyclic_index,
            "achiever_count": self.achiever_count,
            "achiever_classes": [
                {"order": c.n, "bits": c.bits, "rows": c.to_array().tolist()}
                for c in self.achiever_classes
            ],
            "matrices_scanned": self.matrices_scanned,
            "restricted_first_row": self.restricted_first_row,
        }
        if include_elapsed:
            d["elapsed_seconds"] = self.elapsed_seconds
        return d


def _scan_chunk(args) -> tuple[int, int, int, list[int]]:
    n, restrict, lo, hi, batch = args
    best = None
    worst = None
    achievers: list[int] = []
    for start in range(lo, hi, batch):
        masks = np.arange(start, min(start + batch, hi), dtype=np.int64)
        vals = batch_cyclic_index(n, masks, restrict)
        vmax = int(vals.max())
        vmin = int(vals.min())
        worst = vmin if worst is None else min(worst, vmin)
        if best is None or vmax > best:
            best = vmax
            achievers = []
        if vmax == best:
            achievers.extend(int(x) for x in masks[vals == vmax])
    return lo, best, worst, achievers


def _load_checkpoint(path: str, params: dict) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if data.get("schema") != CHECKPOINT_SCHEMA:
        raise ValueError(
            f"checkpoint schema {data.get('schema')!r} does not match {CHECKPOINT_SCHEMA!r}"
        )
    for key, val in params.items():
        if data.get(key) != val:
            raise ValueError(f"checkpoint parameter {key}={data.get(key)!r} differs from {val!r}")
    return data


def search_max_cyclic_index(
    order: int,
    workers: int = 1,
    restrict_first_row: bool = True,
    checkpoint_path: str | None = None,
    chunk_size: int = 1 << 16,
    batch_size: int = 1 << 13,
) -> SearchReport:
    """Exhaust all sign matrices of the given order and report the maximum.

    With ``restrict_first_row`` the enumeration covers matrices whose first
    row is +1 (one representative set per class); the full enumeration is
    supported at order 4 as an independent cross-check.  Chunks of the mask
    space are scanned independently (optionally by a worker pool) and merged
    deterministically, so the report does not depend on the worker count.
    A checkpoint file, when given, records finished chunks and allows resume.
    """
    if order not in (4, 8):
        raise ValueError(f"search supports orders 4 and 8, got {order}")
    if not restrict_first_row and order != 4:
        raise ValueError("full (unrestricted) enumeration is only supported at order 4")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    t0 = time.time()
    nbits = len(_free_pairs(order, restrict_first_row))
    total = 1 << nbits
    chunk_size = min(chunk_size, total)
    params = {
        "order": order,
        "restrict_first_row": restrict_first_row,
        "chunk_size": chunk_size,
    }
    done: dict[str, dict] = {}
    if checkpoint_path and os.path.exists(checkpoint_path):
        done = _load_checkpoint(checkpoint_path, params)["chunks"]

    starts = list(range(0, total, chunk_size))
    pending = [
        (order, restrict_first_row, lo, min(lo + chunk_size, total), batch_size)
        for lo in starts
        if str(lo) not in done
    ]

    def record(lo: int, best: int, worst: int, achievers: list[int]):
        done[str(lo)] = {"max": best, "min": worst, "achievers": achievers}
        if checkpoint_path:
            payload = dict(params, schema=CHECKPOINT_SCHEMA, chunks=done)
            tmp_path = checkpoint_path + ".tmp"
            with open(tmp_path, "w") as fh:
                json.dump(payload, fh)
            os.replace(tmp_path, checkpoint_path)

    if workers == 1 or len(pending) <= 1:
        for job in pending:
            lo, best, worst, ach = _scan_chunk(job)
            record(lo, best, worst, ach)
    else:
        with get_context("fork").Pool(workers) as pool:
            for lo, best, worst, ach in pool.imap(_scan_chunk, pending):
                record(lo, best, worst, ach)

    gmax = max(c["max"] for c in done.values())
    gmin = min(c["min"] for c in done.values())
    achievers = sorted(
        mask
        for c in done.values()
        if c["max"] == gmax
        for mask in c["achievers"]
    )

    classes = _classify_achievers(order, achievers, restrict_first_row, gmax)
    return SearchReport(
        order=order,
        max_cyclic_index=gmax,
        min_cyclic_index=gmin,
        achiever_count=len(achievers),
        achiever_classes=tuple(classes),
        matrices_scanned=total,
        elapsed_seconds=time.time() - t0,
        restricted_first_row=restrict_first_row,
    )


def _classify_achievers(
    order: int, achievers: list[int], restrict: bool, gmax: int
) -> list[SkewSignMatrix]:
    """Bucket achiever masks by canonical form.

    In the restricted slice each bucket is materialized at once by expanding
    the whole orbit of one member, which keeps the cost independent of the
    bucket size; the cyclic index is class-invariant, so every slice member
    of an achieving orbit must itself be an achiever (asserted).
    """
    classes: list[SkewSignMatrix] = []
    if not restrict:
        seen: dict[int, SkewSignMatrix] = {}
        for mask in achievers:
            rep = canonical_form(mask_to_matrix(order, mask, restrict=False))
            seen.setdefault(rep.bits, rep)
        return sorted(seen.values(), key=lambda r: r.bits)

    remaining = set(achievers)
    achiever_set = set(achievers)
    while remaining:
        mask = min(remaining)
        member = mask_to_matrix(order, mask, restrict=True)
        classes.append(canonical_form(member))
        orbit = _slice_orbit_masks(member)
        stray = [x for x in orbit.tolist() if x not in achiever_set]
        if stray:
            raise AssertionError(
                f"orbit member {stray[0]} of an achiever misses the maximum {gmax}"
            )
        remaining.difference_update(orbit.tolist())
    return sorted(classes, key=lambda r: r.bits)


# ---------------------------------------------------------------------------
# reference matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fixtures:
    """The named order-4/8 extremal matrices and the two-blocks tournament."""

    d4: SkewSignMatrix
    d8: SkewSignMatrix
    d8_alt: SkewSignMatrix
    d8_alt_blocks: SkewSignMatrix
    blocks_tournament: Tournament


def fixtures() -> Fixtures:
    """Exact extremal matrices of orders 4 and 8.

    ``d8_alt`` is the second equivalence class attaining the order-8 maximum;
    ``d8_alt_blocks`` is its block-shaped representative: two strongly cyclic
    4-vertex blocks with every edge between them oriented first-to-second.
    ``blocks_tournament`` is the 8-vertex tournament whose sign matrix is
    ``d8_alt_blocks``.
    """
    d8_alt = SkewSignMatrix.from_rows(
        [
            "0+++++++",
            "-0+-++++",
            "--0-++++",
            "-++0----",
            "---+0++-",
            "---+-0++",
            "---+--0+",
            "---++--0",
        ]
    )
    d8_alt_blocks = SkewSignMatrix.from_rows(
        [
            "0++-++++",
            "-0++++++",
            "--0+++++",
            "+--0++++",
            "----0++-",
            "-----0++",
            "------0+",
            "----+--0",
        ]
    )
    arr = d8_alt_blocks.to_array()
    out = []
    for i in range(8):
        out.append(sum(1 << j for j in range(8) if arr[i, j] > 0))
    return Fixtures(
        d4=dominant_sign(4),
        d8=dominant_sign(8),
        d8_alt=d8_alt,
        d8_alt_blocks=d8_alt_blocks,
        blocks_tournament=Tournament(8, tuple(out)),
    )
