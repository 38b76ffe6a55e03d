"""Step tournamentons, the carousel limit object and executable lemma checks.

A step tournamenton is a k x k grid W of values in [0, 1] with
W_ij + W_ji = 1: the kernel is constant on the cells of the uniform k-grid
of [0,1]^2.  Its scaled matrix A = W/k is complementary, and the cycle
density of length l is exactly 2^l * Trace(A^l).

The carousel kernel sends each point to beat the half circle after it; its
cycle densities converge to the conjectured maxima for lengths divisible by
four, computed here by the truncated series with a certified tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import (
    ComplementaryMatrix,
    SkewMatrix,
    eigenvalues,
    make_dominant,
    skew_spectrum,
)

__all__ = [
    "StepTournamenton",
    "ConjectureValue",
    "MidtermsReport",
    "SumsqExtremal",
    "DominanceReport",
    "carousel_tournamenton",
    "random_step_tournamenton",
    "step_approximation",
    "cycle_density_W",
    "conjectured_c",
    "lower_bound_c",
    "check_midterms",
    "sumsq_extremal",
    "antisym_dominance",
    "regular_second_eigenvalue",
    "parse_step_tournamenton",
    "format_step_tournamenton",
]

GRID_TOL = 1e-12


@dataclass(frozen=True)
class StepTournamenton:
    """k x k grid of values in [0,1] with W_ij + W_ji = 1 and diagonal 1/2."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("step tournamenton must be a square grid")
        if np.any(v < -GRID_TOL) or np.any(v > 1 + GRID_TOL):
            raise ValueError("grid values must lie in [0, 1]")
        if np.max(np.abs(v + v.T - 1.0)) > GRID_TOL:
            raise ValueError("W_ij + W_ji must equal 1")

    @property
    def k(self) -> int:
        return self.values.shape[0]


def carousel_tournamenton(k: int) -> StepTournamenton:
    """Cell averages of the carousel kernel on the uniform k-grid (k even).

    The kernel wins exactly on 0 < (y - x) mod 1 <= 1/2, so a cell at cyclic
    offset d = (j - i) mod k averages to 1 for 0 < d < k/2, to 0 for
    d > k/2, and to 1/2 on the diagonal and on the antipodal boundary
    d = k/2.  Odd k would leave cells straddling the boundary, hence the
    parity requirement.
    """
    if k < 2 or k % 2:
        raise ValueError(f"carousel grid needs even k >= 2, got {k}")
    i = np.arange(k)
    d = (i[None, :] - i[:, None]) % k
    w = np.where((d > 0) & (d < k // 2), 1.0, 0.0)
    w[(d == 0) | (d == k // 2)] = 0.5
    return StepTournamenton(w)


def random_step_tournamenton(k: int, seed: int) -> StepTournamenton:
    """Uniformly random grid: independent U(0,1) above the diagonal."""
    rng = np.random.default_rng(seed)
    w = np.full((k, k), 0.5)
    upper = np.triu_indices(k, 1)
    vals = rng.random(len(upper[0]))
    w[upper] = vals
    w[(upper[1], upper[0])] = 1.0 - vals
    return StepTournamenton(w)


def step_approximation(w: StepTournamenton, coarse_k: int) -> ComplementaryMatrix:
    """Block-averaged complementary matrix of order ``coarse_k`` (must divide k)."""
    k = w.k
    if coarse_k < 1 or k % coarse_k:
        raise ValueError(f"coarse resolution {coarse_k} must divide {k}")
    r = k // coarse_k
    blocks = w.values.reshape(coarse_k, r, coarse_k, r).mean(axis=(1, 3))
    return ComplementaryMatrix(blocks / coarse_k)


def cycle_density_W(w: StepTournamenton, length: int) -> float:
    """Exact cycle density of the step tournamenton: 2^l * Trace((W/k)^l)."""
    if length < 3:
        raise ValueError(f"cycle length must be >= 3, got {length}")
    a = w.values / w.k
    return float(2**length * np.trace(np.linalg.matrix_power(a, length)))


@dataclass(frozen=True)
class ConjectureValue:
    """Truncated value of 1 + 2 * sum_i (2 / ((2i-1) pi))^l with a certified tail.

    ``excess`` is the series sum without the leading 1, accumulated exactly
    (fsum); for large l it carries the full relative precision that
    ``value - 1.0`` would lose to rounding.
    """

    length: int
    value: float
    excess: float
    terms_used: int
    truncation_bound: float


def lower_bound_c(length: int) -> float:
    """First series term alone: 2 * (2/pi)^l."""
    return 2 * (2 / math.pi) ** length


def conjectured_c(length: int, max_terms: int = 10**6) -> ConjectureValue:
    """Conjectured maximum cycle density for lengths divisible by four.

    Terms are added until the next term drops below 1e-16 of the partial sum
    and the analytic tail bound

        sum_{i>N} (2i-1)^{-l} <= (2N-1)^{1-l} / (2(l-1))

    certifies a relative truncation error below 1e-15.
    """
    if length < 4 or length % 4:
        raise ValueError(f"length must be a positive multiple of 4, got {length}")
    coeff = 2 * (2 / math.pi) ** length
    terms: list[float] = []
    tail = math.inf
    for i in range(1, max_terms + 1):
        term = 2 * (2 / ((2 * i - 1) * math.pi)) ** length
        terms.append(term)
        partial = 1.0 + math.fsum(terms)
        tail = coeff * (2 * i - 1) ** (1 - length) / (2 * (length - 1))
        if term < 1e-16 * partial and tail < 1e-15 * partial:
            break
    excess = math.fsum(terms)
    return ConjectureValue(
        length=length,
        value=1.0 + excess,
        excess=excess,
        terms_used=len(terms),
        truncation_bound=tail,
    )


@dataclass(frozen=True)
class MidtermsReport:
    """Residual and slack of the trace identities for J + B.

    residual4 is |Trace(J+B)^4 - (Trace J^4 + Trace B^4 - 4n ||Bj||^2)|,
    slack8 is Trace J^8 + Trace B^8 - 2 n^5 ||Bj||^2 - Trace(J+B)^8 (the
    eighth-power inequality, non-negative up to rounding), and row_sum_norm
    is ||Bj|| with j the all-ones vector; both sides become equal exactly
    when every row of B sums to zero.
    """

    residual4: float
    slack8: float
    row_sum_norm: float


def _trace_pow(a: np.ndarray, power: int) -> float:
    acc = a
    for _ in range(power - 1):
        acc = acc @ a
    return float(np.trace(acc))


def check_midterms(b) -> MidtermsReport:
    """Evaluate the fourth- and eighth-power trace identities by explicit powering."""
    a = np.asarray(getattr(b, "values", b), dtype=float)
    if not isinstance(b, SkewMatrix):
        SkewMatrix(a)  # validate skewness
    if np.any(np.abs(a) > 1 + GRID_TOL):
        raise ValueError("entries must lie in [-1, 1]")
    n = a.shape[0]
    j = np.ones((n, n))
    bj = a.sum(axis=1)
    norm2 = float(bj @ bj)
    lhs4 = _trace_pow(j + a, 4)
    rhs4 = _trace_pow(j, 4) + _trace_pow(a, 4) - 4 * n * norm2
    lhs8 = _trace_pow(j + a, 8)
    slack8 = _trace_pow(j, 8) + _trace_pow(a, 8) - 2 * n**5 * norm2 - lhs8
    return MidtermsReport(
        residual4=abs(lhs4 - rhs4),
        slack8=slack8,
        row_sum_norm=math.sqrt(norm2),
    )


@dataclass(frozen=True)
class SumsqExtremal:
    """Maximizer of sum x_i^2 under the nested partial-sum constraints."""

    x: tuple[float, ...]
    max_value: float


def sumsq_extremal(s) -> SumsqExtremal:
    """Extremal point of the majorization system.

    Given positive s_1..s_k, the vector x_i = s_i + s_{i+1} + ... + s_k meets
    every constraint sum_{i<=m} x_i <= sum_{i<=k} min(i, m) s_i with equality
    and maximizes sum x_i^2 among admissible non-increasing vectors.
    """
    s = [float(v) for v in s]
    if not s or any(v <= 0 for v in s):
        raise ValueError("weights must be positive")
    suffix = [float(v) for v in np.cumsum(s[::-1])[::-1]]
    return SumsqExtremal(
        x=tuple(suffix),
        max_value=float(sum(v * v for v in suffix)),
    )


@dataclass(frozen=True)
class DominanceReport:
    rho_a: float
    rho_d: float
    ok: bool


def antisym_dominance(a) -> DominanceReport:
    """Spectral radius of a [-1,1] skew matrix against the dominant matrix of its order."""
    arr = np.asarray(getattr(a, "values", a), dtype=float)
    if not isinstance(a, SkewMatrix):
        SkewMatrix(arr)
    if np.any(np.abs(arr) > 1 + GRID_TOL):
        raise ValueError("entries must lie in [-1, 1]")
    n = arr.shape[0]
    rho_a = float(np.max(np.abs(skew_spectrum(arr)))) if n else 0.0
    rho_d = float(np.max(np.abs(skew_spectrum(make_dominant(n)))))
    return DominanceReport(rho_a=rho_a, rho_d=rho_d, ok=rho_a <= rho_d + 1e-9)


def regular_second_eigenvalue(w: StepTournamenton) -> float:
    """Largest eigenvalue modulus of a regular grid besides the 1/2 eigenvalue."""
    k = w.k
    row_sums = w.values.sum(axis=1)
    if np.max(np.abs(row_sums - k / 2)) > 1e-9:
        raise ValueError("grid is not regular: row sums must all equal k/2")
    report = eigenvalues(step_approximation(w, k))
    vals = report.eigenvalues
    half_pos = int(np.argmin(np.abs(vals - 0.5)))
    if abs(vals[half_pos] - 0.5) > 1e-6:
        raise ValueError("regular grid is missing its 1/2 eigenvalue")
    rest = np.delete(vals, half_pos)
    return float(np.max(np.abs(rest))) if rest.size else 0.0


def format_step_tournamenton(w: StepTournamenton) -> str:
    """Text form: first line k, then k whitespace-separated rows."""
    lines = [str(w.k)]
    for row in w.values:
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def parse_step_tournamenton(text: str) -> StepTournamenton:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty grid file")
    try:
        k = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be the resolution, got {lines[0]!r}")
    if len(lines) != k + 1:
        raise ValueError(f"expected {k} rows, found {len(lines) - 1}")
    rows = [[float(x) for x in ln.split()] for ln in lines[1:]]
    if any(len(r) != k for r in rows):
        raise ValueError(f"each row must have {k} entries")
    return StepTournamenton(np.array(rows))
