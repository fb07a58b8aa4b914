"""Exhaustive checks of the dimension lower bounds used in the mixed-state
impossibility argument, and the resulting qubit-count calculator.

All scans walk partitions in the deterministic order produced by
:func:`cleanqubit.partitions.enumerate_partitions`, so two runs with the same
arguments produce identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any

from .partitions import (
    Partition,
    conjugate,
    dimension,
    enumerate_partitions,
    format_partition,
)

SCAN_LIMIT = 40

CONSTANT_NOTE = (
    "general mode uses the per-block constant 4cn/M; the final summation step "
    "of the same argument is written with 2cn/M, which would give a bound "
    "larger by a factor of 2 in M"
)


@dataclass
class Violation:
    partition: Partition
    expected: int
    actual: int
    parameter: Any = None

    def to_dict(self) -> dict:
        return {
            "partition": format_partition(self.partition),
            "expected": self.expected,
            "actual": self.actual,
            "parameter": _jsonable(self.parameter),
        }


@dataclass
class Minimum:
    parameter: Any
    partition: Partition | None
    dimension: int | None

    def to_dict(self) -> dict:
        return {
            "parameter": _jsonable(self.parameter),
            "partition": None if self.partition is None else format_partition(self.partition),
            "dimension": self.dimension,
        }


@dataclass
class BoundReport:
    """Outcome of one exhaustive scan.

    ``violations`` is empty exactly when the checked statement held for every
    scanned (partition, parameter) pair.
    """

    label: str
    M_range: tuple[int, int]
    checked_count: int = 0
    violations: list[Violation] = field(default_factory=list)
    minima: list[Minimum] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "range": list(self.M_range),
            "checked_count": self.checked_count,
            "violations": [v.to_dict() for v in self.violations],
            "minima": [m.to_dict() for m in self.minima],
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "notes": list(self.notes),
            "extra": {k: _jsonable(v) for k, v in self.extra.items()},
        }


def _jsonable(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else value.numerator
    if isinstance(value, Partition):
        return format_partition(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


def _check_scan_range(M: int, low: int) -> None:
    if not low <= M <= SCAN_LIMIT:
        raise ValueError(f"M must lie in [{low}, {SCAN_LIMIT}], got {M}")


def phi(A: int, M: int) -> int:
    """C(M, A) - C(M, A-1): the dimension of the two-row shape (M-A, A)."""
    if A < 0 or M < 0 or 2 * A > M:
        raise ValueError(f"phi requires 0 <= A <= M/2, got A={A}, M={M}")
    return comb(M, A) - (comb(M, A - 1) if A >= 1 else 0)


def two_row(M: int, A: int) -> Partition:
    return Partition(p for p in (M - A, A) if p)


def check_rasala(M: int) -> BoundReport:
    """Scan both parts of Rasala's lower bound at a single M.

    Part 1: for each A <= M/2, every shape with first row exactly M-A has
    dimension >= phi(A, M).  Part 2: every shape whose first row and first
    column are both <= M/2 has dimension >= phi(floor(M/2), M).

    ``minima`` holds one row per A for part 1 (parameter ``A``) followed by
    one row for part 2 (parameter ``"square"``).
    """
    _check_scan_range(M, 4)
    report = BoundReport(label="rasala", M_range=(M, M), params={"M": M})
    shapes = list(enumerate_partitions(M))

    for A in range(M // 2 + 1):
        bound = phi(A, M)
        best: Partition | None = None
        best_dim = None
        for lam in shapes:
            if lam.first_row != M - A:
                continue
            d = dimension(lam)
            report.checked_count += 1
            if d < bound:
                report.violations.append(Violation(lam, bound, d, A))
            if best_dim is None or d < best_dim:
                best, best_dim = lam, d
        report.minima.append(Minimum(A, best, best_dim))

    bound = phi(M // 2, M)
    best = best_dim = None
    for lam in shapes:
        if 2 * lam.first_row > M or 2 * lam.first_column > M:
            continue
        d = dimension(lam)
        report.checked_count += 1
        if d < bound:
            report.violations.append(Violation(lam, bound, d, "square"))
        if best_dim is None or d < best_dim:
            best, best_dim = lam, d
    report.minima.append(Minimum("square", best, best_dim))
    return report


def phi_argmin(A: int, M: int) -> int:
    """Smallest B in [A, floor(M/2)] minimising phi(B, M)."""
    return min(range(A, M // 2 + 1), key=lambda B: (phi(B, M), B))


def scan_phi_minimizer(M: int) -> BoundReport:
    """For each A, locate argmin phi(B, M) over A <= B <= M/2.

    The minimiser is expected to be either A itself or floor(M/2), switching
    once at a crossover A_c.  A violation is any A whose minimiser is neither
    endpoint, or an A below the crossover whose minimiser is not A.  The
    crossover is reported together with the fitted constant
    c = (M/2 - A_c) / sqrt(M).
    """
    if M < 4:
        raise ValueError("M must be at least 4")
    half = M // 2
    report = BoundReport(label="phi-minimizer", M_range=(M, M), params={"M": M})
    argmins = []
    for A in range(half + 1):
        B = phi_argmin(A, M)
        argmins.append(B)
        report.checked_count += 1
        report.minima.append(Minimum(A, two_row(M, B), phi(B, M)))
        if B not in (A, half):
            report.violations.append(Violation(two_row(M, B), phi(A, M), phi(B, M), A))

    # Crossover: first A from which the minimiser is pinned at floor(M/2)
    # for the remainder of the range.
    crossover = half
    for A in range(half, -1, -1):
        if argmins[A] == half:
            crossover = A
        else:
            break
    for A in range(crossover):
        if argmins[A] != A:
            report.violations.append(Violation(two_row(M, A), phi(A, M), phi(argmins[A], M), A))
    fitted_c = (Fraction(M, 2) - crossover) / (M ** 0.5)
    report.extra.update(
        {
            "argmin": argmins,
            "crossover": crossover,
            "fitted_c": round(float(fitted_c), 12),
            "sqrt_M": round(M ** 0.5, 12),
        }
    )
    return report


def _proof_range(M: int, A: int) -> bool:
    # A <= M - sqrt(M); shapes with a larger A cannot exist.
    return (M - A) ** 2 >= M


def check_long_row_or_column(M: int, dim_budget: int) -> BoundReport:
    """Dimension of shapes whose first row and column are both at most M - A.

    For every A the smallest such dimension is tabulated in ``minima``.
    Two budget thresholds are reported in ``extra``:

    ``a_star``
        the largest A for which at least one such shape exists and all of
        them have dimension > ``dim_budget``; 0 when there is none.
    ``a_threshold``
        the smallest A with that property (``None`` if none).  Any
        irreducible of dimension <= ``dim_budget`` must have a first row or
        first column longer than ``M - a_threshold``.

    ``violations`` lists the shapes contradicting dimension >= 2**A for A in
    the range A <= M - sqrt(M) handled by the long-row argument, tagged with
    the case (1: A >= M/2 - c sqrt(M), 2: below) using c = 1.
    """
    _check_scan_range(M, 4)
    if dim_budget < 0:
        raise ValueError("dim_budget must be non-negative")
    report = BoundReport(
        label="long-row-or-column",
        M_range=(M, M),
        params={"M": M, "dim_budget": dim_budget, "c": 1},
    )
    shapes = [(lam, max(lam.first_row, lam.first_column), dimension(lam)) for lam in enumerate_partitions(M)]
    a_star = 0
    a_threshold = None
    for A in range(M + 1):
        qualifying = [(lam, d) for lam, side, d in shapes if side <= M - A]
        if not qualifying:
            report.minima.append(Minimum(A, None, None))
            continue
        lam_min, d_min = min(qualifying, key=lambda t: t[1])
        report.minima.append(Minimum(A, lam_min, d_min))
        if d_min > dim_budget:
            a_star = A
            if a_threshold is None:
                a_threshold = A
        if not _proof_range(M, A):
            continue
        case = 1 if 2 * A >= M - 2 * M ** 0.5 else 2
        for lam, d in qualifying:
            report.checked_count += 1
            if d < 2 ** A:
                report.violations.append(Violation(lam, 2 ** A, d, {"A": A, "case": case}))
    report.extra.update({"a_star": a_star, "a_threshold": a_threshold})
    report.notes.append("case boundary M/2 - c*sqrt(M) evaluated with c = 1")
    return report


def first_row_removed(lam: Partition) -> Partition:
    """Delete the last cell of the first row (legal when lam_1 > lam_2)."""
    parts = list(lam)
    parts[0] -= 1
    if len(parts) > 1 and parts[0] < parts[1]:
        raise ValueError(f"last cell of the first row of {format_partition(lam)} is not a corner")
    return Partition(p for p in parts if p)


def check_shape_lemma(M: int) -> BoundReport:
    """Check dim(lam minus last first-row cell) * M >= (M - 2l) * dim(lam)
    for every shape with first-row deficit l < M/2, and the same for
    columns via the conjugate.  Integer arithmetic only.

    ``minima`` records, per side, the shape with the smallest ratio
    dim(lam^-) / dim(lam).
    """
    _check_scan_range(M, 3)
    report = BoundReport(label="shape-lemma", M_range=(M, M), params={"M": M})
    tightest: dict[str, tuple[Fraction, Partition]] = {}
    for lam in enumerate_partitions(M):
        for side, shape in (("row", lam), ("column", conjugate(lam))):
            deficit = M - shape.first_row
            if 2 * deficit >= M:
                continue
            smaller = first_row_removed(shape)
            lhs = dimension(smaller) * M
            rhs = (M - 2 * deficit) * dimension(shape)
            report.checked_count += 1
            if lhs < rhs:
                report.violations.append(Violation(lam, rhs, lhs, side))
            ratio = Fraction(dimension(smaller), dimension(shape))
            if side not in tightest or ratio < tightest[side][0]:
                tightest[side] = (ratio, lam)
    for side in ("row", "column"):
        if side in tightest:
            ratio, lam = tightest[side]
            report.minima.append(Minimum(side, lam, dimension(lam)))
            report.extra[f"min_ratio_{side}"] = ratio
    return report


@dataclass(frozen=True)
class TheoremParams:
    n: int
    k: int
    delta: Fraction
    c: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "c", Fraction(self.c))
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.k <= self.n:
            raise ValueError("k must satisfy 0 <= k <= n")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if self.c <= 0:
            raise ValueError("c must be positive")


MODES = ("representation", "general")


def state_count_bound(p: TheoremParams, mode: str) -> Fraction:
    """Largest M for which the overlap lower bound still allows
    pairwise overlap <= 1 - delta."""
    if mode == "representation":
        # 1 - 2^(k+1) c n / M <= 1 - delta
        return Fraction(2 ** (p.k + 1)) * p.c * p.n / p.delta
    if mode == "general":
        # 1 - 2^(k+1) sqrt(c n / M) <= 1 - delta
        return Fraction(4 ** (p.k + 1)) * p.c * p.n / p.delta**2
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def floor_log2(x: Fraction) -> int:
    """Exact floor(log2(x)) for positive rationals."""
    if x <= 0:
        raise ValueError("log of non-positive number")
    num, den = x.numerator, x.denominator
    m = num.bit_length() - den.bit_length()
    while (num << max(-m, 0)) < (den << max(m, 0)):
        m -= 1
    while (num << max(-(m + 1), 0)) >= (den << max(m + 1, 0)):
        m += 1
    return m


def max_simulatable_qubits(p: TheoremParams, mode: str = "general") -> int:
    """Largest m with M = 2^m <= the mode's state-count bound.

    The boundary is inclusive: M equal to the bound is still allowed.
    Returns 0 when even a single state exceeds the bound.
    """
    return max(floor_log2(state_count_bound(p, mode)), 0)


def theorem_report(p: TheoremParams, mode: str = "general") -> dict:
    bound = state_count_bound(p, mode)
    m = max_simulatable_qubits(p, mode)
    notes = [
        "boundary is inclusive: M may equal the algebraic bound",
        "the (1+o(1)) factor is not modelled; m is the exact inequality threshold",
        f"c = {_jsonable(p.c)} (user supplied)",
    ]
    if mode == "general":
        notes.append(CONSTANT_NOTE)
    return {
        "label": "theorem",
        "params": {"n": p.n, "k": p.k, "c": _jsonable(p.c), "delta": _jsonable(p.delta), "mode": mode},
        "state_bound": _jsonable(bound),
        "max_qubits": m,
        "notes": notes,
    }
