"""Young diagrams: partitions, hook lengths, irreducible dimensions of S_M and
the restriction rule S_M -> S_{M-1}.

Everything here is exact integer arithmetic.  Cells are 1-based ``(row, col)``.
"""

from __future__ import annotations

import re
from functools import lru_cache
from math import factorial
from typing import Iterable, Iterator, NamedTuple


class Cell(NamedTuple):
    row: int
    col: int


class Partition(tuple):
    """A weakly decreasing tuple of positive integers.

    Subclasses ``tuple`` so partitions hash, compare and unpack like the
    plain tuples they are built from.
    """

    def __new__(cls, parts: Iterable[int] = ()):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be weakly decreasing: {parts}")
        return super().__new__(cls, parts)

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def first_row(self) -> int:
        return self[0] if self else 0

    @property
    def first_column(self) -> int:
        return len(self)

    def cells(self) -> Iterator[Cell]:
        for i, row in enumerate(self, start=1):
            for j in range(1, row + 1):
                yield Cell(i, j)

    def __repr__(self) -> str:
        return f"Partition({format_partition(self)})"


def conjugate(lam: Iterable[int]) -> Partition:
    """Transpose the diagram: ``lam'_j = #{i : lam_i >= j}``."""
    lam = Partition(lam)
    if not lam:
        return Partition()
    return Partition(sum(1 for r in lam if r >= j) for j in range(1, lam[0] + 1))


def hook_lengths(lam: Iterable[int]) -> dict[Cell, int]:
    """Map every cell to its hook length ``arm + leg + 1``."""
    lam = Partition(lam)
    cols = conjugate(lam)
    return {
        Cell(i, j): (lam[i - 1] - j) + (cols[j - 1] - i) + 1 for i, j in lam.cells()
    }


@lru_cache(maxsize=None)
def _dimension(lam: Partition) -> int:
    product = 1
    for h in hook_lengths(lam).values():
        product *= h
    q, r = divmod(factorial(lam.size), product)
    if r:
        raise ArithmeticError(f"hook product {product} does not divide {lam.size}!")
    return q


def dimension(lam: Iterable[int]) -> int:
    """Dimension of the irreducible S_M representation indexed by ``lam``
    (hook length formula)."""
    return _dimension(Partition(lam))


def inside_corners(lam: Iterable[int]) -> list[Cell]:
    """Cells whose removal leaves a legal diagram, top row first."""
    lam = Partition(lam)
    corners = []
    for i, row in enumerate(lam, start=1):
        below = lam[i] if i < len(lam) else 0
        if row > below:
            corners.append(Cell(i, row))
    return corners


def remove_cell(lam: Iterable[int], cell: Cell) -> Partition:
    lam = Partition(lam)
    if cell not in inside_corners(lam):
        raise ValueError(f"{cell} is not an inside corner of {format_partition(lam)}")
    parts = list(lam)
    parts[cell.row - 1] -= 1
    return Partition(p for p in parts if p)


def restrict(lam: Iterable[int]) -> list[Partition]:
    """Irreducible constituents of the restriction to S_{M-1}, one per
    inside corner, in corner order."""
    lam = Partition(lam)
    if not lam:
        raise ValueError("cannot restrict the empty partition")
    return [remove_cell(lam, c) for c in inside_corners(lam)]


def enumerate_partitions(M: int, max_part: int | None = None) -> Iterator[Partition]:
    """Yield every partition of ``M`` in reverse-lexicographic order,
    e.g. (4), (3,1), (2,2), (2,1,1), (1,1,1,1)."""
    if M < 0:
        raise ValueError("M must be non-negative")
    if max_part is None:
        max_part = M
    if M == 0:
        yield Partition()
        return
    for first in range(min(M, max_part), 0, -1):
        for rest in enumerate_partitions(M - first, first):
            yield Partition((first,) + rest)


@lru_cache(maxsize=None)
def partition_count(M: int) -> int:
    """p(M) via Euler's pentagonal number recurrence."""
    if M < 0:
        return 0
    if M == 0:
        return 1
    total = 0
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 > M:
            break
        sign = 1 if k % 2 else -1
        total += sign * partition_count(M - g1)
        g2 = k * (3 * k + 1) // 2
        if g2 <= M:
            total += sign * partition_count(M - g2)
        k += 1
    return total


_SHAPE_RE = re.compile(r"^\s*[\[(]?\s*(\d+(?:\s*,\s*\d+)*)?\s*,?\s*[\])]?\s*$")


def parse_partition(text: str) -> Partition:
    """Parse ``"[4,4,2,1]"`` (brackets optional; ``"[]"`` is the empty shape)."""
    m = _SHAPE_RE.match(text)
    if not m:
        raise ValueError(f"not a partition: {text!r}")
    body = m.group(1)
    if body is None:
        return Partition()
    return Partition(int(p) for p in body.split(","))


def format_partition(lam: Iterable[int]) -> str:
    return "[" + ",".join(str(p) for p in lam) + "]"
