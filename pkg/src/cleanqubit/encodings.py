"""Subspace encodings of classical states in an n-bit register.

Two families of axis-parallel subspaces (sets of basis strings):

``parity``
    A_b = {x : x.b = 0 mod 2} for nonzero b in {0,1}^n.  Pairwise overlap is
    exactly one half, so members are easy to tell apart.
``pointed``
    A_b = {x : x_1 = 0 or x_2..x_n = b} for b in {0,1}^(n-1).  Any
    permutation of the index set is realised by a basis permutation, but
    pairwise overlap tends to 1.

Basis strings and indices are ints with the first bit most significant, and
members are stored as Python-int bitsets (bit x set iff x is in the member).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

from .bounds import BoundReport, Violation
from .mixedsim import BasisPermutation
from .partitions import Partition

KINDS = ("parity", "pointed", "explicit")
MAX_BITS = 20
ENUMERATION_LIMIT = 12
GL_SEARCH_LIMIT = 4


class UndecidedError(RuntimeError):
    """The question is outside the range this module can settle exactly."""


def bits_to_int(s: str) -> int:
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"not a bit string: {s!r}")
    return int(s, 2)


def int_to_bits(x: int, width: int) -> str:
    return format(x, f"0{width}b") if width else ""


@dataclass
class SubspaceFamily:
    n: int
    kind: str
    members: dict[int, int] | None = None  # explicit kind only: index -> bitset
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def index_width(self) -> int:
        return self.n - 1 if self.kind == "pointed" else self.n

    def indices(self) -> list[int]:
        if self.kind == "parity":
            return list(range(1, 1 << self.n))
        if self.kind == "pointed":
            return list(range(1 << (self.n - 1)))
        return sorted(self.members)

    def index(self, b) -> int:
        """Accept an int or a bit string of the family's index width."""
        if isinstance(b, str):
            if len(b) != self.index_width:
                raise ValueError(f"index {b!r} should have {self.index_width} bits")
            b = bits_to_int(b)
        if self.kind == "explicit":
            if b not in self.members:
                raise KeyError(b)
        elif not (b in range(1, 1 << self.n) if self.kind == "parity" else 0 <= b < 1 << (self.n - 1)):
            raise ValueError(f"index {b} not in the {self.kind} family for n={self.n}")
        return b

    def contains(self, b, x: int) -> bool:
        b = self.index(b)
        if self.kind == "parity":
            return bin(x & b).count("1") % 2 == 0
        if self.kind == "pointed":
            return (x >> (self.n - 1)) == 0 or (x & ((1 << (self.n - 1)) - 1)) == b
        return bool((self.members[b] >> x) & 1)

    def bitset(self, b) -> int:
        b = self.index(b)
        if self.kind == "explicit":
            return self.members[b]
        if self.n > ENUMERATION_LIMIT + 4:
            raise ValueError("member enumeration limited to 16 bits")
        key = ("bitset", b)
        if key not in self._cache:
            bits = 0
            for x in range(1 << self.n):
                if self.contains(b, x):
                    bits |= 1 << x
            self._cache[key] = bits
        return self._cache[key]

    def member(self, b) -> frozenset[int]:
        bits = self.bitset(b)
        return frozenset(x for x in range(1 << self.n) if (bits >> x) & 1)

    def member_size(self, b) -> int:
        if self.kind == "parity":
            self.index(b)
            return 1 << (self.n - 1)
        if self.kind == "pointed":
            self.index(b)
            return (1 << (self.n - 1)) + 1
        return self.bitset(b).bit_count()


def build_family(n: int, kind: str) -> SubspaceFamily:
    if kind not in ("parity", "pointed"):
        raise ValueError("kind must be 'parity' or 'pointed' (use explicit_family otherwise)")
    if not 2 <= n <= MAX_BITS:
        raise ValueError(f"n must lie in [2, {MAX_BITS}]")
    return SubspaceFamily(n, kind)


def explicit_family(n: int, members: Mapping[int, Iterable[int]] | Sequence[Iterable[int]]) -> SubspaceFamily:
    if not 1 <= n <= ENUMERATION_LIMIT + 4:
        raise ValueError("explicit families limited to 16 bits")
    if not isinstance(members, Mapping):
        members = dict(enumerate(members))
    bitsets = {}
    for key, strings in members.items():
        bits = 0
        for x in strings:
            if not 0 <= x < 1 << n:
                raise ValueError(f"basis string {x} outside {n} bits")
            bits |= 1 << x
        bitsets[int(key)] = bits
    return SubspaceFamily(n, "explicit", bitsets)


def intersection_size(F: SubspaceFamily, b, b2) -> int:
    """|A_b n A_b2| -- closed form for parity/pointed, enumeration otherwise."""
    b, b2 = F.index(b), F.index(b2)
    if b == b2:
        raise ValueError("indices must differ")
    if F.kind == "parity":
        # Two distinct nonzero vectors are linearly independent over GF(2).
        return 1 << (F.n - 2)
    if F.kind == "pointed":
        return 1 << (F.n - 1)
    return (F.bitset(b) & F.bitset(b2)).bit_count()


def intersection_size_bruteforce(F: SubspaceFamily, b, b2) -> int:
    b, b2 = F.index(b), F.index(b2)
    if F.n > ENUMERATION_LIMIT:
        raise ValueError("enumeration cross-check limited to 12 bits")
    return sum(1 for x in range(1 << F.n) if F.contains(b, x) and F.contains(b2, x))


@dataclass
class OverlapStats:
    family: str
    n: int
    pair_count: int
    max_ratio: Fraction | None
    min_ratio: Fraction | None
    histogram: dict[int, int]

    def to_dict(self) -> dict:
        def frac(r):
            return None if r is None else f"{r.numerator}/{r.denominator}"

        return {
            "family": self.family,
            "n": self.n,
            "pair_count": self.pair_count,
            "max_ratio": frac(self.max_ratio),
            "min_ratio": frac(self.min_ratio),
            "max_ratio_decimal": None if self.max_ratio is None else float(f"{float(self.max_ratio):.12g}"),
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def overlap_stats(F: SubspaceFamily, method: str = "closed") -> OverlapStats:
    """Extremes of |A n A'| / |A| over unordered pairs.

    ``method="enumerate"`` intersects the member bitsets directly instead of
    using the closed forms (always the case for explicit families).
    """
    idx = F.indices()
    pairs = comb(len(idx), 2)
    if pairs == 0:
        return OverlapStats(F.kind, F.n, 0, None, None, {})
    if F.kind != "explicit" and method == "closed":
        size = F.member_size(idx[0])
        inter = intersection_size(F, idx[0], idx[1])
        r = Fraction(inter, size)
        return OverlapStats(F.kind, F.n, pairs, r, r, {inter: pairs})
    if method not in ("closed", "enumerate"):
        raise ValueError(f"unknown method {method!r}")
    bitsets = [F.bitset(b) for b in idx]
    sizes = [bs.bit_count() for bs in bitsets]
    hist: dict[int, int] = {}
    lo = hi = None
    for i, j in itertools.combinations(range(len(idx)), 2):
        inter = (bitsets[i] & bitsets[j]).bit_count()
        hist[inter] = hist.get(inter, 0) + 1
        # Ratio relative to the first member of the pair; both orders for
        # unequal sizes.
        for denom in {sizes[i], sizes[j]}:
            r = Fraction(inter, denom) if denom else Fraction(0)
            lo = r if lo is None or r < lo else lo
            hi = r if hi is None or r > hi else hi
    return OverlapStats(F.kind, F.n, pairs, hi, lo, hist)


# -- permutability --------------------------------------------------------------


def maps_family(F: SubspaceFamily, g: BasisPermutation, pi: Mapping[int, int]) -> bool:
    """True iff g carries member(b) onto member(pi[b]) for every b."""
    for b in F.indices():
        image = 0
        bits = F.bitset(b)
        x = 0
        while bits:
            if bits & 1:
                image |= 1 << g(x)
            bits >>= 1
            x += 1
        if image != F.bitset(pi[b]):
            return False
    return True


def _normalise_perm(F: SubspaceFamily, pi) -> dict[int, int]:
    idx = F.indices()
    pi = {F.index(k): F.index(v) for k, v in dict(pi).items()}
    full = {b: pi.get(b, b) for b in idx}
    if sorted(full.values()) != idx:
        raise ValueError("pi is not a permutation of the index set")
    return full


def _gf2_matvec(cols: Sequence[int], v: int, n: int) -> int:
    """Matrix given by its columns (column j is the image of bit j, MSB first)."""
    out = 0
    for j in range(n):
        if (v >> (n - 1 - j)) & 1:
            out ^= cols[j]
    return out


def _gf2_inverse_transpose(cols: Sequence[int], n: int) -> list[int] | None:
    """Columns of (A^-1)^T, or None if A is singular."""
    # Rows of A as bit masks over columns.
    rows = []
    for i in range(n):
        r = 0
        for j in range(n):
            if (cols[j] >> (n - 1 - i)) & 1:
                r |= 1 << (n - 1 - j)
        rows.append(r)
    aug = [(rows[i], 1 << (n - 1 - i)) for i in range(n)]
    for c in range(n):
        bit = 1 << (n - 1 - c)
        pivot = next((r for r in range(c, n) if aug[r][0] & bit), None)
        if pivot is None:
            return None
        aug[c], aug[pivot] = aug[pivot], aug[c]
        for r in range(n):
            if r != c and aug[r][0] & bit:
                aug[r] = (aug[r][0] ^ aug[c][0], aug[r][1] ^ aug[c][1])
    # aug[i][1] is row i of A^-1, i.e. column i of (A^-1)^T.
    return [aug[i][1] for i in range(n)]


def linear_witness(F: SubspaceFamily, pi: Mapping[int, int]) -> BasisPermutation | None:
    """Basis permutation x -> Lx realising ``pi`` on a parity family, if one exists.

    x -> Lx sends A_b to A_{Mb} with M = (L^-1)^T, so ``pi`` is realisable
    exactly when it is the action of some invertible M on nonzero vectors.
    M is pinned down by the images of the unit vectors.
    """
    pi = _normalise_perm(F, pi)
    n = F.n
    cols = [pi[1 << (n - 1 - j)] for j in range(n)]
    for b in F.indices():
        if _gf2_matvec(cols, b, n) != pi[b]:
            return None
    L_cols = _gf2_inverse_transpose(cols, n)
    if L_cols is None:
        return None
    return BasisPermutation(n, {x: _gf2_matvec(L_cols, x, n) for x in range(1 << n)})


def general_linear_group(n: int) -> Iterable[list[int]]:
    """All invertible n x n matrices over GF(2), as column lists."""
    return [list(cols) for cols in _gl_columns(n)]


@lru_cache(maxsize=None)
def _gl_columns(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        cols for cols in itertools.product(range(1, 1 << n), repeat=n)
        if _gf2_inverse_transpose(cols, n) is not None
    )


def linear_witness_search(F: SubspaceFamily, pi: Mapping[int, int]) -> BasisPermutation | None:
    """Exhaustive search over GL(n, 2); independent of :func:`linear_witness`."""
    n = F.n
    if n > GL_SEARCH_LIMIT:
        raise UndecidedError(f"GL({n},2) search limited to n <= {GL_SEARCH_LIMIT}")
    pi = _normalise_perm(F, pi)
    targets = [(F.bitset(b), F.bitset(pi[b])) for b in F.indices()]
    for L_cols in _gl_columns(n):
        images = [_gf2_matvec(L_cols, x, n) for x in range(1 << n)]
        ok = True
        for src, dst in targets:
            image = 0
            for x in range(1 << n):
                if (src >> x) & 1:
                    image |= 1 << images[x]
            if image != dst:
                ok = False
                break
        if ok:
            return BasisPermutation(n, dict(enumerate(images)))
    return None


def permutability_witness(F: SubspaceFamily, pi) -> BasisPermutation | None:
    """A basis permutation carrying member(b) onto member(pi(b)) for all b.

    ``pi`` maps indices to indices (ints or bit strings); indices it omits
    are fixed.  Pointed families always have a witness (fix every x_1 = 0
    string, send 1.b to 1.pi(b)).  Parity families have one iff ``pi`` is
    induced by an invertible linear substitution; ``None`` otherwise.
    """
    pi = _normalise_perm(F, pi)
    if F.kind == "pointed":
        top = 1 << (F.n - 1)
        g = BasisPermutation(F.n, {top | b: top | c for b, c in pi.items()})
        if F.n <= ENUMERATION_LIMIT + 4 and not maps_family(F, g, pi):
            raise AssertionError("pointed witness failed verification")
        return g
    if F.kind == "parity":
        return linear_witness(F, pi)
    raise UndecidedError("no witness construction for explicit families")


def parse_index_perm(F: SubspaceFamily, text: str) -> dict[int, int]:
    """``"swap:01,10"`` or ``"cycle:001,010,100"`` or ``"map:01>10,10>01"``."""
    kind, _, body = text.partition(":")
    items = [s.strip() for s in body.split(",") if s.strip()]
    if kind == "swap" and len(items) == 2:
        a, b = (F.index(s) for s in items)
        return {a: b, b: a}
    if kind == "cycle" and items:
        cyc = [F.index(s) for s in items]
        return {cyc[i]: cyc[(i + 1) % len(cyc)] for i in range(len(cyc))}
    if kind == "map" and items:
        out = {}
        for item in items:
            src, _, dst = item.partition(">")
            out[F.index(src.strip())] = F.index(dst.strip())
        return out
    if kind == "identity":
        return {}
    raise ValueError(f"bad permutation spec {text!r}")


# -- permutation representations on M subspaces ------------------------------------


@dataclass(frozen=True)
class PermRepInstance:
    """S_M acting on an N-dimensional space by permuting coordinates, with a
    family of M coordinate subspaces (each a set of axes) that it permutes."""

    M: int
    N: int
    variant: str
    members: tuple[frozenset[int], ...]
    generators: tuple[tuple[int, ...], ...]  # adjacent transpositions as axis maps

    def dim(self, i: int) -> int:
        return len(self.members[i])

    def dim_intersection(self, i: int, j: int) -> int:
        return len(self.members[i] & self.members[j])

    def act(self, g: Sequence[int], i: int) -> frozenset[int]:
        return frozenset(g[a] for a in self.members[i])

    def verify(self) -> bool:
        """Generators permute the family and satisfy the Coxeter relations."""
        members = set(self.members)
        for g in self.generators:
            if any(self.act(g, i) not in members for i in range(self.M)):
                return False
        ident = tuple(range(self.N))

        def compose(*gs):
            out = list(range(self.N))
            for g in gs:
                out = [g[a] for a in out]
            return tuple(out)

        def power(g, e):
            return compose(*([g] * e)) if e else ident

        s = self.generators
        for i, a in enumerate(s):
            if power(a, 2) != ident:
                return False
            for j in range(i + 1, len(s)):
                order = 3 if j == i + 1 else 2
                if power(compose(a, s[j]), order) != ident:
                    return False
        return True


def build_perm_rep_instance(M: int, variant: str = "coordinate") -> PermRepInstance:
    if not 2 <= M <= 12:
        raise ValueError("M must lie in [2, 12]")
    axes = range(M)
    if variant == "coordinate":
        members = tuple(frozenset({i}) for i in axes)
    elif variant == "complement":
        members = tuple(frozenset(set(axes) - {i}) for i in axes)
    else:
        raise ValueError("variant must be 'coordinate' or 'complement'")
    gens = []
    for i in range(M - 1):
        g = list(axes)
        g[i], g[i + 1] = g[i + 1], g[i]
        gens.append(tuple(g))
    return PermRepInstance(M, M, variant, members, tuple(gens))


def _lhs_within(lhs: int, c: Fraction, N: int, M: int) -> bool:
    """lhs <= (2 c log2(N) / M) * N, decided exactly as 2^(lhs*M/(2cN)) <= N."""
    if lhs <= 0:
        return True
    t = Fraction(lhs * M) / (2 * c * N)
    return 2 ** t.numerator <= N ** t.denominator


def check_bound_difference(inst: PermRepInstance, c=1) -> BoundReport:
    """Check dim X - dim(X n Y) <= (2 c lg N / M) N over all ordered pairs.

    The inequality is decided in exact arithmetic; ``extra["slack"]`` holds
    the per-pair margin RHS - LHS as a float rounded to 12 digits.
    """
    from math import log2

    c = Fraction(c)
    if c <= 0:
        raise ValueError("c must be positive")
    rhs = float(2 * c) * log2(inst.N) / inst.M * inst.N
    report = BoundReport(
        label="bound-difference",
        M_range=(inst.M, inst.M),
        params={"M": inst.M, "N": inst.N, "variant": inst.variant, "c": c},
    )
    slack = {}
    for i in range(inst.M):
        for j in range(inst.M):
            if i == j:
                continue
            lhs = inst.dim(i) - inst.dim_intersection(i, j)
            report.checked_count += 1
            slack[f"{i + 1},{j + 1}"] = float(f"{rhs - lhs:.12g}")
            if not _lhs_within(lhs, c, inst.N, inst.M):
                report.violations.append(Violation(Partition(), rhs, lhs, {"pair": [i + 1, j + 1]}))
    report.extra.update({"rhs": float(f"{rhs:.12g}"), "slack": slack, "min_slack": min(slack.values())})
    return report
