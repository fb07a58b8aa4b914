"""Simulation of an n-qubit register whose first k qubits start in |0> and
whose remaining n-k qubits start maximally mixed.

Two representations are provided:

* ``diagonal`` -- exact.  The state is the initial uniform distribution pushed
  forward through a basis permutation kept in sparse form, so registers up
  to 30 qubits are fine as long as the permutations touch few strings.
  Probabilities are :class:`fractions.Fraction`.
* ``dense`` -- a complex ``2^n x 2^n`` density matrix (n <= 10) used for
  general unitaries.

Qubit 1 is the most significant bit of a basis index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .barrington import (
    IDENTITY,
    Perm5,
    PermBP,
    _lookup,
    compile_formula,
    eval_bp,
    parse_formula,
    Not,
)

MAX_DIAGONAL_QUBITS = 30
MAX_DENSE_QUBITS = 10
INPUT_TOL = 1e-12
OUTPUT_TOL = 1e-10


class ModeError(ValueError):
    pass


@dataclass(frozen=True)
class BasisPermutation:
    """A bijection of {0,1}^n stored as its moved points only."""

    n: int
    mapping: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        moved = {int(x): int(y) for x, y in self.mapping.items() if x != y}
        size = 1 << self.n
        if any(not (0 <= v < size) for kv in moved.items() for v in kv):
            raise ValueError(f"basis index outside the {self.n}-qubit space")
        if set(moved) != set(moved.values()):
            raise ValueError("mapping is not a bijection on its support")
        object.__setattr__(self, "mapping", moved)

    def __call__(self, x: int) -> int:
        return self.mapping.get(x, x)

    @property
    def support(self) -> set[int]:
        return set(self.mapping)

    def inverse(self) -> "BasisPermutation":
        return BasisPermutation(self.n, {y: x for x, y in self.mapping.items()})

    def then(self, other: "BasisPermutation") -> "BasisPermutation":
        """Apply ``self`` first, then ``other``."""
        if other.n != self.n:
            raise ValueError("qubit counts differ")
        points = self.support | other.support
        return BasisPermutation(self.n, {x: other(self(x)) for x in points})

    def is_identity(self) -> bool:
        return not self.mapping

    @classmethod
    def identity(cls, n: int) -> "BasisPermutation":
        return cls(n, {})

    @classmethod
    def from_sequence(cls, images: Sequence[int]) -> "BasisPermutation":
        """Full image list of length 2^n."""
        n = len(images).bit_length() - 1
        if 1 << n != len(images):
            raise ValueError("image list length must be a power of two")
        return cls(n, dict(enumerate(images)))

    def matrix(self) -> np.ndarray:
        """Permutation matrix with ``U|x> = |g(x)>``."""
        size = 1 << self.n
        u = np.zeros((size, size))
        for x in range(size):
            u[self(x), x] = 1.0
        return u


def embed_perm5(perm: Perm5, n: int) -> BasisPermutation:
    """Act on qubits 1-3: BP state i <-> 3-bit string binary(i-1); strings
    101, 110, 111 and all other qubits are left alone."""
    if n < 3:
        raise ValueError("need at least 3 qubits to hold 5 states")
    low = n - 3
    mapping = {}
    for i in range(1, 6):
        j = perm(i)
        if i == j:
            continue
        for rest in range(1 << low):
            mapping[((i - 1) << low) | rest] = ((j - 1) << low) | rest
    return BasisPermutation(n, mapping)


def _bit(x: int, qubit: int, n: int) -> int:
    return (x >> (n - qubit)) & 1


@dataclass(frozen=True)
class RegisterState:
    n: int
    k: int
    mode: str = "diagonal"
    perm: BasisPermutation | None = None
    rho: np.ndarray | None = None

    # diagonal mode ----------------------------------------------------

    def initial_probability(self, x: int) -> Fraction:
        if x >> (self.n - self.k):
            return Fraction(0)
        return Fraction(1, 1 << (self.n - self.k))

    def probability(self, x: int) -> Fraction:
        """P(x) = P_initial(g^-1(x))."""
        self._require("diagonal")
        inv = {y: x0 for x0, y in self.perm.mapping.items()}
        return self.initial_probability(inv.get(x, x))

    def probabilities(self) -> dict[int, Fraction]:
        """Support of the distribution.  Materialises 2^(n-k) entries."""
        self._require("diagonal")
        if self.n - self.k > 22:
            raise ValueError("support too large to materialise")
        p = Fraction(1, 1 << (self.n - self.k))
        return {self.perm(x): p for x in range(1 << (self.n - self.k))}

    # dense mode -------------------------------------------------------

    def density_matrix(self) -> np.ndarray:
        if self.mode == "dense":
            return self.rho.copy()
        if self.n > MAX_DENSE_QUBITS:
            raise ValueError(f"dense form limited to {MAX_DENSE_QUBITS} qubits")
        rho = np.zeros((1 << self.n, 1 << self.n), dtype=complex)
        for x, p in self.probabilities().items():
            rho[x, x] = float(p)
        return rho

    def _require(self, mode: str):
        if self.mode != mode:
            raise ModeError(f"operation needs {mode} mode, state is {self.mode}")


def init_register(n: int, k: int, mode: str = "diagonal") -> RegisterState:
    """k clean qubits (first k, all |0>) followed by n-k maximally mixed ones."""
    if mode not in ("diagonal", "dense"):
        raise ValueError(f"unknown mode {mode!r}")
    limit = MAX_DIAGONAL_QUBITS if mode == "diagonal" else MAX_DENSE_QUBITS
    if not 1 <= n <= limit:
        raise ValueError(f"n must lie in [1, {limit}] for {mode} mode")
    if not 0 <= k <= n:
        raise ValueError("k must satisfy 0 <= k <= n")
    if mode == "diagonal":
        return RegisterState(n, k, mode, perm=BasisPermutation.identity(n))
    size = 1 << n
    rho = np.zeros((size, size), dtype=complex)
    mixed = 1 << (n - k)
    idx = np.arange(mixed)
    rho[idx, idx] = 1.0 / mixed
    return RegisterState(n, k, mode, rho=rho)


def apply_permutation(s: RegisterState, g: BasisPermutation) -> RegisterState:
    """Pushforward: P'(y) = P(g^-1(y))."""
    if g.n != s.n:
        raise ValueError(f"permutation acts on {g.n} qubits, register has {s.n}")
    if s.mode == "diagonal":
        return RegisterState(s.n, s.k, s.mode, perm=s.perm.then(g))
    u = g.matrix()
    return RegisterState(s.n, s.k, s.mode, rho=u @ s.rho @ u.T)


def run_bp(bp: PermBP, x, s: RegisterState) -> RegisterState:
    """Apply each instruction's selected permutation to qubits 1-3.

    Consecutive instructions compose inside S5 before being embedded, which
    gives the same state as embedding them one by one.
    """
    if s.n < 3:
        raise ValueError("branching programs need at least 3 qubits")
    return apply_permutation(s, embed_perm5(eval_bp(bp, x), s.n))


def run_bp_stepwise(bp: PermBP, x, s: RegisterState) -> RegisterState:
    """Reference path for :func:`run_bp`: one basis permutation per instruction."""
    for ins in bp.instructions:
        perm = ins.select(_lookup(x, ins.var))
        if perm != IDENTITY:
            s = apply_permutation(s, embed_perm5(perm, s.n))
    return s


def measure(s: RegisterState, qubit: int) -> tuple:
    """Marginal (p0, p1) of ``qubit`` (1-based).  Exact Fractions in diagonal
    mode, floats in dense mode."""
    if not 1 <= qubit <= s.n:
        raise IndexError(f"qubit {qubit} outside 1..{s.n}")
    if s.mode == "dense":
        diag = np.real(np.diag(s.rho))
        ones = (np.arange(1 << s.n) >> (s.n - qubit)) & 1
        p1 = float(diag[ones == 1].sum())
        return 1.0 - p1, p1
    # Initial marginal, then correct for strings moved by the permutation.
    p1 = Fraction(0) if qubit <= s.k else Fraction(1, 2)
    for x, y in s.perm.mapping.items():
        p = s.initial_probability(x)
        if p:
            p1 += p * (_bit(y, qubit, s.n) - _bit(x, qubit, s.n))
    return 1 - p1, p1


def _check_unitary(u: np.ndarray) -> None:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("unitary must be a square matrix")
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=INPUT_TOL, rtol=0):
        raise ValueError("matrix is not unitary within 1e-12")


def apply_unitary(s: RegisterState, u: np.ndarray, targets: Sequence[int]) -> RegisterState:
    """rho -> U rho U^dagger with U acting on ``targets`` (1-based; the first
    target is the most significant bit of U's index)."""
    s._require("dense")
    u = np.asarray(u, dtype=complex)
    targets = list(targets)
    if not 1 <= len(targets) <= 3:
        raise ValueError("between 1 and 3 target qubits")
    if len(set(targets)) != len(targets) or not all(1 <= t <= s.n for t in targets):
        raise ValueError(f"bad targets {targets}")
    if u.shape != (1 << len(targets),) * 2:
        raise ValueError("unitary size does not match the number of targets")
    _check_unitary(u)
    n, t = s.n, len(targets)
    axes = [q - 1 for q in targets]
    ut = u.reshape((2,) * (2 * t))
    rho = s.rho.reshape((2,) * (2 * n))
    # Left multiply on row axes.
    rho = np.tensordot(ut, rho, axes=(list(range(t, 2 * t)), axes))
    rho = np.moveaxis(rho, list(range(t)), axes)
    # Right multiply by U^dagger on column axes.
    col_axes = [n + a for a in axes]
    rho = np.tensordot(rho, ut.conj(), axes=(col_axes, list(range(t, 2 * t))))
    rho = np.moveaxis(rho, list(range(2 * n - t, 2 * n)), col_axes)
    rho = rho.reshape(1 << n, 1 << n)
    if abs(np.trace(rho) - 1) > OUTPUT_TOL:
        raise ArithmeticError("trace drifted beyond 1e-10")
    return RegisterState(s.n, s.k, s.mode, rho=rho)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# -- accept semantics ---------------------------------------------------------


def acceptor_program(formula, num_vars: int | None = None) -> PermBP:
    """Program that effects the identity exactly on accepted inputs.

    The compiler maps true -> SIGMA, so the negated formula is compiled.
    """
    if isinstance(formula, str):
        formula = parse_formula(formula)
    return compile_formula(Not(formula), num_vars)


def acceptance_statistics(formula, x, n: int = 3, k: int = 1) -> tuple[Fraction, Fraction]:
    """(p0, p1) of qubit 1 after running the acceptor program on ``x``.

    Accepted inputs give (1, 0); rejected inputs give (3/4, 1/4) on the
    3-qubit, 1-clean register.
    """
    bp = acceptor_program(formula)
    return measure(run_bp(bp, x, init_register(n, k)), 1)


def accepts(formula, x, n: int = 3, k: int = 1) -> bool:
    return acceptance_statistics(formula, x, n, k)[1] == 0
