"""Boolean formulas and their compilation to width-5 permutation branching
programs (Barrington's construction).

A compiled program evaluates to the identity when the formula is false and to
the fixed 5-cycle ``SIGMA = (1 2 3 4 5)`` when it is true.  Programs are read
left to right: the permutation of instruction 1 is applied first.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np


class Perm5(tuple):
    """A permutation of {1..5} stored as its image tuple ``(p(1), ..., p(5))``."""

    def __new__(cls, images: Iterable[int]):
        images = tuple(int(i) for i in images)
        if sorted(images) != [1, 2, 3, 4, 5]:
            raise ValueError(f"not a permutation of 1..5: {images}")
        return super().__new__(cls, images)

    def __call__(self, i: int) -> int:
        return self[i - 1]

    def then(self, other: "Perm5") -> "Perm5":
        """Apply ``self`` first, then ``other``."""
        return Perm5(other[i - 1] for i in self)

    def inverse(self) -> "Perm5":
        inv = [0] * 5
        for i, v in enumerate(self, start=1):
            inv[v - 1] = i
        return Perm5(inv)

    def conjugate_by(self, theta: "Perm5") -> "Perm5":
        """theta^-1 then self then theta."""
        return theta.inverse().then(self).then(theta)

    def cycle_type(self) -> tuple[int, ...]:
        seen = set()
        lengths = []
        for start in range(1, 6):
            if start in seen:
                continue
            length, i = 0, start
            while i not in seen:
                seen.add(i)
                i = self(i)
                length += 1
            lengths.append(length)
        return tuple(sorted(lengths, reverse=True))

    def is_even(self) -> bool:
        return sum(c - 1 for c in self.cycle_type()) % 2 == 0

    def is_five_cycle(self) -> bool:
        return self.cycle_type() == (5,)

    def __repr__(self) -> str:
        return f"Perm5({list(self)})"


IDENTITY = Perm5((1, 2, 3, 4, 5))
SIGMA = Perm5((2, 3, 4, 5, 1))

# Commutator witnesses: ALPHA then BETA then ALPHA^-1 then BETA^-1 == SIGMA.
# Both are conjugates of SIGMA by the even permutations below, so every
# instruction stays inside A5.
ALPHA = Perm5((3, 1, 5, 2, 4))
BETA = Perm5((2, 5, 4, 1, 3))
THETA_ALPHA = Perm5((1, 3, 5, 4, 2))  # SIGMA.conjugate_by(THETA_ALPHA) == ALPHA
THETA_BETA = Perm5((1, 2, 5, 3, 4))  # SIGMA.conjugate_by(THETA_BETA) == BETA
THETA_INV = Perm5((1, 5, 4, 3, 2))  # SIGMA^-1 .conjugate_by(THETA_INV) == SIGMA


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int

    @property
    def depth(self) -> int:
        return 0

    def evaluate(self, x: Mapping[int, int]) -> int:
        return _lookup(x, self.index)

    def variables(self) -> set[int]:
        return {self.index}

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class Not:
    child: "Formula"

    @property
    def depth(self) -> int:
        return self.child.depth

    def evaluate(self, x: Mapping[int, int]) -> int:
        return 1 - self.child.evaluate(x)

    def variables(self) -> set[int]:
        return self.child.variables()

    def __str__(self) -> str:
        return f"!{self.child}"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    @property
    def depth(self) -> int:
        return 1 + max(self.left.depth, self.right.depth)

    def evaluate(self, x: Mapping[int, int]) -> int:
        return self.left.evaluate(x) & self.right.evaluate(x)

    def variables(self) -> set[int]:
        return self.left.variables() | self.right.variables()

    def __str__(self) -> str:
        return f"({self.left}&{self.right})"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    @property
    def depth(self) -> int:
        return 1 + max(self.left.depth, self.right.depth)

    def evaluate(self, x: Mapping[int, int]) -> int:
        return self.left.evaluate(x) | self.right.evaluate(x)

    def variables(self) -> set[int]:
        return self.left.variables() | self.right.variables()

    def __str__(self) -> str:
        return f"({self.left}|{self.right})"


Formula = Union[Var, Not, And, Or]


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class MissingVariableError(KeyError):
    pass


def _lookup(x, index: int) -> int:
    try:
        if isinstance(x, Mapping):
            value = x[index]
        else:
            if index < 1:
                raise IndexError
            value = x[index - 1]
    except (KeyError, IndexError):
        raise MissingVariableError(f"assignment has no value for x{index}") from None
    return 1 if value else 0


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise FormulaSyntaxError(f"expected {ch!r}, found {found!r}", self.pos)
        self.pos += 1

    def formula(self) -> Formula:
        ch = self.peek()
        if ch == "!":
            self.pos += 1
            return Not(self.formula())
        if ch == "(":
            self.pos += 1
            left = self.formula()
            op = self.peek()
            if op not in ("&", "|"):
                raise FormulaSyntaxError(f"expected '&' or '|', found {op or 'end of input'!r}", self.pos)
            self.pos += 1
            right = self.formula()
            self.expect(")")
            return And(left, right) if op == "&" else Or(left, right)
        if ch == "x":
            start = self.pos
            self.pos += 1
            digits_start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            digits = self.text[digits_start:self.pos]
            if not digits:
                raise FormulaSyntaxError("expected digits after 'x'", self.pos)
            index = int(digits)
            if index == 0:
                raise FormulaSyntaxError("variable indices start at 1", start)
            return Var(index)
        raise FormulaSyntaxError(f"unexpected {ch or 'end of input'!r}", self.pos)


def parse_formula(text: str) -> Formula:
    """Parse ``formula := x<digits> | '!' formula | '(' formula ('&'|'|') formula ')'``.
    Whitespace between tokens is ignored."""
    parser = _Parser(text)
    tree = parser.formula()
    parser.skip()
    if parser.pos != len(text):
        raise FormulaSyntaxError(f"trailing input {text[parser.pos:]!r}", parser.pos)
    return tree


def random_formula(rng: random.Random, depth: int, num_vars: int, exact: bool = False) -> Formula:
    """Random formula of depth <= ``depth`` (== when ``exact``) over x1..x_num_vars."""
    if depth == 0 or (not exact and rng.random() < 0.25):
        node: Formula = Var(rng.randint(1, num_vars))
    else:
        sub = depth - 1
        left = random_formula(rng, sub, num_vars, exact)
        right = random_formula(rng, sub, num_vars, exact and rng.random() < 0.5)
        node = (And if rng.random() < 0.5 else Or)(left, right)
    if rng.random() < 0.3:
        node = Not(node)
    return node


# -- branching programs -----------------------------------------------------


@dataclass(frozen=True)
class Instruction:
    var: int
    p0: Perm5
    p1: Perm5

    def select(self, bit: int) -> Perm5:
        return self.p1 if bit else self.p0


@dataclass(frozen=True)
class PermBP:
    instructions: tuple[Instruction, ...]
    num_vars: int
    sigma: Perm5 = SIGMA

    def __len__(self) -> int:
        return len(self.instructions)

    def to_dict(self) -> dict:
        return {
            "num_vars": self.num_vars,
            "sigma": list(self.sigma),
            "instructions": [
                {"var": ins.var, "p0": list(ins.p0), "p1": list(ins.p1)} for ins in self.instructions
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "PermBP":
        instructions = tuple(
            Instruction(int(d["var"]), Perm5(d["p0"]), Perm5(d["p1"])) for d in data["instructions"]
        )
        bp = cls(instructions, int(data["num_vars"]), Perm5(data["sigma"]))
        if not bp.sigma.is_five_cycle():
            raise ValueError("sigma must be a 5-cycle")
        for ins in instructions:
            if not 1 <= ins.var <= bp.num_vars:
                raise ValueError(f"instruction variable x{ins.var} outside 1..{bp.num_vars}")
        return bp

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PermBP":
        return cls.from_dict(json.loads(text))


# Instruction sequences are manipulated as plain lists during compilation.
_Program = list


def _conjugate(prog: _Program, theta: Perm5) -> _Program:
    """Output alpha becomes theta^-1 alpha theta (absorbed into the ends)."""
    prog = list(prog)
    inv = theta.inverse()
    first = prog[0]
    prog[0] = Instruction(first.var, inv.then(first.p0), inv.then(first.p1))
    last = prog[-1]
    prog[-1] = Instruction(last.var, last.p0.then(theta), last.p1.then(theta))
    return prog


def _append(prog: _Program, perm: Perm5) -> _Program:
    prog = list(prog)
    last = prog[-1]
    prog[-1] = Instruction(last.var, last.p0.then(perm), last.p1.then(perm))
    return prog


def _invert(prog: _Program) -> _Program:
    return [Instruction(i.var, i.p0.inverse(), i.p1.inverse()) for i in reversed(prog)]


def _pad(prog: _Program, length: int) -> _Program:
    filler = Instruction(prog[-1].var, IDENTITY, IDENTITY)
    return list(prog) + [filler] * (length - len(prog))


def _compile(f: Formula) -> _Program:
    if isinstance(f, Var):
        return [Instruction(f.index, IDENTITY, SIGMA)]
    if isinstance(f, Not):
        # {id, sigma} -> {sigma^-1, id}, then conjugate sigma^-1 back to sigma.
        return _conjugate(_append(_compile(f.child), SIGMA.inverse()), THETA_INV)
    if isinstance(f, Or):
        return _compile(Not(And(Not(f.left), Not(f.right))))
    if isinstance(f, And):
        size = 4 ** (f.depth - 1)
        g = _conjugate(_pad(_compile(f.left), size), THETA_ALPHA)
        h = _conjugate(_pad(_compile(f.right), size), THETA_BETA)
        return g + h + _invert(g) + _invert(h)
    raise TypeError(f"not a formula node: {f!r}")


def compile_formula(f: Formula | str, num_vars: int | None = None) -> PermBP:
    """Compile to a program of length exactly 4**depth that yields SIGMA on
    satisfying assignments and the identity otherwise."""
    if isinstance(f, str):
        f = parse_formula(f)
    used = max(f.variables())
    if num_vars is None:
        num_vars = used
    elif num_vars < used:
        raise ValueError(f"formula uses x{used} but num_vars={num_vars}")
    return PermBP(tuple(_compile(f)), num_vars)


def eval_bp(bp: PermBP, x) -> Perm5:
    """Compose the selected permutations left to right."""
    result = IDENTITY
    for ins in bp.instructions:
        result = result.then(ins.select(_lookup(x, ins.var)))
    return result


def prefix_products(bp: PermBP, x) -> list[Perm5]:
    out = []
    result = IDENTITY
    for ins in bp.instructions:
        result = result.then(ins.select(_lookup(x, ins.var)))
        out.append(result)
    return out


def all_assignments(num_vars: int) -> np.ndarray:
    """Rows are assignments (x1..x_v) in binary counting order, x1 most significant."""
    idx = np.arange(2**num_vars)
    shifts = np.arange(num_vars - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).astype(np.int8)


def eval_bp_many(bp: PermBP, assignments: np.ndarray) -> np.ndarray:
    """Vectorised :func:`eval_bp` over the rows of ``assignments``.

    Returns an ``(rows, 5)`` array of 1-based images.
    """
    assignments = np.asarray(assignments)
    if assignments.ndim != 2 or assignments.shape[1] < bp.num_vars:
        raise MissingVariableError(f"assignments must have at least {bp.num_vars} columns")
    state = np.tile(np.arange(5), (assignments.shape[0], 1))
    for ins in bp.instructions:
        table = np.array([ins.p0, ins.p1]) - 1
        bits = assignments[:, ins.var - 1].astype(np.intp)
        state = table[bits[:, None], state]
    return state + 1


def formula_truth_table(f: Formula, num_vars: int) -> np.ndarray:
    rows = all_assignments(num_vars)
    return np.array([f.evaluate(row) for row in rows], dtype=np.int8)


def assignment_from_text(text: str) -> dict[int, int]:
    """Parse ``"x1=1,x2=0"``."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, _, value = item.partition("=")
        name = name.strip()
        if not name.startswith("x") or not name[1:].isdigit() or value.strip() not in ("0", "1"):
            raise ValueError(f"bad assignment item {item!r}")
        out[int(name[1:])] = int(value)
    return out


def as_assignment(x: Sequence[int] | Mapping[int, int]) -> dict[int, int]:
    if isinstance(x, Mapping):
        return {int(k): 1 if v else 0 for k, v in x.items()}
    return {i: 1 if v else 0 for i, v in enumerate(x, start=1)}
