"""Fast invariant checks behind ``cleanqubit selftest``."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from . import barrington, bounds, encodings, mixedsim
from .partitions import conjugate, dimension, enumerate_partitions, partition_count, restrict
from math import factorial


def _branching(max_M=14):
    return all(
        dimension(lam) == sum(dimension(mu) for mu in restrict(lam))
        for M in range(1, max_M + 1)
        for lam in enumerate_partitions(M)
    )


def _plancherel(max_M=12):
    return all(sum(dimension(l) ** 2 for l in enumerate_partitions(M)) == factorial(M) for M in range(max_M + 1))


def _conjugation(max_M=14):
    return all(dimension(l) == dimension(conjugate(l)) for M in range(max_M + 1) for l in enumerate_partitions(M))


def _counts():
    return all(sum(1 for _ in enumerate_partitions(M)) == partition_count(M) for M in range(21))


def _phi(max_M=16):
    return all(bounds.phi(A, M) == dimension(bounds.two_row(M, A)) for M in range(max_M + 1) for A in range(M // 2 + 1))


def _barrington(rng, trials=30):
    for _ in range(trials):
        f = barrington.random_formula(rng, rng.randint(0, 3), rng.randint(1, 5))
        bp = barrington.compile_formula(f)
        if len(bp) != 4 ** f.depth:
            return False
        rows = barrington.all_assignments(bp.num_vars)
        out = barrington.eval_bp_many(bp, rows)
        for row, perm in zip(rows, out):
            want = barrington.SIGMA if f.evaluate(row) else barrington.IDENTITY
            if tuple(perm) != want:
                return False
    return True


def _acceptance(rng, trials=20):
    for _ in range(trials):
        f = barrington.random_formula(rng, rng.randint(0, 3), 4)
        for row in barrington.all_assignments(4):
            p0, p1 = mixedsim.acceptance_statistics(f, row)
            if p1 != (0 if f.evaluate(row) else Fraction(1, 4)):
                return False
    return True


def _mixture(rng):
    s = mixedsim.init_register(4, 0, "dense")
    u = mixedsim.random_unitary(8, np.random.default_rng(rng.randrange(2**32)))
    t = mixedsim.apply_unitary(s, u, [1, 2, 3])
    return np.allclose(t.rho, s.rho, atol=1e-10, rtol=0)


def _encodings():
    for n in range(2, 9):
        for kind, want in (("parity", Fraction(1, 2)), ("pointed", Fraction(2 ** (n - 1), 2 ** (n - 1) + 1))):
            if encodings.overlap_stats(encodings.build_family(n, kind), "enumerate").max_ratio != want:
                return False
    return True


def _bound_difference():
    return all(
        encodings.check_bound_difference(encodings.build_perm_rep_instance(M, v), 1).ok
        for M in range(2, 13)
        for v in ("coordinate", "complement")
    )


def run_selftest(seed: int = 0) -> list[tuple[str, bool]]:
    rng = random.Random(seed)
    checks = [
        ("partition counts", _counts),
        ("branching sum rule", _branching),
        ("plancherel identity", _plancherel),
        ("conjugation symmetry", _conjugation),
        ("phi equals two-row dimension", _phi),
        ("rasala scan", lambda: all(bounds.check_rasala(M).ok for M in range(4, 13))),
        ("shape lemma scan", lambda: all(bounds.check_shape_lemma(M).ok for M in range(3, 13))),
        ("barrington soundness", lambda: _barrington(rng)),
        ("acceptance statistics", lambda: _acceptance(rng)),
        ("mixed state invariance", lambda: _mixture(rng)),
        ("encoding overlaps", _encodings),
        ("bound difference", _bound_difference),
    ]
    return [(name, bool(fn())) for name, fn in checks]
