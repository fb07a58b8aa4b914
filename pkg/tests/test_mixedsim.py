import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cleanqubit.barrington import SIGMA, IDENTITY, Perm5, all_assignments, compile_formula, eval_bp, random_formula
from cleanqubit.mixedsim import (
    BasisPermutation,
    ModeError,
    accepts,
    acceptance_statistics,
    apply_permutation,
    apply_unitary,
    embed_perm5,
    init_register,
    measure,
    random_unitary,
    run_bp,
    run_bp_stepwise,
)


def random_basis_perm(n, rng, points=None):
    size = 1 << n
    pts = rng.sample(range(size), points or size)
    imgs = pts[:]
    rng.shuffle(imgs)
    return BasisPermutation(n, dict(zip(pts, imgs)))


def test_init_three_one():
    s = init_register(3, 1)
    assert s.probabilities() == {0: Fraction(1, 4), 1: Fraction(1, 4), 2: Fraction(1, 4), 3: Fraction(1, 4)}


def test_init_all_clean_and_five_two():
    assert init_register(4, 4).probabilities() == {0: Fraction(1)}
    probs = init_register(5, 2).probabilities()
    assert len(probs) == 8 and set(probs.values()) == {Fraction(1, 8)}
    assert all(x < 8 for x in probs)


@pytest.mark.parametrize("n, k", [(0, 0), (31, 1), (3, 4), (11, 1)])
def test_init_rejects(n, k):
    mode = "dense" if n == 11 else "diagonal"
    with pytest.raises(ValueError):
        init_register(n, k, mode)


def test_basis_permutation_validation():
    with pytest.raises(ValueError):
        BasisPermutation(2, {0: 1})
    with pytest.raises(ValueError):
        BasisPermutation(2, {0: 4, 4: 0})
    g = BasisPermutation(3, {0: 1, 1: 2, 2: 0})
    assert g.then(g.inverse()).is_identity()


def test_identity_permutation_leaves_state():
    s = init_register(4, 2)
    assert apply_permutation(s, BasisPermutation.identity(4)).probabilities() == s.probabilities()


def test_full_mixture_invariant_exact():
    rng = random.Random(5)
    s = init_register(4, 0)
    for _ in range(20):
        t = apply_permutation(s, random_basis_perm(4, rng))
        assert t.probabilities() == s.probabilities()


def test_five_cycle_on_first_five_strings():
    s = init_register(3, 1)
    g = embed_perm5(SIGMA, 3)
    t = apply_permutation(s, g)
    # 100 has its preimage 011 in the support: exactly one support string lands there.
    assert sum(1 for x in s.probabilities() if g(x) == 0b100) == 1
    assert t.probability(0b100) == Fraction(1, 4)


def test_pushforward_matches_definition():
    rng = random.Random(9)
    for _ in range(20):
        s = init_register(5, 2)
        g = random_basis_perm(5, rng, points=12)
        t = apply_permutation(s, g)
        inv = g.inverse()
        for y in range(32):
            assert t.probability(y) == s.probability(inv(y))
        assert sum(t.probabilities().values()) == 1


def test_embedding_leaves_high_strings_fixed():
    g = embed_perm5(SIGMA, 3)
    assert [g(x) for x in range(8)] == [1, 2, 3, 4, 0, 5, 6, 7]
    g4 = embed_perm5(SIGMA, 4)
    assert g4(0b1001) == 0b0001 and g4(0b1011) == 0b1011


def test_run_bp_identity_and_sigma():
    s = init_register(3, 1)
    bp = compile_formula("(x1&x2)")
    same = run_bp(bp, {1: 1, 2: 0}, s)
    assert same.probabilities() == s.probabilities()
    hit = run_bp(bp, {1: 1, 2: 1}, s)
    assert measure(hit, 1) == (Fraction(3, 4), Fraction(1, 4))


def test_measure_fresh_register():
    s = init_register(3, 1)
    assert measure(s, 1) == (1, 0)
    assert measure(s, 2) == (Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(IndexError):
        measure(s, 4)


def test_measure_matches_enumeration():
    rng = random.Random(1)
    for _ in range(20):
        s = apply_permutation(init_register(5, 2), random_basis_perm(5, rng, points=10))
        for q in range(1, 6):
            p1 = sum(p for x, p in s.probabilities().items() if (x >> (5 - q)) & 1)
            assert measure(s, q) == (1 - p1, p1)


def test_large_register_sparse_permutation():
    s = init_register(30, 1)
    top = 1 << 29
    g = BasisPermutation(30, {0: top, top: 0})
    p0, p1 = measure(apply_permutation(s, g), 1)
    assert p1 == Fraction(1, 2**29) and p0 + p1 == 1


def test_run_bp_composition_law_depth_4():
    rng = random.Random(4)
    for depth in range(5):
        f = random_formula(rng, depth, 3)
        bp = compile_formula(f)
        for row in all_assignments(bp.num_vars):
            s = init_register(3, 1)
            fast = run_bp(bp, row, s)
            slow = run_bp_stepwise(bp, row, s)
            direct = apply_permutation(s, embed_perm5(eval_bp(bp, row), 3))
            assert fast.probabilities() == slow.probabilities() == direct.probabilities()


def test_acceptance_statistics_depth_4():
    rng = random.Random(44)
    for _ in range(25):
        f = random_formula(rng, rng.randint(0, 4), 4)
        for row in all_assignments(4):
            p0, p1 = acceptance_statistics(f, row)
            if f.evaluate(row):
                assert (p0, p1) == (1, 0)
                assert accepts(f, row)
            else:
                assert (p0, p1) == (Fraction(3, 4), Fraction(1, 4))
                assert p0 - p1 == Fraction(1, 2)


def test_acceptance_larger_register():
    p0, p1 = acceptance_statistics("(x1&x2)", {1: 1, 2: 0}, n=6, k=1)
    assert p1 == Fraction(1, 4)


# -- dense mode ----------------------------------------------------------------


def test_dense_init():
    s = init_register(3, 1, "dense")
    assert np.allclose(np.diag(s.rho).real, [0.25] * 4 + [0] * 4)
    assert abs(np.trace(s.rho) - 1) < 1e-12


def test_apply_unitary_identity():
    s = init_register(3, 1, "dense")
    t = apply_unitary(s, np.eye(4), [1, 3])
    assert np.allclose(t.rho, s.rho, atol=1e-12)


def test_apply_unitary_matches_full_kron():
    rng = np.random.default_rng(0)
    s = init_register(3, 1, "dense")
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    t = apply_unitary(s, h, [1])
    full = np.kron(h, np.eye(4))
    assert np.allclose(t.rho, full @ s.rho @ full.conj().T, atol=1e-12)
    u = random_unitary(4, rng)
    t = apply_unitary(s, u, [3, 1])
    # Reorder to (q3, q1, q2) ordering, apply kron, reorder back.
    perm = np.array([[int(f"{(x >> 0) & 1}{(x >> 2) & 1}{(x >> 1) & 1}", 2) for x in range(8)]])[0]
    P = np.zeros((8, 8))
    P[perm, np.arange(8)] = 1
    full = P.T @ np.kron(u, np.eye(2)) @ P
    assert np.allclose(t.rho, full @ s.rho @ full.conj().T, atol=1e-10)


def test_apply_unitary_errors():
    s = init_register(3, 1, "dense")
    with pytest.raises(ValueError):
        apply_unitary(s, np.array([[1, 1], [0, 1]]), [1])
    with pytest.raises(ModeError):
        apply_unitary(init_register(3, 1), np.eye(2), [1])
    with pytest.raises(ValueError):
        apply_unitary(s, np.eye(16), [1, 2, 3, 3])


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_full_mixture_invariant_dense(n, seed):
    rng = np.random.default_rng(seed)
    s = init_register(n, 0, "dense")
    t = min(n, 3)
    targets = list(rng.permutation(np.arange(1, n + 1))[:t])
    out = apply_unitary(s, random_unitary(1 << t, rng), targets)
    assert np.allclose(out.rho, s.rho, atol=1e-10, rtol=0)


def test_dense_trace_and_hermitian_after_unitaries():
    rng = np.random.default_rng(3)
    s = init_register(4, 2, "dense")
    for _ in range(10):
        s = apply_unitary(s, random_unitary(4, rng), list(rng.permutation([1, 2, 3, 4])[:2]))
    assert abs(np.trace(s.rho) - 1) < 1e-10
    assert np.allclose(s.rho, s.rho.conj().T, atol=1e-12)


def test_permutation_matrix_matches_diagonal_mode():
    rng = random.Random(12)
    for _ in range(10):
        g = random_basis_perm(3, rng)
        diag = apply_permutation(init_register(3, 1), g)
        dense = apply_unitary(init_register(3, 1, "dense"), g.matrix(), [1, 2, 3])
        assert np.allclose(dense.rho, diag.density_matrix(), atol=1e-12)
        also = apply_permutation(init_register(3, 1, "dense"), g)
        assert np.allclose(also.rho, dense.rho, atol=1e-12)
        for q in (1, 2, 3):
            assert np.isclose(measure(dense, q)[1], float(measure(diag, q)[1]))
