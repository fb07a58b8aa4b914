import itertools
import random
from fractions import Fraction

import pytest

from cleanqubit.encodings import (
    UndecidedError,
    build_family,
    build_perm_rep_instance,
    check_bound_difference,
    explicit_family,
    general_linear_group,
    intersection_size,
    intersection_size_bruteforce,
    linear_witness,
    linear_witness_search,
    maps_family,
    overlap_stats,
    parse_index_perm,
    permutability_witness,
)


def strings(*bits):
    return {int(b, 2) for b in bits}


def image_of(F, g, b):
    return frozenset(g(x) for x in F.member(b))


def test_parity_member_example():
    F = build_family(3, "parity")
    assert F.member("100") == strings("000", "001", "010", "011")
    assert 0 not in F.indices() and len(F.indices()) == 7


def test_pointed_member_example():
    F = build_family(3, "pointed")
    assert F.member("01") == strings("000", "001", "010", "011", "101")


def test_member_sizes_match_enumeration():
    for n in range(2, 9):
        for kind in ("parity", "pointed"):
            F = build_family(n, kind)
            for b in F.indices():
                assert F.member_size(b) == len(F.member(b))
    assert all(build_family(2, "parity").member_size(b) == 2 for b in (1, 2, 3))


def test_build_family_rejects():
    with pytest.raises(ValueError):
        build_family(1, "parity")
    with pytest.raises(ValueError):
        build_family(4, "other")
    with pytest.raises(ValueError):
        build_family(3, "parity").index(0)


@pytest.mark.parametrize(
    "kind, n, b, b2, expected",
    [("parity", 3, "100", "010", 2), ("pointed", 3, "00", "11", 4), ("parity", 2, "10", "01", 1)],
)
def test_intersection_examples(kind, n, b, b2, expected):
    F = build_family(n, kind)
    assert intersection_size(F, b, b2) == expected == intersection_size_bruteforce(F, b, b2)


def test_closed_form_matches_enumeration_all_pairs():
    for n in range(2, 8):
        for kind in ("parity", "pointed"):
            F = build_family(n, kind)
            for b, b2 in itertools.combinations(F.indices(), 2):
                assert intersection_size(F, b, b2) == intersection_size_bruteforce(F, b, b2)


def test_closed_form_matches_enumeration_sampled_up_to_10():
    rng = random.Random(10)
    for n in (8, 9, 10):
        for kind in ("parity", "pointed"):
            F = build_family(n, kind)
            for _ in range(40):
                b, b2 = rng.sample(F.indices(), 2)
                assert intersection_size(F, b, b2) == (F.bitset(b) & F.bitset(b2)).bit_count()


def test_overlap_stats():
    assert overlap_stats(build_family(6, "parity")).max_ratio == Fraction(1, 2)
    assert overlap_stats(build_family(6, "pointed")).max_ratio == Fraction(32, 33)
    for n in range(2, 13):
        assert overlap_stats(build_family(n, "parity")).max_ratio == Fraction(1, 2)
        half = 2 ** (n - 1)
        assert overlap_stats(build_family(n, "pointed")).max_ratio == 1 - Fraction(1, half + 1)


def test_overlap_stats_enumerate_agrees():
    for n in range(2, 7):
        for kind in ("parity", "pointed"):
            F = build_family(n, kind)
            closed, enum = overlap_stats(F), overlap_stats(F, "enumerate")
            assert closed.max_ratio == enum.max_ratio and closed.histogram == enum.histogram


def test_overlap_single_member():
    stats = overlap_stats(explicit_family(2, [{0, 1}]))
    assert stats.pair_count == 0 and stats.max_ratio is None
    assert stats.to_dict()["histogram"] == {}


def test_pointed_transposition_witness():
    F = build_family(6, "pointed")
    pi = parse_index_perm(F, "swap:00001,10000")
    g = permutability_witness(F, pi)
    for b in F.indices():
        assert image_of(F, g, b) == F.member(pi.get(b, b))


def test_pointed_random_witnesses():
    rng = random.Random(8)
    for n in range(2, 9):
        F = build_family(n, "pointed")
        for _ in range(100 if n == 8 else 15):
            idx = F.indices()
            shuffled = idx[:]
            rng.shuffle(shuffled)
            pi = dict(zip(idx, shuffled))
            g = permutability_witness(F, pi)
            for b in idx:
                assert image_of(F, g, b) == F.member(pi[b])


def test_identity_witness():
    for kind in ("parity", "pointed"):
        F = build_family(4, kind)
        assert permutability_witness(F, {}).is_identity()


def test_gl_sizes():
    assert sum(1 for _ in general_linear_group(2)) == 6
    assert sum(1 for _ in general_linear_group(3)) == 168


def test_parity_three_cycle_has_no_witness():
    F = build_family(3, "parity")
    pi = parse_index_perm(F, "cycle:001,010,011")
    assert linear_witness_search(F, pi) is None
    assert permutability_witness(F, pi) is None


def test_parity_linear_permutations_have_witnesses():
    # pi induced by a GL matrix acting on the index vectors.
    rng = random.Random(3)
    for n in (2, 3, 4):
        F = build_family(n, "parity")
        mats = list(general_linear_group(n))
        for cols in rng.sample(mats, min(20, len(mats))):
            def apply(v):
                out = 0
                for j in range(n):
                    if (v >> (n - 1 - j)) & 1:
                        out ^= cols[j]
                return out
            pi = {b: apply(b) for b in F.indices()}
            g = linear_witness(F, pi)
            assert g is not None and maps_family(F, g, pi)
            assert linear_witness_search(F, pi) is not None


def test_linear_witness_agrees_with_search_on_random_perms():
    rng = random.Random(5)
    for n in (2, 3, 4):
        F = build_family(n, "parity")
        idx = F.indices()
        for _ in range(30):
            shuffled = idx[:]
            rng.shuffle(shuffled)
            pi = dict(zip(idx, shuffled))
            assert (linear_witness(F, pi) is None) == (linear_witness_search(F, pi) is None)


def test_search_undecided_beyond_limit():
    with pytest.raises(UndecidedError):
        linear_witness_search(build_family(5, "parity"), {})


def test_parse_index_perm_forms():
    F = build_family(3, "pointed")
    assert parse_index_perm(F, "map:01>10,10>01") == {1: 2, 2: 1}
    assert parse_index_perm(F, "identity:") == {}
    with pytest.raises(ValueError):
        parse_index_perm(F, "rotate:01")


def test_perm_rep_instances():
    coord = build_perm_rep_instance(5, "coordinate")
    assert coord.N == 5 and all(coord.dim(i) == 1 for i in range(5))
    assert coord.verify()
    comp = build_perm_rep_instance(5, "complement")
    assert all(comp.dim(i) == 4 for i in range(5))
    assert all(comp.dim_intersection(i, j) == 3 for i in range(5) for j in range(5) if i != j)
    assert comp.verify()
    with pytest.raises(ValueError):
        build_perm_rep_instance(13)
    with pytest.raises(ValueError):
        build_perm_rep_instance(1)


def test_bound_difference_examples():
    rep = check_bound_difference(build_perm_rep_instance(8, "complement"), 1)
    assert rep.ok and rep.extra["rhs"] == pytest.approx(6)
    assert set(rep.extra["slack"].values()) == {5.0}
    rep = check_bound_difference(build_perm_rep_instance(2, "coordinate"), 1)
    assert rep.ok and rep.extra["rhs"] == pytest.approx(2)
    assert rep.extra["min_slack"] == pytest.approx(1)


def test_bound_difference_all_small_instances():
    for M in range(2, 13):
        for variant in ("coordinate", "complement"):
            for c in (1, 2, Fraction(3, 2)):
                assert check_bound_difference(build_perm_rep_instance(M, variant), c).ok


def test_bound_difference_tight_c_flags_violation():
    # With c small enough the right-hand side drops below 1.
    rep = check_bound_difference(build_perm_rep_instance(4, "coordinate"), Fraction(1, 10))
    assert not rep.ok
