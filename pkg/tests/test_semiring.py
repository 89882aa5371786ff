"""Core product/convolution operators and their algebraic laws."""

import math
from itertools import combinations as icombs

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combgen.semiring import (
    BinomialTable,
    CapacityMismatchError,
    DuplicateElementError,
    binomial,
    check_distinct,
    convol,
    convol_new,
    cross_join,
    empty_family,
    falling_factorial,
    interleave,
    merge,
    rev_inits,
    set_empty,
    single_family,
    unit_family,
)


def riffles_oracle(x, y):
    """Independent enumeration of all order-preserving interleavings:
    choose which output slots take x's elements."""
    out = set()
    total = len(x) + len(y)
    for slots in icombs(range(total), len(x)):
        row = [None] * total
        xi = iter(x)
        yi = iter(y)
        for pos in range(total):
            row[pos] = next(xi) if pos in slots else next(yi)
        out.add(tuple(row))
    return out


class TestCrossJoin:
    def test_pairs(self):
        assert cross_join([(1,), (2,)], [(3,), (4,)]) == [
            (1, 3), (1, 4), (2, 3), (2, 4),
        ]

    def test_unit(self):
        ys = [(3,), (4,)]
        assert cross_join([()], ys) == ys

    def test_annihilator(self):
        assert cross_join([], [(3,)]) == []
        assert cross_join([(3,)], []) == []


class TestInterleave:
    def test_two_by_two(self):
        assert interleave((1, 2), (3, 4)) == [
            (1, 2, 3, 4), (1, 3, 2, 4), (1, 3, 4, 2),
            (3, 1, 2, 4), (3, 1, 4, 2), (3, 4, 1, 2),
        ]

    def test_empty_side(self):
        assert interleave((1, 2), ()) == [(1, 2)]
        assert interleave((), (5,)) == [(5,)]
        assert interleave((), ()) == [()]

    def test_singletons(self):
        assert interleave((1,), (2,)) == [(1, 2), (2, 1)]
        assert set(interleave((1,), (2,))) == riffles_oracle((1,), (2,))

    @pytest.mark.parametrize("a,b", [(1, 2), (2, 2), (3, 2), (2, 3), (0, 3)])
    def test_against_oracle(self, a, b):
        x = tuple(range(a))
        y = tuple(range(10, 10 + b))
        result = interleave(x, y)
        assert len(result) == math.comb(a + b, a)
        assert set(result) == riffles_oracle(x, y)


class TestMerge:
    def test_single_pair(self):
        assert merge([(1, 2)], [(3, 4)]) == interleave((1, 2), (3, 4))

    def test_unit(self):
        ys = [(3, 4), (5, 6)]
        assert merge([()], ys) == ys

    def test_pair_order(self):
        # x-outer, y-inner loop order with brute riffles per pair
        assert merge([(1,)], [(2,), (3,)]) == [(1, 2), (2, 1), (1, 3), (3, 1)]
        got = merge([(1,)], [(2,), (3,)])
        assert set(got[:2]) == riffles_oracle((1,), (2,))
        assert set(got[2:]) == riffles_oracle((1,), (3,))


class TestConvol:
    def test_unit_family_is_identity(self):
        yss = [[()], [(2,), (3,)], [(2, 3)]]
        assert convol(cross_join, unit_family(2), yss) == yss
        assert convol(cross_join, yss, unit_family(2)) == yss

    def test_hand_expanded_combs(self):
        # one-element side against a two-element side, capacity 2
        xss = [[()], [(1,)], []]
        yss = [[()], [(2,), (3,)], [(2, 3)]]
        assert convol(cross_join, xss, yss) == [
            [()],
            [(1,), (2,), (3,)],
            [(1, 2), (1, 3), (2, 3)],
        ]

    def test_hand_expanded_perms(self):
        xss = [[()], [(1,)], []]
        yss = [[()], [(2,)], []]
        assert convol(merge, xss, yss) == [[()], [(1,), (2,)], [(1, 2), (2, 1)]]

    def test_capacity_mismatch(self):
        with pytest.raises(CapacityMismatchError):
            convol(cross_join, unit_family(2), unit_family(3))

    def test_bucket_pair_order(self):
        # bucket k concatenates (k-j, j) products for j ascending
        xss = [[("x0",)] , [("x1",)], [("x2",)]]
        yss = [[("y0",)], [("y1",)], [("y2",)]]
        out = convol(cross_join, xss, yss)
        assert out[2] == [("x2", "y0"), ("x1", "y1"), ("x0", "y2")]


class TestConvolNew:
    def test_unit_yields_nothing(self):
        yss = [[()], [(2,), (3,)], [(2, 3)]]
        result = convol_new(cross_join, unit_family(2), yss)
        assert result == [[], [], []]

    def test_mixed_pairs_only(self):
        xss = [[()], [(1,)], []]
        yss = [[()], [(2,), (3,)], [(2, 3)]]
        result = convol_new(cross_join, xss, yss)
        assert result[2] == [(1, 2), (1, 3)]
        assert result[0] == [] and result[1] == []

    def test_mixed_two_subsets(self):
        xss = [[()], [(1,), (2,)], [(1, 2)]]
        yss = [[()], [(3,), (4,)], [(3, 4)]]
        result = convol_new(cross_join, xss, yss)
        mixed = {frozenset((a, b)) for a in (1, 2) for b in (3, 4)}
        assert {frozenset(c) for c in result[2]} == mixed
        assert result[2] == [(1, 3), (1, 4), (2, 3), (2, 4)]

    def test_union_with_pure_sides_recovers_convol(self):
        xss = [[()], [(1,), (2,)], [(1, 2)]]
        yss = [[()], [(3,), (4,)], [(3, 4)]]
        full = convol(cross_join, xss, yss)
        fresh = convol_new(cross_join, xss, yss)
        for k in range(3):
            pure_left = cross_join(xss[k], yss[0])
            pure_right = cross_join(xss[0], yss[k]) if k else []
            assert sorted(fresh[k] + pure_left + pure_right) == sorted(full[k])


class TestRevInits:
    def test_three(self):
        assert rev_inits([1, 2, 3]) == [[], [1], [2, 1], [3, 2, 1]]

    def test_empty(self):
        assert rev_inits([]) == [[]]

    def test_singleton(self):
        assert rev_inits([7]) == [[], [7]]

    @given(st.lists(st.integers(), max_size=12))
    def test_shape(self, xs):
        out = rev_inits(xs)
        assert len(out) == len(xs) + 1
        for i, seg in enumerate(out):
            assert seg == list(reversed(xs[:i]))


class TestSetEmpty:
    def test_blank_middle(self):
        assert set_empty(2, [[1], [2], [3], [4]]) == [[1], [2], [], [4]]

    def test_blank_unit(self):
        assert set_empty(0, unit_family(2)) == [[], [], []]

    def test_blank_generated(self):
        fam = [[()], [(1,), (2,)], [(1, 2)]]
        assert set_empty(1, fam) == [[()], [], [(1, 2)]]

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            set_empty(4, [[1], [2], [3], [4]])


class TestBinomial:
    def test_trivial(self):
        assert binomial(3, 2) == 3
        assert binomial(0, 0) == 1
        assert binomial(2, 5) == 0

    def test_large_against_math(self):
        assert binomial(30, 15) == 155117520
        assert binomial(30, 15) == math.comb(30, 15)

    @given(st.integers(0, 40), st.integers(0, 40))
    def test_matches_math_comb(self, n, k):
        assert binomial(n, k) == math.comb(n, k)

    @given(st.integers(0, 30), st.integers(0, 8))
    def test_falling_factorial(self, n, k):
        expected = math.perm(n, k) if k <= n else 0
        assert falling_factorial(n, k) == expected


class TestBinomialTable:
    def test_pascal_rule(self):
        table = BinomialTable(20, 8)
        for n in range(1, 21):
            for k in range(1, 9):
                assert table.get(n, k) == table.get(n - 1, k) + (
                    table.get(n - 1, k - 1) if k - 1 <= 8 else 0
                )

    def test_edges(self):
        table = BinomialTable(10, 10)
        for n in range(11):
            assert table.get(n, 0) == 1
            assert table.get(n, n) == 1

    def test_vandermonde(self):
        table = BinomialTable(24, 6)
        for n in range(13):
            for m in range(13):
                for K in range(7):
                    lhs = table.get(n + m, K)
                    rhs = sum(
                        table.get(n, K - k) * table.get(m, k) for k in range(K + 1)
                    )
                    assert lhs == rhs

    def test_out_of_table(self):
        table = BinomialTable(5, 3)
        with pytest.raises(IndexError):
            table.get(6, 2)


def config_sets(pool_start, max_len=2, max_count=3):
    """Sets of same-length configs over a private element pool."""

    def build(draw_len, rows):
        return rows

    return st.integers(0, max_len).flatmap(
        lambda ln: st.lists(
            st.lists(
                st.integers(pool_start, pool_start + 30),
                min_size=ln,
                max_size=ln,
                unique=True,
            ).map(tuple),
            max_size=max_count,
            unique=True,
        )
    )


class TestSemiringLaws:
    @given(config_sets(0), config_sets(100), config_sets(200))
    @settings(max_examples=60)
    def test_cross_join_associative(self, xs, ys, zs):
        assert cross_join(cross_join(xs, ys), zs) == cross_join(xs, cross_join(ys, zs))

    @given(config_sets(0), config_sets(100), config_sets(200))
    @settings(max_examples=40)
    def test_merge_associative_multiset(self, xs, ys, zs):
        lhs = merge(merge(xs, ys), zs)
        rhs = merge(xs, merge(ys, zs))
        assert sorted(lhs) == sorted(rhs)

    @given(config_sets(0))
    def test_units(self, xs):
        assert cross_join([()], xs) == xs
        assert cross_join(xs, [()]) == xs
        assert merge([()], xs) == xs
        assert merge(xs, [()]) == xs

    @given(config_sets(0))
    def test_annihilators(self, xs):
        assert cross_join([], xs) == []
        assert cross_join(xs, []) == []
        assert merge([], xs) == []
        assert merge(xs, []) == []

    @given(config_sets(0), config_sets(100), config_sets(100, max_len=2))
    @settings(max_examples=40)
    def test_merge_distributes_over_union(self, xs, ys, zs):
        lhs = merge(xs, ys + zs)
        rhs = merge(xs, ys) + merge(xs, zs)
        assert sorted(lhs) == sorted(rhs)

    @given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 4))
    def test_convol_count_law(self, n, m, k_max):
        left = [
            [tuple(c) for c in icombs(range(n), k)] for k in range(k_max + 1)
        ]
        right = [
            [tuple(c) for c in icombs(range(10, 10 + m), k)] for k in range(k_max + 1)
        ]
        out = convol(cross_join, left, right)
        for k in range(k_max + 1):
            expected = sum(
                len(left[k - j]) * len(right[j]) for j in range(k + 1)
            )
            assert len(out[k]) == expected
            assert expected == math.comb(n + m, k)


class TestConstructors:
    def test_families(self):
        assert unit_family(2) == [[()], [], []]
        assert empty_family(2) == [[], [], []]
        assert single_family(5, 2) == [[()], [(5,)], []]
        assert single_family(5, 0) == [[()]]

    def test_check_distinct(self):
        check_distinct((1, 2, 3))
        with pytest.raises(DuplicateElementError):
            check_distinct((1, 2, 1))
