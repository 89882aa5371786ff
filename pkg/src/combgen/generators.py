"""Flat generators: K-combinations, K-permutations, revolving-door order.

All generators build a sized family (buckets 0..K).  Element processing
follows a right fold: the last ground-set element is absorbed first and
the first element last, which makes the combination buckets come out in
lexicographic order with respect to ground-set positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import NamedTuple, Sequence

from .semiring import (
    RANK_LIMIT,
    Bucket,
    RankOverflowError,
    SizedFamily,
    check_distinct,
    convol,
    cross_join,
    empty_family,
    merge,
    single_family,
    unit_family,
)
from .splitplan import PlanNode, SplitPlan


@dataclass(frozen=True)
class GroundSet:
    """User-facing element values; generators treat them as opaque labels."""

    labels: tuple

    def __post_init__(self):
        check_distinct(self.labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def from_values(cls, values: Sequence) -> "GroundSet":
        return cls(tuple(values))

    @classmethod
    def range(cls, n: int) -> "GroundSet":
        """Labels 1..n."""
        return cls(tuple(range(1, n + 1)))


class RankFamily(NamedTuple):
    """Rank buckets: bucket k is a permutation of 0..C(n,k)-1."""

    capacity: int
    n: int
    buckets: list


def _as_labels(xs) -> tuple:
    if isinstance(xs, GroundSet):
        return xs.labels
    return tuple(xs)


def for_step(x, family: SizedFamily) -> SizedFamily:
    """Absorb one new element: bucket k gains x prepended to every
    (k-1)-config, the new block placed before the existing bucket."""
    out = [list(family[0])]
    for k in range(1, len(family)):
        out.append([(x,) + c for c in family[k - 1]] + family[k])
    return out


def kcombs_seq(k_max: int, xs) -> SizedFamily:
    """All combinations of size 0..k_max by sequential element absorption."""
    labels = _as_labels(xs)
    check_distinct(labels)
    fam = unit_family(k_max)
    for x in reversed(labels):
        fam = for_step(x, fam)
    return fam


def kcombs_seq_inplace(k_max: int, xs) -> SizedFamily:
    """Same output as kcombs_seq, updating buckets in place.

    Bucket indices are traversed in decreasing order so bucket k-1 is
    still the previous round's content when bucket k absorbs it; no
    bucket list is ever replaced.
    """
    labels = _as_labels(xs)
    check_distinct(labels)
    fam = unit_family(k_max)
    for x in reversed(labels):
        for k in range(k_max, 0, -1):
            fam[k][:0] = [(x,) + c for c in fam[k - 1]]
    return fam


def _dc_walk(k_max: int, labels: tuple, node: PlanNode, combine, seq_leaf) -> SizedFamily:
    size = node.hi - node.lo
    if size == 0:
        return unit_family(k_max)
    if size == 1:
        return single_family(labels[node.lo], k_max)
    if node.left is None:
        if seq_leaf is not None:
            return seq_leaf(k_max, labels[node.lo : node.hi])
        mid = (node.lo + node.hi) // 2
        left: PlanNode = PlanNode(node.lo, mid)
        right: PlanNode = PlanNode(mid, node.hi)
    else:
        left, right = node.left, node.right
    return convol(
        combine,
        _dc_walk(k_max, labels, left, combine, seq_leaf),
        _dc_walk(k_max, labels, right, combine, seq_leaf),
    )


def kcombs_dc(k_max: int, xs, split: SplitPlan | None = None) -> SizedFamily:
    """All combinations of size 0..k_max by divide and conquer.

    The split plan fixes the recursion tree (canonical: midpoint all the
    way down).  Plan leaves wider than one element are filled by the
    sequential generator; bucket contents are split-independent as
    multisets, the within-bucket order is not.
    """
    labels = _as_labels(xs)
    check_distinct(labels)
    plan = split if split is not None else SplitPlan.midpoint(len(labels))
    plan.check(len(labels))
    return _dc_walk(k_max, labels, plan.root, cross_join, kcombs_seq)


def kperms_dc(k_max: int, xs, split: SplitPlan | None = None) -> SizedFamily:
    """All permutations of size 0..k_max via the riffle-merge product.

    Plan leaves wider than one element are expanded by midpoint splits
    internally (there is no sequential merge step), so the output for a
    given plan does not depend on its leaf threshold.
    """
    labels = _as_labels(xs)
    check_distinct(labels)
    plan = split if split is not None else SplitPlan.midpoint(len(labels))
    plan.check(len(labels))
    return _dc_walk(k_max, labels, plan.root, merge, None)


def for_revol(x, family: SizedFamily) -> SizedFamily:
    """Revolving-door absorption step: bucket k keeps its configs and
    appends x-extended (k-1)-configs in reversed order."""
    out = [list(family[0])]
    for k in range(1, len(family)):
        grown = [c + (x,) for c in family[k - 1]]
        grown.reverse()
        out.append(family[k] + grown)
    return out


def kcombs_revol(k_max: int, n: int) -> SizedFamily:
    """All combinations of {1..n} with every bucket in revolving-door
    order: cyclically adjacent configs differ by exactly one element
    swapped for another.

    Elements are absorbed from n down to 1, each appended at the end of
    the configs it extends, so configs read as descending element
    sequences, e.g. kcombs_revol(2, 3)[2] == [(3,2), (2,1), (3,1)].
    """
    fam = unit_family(k_max)
    for x in range(n, 0, -1):
        for k in range(k_max, 0, -1):
            grown = [c + (x,) for c in fam[k - 1]]
            grown.reverse()
            fam[k] = fam[k] + grown
    return fam


def _check_rank_width(k_max: int, n: int) -> None:
    top = max((comb(n, k) for k in range(0, min(k_max, n) + 1)), default=1)
    if top >= RANK_LIMIT:
        raise RankOverflowError(
            f"C({n},k) exceeds 64-bit ranks for k <= {k_max}: {top}"
        )


def for_revol_int(stage: int, buckets: list) -> list:
    """Rank-space mirror of for_revol for the growth step n-1 -> n.

    The configs appended by for_revol at stage n are the reversed
    (k-1)-bucket extended by the new element; their ranks are the
    complements (C(n,k) - 1) - r of the reversed previous ranks.  The
    true binomial for the stage is required: callers may have blanked a
    bucket, so bucket lengths cannot stand in for the counts.
    """
    out = [list(buckets[0])]
    for k in range(1, len(buckets)):
        top = comb(stage, k) - 1
        out.append(buckets[k] + [top - r for r in reversed(buckets[k - 1])])
    return out


def kcombs_revol_int(k_max: int, n: int) -> RankFamily:
    """Rank form of kcombs_revol: bucket k lists, position by position,
    the revolving-door rank of the config at that position.

    Ranks are assigned in generation order, so each bucket comes out as
    the identity permutation of 0..C(n,k)-1; the recursion is the one
    the nested generators reuse on blanked tables, where it is not
    trivial.
    """
    _check_rank_width(k_max, n)
    buckets: list = [[0]] + [[] for _ in range(k_max)]
    for stage in range(1, n + 1):
        buckets = for_revol_int(stage, buckets)
    return RankFamily(k_max, n, buckets)


def family_sizes(family: SizedFamily) -> list[int]:
    return [len(b) for b in family]


def comb_bucket_sizes(n: int, k_max: int) -> list[int]:
    return [comb(n, k) for k in range(k_max + 1)]


def perm_bucket_sizes(n: int, k_max: int) -> list[int]:
    sizes = []
    for k in range(k_max + 1):
        if k > n:
            sizes.append(0)
        else:
            p = 1
            for i in range(k):
                p *= n - i
            sizes.append(p)
    return sizes
