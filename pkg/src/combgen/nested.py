"""Nested generators: outer K-structures whose atoms are inner D-combinations.

Every variant returns a NestedResult pair: the inner family with its
top bucket blanked, and the outer family.  In the value forms the outer
configs hold inner combinations by value; in the rank form they hold
revolving-door ranks, which is the compact path for large runs.

The fused recursions never store the full set of inner combinations:
children return their inner family with bucket D blanked, so the
convolution of two children rebuilds, in bucket D, exactly the
combinations that mix both sides -- the atoms not yet fed to the outer
recursion.
"""

from __future__ import annotations

from math import comb
from typing import NamedTuple, Sequence

from .generators import (
    GroundSet,
    RankFamily,
    _as_labels,
    for_revol,
    for_revol_int,
    for_step,
    kcombs_seq,
    kperms_dc,
)
from .semiring import (
    RANK_LIMIT,
    RankOverflowError,
    SizedFamily,
    check_distinct,
    convol,
    convol_new,
    cross_join,
    falling_factorial,
    merge,
    set_empty,
    single_family,
    unit_family,
)
from .splitplan import PlanNode, SplitPlan


class NestedResult(NamedTuple):
    inner: SizedFamily | RankFamily
    outer: SizedFamily


def _check_inner_size(d: int) -> None:
    if d < 2:
        raise ValueError(f"inner combination size must be at least 2, got {d}")


def _check_inner_sizes(ds: Sequence[int]) -> tuple[int, ...]:
    ds = tuple(ds)
    if not ds:
        raise ValueError("need at least one inner size")
    if any(d < 2 for d in ds):
        raise ValueError(f"inner sizes must be at least 2: {ds}")
    if any(a >= b for a, b in zip(ds, ds[1:])):
        raise ValueError(f"inner sizes must be strictly increasing: {ds}")
    return ds


def nested_combs_spec(k_max: int, d: int, xs) -> NestedResult:
    """Two-phase reference: generate all D-combinations, then generate
    K-combinations over them as atoms.  Oracle for the fused variants."""
    _check_inner_size(d)
    labels = _as_labels(xs)
    inner = kcombs_seq(d, labels)
    outer = kcombs_seq(k_max, inner[d])
    return NestedResult(set_empty(d, inner), outer)


def _nested_dc_walk(k_max, d, labels, node: PlanNode, outer_op, katoms):
    size = node.hi - node.lo
    if size == 0:
        return unit_family(d), unit_family(k_max)
    if size == 1:
        return single_family(labels[node.lo], d), unit_family(k_max)
    if node.left is None:
        mid = (node.lo + node.hi) // 2
        left, right = PlanNode(node.lo, mid), PlanNode(mid, node.hi)
    else:
        left, right = node.left, node.right
    css1, ncss1 = _nested_dc_walk(k_max, d, labels, left, outer_op, katoms)
    css2, ncss2 = _nested_dc_walk(k_max, d, labels, right, outer_op, katoms)
    css = convol(cross_join, css1, css2)
    # bucket d of css holds only combinations mixing both children: the
    # pure one-sided ones were blanked before this convolution ran.
    new_atoms = css[d]
    ncss = convol(outer_op, convol(outer_op, ncss1, ncss2), katoms(k_max, new_atoms))
    return set_empty(d, css), ncss


def nested_combs_dc(k_max: int, d: int, xs, split: SplitPlan | None = None) -> NestedResult:
    """Fused single-pass divide and conquer for K-combinations of
    D-combinations."""
    _check_inner_size(d)
    labels = _as_labels(xs)
    check_distinct(labels)
    plan = split if split is not None else SplitPlan.midpoint(len(labels))
    plan.check(len(labels))
    css, ncss = _nested_dc_walk(k_max, d, labels, plan.root, cross_join, kcombs_seq)
    return NestedResult(css, ncss)


def nested_perms_dc(k_max: int, d: int, xs, split: SplitPlan | None = None) -> NestedResult:
    """K-permutations of D-combinations: the same fused recursion with
    the riffle-merge product on the outer layer.  Atoms stay unordered
    combinations; only their outer arrangement is ordered."""
    _check_inner_size(d)
    labels = _as_labels(xs)
    check_distinct(labels)
    plan = split if split is not None else SplitPlan.midpoint(len(labels))
    plan.check(len(labels))
    css, ncss = _nested_dc_walk(
        k_max, d, labels, plan.root, merge, lambda k, atoms: kperms_dc(k, atoms)
    )
    return NestedResult(css, ncss)


def nested_perms_spec(k_max: int, d: int, xs) -> NestedResult:
    """Two-phase reference for nested_perms_dc."""
    _check_inner_size(d)
    labels = _as_labels(xs)
    inner = kcombs_seq(d, labels)
    outer = kperms_dc(k_max, inner[d])
    return NestedResult(set_empty(d, inner), outer)


def nested_combs_seq(k_max: int, d: int, xs) -> NestedResult:
    """Sequential fusion: one absorption round per element.

    After each round, the freshly completed D-combinations sit alone in
    bucket d (it was blanked last round); they join the outer family
    ahead of the accumulated one.
    """
    _check_inner_size(d)
    labels = _as_labels(xs)
    check_distinct(labels)
    css = unit_family(d)
    ncss = unit_family(k_max)
    for x in reversed(labels):
        css = for_step(x, css)
        ncss = convol(cross_join, kcombs_seq(k_max, css[d]), ncss)
        css = set_empty(d, css)
    return NestedResult(css, ncss)


def nested_combs_revol(k_max: int, d: int, n: int) -> NestedResult:
    """Sequential fusion with the inner combinations produced in
    revolving-door order over the ground set {1..n}."""
    _check_inner_size(d)
    css = unit_family(d)
    ncss = unit_family(k_max)
    for x in range(n, 0, -1):
        css = for_revol(x, css)
        ncss = convol(cross_join, kcombs_seq(k_max, css[d]), ncss)
        css = set_empty(d, css)
    return NestedResult(css, ncss)


def nested_combs_revol_int(k_max: int, d: int, n: int) -> NestedResult:
    """Rank form: inner combinations are encoded as their revolving-door
    ranks.  Rank r stands for position r of kcombs_revol(d, n)'s bucket
    d; an outer config is a tuple of such ranks."""
    _check_inner_size(d)
    top = max((comb(n, k) for k in range(0, min(d, n) + 1)), default=1)
    if top >= RANK_LIMIT:
        raise RankOverflowError(f"C({n},{d}) exceeds 64-bit ranks: {top}")
    buckets: list = [[0]] + [[] for _ in range(d)]
    ncss = unit_family(k_max)
    for stage in range(1, n + 1):
        buckets = for_revol_int(stage, buckets)
        ncss = convol(cross_join, kcombs_seq(k_max, buckets[d]), ncss)
        buckets = set_empty(d, buckets)
    return NestedResult(RankFamily(d, n, buckets), ncss)


def nested_combs_multi(
    k_max: int, ds: Sequence[int], xs, split: SplitPlan | None = None
) -> NestedResult:
    """Outer K-combinations drawn from every d-combination, d in ds.

    The recursion runs at capacity max(ds).  Only the top bucket can be
    blanked between steps (smaller inner combinations are still needed
    to build larger ones), so the freshly created atoms of every size
    are recovered with the mixed-products-only convolution instead.
    """
    ds = _check_inner_sizes(ds)
    d_top = ds[-1]
    labels = _as_labels(xs)
    check_distinct(labels)
    plan = split if split is not None else SplitPlan.midpoint(len(labels))
    plan.check(len(labels))

    def walk(node: PlanNode):
        size = node.hi - node.lo
        if size == 0:
            return unit_family(d_top), unit_family(k_max)
        if size == 1:
            return single_family(labels[node.lo], d_top), unit_family(k_max)
        if node.left is None:
            mid = (node.lo + node.hi) // 2
            left, right = PlanNode(node.lo, mid), PlanNode(mid, node.hi)
        else:
            left, right = node.left, node.right
        css1, ncss1 = walk(left)
        css2, ncss2 = walk(right)
        css = convol(cross_join, css1, css2)
        fresh = convol_new(cross_join, css1, css2)
        new_atoms = [c for d in ds for c in fresh[d]]
        ncss = convol(
            cross_join, convol(cross_join, ncss1, ncss2), kcombs_seq(k_max, new_atoms)
        )
        return set_empty(d_top, css), ncss

    css, ncss = walk(plan.root)
    return NestedResult(css, ncss)


def nested_combs_multi_spec(k_max: int, ds: Sequence[int], xs) -> NestedResult:
    """Two-phase reference for nested_combs_multi: one full run at
    capacity max(ds), atoms concatenated size by size in ds order."""
    ds = _check_inner_sizes(ds)
    d_top = ds[-1]
    labels = _as_labels(xs)
    inner = kcombs_seq(d_top, labels)
    atoms = [c for d in ds for c in inner[d]]
    outer = kcombs_seq(k_max, atoms)
    return NestedResult(set_empty(d_top, inner), outer)


def substitute_ranks(outer: SizedFamily, atom_table: list) -> SizedFamily:
    """Replace every rank in a rank-form outer family by its atom."""
    return [[tuple(atom_table[r] for r in cfg) for cfg in bucket] for bucket in outer]


def nccg_outer_sizes(n: int, d: int, k_max: int) -> list[int]:
    atoms = comb(n, d)
    return [comb(atoms, k) for k in range(k_max + 1)]


def npcg_outer_sizes(n: int, d: int, k_max: int) -> list[int]:
    atoms = comb(n, d)
    return [falling_factorial(atoms, k) for k in range(k_max + 1)]


def _nested_seq_free_walk(lo: int, hi: int, ds: tuple, k_max: int, outer_kind: str):
    """Engine support: fused recursion over an index range, midpoint
    splits throughout, atoms numbered by creation order.

    Returns (inner family, outer family whose configs hold local atom
    ordinals, atom value rows in creation order).  Offsetting the
    ordinals by a global base reproduces the engine's atom ids.
    """
    d_top = ds[-1]
    outer_op = merge if outer_kind == "perms" else cross_join

    def katoms(ids: list) -> SizedFamily:
        if outer_kind == "perms":
            return kperms_dc(k_max, ids)
        return kcombs_seq(k_max, ids)

    def walk(a: int, b: int):
        size = b - a
        if size == 0:
            return unit_family(d_top), unit_family(k_max), []
        if size == 1:
            return single_family(a, d_top), unit_family(k_max), []
        mid = (a + b) // 2
        css1, ncss1, atoms1 = walk(a, mid)
        css2, ncss2, atoms2 = walk(mid, b)
        shift = len(atoms1)
        ncss2 = [
            [tuple(e + shift for e in cfg) for cfg in bucket] for bucket in ncss2
        ]
        css = convol(cross_join, css1, css2)
        if len(ds) == 1:
            new_vals = list(css[d_top])
        else:
            fresh = convol_new(cross_join, css1, css2)
            new_vals = [c for d in ds for c in fresh[d]]
        base = len(atoms1) + len(atoms2)
        ids = list(range(base, base + len(new_vals)))
        ncss = convol(outer_op, convol(outer_op, ncss1, ncss2), katoms(ids))
        return set_empty(d_top, css), ncss, atoms1 + atoms2 + new_vals

    return walk(lo, hi)
