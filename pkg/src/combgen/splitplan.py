"""Split plans: binary trees over a ground-set index range.

A plan fixes the divide-and-conquer structure of a run.  Leaves are
index ranges at or below the plan's leaf threshold; internal nodes have
exactly two children whose ranges partition the parent's.  Generators
produce identical bucket multisets for every plan over the same range;
the within-bucket order is a function of the plan alone, which is what
makes parallel runs reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass


@dataclass(frozen=True)
class PlanNode:
    lo: int
    hi: int
    left: "PlanNode | None" = None
    right: "PlanNode | None" = None

    @property
    def size(self) -> int:
        return self.hi - self.lo

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass(frozen=True)
class SplitPlan:
    n: int
    root: PlanNode
    threshold: int = 1

    @classmethod
    def midpoint(cls, n: int, threshold: int = 1) -> "SplitPlan":
        """Split at floor(size/2) until ranges are at most threshold wide."""

        def build(lo: int, hi: int) -> PlanNode:
            if hi - lo <= max(threshold, 1):
                return PlanNode(lo, hi)
            mid = (lo + hi) // 2
            return PlanNode(lo, hi, build(lo, mid), build(mid, hi))

        return cls(n, build(0, n), threshold)

    @classmethod
    def one_rest(cls, n: int, threshold: int = 1) -> "SplitPlan":
        """Degenerate plan: split one element off the front at every level."""

        def build(lo: int, hi: int) -> PlanNode:
            if hi - lo <= max(threshold, 1):
                return PlanNode(lo, hi)
            return PlanNode(lo, hi, PlanNode(lo, lo + 1), build(lo + 1, hi))

        return cls(n, build(0, n), threshold)

    @classmethod
    def random_plan(cls, n: int, seed: int, threshold: int = 1) -> "SplitPlan":
        """Random split positions from a seeded generator, preorder."""
        rng = random.Random(seed)

        def build(lo: int, hi: int) -> PlanNode:
            if hi - lo <= max(threshold, 1):
                return PlanNode(lo, hi)
            mid = rng.randint(lo + 1, hi - 1)
            return PlanNode(lo, hi, build(lo, mid), build(mid, hi))

        return cls(n, build(0, n), threshold)

    @classmethod
    def from_spec(cls, spec, n: int, threshold: int = 1) -> "SplitPlan":
        """Build from an explicit nested-list tree.

        A node is either a leaf [lo, hi] (two ints) or an internal node
        [left, right] (two subtrees).  The leaf ranges must partition
        [0, n) in order.
        """

        def build(item) -> PlanNode:
            if (
                isinstance(item, (list, tuple))
                and len(item) == 2
                and all(isinstance(v, int) for v in item)
            ):
                return PlanNode(item[0], item[1])
            if isinstance(item, (list, tuple)) and len(item) == 2:
                left = build(item[0])
                right = build(item[1])
                if left.hi != right.lo:
                    raise ValueError(
                        f"child ranges [{left.lo},{left.hi}) and "
                        f"[{right.lo},{right.hi}) are not adjacent"
                    )
                return PlanNode(left.lo, right.hi, left, right)
            raise ValueError(f"bad plan node: {item!r}")

        plan = cls(n, build(spec), threshold)
        plan.check(n)
        return plan

    def check(self, n: int) -> None:
        if self.root.lo != 0 or self.root.hi != n:
            raise ValueError(
                f"plan covers [{self.root.lo},{self.root.hi}), ground set has {n}"
            )

        def walk(node: PlanNode) -> None:
            if node.is_leaf:
                return
            assert node.right is not None
            if node.left.lo != node.lo or node.right.hi != node.hi:
                raise ValueError("child ranges do not cover the parent")
            if node.left.hi != node.right.lo:
                raise ValueError("child ranges are not adjacent")
            walk(node.left)
            walk(node.right)

        walk(self.root)

    def nodes(self) -> list[PlanNode]:
        """All nodes, children before parents."""
        out: list[PlanNode] = []

        def walk(node: PlanNode) -> None:
            if not node.is_leaf:
                walk(node.left)
                walk(node.right)
            out.append(node)

        walk(self.root)
        return out
