"""Generator-semiring primitives shared by every generator.

A *config* is one combination or permutation, stored as a tuple of
elements.  A *sized family* is a list of K+1 buckets where bucket k
holds every generated config of size k.  Two products are supported:

* ``cross_join`` -- concatenate each config from the left set with each
  config from the right set (combination product).
* ``merge`` -- all order-preserving riffles of each config pair
  (permutation product).

``convol`` lifts either product to whole families, bucket-convolution
style: result bucket k collects the (k-j, j) products for j = 0..k.
"""

from __future__ import annotations

from typing import Callable, Sequence

Config = tuple
Bucket = list   # list[Config]
SizedFamily = list  # list[Bucket], length K+1
RankBuckets = list  # list[list[int]], length K+1

Combine = Callable[[Bucket, Bucket], Bucket]


class CapacityMismatchError(ValueError):
    """Operands of a family convolution have different capacities."""


class DuplicateElementError(ValueError):
    """Ground-set elements must be pairwise distinct."""


class RankOverflowError(OverflowError):
    """A bucket count does not fit the 64-bit rank representation."""


RANK_LIMIT = 2**64


def unit_family(k_max: int) -> SizedFamily:
    """The multiplicative unit: one empty config, then k_max empty buckets."""
    return [[()]] + [[] for _ in range(k_max)]


def empty_family(k_max: int) -> SizedFamily:
    """The additive zero: K+1 empty buckets."""
    return [[] for _ in range(k_max + 1)]


def single_family(x, k_max: int) -> SizedFamily:
    """Family of a one-element ground set: [[()], [(x,)], [], ...]."""
    if k_max == 0:
        return [[()]]
    return [[()], [(x,)]] + [[] for _ in range(k_max - 1)]


def cross_join(xs: Bucket, ys: Bucket) -> Bucket:
    """Concatenate every x with every y, x-outer / y-inner order."""
    return [x + y for x in xs for y in ys]


def interleave(x: Config, y: Config) -> Bucket:
    """All riffle shuffles of x and y keeping each side's internal order.

    The x-head-first branch is emitted before the y-head-first branch,
    e.g. interleave((1,2),(3,4)) starts with (1,2,3,4) and ends with
    (3,4,1,2).
    """
    if not y:
        return [x]
    if not x:
        return [y]
    head_x = [(x[0],) + rest for rest in interleave(x[1:], y)]
    head_y = [(y[0],) + rest for rest in interleave(x, y[1:])]
    return head_x + head_y


def merge(xs: Bucket, ys: Bucket) -> Bucket:
    """Lift interleave to sets of configs, x-outer / y-inner order."""
    return [r for x in xs for y in ys for r in interleave(x, y)]


def rev_inits(xs: Sequence) -> list[list]:
    """All reversed initial segments, shortest first, empty included.

    rev_inits([1,2,3]) == [[], [1], [2,1], [3,2,1]].  Built by prepend
    accumulation so the total copying cost is quadratic, and every
    returned segment is a fresh list.
    """
    out: list[list] = [[]]
    acc: list = []
    for x in xs:
        acc = [x] + acc
        out.append(acc)
    return out


def _check_capacity(xss: SizedFamily, yss: SizedFamily) -> None:
    if len(xss) != len(yss):
        raise CapacityMismatchError(
            f"family capacities differ: {len(xss) - 1} vs {len(yss) - 1}"
        )


def convol(combine: Combine, xss: SizedFamily, yss: SizedFamily) -> SizedFamily:
    """Bucket convolution of two families under the given product.

    Result bucket k is the concatenation of combine(xss[k-j], yss[j])
    for j = 0..k, j ascending.  The reversed prefixes of xss are built
    by accumulation (one per output bucket), never shared with the
    output.
    """
    _check_capacity(xss, yss)
    out: SizedFamily = []
    prefix: list[Bucket] = []
    for bucket in xss:
        prefix = [bucket] + prefix
        out.append([c for xb, yb in zip(prefix, yss) for c in combine(xb, yb)])
    return out


def convol_new(combine: Combine, xss: SizedFamily, yss: SizedFamily) -> SizedFamily:
    """Convolution keeping only products that mix both operands.

    Each bucket product drops the first and last entry of both operand
    prefixes, so result bucket k is combine(xss[k-j], yss[j]) for
    j = 1..k-1 only: configs drawn purely from one side are excluded.
    Taking the middle of a segment shorter than three entries yields
    nothing.
    """
    _check_capacity(xss, yss)
    mid_y = yss[1:-1]
    out: SizedFamily = []
    prefix: list[Bucket] = []
    for bucket in xss:
        prefix = [bucket] + prefix
        out.append(
            [c for xb, yb in zip(prefix[1:-1], mid_y) for c in combine(xb, yb)]
        )
    return out


def set_empty(d: int, table: SizedFamily) -> SizedFamily:
    """Copy of table with bucket d replaced by an empty bucket."""
    if not 0 <= d < len(table):
        raise IndexError(f"bucket {d} out of range for capacity {len(table) - 1}")
    out = list(table)
    out[d] = []
    return out


def binomial(n: int, k: int) -> int:
    """C(n, k) by the Pascal recurrence; 0 when k > n or k < 0."""
    if k < 0 or k > n:
        return 0
    k = min(k, n - k)
    row = [1]
    for _ in range(n):
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
        if len(row) > k + 1:
            row = row[: k + 1]
    return row[k]


def falling_factorial(n: int, k: int) -> int:
    """n * (n-1) * ... * (n-k+1); the number of k-permutations."""
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out *= n - i
    return out


class BinomialTable:
    """Precomputed Pascal triangle C(n, k) for n <= n_max, k <= k_max.

    Entries are exact Python integers (64-bit or wider); consumers that
    are limited to 64-bit ranks must check against RANK_LIMIT.
    """

    def __init__(self, n_max: int, k_max: int):
        self.n_max = n_max
        self.k_max = k_max
        rows = [[1] + [0] * k_max]
        for n in range(1, n_max + 1):
            prev = rows[-1]
            row = [1] + [
                prev[k] + prev[k - 1] for k in range(1, k_max + 1)
            ]
            rows.append(row)
        self.values = rows

    def get(self, n: int, k: int) -> int:
        if k > self.k_max or n > self.n_max:
            raise IndexError(f"C({n},{k}) outside table ({self.n_max},{self.k_max})")
        if k > n:
            return 0
        return self.values[n][k]


def check_distinct(xs: Sequence) -> None:
    """Raise DuplicateElementError unless all elements are distinct."""
    if len(set(xs)) != len(xs):
        raise DuplicateElementError(f"ground set has repeated elements: {list(xs)!r}")
