"""Brute-force references and property checkers.

Everything here is deliberately independent of the generator
implementations: subsets come from bitmask counting, permutations from
recursive selection, and the checkers only look at the families they
are handed.  Guards keep instance sizes inside a one-minute budget.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from .generators import _as_labels, kcombs_revol, kcombs_revol_int
from .nested import nested_combs_dc, nested_combs_spec
from .semiring import SizedFamily

BRUTE_COMBS_MAX_N = 24
BRUTE_PERMS_MAX_N = 10


class GuardLimitError(ValueError):
    """Requested instance exceeds the brute-force size guard."""


@dataclass
class PropertyReport:
    name: str
    params: dict
    passed: bool
    counterexample: dict | None = field(default=None)

    def line(self) -> str:
        """One-line machine-readable record."""
        return json.dumps(
            {
                "property": self.name,
                "params": self.params,
                "pass": self.passed,
                "counterexample": self.counterexample,
            },
            default=list,
            sort_keys=True,
        )


def brute_combs(n: int, k_max: int, labels: Sequence | None = None) -> SizedFamily:
    """Every subset of up to k_max elements, by bitmask counting order.

    Configs keep ascending label position; default labels are 1..n.
    """
    if n > BRUTE_COMBS_MAX_N:
        raise GuardLimitError(f"brute_combs limited to n <= {BRUTE_COMBS_MAX_N}")
    labels = tuple(labels) if labels is not None else tuple(range(1, n + 1))
    fam: SizedFamily = [[] for _ in range(k_max + 1)]
    for mask in range(1 << n):
        size = mask.bit_count()
        if size <= k_max:
            fam[size].append(tuple(labels[i] for i in range(n) if mask >> i & 1))
    return fam


def brute_perms(n: int, k_max: int, labels: Sequence | None = None) -> SizedFamily:
    """Every ordered arrangement of up to k_max elements, by recursive
    selection in label order."""
    if n > BRUTE_PERMS_MAX_N:
        raise GuardLimitError(f"brute_perms limited to n <= {BRUTE_PERMS_MAX_N}")
    labels = tuple(labels) if labels is not None else tuple(range(1, n + 1))
    fam: SizedFamily = [[()]]
    for k in range(1, k_max + 1):
        bucket = []
        for prefix in fam[k - 1]:
            used = set(prefix)
            bucket.extend(prefix + (x,) for x in labels if x not in used)
        fam.append(bucket)
    return fam


def canon_comb(cfg) -> tuple:
    """Order-insensitive canonical form of a combination config."""
    return tuple(sorted(cfg))


def comb_multiset(bucket) -> list:
    return sorted(canon_comb(c) for c in bucket)


def perm_multiset(bucket) -> list:
    return sorted(bucket)


def nested_comb_multiset(bucket) -> list:
    """Canonicalize configs whose elements are themselves combinations."""
    return sorted(tuple(sorted(canon_comb(a) for a in cfg)) for cfg in bucket)


def nested_perm_multiset(bucket) -> list:
    return sorted(tuple(canon_comb(a) for a in cfg) for cfg in bucket)


def families_equal_as_multisets(fam_a, fam_b, canon=comb_multiset):
    """Bucket-by-bucket multiset comparison; None when equal, else the
    first differing bucket index with one witness config per side."""
    for k in range(max(len(fam_a), len(fam_b))):
        a = canon(fam_a[k]) if k < len(fam_a) else []
        b = canon(fam_b[k]) if k < len(fam_b) else []
        if a != b:
            only_a = next(iter([c for c in a if c not in set(b)]), None)
            only_b = next(iter([c for c in b if c not in set(a)]), None)
            return {"bucket": k, "only_left": only_a, "only_right": only_b}
    return None


def check_revolving_door(family: SizedFamily, params: dict | None = None) -> PropertyReport:
    """Pass iff every cyclically adjacent pair in every non-trivial
    bucket differs in exactly two elements (one swapped out, one in)."""
    params = dict(params or {})
    for k in range(1, len(family)):
        bucket = family[k]
        if len(bucket) < 2:
            continue
        for i in range(len(bucket)):
            a = bucket[i]
            b = bucket[(i + 1) % len(bucket)]
            delta = set(a) ^ set(b)
            if len(delta) != 2:
                return PropertyReport(
                    "revolving-door",
                    params,
                    False,
                    {
                        "bucket": k,
                        "position": i,
                        "pair": [list(a), list(b)],
                        "symmetric_difference": sorted(delta),
                    },
                )
    return PropertyReport("revolving-door", params, True)


def check_fusion(k_max: int, d: int, xs, fused_outer=None) -> PropertyReport:
    """Pass iff the fused nested recursion and its two-phase reference
    produce identical outer bucket multisets.

    fused_outer defaults to a fresh nested_combs_dc run; tests inject
    corrupted families through it.
    """
    labels = _as_labels(xs)
    params = {"k": k_max, "d": d, "n": len(labels)}
    if fused_outer is None:
        fused_outer = nested_combs_dc(k_max, d, labels).outer
    spec = nested_combs_spec(k_max, d, labels)
    diff = families_equal_as_multisets(fused_outer, spec.outer, nested_comb_multiset)
    if diff is not None:
        return PropertyReport("fusion", params, False, diff)
    return PropertyReport("fusion", params, True)


def check_rank_consistency(k_max: int, n: int, rank_buckets=None) -> PropertyReport:
    """Pass iff every rank bucket is a permutation of 0..C(n,k)-1 and
    the rank stored at each position names that same position's config
    in the revolving-door family."""
    params = {"k": k_max, "n": n}
    if rank_buckets is None:
        rank_buckets = kcombs_revol_int(k_max, n).buckets
    revol = kcombs_revol(k_max, n)
    for k in range(k_max + 1):
        bucket = rank_buckets[k]
        expected = comb(n, k)
        if sorted(bucket) != list(range(expected)):
            return PropertyReport(
                "rank-consistency",
                params,
                False,
                {"bucket": k, "ranks": bucket, "expected_count": expected},
            )
        if k == 0:
            continue
        configs = revol[k]
        for i, r in enumerate(bucket):
            if configs[r] != configs[i]:
                return PropertyReport(
                    "rank-consistency",
                    params,
                    False,
                    {
                        "bucket": k,
                        "position": i,
                        "rank": r,
                        "config_at_position": list(configs[i]),
                        "config_at_rank": list(configs[r]),
                    },
                )
    return PropertyReport("rank-consistency", params, True)
