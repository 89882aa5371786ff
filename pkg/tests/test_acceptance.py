"""Acceptance suite: one test per release criterion.

Each test prints a single ACCEPT line (run pytest -s to see them all)
and enforces both the functional requirement and its time budget.
"""

import random
import time
from math import comb

import pytest

from combgen.engine import check_write_ranges, run_parallel
from combgen.generators import (
    kcombs_dc,
    kcombs_revol,
    kcombs_revol_int,
    kcombs_seq,
    kcombs_seq_inplace,
    kperms_dc,
)
from combgen.nested import (
    nested_combs_dc,
    nested_combs_multi,
    nested_combs_multi_spec,
    nested_combs_revol_int,
    nested_combs_seq,
    nested_combs_spec,
    nested_perms_dc,
    nested_perms_spec,
)
from combgen.oracle import (
    brute_combs,
    brute_perms,
    check_rank_consistency,
    check_revolving_door,
    check_fusion,
    comb_multiset,
    families_equal_as_multisets,
    nested_comb_multiset,
    nested_perm_multiset,
)
from combgen.semiring import rev_inits, set_empty
from combgen.splitplan import SplitPlan

from test_oracle import corrupt_revolving_family

PLAN_SEED = 0xC0FFEE


def report(name, elapsed, budget):
    print(f"ACCEPT {name}: PASS ({elapsed:.2f}s, budget {budget:.0f}s)")
    assert elapsed < budget, f"{name} exceeded its {budget}s budget: {elapsed:.2f}s"


def test_golden_outputs():
    t0 = time.perf_counter()
    assert kcombs_dc(2, (1, 2, 3)) == [
        [()], [(1,), (2,), (3,)], [(1, 2), (1, 3), (2, 3)],
    ]
    assert kcombs_seq(2, (1, 2, 3)) == [
        [()], [(1,), (2,), (3,)], [(1, 2), (1, 3), (2, 3)],
    ]
    assert kcombs_revol(2, 3) == [
        [()], [(3,), (2,), (1,)], [(3, 2), (2, 1), (3, 1)],
    ]
    assert kcombs_revol_int(2, 3).buckets == [[0], [0, 1, 2], [0, 1, 2]]
    assert kperms_dc(2, (1, 2, 3)) == [
        [()],
        [(1,), (2,), (3,)],
        [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)],
    ]
    nested_int = nested_combs_revol_int(2, 2, 3)
    assert nested_int.inner.buckets == [[0], [0, 1, 2], []]
    assert nested_int.outer == [
        [()], [(1,), (2,), (0,)], [(1, 2), (1, 0), (2, 0)],
    ]
    assert set_empty(2, [[1], [2], [3], [4]]) == [[1], [2], [], [4]]
    assert rev_inits([1, 2, 3]) == [[], [1], [2, 1], [3, 2, 1]]
    report("golden-outputs", time.perf_counter() - t0, 1.0)


def test_oracle_equivalence():
    t0 = time.perf_counter()
    for n in range(13):
        k_max = min(n, 6)
        labels = tuple(range(1, n + 1))
        brute = [comb_multiset(b) for b in brute_combs(n, k_max)]
        for fam in (
            kcombs_dc(k_max, labels),
            kcombs_seq(k_max, labels),
            kcombs_seq_inplace(k_max, labels),
            kcombs_revol(k_max, n),
        ):
            assert [comb_multiset(b) for b in fam] == brute, n
    for n in range(9):
        k_max = min(n, 4)
        labels = tuple(range(1, n + 1))
        brute = [sorted(b) for b in brute_perms(n, k_max)]
        assert [sorted(b) for b in kperms_dc(k_max, labels)] == brute, n
    report("oracle-equivalence", time.perf_counter() - t0, 30.0)


def test_revolving_door_property():
    t0 = time.perf_counter()
    for n in range(1, 17):
        k_max = min(n, 8)
        result = check_revolving_door(kcombs_revol(k_max, n), {"n": n, "k": k_max})
        assert result.passed, result.line()
    report("revolving-door", time.perf_counter() - t0, 30.0)


def test_rank_consistency():
    t0 = time.perf_counter()
    for n in range(17):
        k_max = min(max(n, 1), 8)
        result = check_rank_consistency(k_max, n)
        assert result.passed, result.line()
    report("rank-consistency", time.perf_counter() - t0, 30.0)


def test_fusion_equivalence():
    t0 = time.perf_counter()
    for n in range(9):
        labels = tuple(range(1, n + 1))
        all_plans = [
            SplitPlan.midpoint(n),
            SplitPlan.one_rest(n),
            SplitPlan.random_plan(n, PLAN_SEED),
        ]
        for k in range(4):
            for d in (2, 3):
                spec = nested_combs_spec(k, d, labels)
                seq = nested_combs_seq(k, d, labels)
                assert (
                    families_equal_as_multisets(
                        seq.outer, spec.outer, nested_comb_multiset
                    )
                    is None
                )
                perm_spec = nested_perms_spec(k, d, labels)
                for plan in all_plans:
                    fused = nested_combs_dc(k, d, labels, plan)
                    assert (
                        families_equal_as_multisets(
                            fused.outer, spec.outer, nested_comb_multiset
                        )
                        is None
                    )
                    perms = nested_perms_dc(k, d, labels, plan)
                    assert (
                        families_equal_as_multisets(
                            perms.outer, perm_spec.outer, nested_perm_multiset
                        )
                        is None
                    )
            for ds in ((2,), (3,), (2, 3)):
                multi_spec = nested_combs_multi_spec(k, ds, labels)
                for plan in all_plans:
                    multi = nested_combs_multi(k, ds, labels, plan)
                    assert (
                        families_equal_as_multisets(
                            multi.outer, multi_spec.outer, nested_comb_multiset
                        )
                        is None
                    )
    report("fusion-equivalence", time.perf_counter() - t0, 60.0)


def test_parallel_determinism():
    t0 = time.perf_counter()
    plan = SplitPlan.midpoint(24, 3)
    dumps = []
    for workers in (1, 2, 4, 8):
        res = run_parallel("kcombs", 4, 24, plan=plan, workers=workers)
        dumps.append(res.table.to_bytes())
        assert res.stats.growth_events == 0
    assert len(set(dumps)) == 1, "worker count changed the output bytes"
    report("parallel-determinism", time.perf_counter() - t0, 30.0)


def test_preallocation_exactness():
    t0 = time.perf_counter()
    runs = [
        ("kcombs", dict(k_max=4, n=20, plan=SplitPlan.midpoint(20, 3), workers=4)),
        ("kcombs", dict(k_max=3, n=15, plan=SplitPlan.one_rest(15, 2), workers=2)),
        ("kcombs", dict(k_max=5, n=12, plan=SplitPlan.random_plan(12, PLAN_SEED, 2), workers=3)),
        ("kperms", dict(k_max=3, n=9, plan=SplitPlan.midpoint(9, 2), workers=4)),
        ("nccg", dict(k_max=2, n=9, d=2, plan=SplitPlan.midpoint(9, 2), workers=4)),
        ("nccg-multi", dict(k_max=2, n=7, ds=(2, 3), plan=SplitPlan.midpoint(7, 2), workers=2)),
        ("npcg", dict(k_max=2, n=6, d=2, plan=SplitPlan.midpoint(6, 2), workers=2)),
    ]
    for gen, kw in runs:
        kw = dict(kw)
        k_max = kw.pop("k_max")
        n = kw.pop("n")
        res = run_parallel(gen, k_max, n, record_writes=True, **kw)
        assert res.stats.growth_events == 0, gen
        for table in (res.table, res.inner, res.outer):
            if table is not None:
                assert table.exactly_full(), gen
        assert check_write_ranges(res.stats) == [], gen
    report("preallocation-exactness", time.perf_counter() - t0, 30.0)


def test_amortized_constant_evidence():
    t0 = time.perf_counter()
    rates = {}
    for n in (20, 25, 30):
        plan = SplitPlan.midpoint(n, 64)
        best = None
        for _ in range(5):
            start = time.perf_counter()
            res = run_parallel("kcombs", 3, n, plan=plan, workers=1)
            elapsed = time.perf_counter() - start
            best = elapsed if best is None else min(best, elapsed)
        configs = res.stats.configs
        assert configs == sum(comb(n, k) for k in range(4))
        rates[n] = best * 1e9 / configs
    band = max(rates.values()) / min(rates.values())
    assert band <= 3.0, f"ns/config spread {band:.2f}x exceeds the 3x band: {rates}"
    shown = {n: round(r, 1) for n, r in rates.items()}
    print(f"  ns/config by ground size: {shown}, spread {band:.2f}x")
    report("amortized-constant", time.perf_counter() - t0, 30.0)


def test_mutation_soundness():
    t0 = time.perf_counter()
    hits = 0
    for seed in range(10):
        rng = random.Random(seed)
        fam = corrupt_revolving_family(kcombs_revol(4, 9), rng)
        rep = check_revolving_door(fam)
        assert not rep.passed and rep.counterexample is not None
        hits += 1
    assert hits == 10
    hits = 0
    labels = tuple(range(1, 6))
    for seed in range(10):
        rng = random.Random(seed)
        outer = [list(b) for b in nested_combs_dc(2, 2, labels).outer]
        bucket = rng.choice([1, 2])
        if rng.random() < 0.5 and outer[bucket]:
            del outer[bucket][rng.randrange(len(outer[bucket]))]
        else:
            outer[bucket].append(outer[bucket][rng.randrange(len(outer[bucket]))])
        rep = check_fusion(2, 2, labels, fused_outer=outer)
        assert not rep.passed and rep.counterexample is not None
        hits += 1
    assert hits == 10
    hits = 0
    for seed in range(10):
        rng = random.Random(seed)
        buckets = [list(b) for b in kcombs_revol_int(3, 7).buckets]
        k = rng.choice([2, 3])
        i, j = rng.sample(range(len(buckets[k])), 2)
        if rng.random() < 0.5:
            buckets[k][i], buckets[k][j] = buckets[k][j], buckets[k][i]
        else:
            buckets[k][i] = buckets[k][j]
        rep = check_rank_consistency(3, 7, rank_buckets=buckets)
        assert not rep.passed and rep.counterexample is not None
        hits += 1
    assert hits == 10
    report("mutation-soundness", time.perf_counter() - t0, 30.0)
