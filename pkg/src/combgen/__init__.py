"""combgen: generators for K-combinations, K-permutations and nested
combination structures, with revolving-door ordering, integer ranks,
exact blocked-array preallocation and communication-free parallel runs.
"""

from .engine import (
    AtomRegistry,
    BlockedTable,
    CapacitySchedule,
    EngineResult,
    RunStats,
    TableArena,
    allocate,
    check_write_ranges,
    load_cgbt,
    plan_capacities,
    run_parallel,
    table_from_family,
)
from .generators import (
    GroundSet,
    RankFamily,
    for_revol,
    for_revol_int,
    for_step,
    kcombs_dc,
    kcombs_revol,
    kcombs_revol_int,
    kcombs_seq,
    kcombs_seq_inplace,
    kperms_dc,
)
from .nested import (
    NestedResult,
    nested_combs_dc,
    nested_combs_multi,
    nested_combs_multi_spec,
    nested_combs_revol,
    nested_combs_revol_int,
    nested_combs_seq,
    nested_combs_spec,
    nested_perms_dc,
    nested_perms_spec,
    substitute_ranks,
)
from .oracle import (
    PropertyReport,
    brute_combs,
    brute_perms,
    check_fusion,
    check_rank_consistency,
    check_revolving_door,
)
from .semiring import (
    BinomialTable,
    CapacityMismatchError,
    DuplicateElementError,
    RankOverflowError,
    binomial,
    convol,
    convol_new,
    cross_join,
    empty_family,
    interleave,
    merge,
    rev_inits,
    set_empty,
    single_family,
    unit_family,
)
from .splitplan import PlanNode, SplitPlan

__version__ = "0.1.0"

__all__ = [
    "AtomRegistry",
    "BinomialTable",
    "BlockedTable",
    "CapacityMismatchError",
    "CapacitySchedule",
    "DuplicateElementError",
    "EngineResult",
    "GroundSet",
    "NestedResult",
    "PlanNode",
    "PropertyReport",
    "RankFamily",
    "RankOverflowError",
    "RunStats",
    "SplitPlan",
    "TableArena",
    "allocate",
    "binomial",
    "brute_combs",
    "brute_perms",
    "check_fusion",
    "check_rank_consistency",
    "check_revolving_door",
    "check_write_ranges",
    "convol",
    "convol_new",
    "cross_join",
    "empty_family",
    "for_revol",
    "for_revol_int",
    "for_step",
    "interleave",
    "kcombs_dc",
    "kcombs_revol",
    "kcombs_revol_int",
    "kcombs_seq",
    "kcombs_seq_inplace",
    "kperms_dc",
    "load_cgbt",
    "merge",
    "nested_combs_dc",
    "nested_combs_multi",
    "nested_combs_multi_spec",
    "nested_combs_revol",
    "nested_combs_revol_int",
    "nested_combs_seq",
    "nested_combs_spec",
    "nested_perms_dc",
    "nested_perms_spec",
    "plan_capacities",
    "rev_inits",
    "run_parallel",
    "set_empty",
    "single_family",
    "substitute_ranks",
    "table_from_family",
    "unit_family",
]
