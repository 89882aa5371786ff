"""Blocked-array storage and the communication-free parallel executor.

Every divide-and-conquer node owns one contiguous int64 buffer holding
its buckets back to back; bucket k is a row-major (rows x k) matrix
slice.  All capacities come from binomial arithmetic before anything is
generated, so a run performs zero buffer growths; a counter witnesses
that, and an optional debug mode records every write range so tests can
prove that no two writes overlap.

Tasks are plan subtrees.  A combine only reads its two finished
children and writes its own node's buffers, so any scheduler that runs
children before parents yields bit-identical output, whatever the
worker count or interleaving.
"""

from __future__ import annotations

import hashlib
import struct
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .generators import kperms_dc
from .semiring import (
    BinomialTable,
    RankOverflowError,
    falling_factorial,
    interleave,
)
from .splitplan import PlanNode, SplitPlan

CGBT_MAGIC = b"CGBT"
CGBT_VERSION = 1

# int64 storage: counts past 2**63 cannot be represented, refuse early.
_COUNT_LIMIT = 2**63


class TableFullError(RuntimeError):
    """A write would exceed a bucket's planned capacity."""


@dataclass
class RunStats:
    tables_allocated: int = 0
    growth_events: int = 0
    configs: int = 0
    write_ranges: list | None = None

    def record_write(self, table_tag: int, bucket: int, start: int, end: int) -> None:
        if self.write_ranges is not None:
            self.write_ranges.append((table_tag, bucket, start, end))


class BlockedTable:
    """K+1 buckets in one contiguous buffer, bucket k = rows of width k.

    Row capacities are fixed at construction; bucket 0 holds the empty
    config as a zero-width row, so it consumes no slots but still
    counts one row.
    """

    _tag_counter = 0
    _tag_lock = threading.Lock()

    def __init__(self, k_max: int, n: int, caps: list[int], stats: RunStats | None = None):
        self.k_max = k_max
        self.n = n
        self.caps = list(caps)
        self.offsets = []
        total = 0
        for k, rows in enumerate(self.caps):
            self.offsets.append(total)
            total += rows * k
        self.slot_count = total
        self.data = np.zeros(total, dtype=np.int64)
        self.fill = [0] * (k_max + 1)
        self.blanked: set[int] = set()
        self.stats = stats
        with BlockedTable._tag_lock:
            BlockedTable._tag_counter += 1
            self.tag = BlockedTable._tag_counter
        if stats is not None:
            stats.tables_allocated += 1

    def capacity(self, k: int) -> int:
        return self.caps[k]

    def rows(self, k: int) -> int:
        """Rows visible to consumers (0 for a blanked bucket)."""
        return 0 if k in self.blanked else self.fill[k]

    def region(self, k: int) -> np.ndarray:
        return self.data[self.offsets[k] : self.offsets[k] + self.caps[k] * k].reshape(
            self.caps[k], k
        )

    def bucket_rows(self, k: int) -> np.ndarray:
        return self.region(k)[: self.rows(k)]

    def write_block(self, k: int, start: int, rows: int) -> np.ndarray:
        """Claim rows [start, start+rows) of bucket k for writing."""
        if start + rows > self.caps[k]:
            raise TableFullError(
                f"bucket {k}: write [{start},{start + rows}) exceeds capacity {self.caps[k]}"
            )
        if self.stats is not None:
            self.stats.record_write(self.tag, k, start, start + rows)
        return self.region(k)[start : start + rows]

    def set_fill(self, k: int, rows: int) -> None:
        if rows > self.caps[k]:
            raise TableFullError(f"bucket {k}: fill {rows} exceeds capacity {self.caps[k]}")
        self.fill[k] = rows

    def mark_blank(self, k: int) -> None:
        self.blanked.add(k)

    def exactly_full(self) -> bool:
        return all(f == c for f, c in zip(self.fill, self.caps))

    def total_rows(self) -> int:
        return sum(self.rows(k) for k in range(self.k_max + 1))

    def to_family(self, labels=None) -> list:
        """Materialize as a plain sized family, optionally label-mapped."""
        fam = []
        for k in range(self.k_max + 1):
            rows = self.bucket_rows(k)
            if labels is None:
                fam.append([tuple(int(v) for v in row) for row in rows])
            else:
                fam.append([tuple(labels[int(v)] for v in row) for row in rows])
        return fam

    def to_bytes(self) -> bytes:
        """CGBT dump: magic, version byte, then K, N as u64 LE, then per
        bucket: k (u64), row count (u64), row-major u64 element indices."""
        parts = [CGBT_MAGIC, struct.pack("<BQQ", CGBT_VERSION, self.k_max, self.n)]
        for k in range(self.k_max + 1):
            rows = self.bucket_rows(k)
            parts.append(struct.pack("<QQ", k, rows.shape[0]))
            parts.append(np.ascontiguousarray(rows).astype("<u8").tobytes())
        return b"".join(parts)

    def sha256(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()


def load_cgbt(data: bytes) -> BlockedTable:
    if data[:4] != CGBT_MAGIC:
        raise ValueError("not a CGBT stream")
    version, k_max, n = struct.unpack_from("<BQQ", data, 4)
    if version != CGBT_VERSION:
        raise ValueError(f"unsupported CGBT version {version}")
    pos = 4 + struct.calcsize("<BQQ")
    buckets = []
    for _ in range(k_max + 1):
        k, rows = struct.unpack_from("<QQ", data, pos)
        pos += 16
        count = rows * k
        arr = np.frombuffer(data, dtype="<u8", count=count, offset=pos).astype(np.int64)
        pos += count * 8
        buckets.append((k, rows, arr.reshape(rows, k)))
    table = BlockedTable(k_max, n, [rows for _, rows, _ in buckets])
    for k, rows, arr in buckets:
        if rows:
            table.region(k)[:rows] = arr
        table.set_fill(k, rows)
    return table


def table_from_family(family: list, n: int, index_of=None) -> BlockedTable:
    """Pack a plain sized family into a BlockedTable of element indices."""
    k_max = len(family) - 1
    table = BlockedTable(k_max, n, [len(b) for b in family])
    for k, bucket in enumerate(family):
        if k and bucket:
            rows = [
                [index_of(v) if index_of else v for v in cfg] for cfg in bucket
            ]
            table.region(k)[: len(bucket)] = np.asarray(rows, dtype=np.int64)
        table.set_fill(k, len(bucket))
    return table


# ---------------------------------------------------------------------------
# capacity planning


@dataclass
class CapacitySchedule:
    k_max: int
    n: int
    kind: str
    node_caps: dict = field(default_factory=dict)  # (lo, hi) -> [rows per bucket]

    def caps(self, node: PlanNode) -> list[int]:
        return self.node_caps[(node.lo, node.hi)]

    def root_caps(self, plan: SplitPlan) -> list[int]:
        return self.caps(plan.root)


def _check_count(value: int) -> int:
    if value >= _COUNT_LIMIT:
        raise RankOverflowError(f"planned capacity {value} exceeds int64 storage")
    return value


def plan_capacities(
    k_max: int, plan: SplitPlan, binom: BinomialTable, kind: str = "combs"
) -> CapacitySchedule:
    """Exact per-node bucket capacities for a flat run.

    Leaf capacities are direct counts; an internal node's bucket k is
    the convolution sum over its children's (k-j, j) bucket pairs,
    which collapses to the direct count of its range size.
    """
    schedule = CapacitySchedule(k_max, plan.n, kind)

    def leaf_caps(size: int) -> list[int]:
        if kind == "combs":
            return [_check_count(binom.get(size, k)) for k in range(k_max + 1)]
        return [_check_count(falling_factorial(size, k)) for k in range(k_max + 1)]

    def pair_count(k: int, j: int) -> int:
        # rows produced by one (k-j, j) bucket pair per operand row pair
        return comb(k, j) if kind == "perms" else 1

    def walk(node: PlanNode) -> list[int]:
        if node.is_leaf:
            caps = leaf_caps(node.size)
        else:
            left = walk(node.left)
            right = walk(node.right)
            caps = [
                _check_count(
                    sum(
                        left[k - j] * right[j] * pair_count(k, j)
                        for j in range(k + 1)
                    )
                )
                for k in range(k_max + 1)
            ]
        schedule.node_caps[(node.lo, node.hi)] = caps
        return caps

    walk(plan.root)
    return schedule


class TableArena:
    """Per-node tables with fixed layouts, created on demand and
    released once their parent has consumed them."""

    def __init__(self, schedule: CapacitySchedule, record_writes: bool = False):
        self.schedule = schedule
        self.stats = RunStats(write_ranges=[] if record_writes else None)
        self._tables: dict = {}
        self._lock = threading.Lock()

    def get(self, node: PlanNode) -> BlockedTable:
        key = (node.lo, node.hi)
        with self._lock:
            table = self._tables.get(key)
            if table is None:
                table = BlockedTable(
                    self.schedule.k_max, self.schedule.n, self.schedule.caps(node), self.stats
                )
                self._tables[key] = table
        return table

    def release(self, node: PlanNode) -> None:
        with self._lock:
            self._tables.pop((node.lo, node.hi), None)


def allocate(schedule: CapacitySchedule, record_writes: bool = False) -> TableArena:
    return TableArena(schedule, record_writes)


def check_write_ranges(stats: RunStats) -> list:
    """Overlap violations among recorded write ranges, empty when the
    disjoint-write contract held."""
    if not stats.write_ranges:
        return []
    by_bucket: dict = {}
    for tag, bucket, start, end in stats.write_ranges:
        by_bucket.setdefault((tag, bucket), []).append((start, end))
    violations = []
    for key, ranges in by_bucket.items():
        ranges.sort()
        for (s1, e1), (s2, e2) in zip(ranges, ranges[1:]):
            if s2 < e1:
                violations.append({"table": key[0], "bucket": key[1], "ranges": [(s1, e1), (s2, e2)]})
    return violations


# ---------------------------------------------------------------------------
# flat generation


def _fill_combs_leaf(table: BlockedTable, lo: int, hi: int) -> None:
    """Sequential blocked fill over the index range [lo, hi).

    Elements are absorbed from the back of the range; each absorption
    prepends the element to every row of the bucket below.  Blocks are
    written back to front so no row ever moves: the final layout equals
    the functional sequential generator's bucket order.
    """
    k_max = table.k_max
    table.set_fill(0, 1)
    filled = [1] + [0] * k_max  # rows currently occupying each bucket's back end
    for x in range(hi - 1, lo - 1, -1):
        for k in range(min(k_max, hi - x), 0, -1):
            src_rows = filled[k - 1]
            if src_rows == 0:
                continue
            cap_above = table.caps[k - 1]
            cap = table.caps[k]
            start = cap - filled[k] - src_rows
            block = table.write_block(k, start, src_rows)
            block[:, 0] = x
            if k > 1:
                block[:, 1:] = table.region(k - 1)[cap_above - src_rows : cap_above]
            filled[k] += src_rows
    for k in range(1, k_max + 1):
        table.set_fill(k, filled[k])


def _combine_combs(parent: BlockedTable, left: BlockedTable, right: BlockedTable) -> None:
    """Cross-join convolution writes: parent bucket k is the j-ascending
    concatenation of (left bucket k-j) x (right bucket j) blocks."""
    for k in range(parent.k_max + 1):
        cursor = 0
        for j in range(k + 1):
            a = left.rows(k - j)
            b = right.rows(j)
            if a == 0 or b == 0:
                continue
            block = parent.write_block(k, cursor, a * b)
            if k - j > 0:
                block[:, : k - j] = np.repeat(left.bucket_rows(k - j), b, axis=0)
            if j > 0:
                block[:, k - j :] = np.tile(right.bucket_rows(j), (a, 1))
            cursor += a * b
        parent.set_fill(k, cursor)


def _riffle_patterns(a: int, b: int) -> list:
    """All a+b masks of 0 (left slot) and 1 (right slot), in riffle
    recursion order: the left-head branch before the right-head one."""
    masks = interleave((0,) * a, (1,) * b)
    return [
        (
            np.fromiter((i for i, m in enumerate(mask) if m == 0), dtype=np.int64, count=a),
            np.fromiter((i for i, m in enumerate(mask) if m == 1), dtype=np.int64, count=b),
        )
        for mask in masks
    ]


_PATTERN_CACHE: dict = {}


def _patterns(a: int, b: int) -> list:
    key = (a, b)
    if key not in _PATTERN_CACHE:
        _PATTERN_CACHE[key] = _riffle_patterns(a, b)
    return _PATTERN_CACHE[key]


def _combine_perms(parent: BlockedTable, left: BlockedTable, right: BlockedTable) -> None:
    """Riffle-merge convolution writes.  Within one (k-j, j) block the
    order is left-row major, right-row next, riffle pattern minor."""
    for k in range(parent.k_max + 1):
        cursor = 0
        for j in range(k + 1):
            a = left.rows(k - j)
            b = right.rows(j)
            if a == 0 or b == 0:
                continue
            pats = _patterns(k - j, j)
            npat = len(pats)
            rows = a * b * npat
            block = parent.write_block(k, cursor, rows)
            if k > 0:
                lsrc = left.bucket_rows(k - j)[np.repeat(np.arange(a), b)]
                rsrc = right.bucket_rows(j)[np.tile(np.arange(b), a)]
                for p, (xpos, ypos) in enumerate(pats):
                    if k - j > 0:
                        block[p::npat, xpos] = lsrc
                    if j > 0:
                        block[p::npat, ypos] = rsrc
            cursor += rows
        parent.set_fill(k, cursor)


def _run_plan(plan: SplitPlan, run_leaf, run_combine, workers: int) -> None:
    """Execute leaf tasks then combines, children always before parents.
    Sibling tasks share nothing but read-only inputs."""
    if workers <= 1:
        for node in plan.nodes():
            if node.is_leaf:
                run_leaf(node)
            else:
                run_combine(node)
        return

    parents: dict = {}
    pending: dict = {}
    leaves = []

    def index(node: PlanNode) -> None:
        if node.is_leaf:
            leaves.append(node)
            return
        pending[id(node)] = 2
        parents[id(node.left)] = node
        parents[id(node.right)] = node
        index(node.left)
        index(node.right)

    index(plan.root)
    done = threading.Event()
    errors: list = []
    lock = threading.Lock()

    with ThreadPoolExecutor(max_workers=workers) as pool:

        def task(node: PlanNode) -> None:
            try:
                if node.is_leaf:
                    run_leaf(node)
                else:
                    run_combine(node)
            except BaseException as exc:  # propagate to the caller
                with lock:
                    errors.append(exc)
                done.set()
                return
            parent = parents.get(id(node))
            if parent is None:
                done.set()
                return
            with lock:
                pending[id(parent)] -= 1
                ready = pending[id(parent)] == 0
            if ready:
                pool.submit(task, parent)

        if not leaves:
            done.set()
        for leaf in leaves:
            pool.submit(task, leaf)
        done.wait()
    if errors:
        raise errors[0]


@dataclass
class EngineResult:
    stats: RunStats
    table: BlockedTable | None = None
    inner: BlockedTable | None = None
    outer: BlockedTable | None = None
    atoms: "AtomRegistry | None" = None


def _run_flat(kind: str, k_max: int, n: int, plan: SplitPlan, workers: int, record_writes: bool) -> EngineResult:
    binom = BinomialTable(n, k_max)
    schedule = plan_capacities(k_max, plan, binom, kind)
    arena = allocate(schedule, record_writes)
    combine = _combine_combs if kind == "combs" else _combine_perms

    def run_leaf(node: PlanNode) -> None:
        table = arena.get(node)
        if kind == "combs":
            _fill_combs_leaf(table, node.lo, node.hi)
        else:
            _fill_perms_leaf(table, node.lo, node.hi)
        if not table.exactly_full():
            raise TableFullError(f"leaf [{node.lo},{node.hi}) not filled to capacity")

    def run_combine(node: PlanNode) -> None:
        parent = arena.get(node)
        left = arena.get(node.left)
        right = arena.get(node.right)
        combine(parent, left, right)
        if not parent.exactly_full():
            raise TableFullError(f"node [{node.lo},{node.hi}) not filled to capacity")
        arena.release(node.left)
        arena.release(node.right)

    _run_plan(plan, run_leaf, run_combine, workers)
    root = arena.get(plan.root)
    arena.stats.configs = root.total_rows()
    return EngineResult(stats=arena.stats, table=root)


def _fill_perms_leaf(table: BlockedTable, lo: int, hi: int) -> None:
    """Fill a permutation leaf by the merge recursion over the range,
    expanded midpoint-first down to singletons, in plain Python."""
    fam = kperms_dc(table.k_max, tuple(range(lo, hi)))
    table.set_fill(0, 1)
    for k in range(1, table.k_max + 1):
        rows = len(fam[k])
        if rows:
            block = table.write_block(k, 0, rows)
            block[:] = np.asarray(fam[k], dtype=np.int64)
        table.set_fill(k, rows)


# ---------------------------------------------------------------------------
# nested generation (rank form)


@dataclass
class AtomRegistry:
    """Global numbering of every inner combination created by a run.

    Atom ids are assigned in creation order: all of the left subtree's
    atoms, then the right subtree's, then the node's own new ones (for
    several inner sizes: size-ascending).  id_size and id_row point each
    id at its row in the per-size value table.
    """

    ds: tuple
    n: int
    tables: dict
    id_size: np.ndarray
    id_row: np.ndarray
    count: int

    def atom(self, gid: int) -> tuple:
        d = int(self.id_size[gid])
        return tuple(int(v) for v in self.tables[d][int(self.id_row[gid])])

    def atom_labels(self, gid: int, labels) -> tuple:
        return tuple(labels[v] for v in self.atom(gid))


@dataclass
class _NestedNodeInfo:
    inner_caps: list
    outer_caps: list
    atom_start: int
    atoms_total: int
    new_id_base: int
    new_row_base: dict  # d -> registry row where this node's new d-atoms go
    new_counts: dict  # d -> how many new d-atoms this node creates


def _outer_counts(atoms: int, k_max: int, kind: str) -> list:
    if kind == "perms":
        return [_check_count(falling_factorial(atoms, k)) for k in range(k_max + 1)]
    return [_check_count(comb(atoms, k)) for k in range(k_max + 1)]


def _plan_nested(
    plan: SplitPlan, ds: tuple, k_max: int, outer_kind: str
) -> dict:
    d_top = ds[-1]
    info: dict = {}

    def walk(node: PlanNode, atom_start: int, row_start: dict) -> None:
        size = node.size
        atoms_here = {d: comb(size, d) for d in ds}
        total = sum(atoms_here.values())
        _check_count(total)
        if node.is_leaf:
            new_counts = dict(atoms_here)
            new_id_base = atom_start
            new_row_base = dict(row_start)
            inner_caps = [_check_count(comb(size, k)) for k in range(d_top)] + [0]
        else:
            a, b = node.left.size, node.right.size
            left_atoms = {d: comb(a, d) for d in ds}
            right_atoms = {d: comb(b, d) for d in ds}
            walk(node.left, atom_start, dict(row_start))
            walk(
                node.right,
                atom_start + sum(left_atoms.values()),
                {d: row_start[d] + left_atoms[d] for d in ds},
            )
            new_counts = {
                d: atoms_here[d] - left_atoms[d] - right_atoms[d] for d in ds
            }
            new_id_base = atom_start + sum(left_atoms.values()) + sum(right_atoms.values())
            new_row_base = {d: row_start[d] + left_atoms[d] + right_atoms[d] for d in ds}
            inner_caps = [_check_count(comb(size, k)) for k in range(d_top)] + [
                new_counts[d_top]
            ]
        info[(node.lo, node.hi)] = _NestedNodeInfo(
            inner_caps=inner_caps,
            outer_caps=_outer_counts(total, k_max, outer_kind),
            atom_start=atom_start,
            atoms_total=total,
            new_id_base=new_id_base,
            new_row_base=new_row_base,
            new_counts=new_counts,
        )

    walk(plan.root, 0, {d: 0 for d in ds})
    return info


def _nested_value_walk(lo: int, hi: int, ds: tuple, k_max: int, outer_kind: str):
    """Plain-Python fused recursion over an index range.

    Returns (inner family, outer family over local atom ordinals, atom
    value rows in creation order).  Ordinals count atoms in creation
    order, matching the engine's global numbering once offset by the
    subtree's atom_start.
    """
    from .nested import _nested_seq_free_walk  # local alias, defined there

    return _nested_seq_free_walk(lo, hi, ds, k_max, outer_kind)


def _run_nested(
    gen: str,
    k_max: int,
    n: int,
    ds: tuple,
    plan: SplitPlan,
    workers: int,
    record_writes: bool,
) -> EngineResult:
    outer_kind = "perms" if gen == "npcg" else "combs"
    d_top = ds[-1]
    info = _plan_nested(plan, ds, k_max, outer_kind)
    root_info = info[(plan.root.lo, plan.root.hi)]

    stats = RunStats(write_ranges=[] if record_writes else None)
    registry = AtomRegistry(
        ds=ds,
        n=n,
        tables={d: np.zeros((comb(n, d), d), dtype=np.int64) for d in ds},
        id_size=np.zeros(root_info.atoms_total, dtype=np.int64),
        id_row=np.zeros(root_info.atoms_total, dtype=np.int64),
        count=root_info.atoms_total,
    )

    inner_tables: dict = {}
    outer_tables: dict = {}
    lock = threading.Lock()

    def get_tables(node: PlanNode):
        key = (node.lo, node.hi)
        with lock:
            if key not in inner_tables:
                ni = info[key]
                inner_tables[key] = BlockedTable(d_top, n, ni.inner_caps, stats)
                outer_tables[key] = BlockedTable(
                    k_max, ni.atoms_total, ni.outer_caps, stats
                )
            return inner_tables[key], outer_tables[key]

    def release(node: PlanNode) -> None:
        key = (node.lo, node.hi)
        with lock:
            inner_tables.pop(key, None)
            outer_tables.pop(key, None)

    def register_atoms(node_info: _NestedNodeInfo, per_d_rows: dict) -> None:
        gid = node_info.new_id_base
        for d in ds:
            rows = per_d_rows.get(d)
            m = node_info.new_counts[d]
            if m == 0:
                continue
            base = node_info.new_row_base[d]
            registry.tables[d][base : base + m] = rows
            registry.id_size[gid : gid + m] = d
            registry.id_row[gid : gid + m] = np.arange(base, base + m)
            gid += m

    def run_leaf(node: PlanNode) -> None:
        ni = info[(node.lo, node.hi)]
        inner_t, outer_t = get_tables(node)
        inner_fam, outer_fam, atoms = _nested_value_walk(
            node.lo, node.hi, ds, k_max, outer_kind
        )
        # registry rows grouped by size, creation order preserved per size
        per_d: dict = {d: [] for d in ds}
        id_sizes = []
        for atom in atoms:
            per_d[len(atom)].append(atom)
            id_sizes.append(len(atom))
        gid = ni.new_id_base
        counters = {d: ni.new_row_base[d] for d in ds}
        for atom, size_of in zip(atoms, id_sizes):
            registry.id_size[gid] = size_of
            registry.id_row[gid] = counters[size_of]
            counters[size_of] += 1
            gid += 1
        for d in ds:
            if per_d[d]:
                base = ni.new_row_base[d]
                registry.tables[d][base : base + len(per_d[d])] = np.asarray(
                    per_d[d], dtype=np.int64
                )
        for k in range(d_top + 1):
            rows = len(inner_fam[k])
            if rows and k > 0:
                inner_t.write_block(k, 0, rows)[:] = np.asarray(
                    inner_fam[k], dtype=np.int64
                )
            inner_t.set_fill(k, rows)
        inner_t.set_fill(0, 1)
        for k in range(k_max + 1):
            rows = len(outer_fam[k])
            if rows and k > 0:
                outer_t.write_block(k, 0, rows)[:] = (
                    np.asarray(outer_fam[k], dtype=np.int64) + ni.atom_start
                )
            outer_t.set_fill(k, rows)
        outer_t.set_fill(0, 1)
        if not (inner_t.exactly_full() and outer_t.exactly_full()):
            raise TableFullError(f"nested leaf [{node.lo},{node.hi}) fill mismatch")
        inner_t.mark_blank(d_top)

    def run_combine(node: PlanNode) -> None:
        ni = info[(node.lo, node.hi)]
        inner_p, outer_p = get_tables(node)
        inner_l, outer_l = get_tables(node.left)
        inner_r, outer_r = get_tables(node.right)

        _combine_combs(inner_p, inner_l, inner_r)
        # new atoms sit in one contiguous mixed block per size: after the
        # pure-left segment, before the pure-right one
        per_d_rows = {}
        for d in ds:
            m = ni.new_counts[d]
            start = inner_l.rows(d)
            per_d_rows[d] = inner_p.region(d)[start : start + m]
        register_atoms(ni, per_d_rows)

        m_total = sum(ni.new_counts.values())
        katoms = BlockedTable(
            k_max, m_total, _outer_counts(m_total, k_max, outer_kind), stats
        )
        if outer_kind == "combs":
            _fill_combs_leaf(katoms, ni.new_id_base, ni.new_id_base + m_total)
        else:
            _fill_perms_leaf(katoms, ni.new_id_base, ni.new_id_base + m_total)

        li = info[(node.left.lo, node.left.hi)]
        ri = info[(node.right.lo, node.right.hi)]
        merged = li.atoms_total + ri.atoms_total
        tmp = BlockedTable(k_max, merged, _outer_counts(merged, k_max, outer_kind), stats)
        combine = _combine_combs if outer_kind == "combs" else _combine_perms
        combine(tmp, outer_l, outer_r)
        combine(outer_p, tmp, katoms)

        if not (inner_p.exactly_full() and outer_p.exactly_full()):
            raise TableFullError(f"nested node [{node.lo},{node.hi}) fill mismatch")
        inner_p.mark_blank(d_top)
        release(node.left)
        release(node.right)

    _run_plan(plan, run_leaf, run_combine, workers)
    inner_root, outer_root = get_tables(plan.root)
    stats.configs = outer_root.total_rows()
    return EngineResult(
        stats=stats, inner=inner_root, outer=outer_root, atoms=registry
    )


_FLAT_GENS = {"kcombs": "combs", "kperms": "perms"}
_NESTED_GENS = {"nccg", "nccg-multi", "npcg"}


def run_parallel(
    gen: str,
    k_max: int,
    n: int,
    *,
    d: int | None = None,
    ds=None,
    plan: SplitPlan | None = None,
    workers: int = 1,
    record_writes: bool = False,
    threshold: int = 64,
) -> EngineResult:
    """Run one generator over the ground set {0..n-1} under a plan.

    The output is a pure function of (gen, k_max, n, d/ds, plan): the
    worker count only changes how subtree tasks are interleaved.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    if plan is None:
        plan = SplitPlan.midpoint(n, threshold)
    plan.check(n)
    if gen in _FLAT_GENS:
        return _run_flat(_FLAT_GENS[gen], k_max, n, plan, workers, record_writes)
    if gen not in _NESTED_GENS:
        raise ValueError(f"unknown generator {gen!r}")
    if gen == "nccg-multi":
        if not ds:
            raise ValueError("nccg-multi needs ds")
        sizes = tuple(ds)
    else:
        if d is None:
            raise ValueError(f"{gen} needs d")
        sizes = (d,)
    if any(s < 2 for s in sizes) or list(sizes) != sorted(set(sizes)):
        raise ValueError(f"inner sizes must be distinct, increasing, >= 2: {sizes}")
    return _run_nested(gen, k_max, n, sizes, plan, workers, record_writes)
