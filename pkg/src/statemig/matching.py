"""Node-to-interval assignment for a fixed target partitioning.

Both the old intervals and the new ones are ordered, disjoint families, so an
optimal matching that never crosses always exists (swapping two crossing
assignments can only raise the total retained state). The production matcher
is therefore an O(n * n') dynamic program over non-crossing matchings; the
test suite checks it against a dense assignment-problem solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import (
    Assignment,
    InputError,
    MigrationPlan,
    NodeIdAllocator,
    Partitioning,
    TaskInterval,
    TaskSet,
    plan_between,
)


@dataclass(frozen=True)
class OverlapGainMatrix:
    """entry[i][k] = bytes node i keeps if it receives target interval k."""

    node_ids: tuple[str, ...]
    entries: tuple[tuple[int, ...], ...]

    def __getitem__(self, idx):
        i, k = idx
        return self.entries[i][k]


def _overlap_bytes(a: TaskInterval, b: TaskInterval, taskset: TaskSet) -> int:
    lo = max(a.lb, b.lb)
    hi = min(a.ub, b.ub)
    if lo >= hi:
        return 0
    return taskset.state_prefix[hi] - taskset.state_prefix[lo]


def overlap_gains(source: Assignment, target: Partitioning, taskset: TaskSet) -> OverlapGainMatrix:
    """Exact per-pair retained bytes, via state prefix sums."""
    if source.m != taskset.m or target.m != taskset.m:
        raise InputError("source, target and task set cover different tasks")
    rows = tuple(
        tuple(_overlap_bytes(iv, tgt, taskset) for tgt in target.intervals)
        for iv in source.intervals
    )
    return OverlapGainMatrix(source.node_ids, rows)


def max_family_gain(source_intervals: Sequence[TaskInterval],
                    target_intervals: Sequence[TaskInterval],
                    taskset: TaskSet) -> int:
    """Maximum retained bytes matching one ordered interval family to another.

    Node labels are irrelevant here, which is what makes sequence and
    transition-aware planning memoizable on the partitioning alone.
    """
    src = [iv for iv in sorted(source_intervals, key=lambda v: (v.lb, v.ub)) if not iv.is_empty]
    dst = [iv for iv in target_intervals if not iv.is_empty]
    n, k = len(src), len(dst)
    prev = [0] * (k + 1)
    for i in range(1, n + 1):
        cur = [0] * (k + 1)
        si = src[i - 1]
        for j in range(1, k + 1):
            best = prev[j] if prev[j] > cur[j - 1] else cur[j - 1]
            diag = prev[j - 1] + _overlap_bytes(si, dst[j - 1], taskset)
            cur[j] = diag if diag > best else best
        prev = cur
    return prev[k]


def family_migration_cost(source_intervals: Sequence[TaskInterval],
                          target_intervals: Sequence[TaskInterval],
                          taskset: TaskSet) -> int:
    """Label-free optimal migration cost between two interval families."""
    return taskset.total_state - max_family_gain(source_intervals, target_intervals, taskset)


def optimal_assignment(source: Assignment, target: Partitioning, taskset: TaskSet,
                       alloc: NodeIdAllocator | None = None) -> MigrationPlan:
    """Assign target intervals to nodes so retained state is maximal.

    Surviving nodes keep their identities. After the gain-maximizing matching,
    free nodes receive the remaining intervals in ascending order; intervals
    still left over go to fresh node ids, and surplus nodes end up with empty
    intervals (they leave the operator).
    """
    if source.m != taskset.m or target.m != taskset.m:
        raise InputError("source, target and task set cover different tasks")

    order = sorted(range(source.n),
                   key=lambda i: (source.intervals[i].is_empty,
                                  source.intervals[i].lb,
                                  source.intervals[i].ub,
                                  source.node_ids[i]))
    src_ivs = [source.intervals[i] for i in order]
    n, k = len(src_ivs), target.k

    gain = [[_overlap_bytes(src_ivs[i], target.intervals[j], taskset)
             for j in range(k)] for i in range(n)]
    dp = [[0] * (k + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        for j in range(1, k + 1):
            best = max(dp[i - 1][j], dp[i][j - 1])
            diag = dp[i - 1][j - 1] + gain[i - 1][j - 1]
            dp[i][j] = diag if diag > best else best

    # Backtrack; only pairs with positive gain become real matches, so nodes
    # that keep nothing stay free and are placed by index below.
    matched: dict[int, int] = {}
    i, j = n, k
    while i > 0 and j > 0:
        if dp[i][j] == dp[i - 1][j]:
            i -= 1
        elif dp[i][j] == dp[i][j - 1]:
            j -= 1
        else:
            if gain[i - 1][j - 1] > 0:
                matched[j - 1] = i - 1
            i -= 1
            j -= 1

    free_nodes = [i for i in range(n) if i not in matched.values()]
    free_slots = [j for j in range(k) if j not in matched]
    for slot, node in zip(free_slots, free_nodes):
        matched[slot] = node

    alloc = alloc or NodeIdAllocator(source.node_ids)
    ids: list[str] = list(source.node_ids)
    empty = TaskInterval(taskset.m + 1, taskset.m + 1)
    new_ivs: dict[str, TaskInterval] = {nid: empty for nid in ids}
    for j in range(k):
        if j in matched:
            nid = source.node_ids[order[matched[j]]]
        else:
            nid = alloc.take()
            ids.append(nid)
        new_ivs[nid] = target.intervals[j]
    target_assignment = Assignment(tuple(ids), tuple(new_ivs[nid] for nid in ids))
    return plan_between(source, target_assignment, taskset)
