"""Domain model shared by every planner: task sets, contiguous task intervals,
node assignments, and migration cost/gain arithmetic.

All types are immutable after construction and all operations are pure, so
they are safe to share across threads. Task indices are 1-based externally;
intervals are half-open ``[lb, ub)`` with ``ub <= m + 1``.

Workloads and state sizes are exact integers (callers scale real rates to
integer units). The balance test ``load <= (1 + tau) * W / n`` is evaluated
in exact rational arithmetic: ``tau`` given as a float is interpreted through
its shortest decimal representation (``Fraction(str(tau))``), so ``tau=0.3``
means exactly 3/10 and feasibility never depends on binary rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence


class PlanningError(Exception):
    """Base class for all errors raised by this package."""


class InputError(PlanningError):
    """Inconsistent or malformed inputs (mismatched task universe, bad ranges)."""


class InfeasibleError(PlanningError):
    """No load-balanced partitioning exists for the requested parameters."""


class SizeLimitError(PlanningError):
    """Instance exceeds the enumeration bounds of an exact operation."""


class StaleTableError(PlanningError):
    """A pre-computed cost table does not match the current inputs."""


class ConvergenceError(PlanningError):
    """Iterative computation exhausted its iteration budget before converging."""


class UnstableScenarioError(PlanningError):
    """Simulation scenario has a task whose queue would grow without bound."""


def exact_ratio(value) -> Fraction:
    """Coerce a threshold or probability to an exact Fraction.

    Floats go through ``str()`` so the user's decimal literal is honored
    (``0.3 -> 3/10``), not its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    raise InputError(f"cannot interpret {value!r} as an exact ratio")


@dataclass(frozen=True)
class TaskSet:
    """Per-task workloads (work units per time) and state sizes (bytes)."""

    workloads: tuple[int, ...]
    state_sizes: tuple[int, ...]

    def __post_init__(self):
        if len(self.workloads) != len(self.state_sizes):
            raise InputError("workloads and state_sizes must have equal length")
        if len(self.workloads) < 1:
            raise InputError("a task set needs at least one task")
        if any(w < 0 for w in self.workloads) or any(s < 0 for s in self.state_sizes):
            raise InputError("workloads and state sizes must be non-negative")
        if sum(self.workloads) <= 0:
            raise InputError("total workload must be positive")
        object.__setattr__(self, "workloads", tuple(int(w) for w in self.workloads))
        object.__setattr__(self, "state_sizes", tuple(int(s) for s in self.state_sizes))

    @property
    def m(self) -> int:
        return len(self.workloads)

    @cached_property
    def total_work(self) -> int:
        return sum(self.workloads)

    @cached_property
    def total_state(self) -> int:
        return sum(self.state_sizes)

    @cached_property
    def work_prefix(self) -> tuple[int, ...]:
        """work_prefix[j] = total workload of tasks 1..j-1 (index 0 unused)."""
        acc = [0, 0]
        for w in self.workloads:
            acc.append(acc[-1] + w)
        return tuple(acc)

    @cached_property
    def state_prefix(self) -> tuple[int, ...]:
        acc = [0, 0]
        for s in self.state_sizes:
            acc.append(acc[-1] + s)
        return tuple(acc)

    def work(self, interval: "TaskInterval") -> int:
        return self.work_prefix[interval.ub] - self.work_prefix[interval.lb]

    def state_bytes(self, interval: "TaskInterval") -> int:
        return self.state_prefix[interval.ub] - self.state_prefix[interval.lb]


@dataclass(frozen=True, order=True)
class TaskInterval:
    """Half-open range of 1-based task indices; empty iff lb == ub."""

    lb: int
    ub: int

    def __post_init__(self):
        if not (1 <= self.lb <= self.ub):
            raise InputError(f"invalid interval [{self.lb}, {self.ub})")

    @property
    def is_empty(self) -> bool:
        return self.lb == self.ub

    def __len__(self) -> int:
        return self.ub - self.lb

    def __contains__(self, task: int) -> bool:
        return self.lb <= task < self.ub

    def tasks(self) -> range:
        return range(self.lb, self.ub)

    def overlap(self, other: "TaskInterval") -> "TaskInterval":
        lo = max(self.lb, other.lb)
        hi = min(self.ub, other.ub)
        if lo >= hi:
            return TaskInterval(lo, lo) if lo >= 1 else EMPTY_INTERVAL
        return TaskInterval(lo, hi)


EMPTY_INTERVAL = TaskInterval(1, 1)


@dataclass(frozen=True)
class Partitioning:
    """Ordered intervals that chain exactly over [1, m+1); empties are legal."""

    intervals: tuple[TaskInterval, ...]

    def __post_init__(self):
        ivs = tuple(self.intervals)
        object.__setattr__(self, "intervals", ivs)
        if not ivs:
            raise InputError("a partitioning needs at least one interval")
        if ivs[0].lb != 1:
            raise InputError("first interval must start at task 1")
        for a, b in zip(ivs, ivs[1:]):
            if a.ub != b.lb:
                raise InputError("intervals must chain: each ub equals the next lb")

    @property
    def k(self) -> int:
        return len(self.intervals)

    @property
    def m(self) -> int:
        return self.intervals[-1].ub - 1

    @property
    def boundaries(self) -> tuple[int, ...]:
        """Upper bounds of all intervals; canonical key for this partitioning."""
        return tuple(iv.ub for iv in self.intervals)

    @classmethod
    def from_boundaries(cls, m: int, interior: Sequence[int]) -> "Partitioning":
        """Build from non-decreasing interior boundaries in [1, m+1]."""
        bounds = [1, *interior, m + 1]
        return cls(tuple(TaskInterval(a, b) for a, b in zip(bounds, bounds[1:])))


@dataclass(frozen=True)
class Assignment:
    """Node-identified interval family. Non-empty intervals must form a valid
    Partitioning; a node with an empty interval holds no tasks (a free node)."""

    node_ids: tuple[str, ...]
    intervals: tuple[TaskInterval, ...]

    def __post_init__(self):
        object.__setattr__(self, "node_ids", tuple(self.node_ids))
        object.__setattr__(self, "intervals", tuple(self.intervals))
        if len(self.node_ids) != len(self.intervals):
            raise InputError("one interval per node required")
        if len(set(self.node_ids)) != len(self.node_ids):
            raise InputError("node ids must be distinct")
        occupied = sorted(iv for iv in self.intervals if not iv.is_empty)
        if not occupied:
            raise InputError("at least one node must hold tasks")
        if occupied[0].lb != 1:
            raise InputError("tasks must start at index 1")
        for a, b in zip(occupied, occupied[1:]):
            if a.ub != b.lb:
                raise InputError("non-empty intervals must tile all tasks exactly")

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def m(self) -> int:
        return max(iv.ub for iv in self.intervals) - 1

    @cached_property
    def _ordered(self) -> tuple[tuple[TaskInterval, str], ...]:
        pairs = [(iv, nid) for nid, iv in zip(self.node_ids, self.intervals) if not iv.is_empty]
        pairs.sort(key=lambda p: p[0].lb)
        return tuple(pairs)

    def interval_of(self, node_id: str) -> TaskInterval:
        try:
            return self.intervals[self.node_ids.index(node_id)]
        except ValueError:
            raise InputError(f"unknown node id {node_id!r}") from None

    def node_of_task(self, task: int) -> str:
        if not (1 <= task <= self.m):
            raise InputError(f"task {task} out of range 1..{self.m}")
        ordered = self._ordered
        lo, hi = 0, len(ordered) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if ordered[mid][0].lb <= task:
                lo = mid
            else:
                hi = mid - 1
        return ordered[lo][1]

    def task_map(self) -> dict[int, str]:
        out: dict[int, str] = {}
        for iv, nid in self._ordered:
            for j in iv.tasks():
                out[j] = nid
        return out

    def partitioning(self) -> Partitioning:
        """The partitioning formed by the non-empty intervals, in task order."""
        return Partitioning(tuple(iv for iv, _ in self._ordered))

    @classmethod
    def from_blocks(cls, node_ids: Sequence[str], sizes: Sequence[int]) -> "Assignment":
        """Consecutive blocks of the given sizes, in node order."""
        ivs = []
        lb = 1
        for size in sizes:
            ivs.append(TaskInterval(lb, lb + size))
            lb += size
        return cls(tuple(node_ids), tuple(ivs))


class NodeIdAllocator:
    """Deterministic fresh node ids n1, n2, ... skipping ids already in use."""

    def __init__(self, used: Iterable[str] = ()):
        self._used = set(used)
        self._next = 1

    def take(self) -> str:
        while f"n{self._next}" in self._used:
            self._next += 1
        nid = f"n{self._next}"
        self._used.add(nid)
        return nid


def node_cap(taskset: TaskSet, n: int, tau) -> Fraction:
    """Workload cap (1 + tau) * W / n for one node, as an exact rational."""
    if n < 1:
        raise InputError("node count must be at least 1")
    t = exact_ratio(tau)
    if t < 0:
        raise InputError("tau must be non-negative")
    return (1 + t) * Fraction(taskset.total_work, n)


def is_balanced(interval: TaskInterval, taskset: TaskSet, n: int, tau) -> bool:
    """True iff the interval's workload fits under node_cap(taskset, n, tau)."""
    return taskset.work(interval) <= node_cap(taskset, n, tau)


@dataclass(frozen=True)
class MigrationPlan:
    """A source-to-target reassignment with its byte cost and per-node gains.

    For every task exactly one of the following holds: it contributes to the
    gain of the node that kept it, or it is in moved_tasks and contributes to
    cost_bytes. Hence cost_bytes + sum(gains) == total state size.
    """

    source: Assignment
    target: Assignment
    moved_tasks: frozenset[int]
    cost_bytes: int
    gains: Mapping[str, int]

    @property
    def moved_count(self) -> int:
        return len(self.moved_tasks)

    def summary(self) -> str:
        lines = [f"cost: {self.cost_bytes} bytes, moved tasks: {self.moved_count}"]
        for nid in self.target.node_ids:
            iv = self.target.interval_of(nid)
            span = "-" if iv.is_empty else f"[{iv.lb},{iv.ub})"
            lines.append(f"  {nid}: {span} gain {self.gains.get(nid, 0)}")
        return "\n".join(lines)


def plan_between(source: Assignment, target: Assignment, taskset: TaskSet) -> MigrationPlan:
    """Assemble a MigrationPlan between two assignments over the same task set."""
    if source.m != taskset.m or target.m != taskset.m:
        raise InputError("assignments and task set cover different task universes")
    src_map = source.task_map()
    dst_map = target.task_map()
    moved = []
    gains: dict[str, int] = {}
    for j in range(1, taskset.m + 1):
        if src_map[j] == dst_map[j]:
            gains[src_map[j]] = gains.get(src_map[j], 0) + taskset.state_sizes[j - 1]
        else:
            moved.append(j)
    cost = sum(taskset.state_sizes[j - 1] for j in moved)
    return MigrationPlan(source, target, frozenset(moved), cost, gains)


def migration_cost(source: Assignment, target: Assignment, taskset: TaskSet) -> int:
    """Total state bytes whose host node changes between the two assignments."""
    return plan_between(source, target, taskset).cost_bytes


def migration_cost_map(source_map: Mapping[int, str], target_map: Mapping[int, str],
                       taskset: TaskSet) -> int:
    """migration_cost for arbitrary (possibly non-contiguous) task-to-node maps."""
    if set(source_map) != set(range(1, taskset.m + 1)) or set(target_map) != set(source_map):
        raise InputError("maps must cover tasks 1..m exactly")
    return sum(taskset.state_sizes[j - 1]
               for j in range(1, taskset.m + 1) if source_map[j] != target_map[j])


def iter_intervals(assignment: Assignment) -> Iterator[tuple[str, TaskInterval]]:
    yield from zip(assignment.node_ids, assignment.intervals)
