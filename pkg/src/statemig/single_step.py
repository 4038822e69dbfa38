"""Optimal single-step migration planning.

Given a source assignment, a target node count n' and a balance threshold
tau, find the target assignment minimizing state bytes moved, subject to
every target interval's workload staying under ``(1 + tau) * W / n'``.

Three implementations of the same contract live here:

* :func:`plan_single_step` is the production planner. It runs a suffix
  dynamic program in O(m^2 * n') time and O(m * n') space, compiled with
  numba. States are ``(k, a, col)``: the best total gain partitioning tasks
  ``[a, m+1)`` into ``k`` intervals using the source nodes from a canonical
  left boundary onward. A split peels off the leftmost block that gives some
  node a positive gain: the block ``[lb, x)`` is the widest balanced window
  ending at ``x``, the tasks before it are packed greedily into the minimum
  number of zero-gain intervals, and only two gaining nodes per ``x`` need
  to be considered (the node holding task x-1, and the best node whose old
  interval ended at or before x, maintained as a window maximum).
* :func:`plan_single_step_basic` is the straightforward cubic dynamic
  program over all sub-ranges of tasks and nodes. Slow but simple; it is
  kept as an independently-coded cross-check.
* :func:`brute_force_plan` enumerates every composition of the tasks into
  n' (possibly empty) intervals and matches each against the source nodes.

All three must agree on the optimal gain; the test suite enforces this, and
also runs :func:`plan_single_step_reference` with each candidate-pruning
rule individually disabled to validate the prunings one by one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
from numba import njit

from .core import (
    Assignment,
    InfeasibleError,
    InputError,
    MigrationPlan,
    NodeIdAllocator,
    Partitioning,
    SizeLimitError,
    TaskInterval,
    TaskSet,
    node_cap,
    plan_between,
)
from .matching import optimal_assignment

_STATE_LIMIT = 1 << 60  # total state bytes must stay well inside int64


def normalize_nodes(source: Assignment, n_prime: int,
                    alloc: NodeIdAllocator | None = None) -> Assignment:
    """Reorder nodes ascending by their current interval; when scaling out,
    append fresh nodes holding empty intervals so the result always has
    max(n, n') nodes. Existing empty intervals sort after occupied ones."""
    if n_prime < 1:
        raise InputError("target node count must be at least 1")
    m = source.m
    order = sorted(range(source.n),
                   key=lambda i: (source.intervals[i].is_empty,
                                  source.intervals[i].lb,
                                  source.intervals[i].ub,
                                  source.node_ids[i]))
    ids = [source.node_ids[i] for i in order]
    empty = TaskInterval(m + 1, m + 1)
    ivs = [source.intervals[i] if not source.intervals[i].is_empty else empty
           for i in order]
    alloc = alloc or NodeIdAllocator(ids)
    while len(ids) < n_prime:
        ids.append(alloc.take())
        ivs.append(empty)
    return Assignment(tuple(ids), tuple(ivs))


def _window_lower_bounds(taskset: TaskSet, cap: Fraction) -> list[int]:
    """L[x] = smallest lb with [lb, x) balanced; L[x] == x when task x-1 alone
    exceeds the cap. Monotone non-decreasing; computed exactly."""
    m = taskset.m
    lowers = [0, 1] + [0] * m
    lb = 1
    wsum = 0
    for x in range(2, m + 2):
        wsum += taskset.workloads[x - 2]
        while wsum > cap and lb < x:
            wsum -= taskset.workloads[lb - 1]
            lb += 1
        lowers[x] = lb
    return lowers


class BalancedWindow:
    """Bookkeeping for the widest balanced block ending at a given boundary.

    ``widest_block(alpha, x)`` returns the longest interval ``[lb, x)`` with
    ``lb >= alpha`` that satisfies load balancing; ``block_gain`` additionally
    intersects it with a node's old interval. Thanks to the precomputed
    monotone lower bounds each query is O(1).
    """

    def __init__(self, taskset: TaskSet, n_prime: int, tau):
        self.taskset = taskset
        self.cap = node_cap(taskset, n_prime, tau)
        self.lowers = _window_lower_bounds(taskset, self.cap)

    def widest_block(self, alpha: int, x: int) -> TaskInterval:
        lb = max(self.lowers[x], alpha)
        if lb >= x:
            raise InfeasibleError(f"no balanced block ends at {x}")
        return TaskInterval(lb, x)

    def block_gain(self, alpha: int, x: int, node_interval: TaskInterval) -> int:
        block = self.widest_block(alpha, x)
        lo = max(block.lb, node_interval.lb)
        hi = min(block.ub, node_interval.ub)
        if lo >= hi:
            return 0
        pre = self.taskset.state_prefix
        return pre[hi] - pre[lo]


# ---------------------------------------------------------------------------
# numba kernel


@njit(cache=True)
def _build_range_max(vals, n):
    levels = 1
    while (1 << levels) <= n:
        levels += 1
    tval = np.zeros((levels, n + 2), dtype=np.int64)
    tidx = np.zeros((levels, n + 2), dtype=np.int64)
    for i in range(1, n + 1):
        tval[0, i] = vals[i]
        tidx[0, i] = i
    j = 1
    while (1 << j) <= n:
        half = 1 << (j - 1)
        for i in range(1, n - (1 << j) + 2):
            v1 = tval[j - 1, i]
            v2 = tval[j - 1, i + half]
            if v2 > v1:
                tval[j, i] = v2
                tidx[j, i] = tidx[j - 1, i + half]
            else:
                tval[j, i] = v1
                tidx[j, i] = tidx[j - 1, i]
        j += 1
    return tval, tidx


@njit(cache=True)
def _range_max(tval, tidx, lo, hi):
    # max value on [lo, hi], smallest index among ties
    span = hi - lo + 1
    k = 0
    while (1 << (k + 1)) <= span:
        k += 1
    v1 = tval[k, lo]
    i1 = tidx[k, lo]
    lo2 = hi - (1 << k) + 1
    v2 = tval[k, lo2]
    i2 = tidx[k, lo2]
    if v2 > v1 or (v2 == v1 and i2 < i1):
        return v2, i2
    return v1, i1


@njit(cache=True)
def _ssm_kernel(m, n, kmax, L, lbv, ubv, nof, spre, szv):
    """Suffix DP. G[k, a, c] = best gain for tasks [a, m+1) split into k
    intervals, gaining nodes restricted to indices >= nof[a] + c. -1 means
    infeasible. B* arrays hold the winning split for reconstruction."""
    NEG = np.int64(-1)
    INF = np.int64(1) << 60
    G = np.full((kmax + 1, m + 2, 2), NEG, dtype=np.int64)
    BX = np.zeros((kmax + 1, m + 2, 2), dtype=np.int64)
    BY = np.zeros((kmax + 1, m + 2, 2), dtype=np.int64)
    BK = np.zeros((kmax + 1, m + 2, 2), dtype=np.int64)
    BC = np.zeros((kmax + 1, m + 2, 2), dtype=np.int64)
    BZ = np.zeros((kmax + 1, m + 2, 2), dtype=np.int64)
    tval, tidx = _build_range_max(szv, n)
    for k in range(kmax + 1):
        G[k, m + 1, 0] = 0
        G[k, m + 1, 1] = 0
    nm = np.zeros(m + 2, dtype=np.int64)

    for a in range(m, 0, -1):
        # nm[x] = min balanced intervals covering [a, x)
        nm[a] = 0
        for x in range(a + 1, m + 2):
            l = L[x]
            if l < a:
                l = a
            if l == x or nm[l] >= INF:
                nm[x] = INF
            else:
                nm[x] = nm[l] + 1
        na = nof[a]
        suffix_balanced = L[m + 1] <= a
        for c in range(2):
            gam = na + c

            # k = 1: assign the whole suffix to the best reachable node
            best1 = NEG
            bz = np.int64(0)
            if suffix_balanced:
                best1 = np.int64(0)
                if c == 0:
                    lo = lbv[na]
                    if lo < a:
                        lo = a
                    pv = spre[ubv[na]] - spre[lo]
                    if pv > 0:
                        best1 = pv
                        bz = na
                zlo = na + 1
                if zlo < gam:
                    zlo = gam
                if zlo <= n:
                    v, idx = _range_max(tval, tidx, zlo, n)
                    if v > best1:
                        best1 = v
                        bz = idx
            G[1, a, c] = best1
            BZ[1, a, c] = bz

            for k in range(2, kmax + 1):
                best = NEG
                bx = np.int64(0)
                by = np.int64(0)
                bk = np.int64(0)
                bc = np.int64(0)
                for x in range(a + 1, m + 2):
                    l = L[x]
                    if l < a:
                        l = a
                    if l == x:
                        break
                    km = nm[x]
                    if km >= INF:
                        break
                    rem = k - km
                    if rem < 0:
                        break
                    if x <= m and rem == 0:
                        continue
                    if x == m + 1:
                        nx = n + 1
                    else:
                        nx = nof[x]

                    curv = NEG
                    cury = np.int64(0)
                    curc = np.int64(0)

                    # candidate: the node holding task x-1
                    h = nof[x - 1]
                    if h >= gam:
                        cA = h + 1 - nx
                        if cA < 0:
                            cA = 0
                        if x == m + 1:
                            g2 = np.int64(0)
                        else:
                            g2 = G[rem, x, cA]
                        if g2 >= 0:
                            lo = lbv[h]
                            if lo < l:
                                lo = l
                            hi = ubv[h]
                            if hi > x:
                                hi = x
                            gA = spre[hi] - spre[lo]
                            curv = gA + g2
                            cury = h if gA > 0 else np.int64(0)
                            curc = cA

                    # candidate: best node whose interval ended by x (or none);
                    # the child keeps gam when the block is free, so clamp the
                    # stored column up if gam already passed nof[x]
                    cB = np.int64(0) if gam <= nx else np.int64(1)
                    if x == m + 1:
                        g2b = np.int64(0)
                    else:
                        g2b = G[rem, x, cB]
                    if g2b >= 0:
                        gB = np.int64(0)
                        yB = np.int64(0)
                        zhi = nx - 1
                        if zhi >= gam:
                            zstr = nof[l]
                            if gam <= zstr and zstr <= zhi:
                                lo = lbv[zstr]
                                if lo < l:
                                    lo = l
                                hi = ubv[zstr]
                                if hi > x:
                                    hi = x
                                if hi > lo:
                                    pv = spre[hi] - spre[lo]
                                    if pv > gB:
                                        gB = pv
                                        yB = zstr
                            zlo = zstr + 1
                            if zlo < gam:
                                zlo = gam
                            if zlo <= zhi:
                                v, idx = _range_max(tval, tidx, zlo, zhi)
                                if v > gB:
                                    gB = v
                                    yB = idx
                        if gB == 0:
                            yB = np.int64(0)
                        vB = gB + g2b
                        yo_b = yB if yB > 0 else n + 2
                        yo_a = cury if cury > 0 else n + 2
                        if curv < 0 or vB > curv or (vB == curv and yo_b < yo_a):
                            curv = vB
                            cury = yB
                            curc = cB

                    if curv > best:
                        best = curv
                        bx = np.int64(x)
                        by = cury
                        bk = km
                        bc = curc
                G[k, a, c] = best
                BX[k, a, c] = bx
                BY[k, a, c] = by
                BK[k, a, c] = bk
                BC[k, a, c] = bc
    return G, BX, BY, BK, BC, BZ


# ---------------------------------------------------------------------------
# shared scaffolding


@dataclass
class _Instance:
    taskset: TaskSet
    source: Assignment
    norm: Assignment
    chain: list[TaskInterval]   # non-empty intervals, ascending
    n_prime: int
    window: BalancedWindow
    nof: list[int]              # chain node (1-based) holding each task

    @property
    def m(self) -> int:
        return self.taskset.m

    @property
    def n_chain(self) -> int:
        return len(self.chain)


def _build_instance(taskset: TaskSet, source: Assignment, n_prime: int, tau) -> _Instance:
    if source.m != taskset.m:
        raise InputError("source assignment and task set cover different tasks")
    if taskset.total_state >= _STATE_LIMIT:
        raise InputError("total state size too large for exact planning")
    norm = normalize_nodes(source, n_prime)
    chain = [iv for iv in norm.intervals if not iv.is_empty]
    nof = [0] * (taskset.m + 2)
    for idx, iv in enumerate(chain, start=1):
        for j in iv.tasks():
            nof[j] = idx
    nof[taskset.m + 1] = len(chain) + 1
    window = BalancedWindow(taskset, n_prime, tau)
    return _Instance(taskset, source, norm, chain, n_prime, window, nof)


def _greedy_pieces(inst: _Instance, a: int, ub: int) -> list[tuple[int, int]]:
    """Maximal balanced pieces covering [a, ub), left to right. The piece
    count equals the minimum possible, so reconstruction stays optimal."""
    cap = inst.window.cap
    w = inst.taskset.workloads
    pieces = []
    st = a
    while st < ub:
        wsum = 0
        e = st
        while e < ub and wsum + w[e - 1] <= cap:
            wsum += w[e - 1]
            e += 1
        if e == st:
            raise InfeasibleError("task exceeds the per-node cap")
        pieces.append((st, e))
        st = e
    return pieces


def _assemble_plan(inst: _Instance, blocks: list[tuple[int, int, int]]) -> MigrationPlan:
    """Turn ordered (lb, ub, chain-node-or-0) blocks into a MigrationPlan.
    Free blocks go to free nodes in ascending index order."""
    m = inst.m
    ids = list(inst.norm.node_ids)
    empty = TaskInterval(m + 1, m + 1)
    ivs = {nid: empty for nid in ids}
    assigned: set[int] = set()
    free_blocks: list[TaskInterval] = []
    for lo, hi, node in blocks:
        if node > 0:
            ivs[ids[node - 1]] = TaskInterval(lo, hi)
            assigned.add(node - 1)
        else:
            free_blocks.append(TaskInterval(lo, hi))
    free_nodes = [i for i in range(len(ids)) if i not in assigned]
    for iv, i in zip(free_blocks, free_nodes):
        ivs[ids[i]] = iv
    if len(free_blocks) > len(free_nodes):
        alloc = NodeIdAllocator(ids)
        for iv in free_blocks[len(free_nodes):]:
            nid = alloc.take()
            ids.append(nid)
            ivs[nid] = iv
    target = Assignment(tuple(ids), tuple(ivs[nid] for nid in ids))
    return plan_between(inst.source, target, inst.taskset)


def _min_cover_counts(inst: _Instance, a: int) -> list[int]:
    """nm[x] = min balanced intervals covering [a, x); large sentinel if none."""
    m = inst.m
    lowers = inst.window.lowers
    INF = 1 << 60
    nm = [INF] * (m + 2)
    nm[a] = 0
    for x in range(a + 1, m + 2):
        l = max(lowers[x], a)
        if l == x or nm[l] >= INF:
            nm[x] = INF
        else:
            nm[x] = nm[l] + 1
    return nm


# ---------------------------------------------------------------------------
# production planner


def plan_single_step(taskset: TaskSet, source: Assignment, n_prime: int, tau) -> MigrationPlan:
    """Byte-minimal single-step migration plan (exact).

    Raises InfeasibleError when no partitioning into n_prime intervals can
    satisfy the balance cap (for example a single task heavier than the cap).
    """
    inst = _build_instance(taskset, source, n_prime, tau)
    m, n = inst.m, inst.n_chain
    L = np.zeros(m + 2, dtype=np.int64)
    for x in range(1, m + 2):
        L[x] = inst.window.lowers[x]
    lbv = np.zeros(n + 2, dtype=np.int64)
    ubv = np.zeros(n + 2, dtype=np.int64)
    szv = np.zeros(n + 2, dtype=np.int64)
    pre = inst.taskset.state_prefix
    for i, iv in enumerate(inst.chain, start=1):
        lbv[i] = iv.lb
        ubv[i] = iv.ub
        szv[i] = pre[iv.ub] - pre[iv.lb]
    nof = np.zeros(m + 2, dtype=np.int64)
    for j in range(1, m + 2):
        nof[j] = inst.nof[j]
    spre = np.zeros(m + 2, dtype=np.int64)
    for j in range(1, m + 2):
        spre[j] = pre[j]

    G, BX, BY, BK, BC, BZ = _ssm_kernel(m, n, n_prime, L, lbv, ubv, nof, spre, szv)
    if G[n_prime, 1, 0] < 0:
        raise InfeasibleError(
            f"no balanced partitioning of {m} tasks into {n_prime} intervals at tau={tau}")

    blocks: list[tuple[int, int, int]] = []
    k, a, c = n_prime, 1, 0
    while True:
        if a == m + 1:
            blocks.extend((m + 1, m + 1, 0) for _ in range(k))
            break
        if k == 1:
            blocks.append((a, m + 1, int(BZ[1, a, c])))
            break
        x = int(BX[k, a, c])
        y = int(BY[k, a, c])
        km = int(BK[k, a, c])
        cc = int(BC[k, a, c])
        l = max(int(L[x]), a)
        for st, e in _greedy_pieces(inst, a, l):
            blocks.append((st, e, 0))
        blocks.append((l, x, y))
        k -= km
        a = x
        c = cc
        if k == 0:
            break
    return _assemble_plan(inst, blocks)


# ---------------------------------------------------------------------------
# pure-python reference with pruning ablations


def plan_single_step_reference(taskset: TaskSet, source: Assignment, n_prime: int, tau,
                               all_y: bool = False, all_gamma: bool = False,
                               all_nl: bool = False) -> MigrationPlan:
    """Same algorithm as plan_single_step, uncompiled, with switches that
    disable each search-space pruning individually (enumerate every gaining
    node per split, store every node left boundary, or try every feasible
    interval count for the left part). With all switches off this mirrors the
    production planner exactly; switching any of them on must not change the
    optimal gain. Intended for validation on small instances."""
    inst = _build_instance(taskset, source, n_prime, tau)
    m, n = inst.m, inst.n_chain
    lowers = inst.window.lowers
    pre = inst.taskset.state_prefix
    chain = inst.chain
    nof = inst.nof
    sz = [0] * (n + 2)
    for i, iv in enumerate(chain, start=1):
        sz[i] = pre[iv.ub] - pre[iv.lb]

    def ov(node: int, lo: int, hi: int) -> int:
        iv = chain[node - 1]
        a = max(lo, iv.lb)
        b = min(hi, iv.ub)
        return pre[b] - pre[a] if b > a else 0

    def gamma_columns(a: int) -> list[int]:
        if all_gamma:
            return list(range(1, n + 2))
        return [nof[a], nof[a] + 1]

    G: dict[tuple[int, int, int], int] = {}
    B: dict[tuple[int, int, int], tuple] = {}

    def lookup(rem: int, x: int, want_gamma: int):
        if x == m + 1:
            return (0 if rem >= 0 else None), want_gamma
        if all_gamma:
            col = want_gamma
        else:
            col = nof[x] if want_gamma <= nof[x] else nof[x] + 1
        v = G.get((rem, x, col))
        return (v if v is not None and v >= 0 else None), col

    for a in range(m + 1, 0, -1):
        if a == m + 1:
            continue
        nm = _min_cover_counts(inst, a)
        suffix_balanced = lowers[m + 1] <= a
        for gam in gamma_columns(a):
            # k = 1
            best1 = None
            bz = 0
            if suffix_balanced:
                best1 = 0
                for z in range(gam, n + 1):
                    v = ov(z, a, m + 1)
                    if v > best1:
                        best1 = v
                        bz = z
            G[(1, a, gam)] = best1 if best1 is not None else -1
            B[(1, a, gam)] = ("leaf", bz)
            for k in range(2, n_prime + 1):
                best = -1
                rec = None
                for x in range(a + 1, m + 2):
                    l = max(lowers[x], a)
                    if l == x or nm[x] >= (1 << 60):
                        break
                    k_lo = nm[x]
                    k_hi = k if x == m + 1 else k - 1
                    if not all_nl:
                        k_hi = min(k_hi, k_lo)
                    for km in range(k_lo, k_hi + 1):
                        rem = k - km
                        if all_y:
                            cands = [(ov(y, l, x), y) for y in range(gam, n + 1)]
                            cands.append((0, 0))
                        else:
                            cands = []
                            h = nof[x - 1]
                            if h >= gam:
                                cands.append((ov(h, l, x), h))
                            gB, yB = 0, 0
                            zhi = (n + 1 if x == m + 1 else nof[x]) - 1
                            for z in range(gam, zhi + 1):
                                v = ov(z, l, x)
                                if v > gB:
                                    gB, yB = v, z
                            cands.append((gB, yB))
                        for gain, y in cands:
                            if gain == 0:
                                y = 0
                            # a free block consumes no node, so the child keeps gam
                            g2, col = lookup(rem, x, y + 1 if y else gam)
                            if g2 is None:
                                continue
                            v = gain + g2
                            yo = y if y > 0 else n + 2
                            if v > best or (v == best and rec is not None
                                            and (x, yo) < (rec[0], rec[1] if rec[1] > 0 else n + 2)):
                                best = v
                                rec = (x, y, km, col)
                G[(k, a, gam)] = best
                B[(k, a, gam)] = ("split", rec)

    root = (n_prime, 1, 1)
    if G.get(root, -1) < 0:
        raise InfeasibleError(
            f"no balanced partitioning of {m} tasks into {n_prime} intervals at tau={tau}")

    blocks: list[tuple[int, int, int]] = []
    k, a, gam = root
    while True:
        if a == m + 1:
            blocks.extend((m + 1, m + 1, 0) for _ in range(k))
            break
        kind, data = B[(k, a, gam)]
        if kind == "leaf":
            blocks.append((a, m + 1, data))
            break
        x, y, km, col = data
        l = max(lowers[x], a)
        pieces = _greedy_pieces(inst, a, l)
        blocks.extend((st, e, 0) for st, e in pieces)
        blocks.extend((l, l, 0) for _ in range(km - 1 - len(pieces)))
        blocks.append((l, x, y))
        k -= km
        a = x
        gam = col
        if k == 0:
            break
    return _assemble_plan(inst, blocks)


# ---------------------------------------------------------------------------
# basic cubic dynamic program


def plan_single_step_basic(taskset: TaskSet, source: Assignment, n_prime: int, tau) -> MigrationPlan:
    """The unoptimized dynamic program over all task and node sub-ranges.

    Enumerates every split point, node boundary and left interval count.
    Exponentially simpler to audit than the production planner; only
    reasonable for small instances.
    """
    inst = _build_instance(taskset, source, n_prime, tau)
    m, n = inst.m, inst.n_chain
    cap = inst.window.cap
    pre = inst.taskset.state_prefix
    wpre = inst.taskset.work_prefix
    chain = inst.chain

    def balanced(a: int, b: int) -> bool:
        return wpre[b] - wpre[a] <= cap

    def ov(node: int, lo: int, hi: int) -> int:
        iv = chain[node - 1]
        a0 = max(lo, iv.lb)
        b0 = min(hi, iv.ub)
        return pre[b0] - pre[a0] if b0 > a0 else 0

    G: dict[tuple, int] = {}
    B: dict[tuple, tuple] = {}
    # key: (k, a, b, gam, dl) with tasks [a, b), nodes [gam, dl)
    spans = [(a, b) for a in range(1, m + 1) for b in range(a + 1, m + 2)]
    nspans = [(g, d) for g in range(1, n + 2) for d in range(g, n + 2)]
    for k in range(1, n_prime + 1):
        for a, b in spans:
            for gam, dl in nspans:
                key = (k, a, b, gam, dl)
                if k == 1:
                    if not balanced(a, b):
                        G[key] = -1
                        continue
                    best, bz = 0, 0
                    for z in range(gam, dl):
                        v = ov(z, a, b)
                        if v > best:
                            best, bz = v, z
                    G[key] = best
                    B[key] = ("leaf", bz)
                else:
                    best, rec = -1, None
                    for x in range(a + 1, b):
                        for q in range(gam, dl + 1):
                            for nl in range(1, k):
                                g1 = G.get((nl, a, x, gam, q), -1)
                                if g1 < 0:
                                    continue
                                g2 = G.get((k - nl, x, b, q, dl), -1)
                                if g2 < 0:
                                    continue
                                if g1 + g2 > best:
                                    best = g1 + g2
                                    rec = (x, q, nl)
                    G[key] = best
                    B[key] = ("split", rec)

    # Empty intervals contribute nothing, so the answer with n' intervals is
    # the best over using any k <= n' non-empty ones, padded with empties.
    best_k, best_gain = 0, -1
    for k in range(1, n_prime + 1):
        v = G.get((k, 1, m + 1, 1, n + 1), -1)
        if v > best_gain:
            best_gain, best_k = v, k
    if best_gain < 0:
        raise InfeasibleError(
            f"no balanced partitioning of {m} tasks into {n_prime} intervals at tau={tau}")

    blocks: list[tuple[int, int, int]] = []

    def rebuild(k: int, a: int, b: int, gam: int, dl: int):
        kind, data = B[(k, a, b, gam, dl)]
        if kind == "leaf":
            blocks.append((a, b, data))
            return
        x, q, nl = data
        rebuild(nl, a, x, gam, q)
        rebuild(k - nl, x, b, q, dl)

    rebuild(best_k, 1, m + 1, 1, n + 1)
    blocks.extend((m + 1, m + 1, 0) for _ in range(n_prime - best_k))
    return _assemble_plan(inst, blocks)


# ---------------------------------------------------------------------------
# exhaustive oracle


def enumerate_target_partitionings(m: int, k: int):
    """All partitionings of [1, m+1) into exactly k possibly-empty intervals,
    in lexicographic order of their boundary vectors."""
    for interior in combinations_with_replacement(range(1, m + 2), k - 1):
        yield Partitioning.from_boundaries(m, interior)


def brute_force_plan(taskset: TaskSet, source: Assignment, n_prime: int, tau,
                     max_tasks: int = 14, max_nodes: int = 5) -> MigrationPlan:
    """Exhaustive single-step optimum: every composition of the tasks into
    n' intervals, each matched optimally against the source nodes. Refuses
    instances beyond small enumeration bounds."""
    if taskset.m > max_tasks or source.n > max_nodes or n_prime > max_nodes:
        raise SizeLimitError(
            f"oracle limited to m<={max_tasks}, nodes<={max_nodes}")
    if source.m != taskset.m:
        raise InputError("source assignment and task set cover different tasks")
    cap = node_cap(taskset, n_prime, tau)
    wpre = taskset.work_prefix
    best: MigrationPlan | None = None
    for part in enumerate_target_partitionings(taskset.m, n_prime):
        if any(wpre[iv.ub] - wpre[iv.lb] > cap for iv in part.intervals):
            continue
        plan = optimal_assignment(source, part, taskset)
        if best is None or plan.cost_bytes < best.cost_bytes:
            best = plan
    if best is None:
        raise InfeasibleError(
            f"no balanced partitioning of {taskset.m} tasks into {n_prime} intervals at tau={tau}")
    return best
