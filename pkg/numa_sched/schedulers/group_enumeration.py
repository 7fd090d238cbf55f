"""
Group enumeration placement: all K-thread groups against all nodes
"""
import itertools
import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from numa_sched.config import DEFAULT_ENUMERATION_BOUND
from numa_sched.core_model import AccessMatrix, Schedule, Topology
from numa_sched.exceptions import EnumerationBoundError
from numa_sched.schedulers.scheduler_base import BaseScheduler


class GroupCandidates(NamedTuple):
    """Every (group, node) pair with the group's summed accesses to the node"""
    groups: np.ndarray  # G x K thread indices, lexicographic order
    sums: np.ndarray    # G x L

    @property
    def size(self) -> int:
        return int(self.sums.size)


@lru_cache(maxsize=32)
def _combinations(threads: int, group_size: int) -> np.ndarray:
    groups = np.array(list(itertools.combinations(range(threads), group_size)), dtype=np.intp)
    groups = groups.reshape(-1, group_size)
    groups.setflags(write=False)
    return groups


def candidate_count(threads: int, group_size: int, nodes: int) -> int:
    return math.comb(threads, group_size) * nodes


def group_candidates(matrix: AccessMatrix, group_size: int,
                     bound: int = DEFAULT_ENUMERATION_BOUND) -> GroupCandidates:
    """
    Enumerate all C(N, group_size) groups and their access sums per node

    Raises:
        EnumerationBoundError: C(N, group_size) * L exceeds bound
    """
    size = candidate_count(matrix.threads, group_size, matrix.nodes)
    if size > bound:
        raise EnumerationBoundError("group enumeration", size, bound)
    groups = _combinations(matrix.threads, group_size)
    sums = matrix.counts[groups].sum(axis=1)
    return GroupCandidates(groups=groups, sums=sums)


def algo3_group_enumeration(matrix: AccessMatrix, topology: Topology,
                            bound: int = DEFAULT_ENUMERATION_BOUND) -> Schedule:
    """
    Sort all (K-thread group, node) pairs by summed count and scan from the
    top, giving a group to a node when all its threads and the node are free.
    Each node receives at most one group.

    Ties fall to the lexicographically lower group, then the lower node.
    When N is not a multiple of K, the N mod K leftover threads form one
    final group on the free node they access most.
    """
    matrix.check(topology)
    k = topology.cores_per_node
    full_groups = topology.threads // k
    placement = np.full(topology.threads, -1, dtype=np.intp)
    node_free = np.ones(topology.nodes, dtype=bool)

    if full_groups:
        candidates = group_candidates(matrix, k, bound)
        group_count, nodes = candidates.sums.shape
        flat_sums = candidates.sums.ravel()
        # row-major order is (group rank, node), so a stable sort keeps the tie rule
        order = np.argsort(-flat_sums, kind="mergesort")
        group_idx, node_idx = np.divmod(order, nodes)
        members = candidates.groups[group_idx]

        placed = np.zeros(topology.threads, dtype=bool)
        start = 0
        for _ in range(full_groups):
            open_ = node_free[node_idx[start:]] & ~placed[members[start:]].any(axis=1)
            hit = int(np.argmax(open_))
            if not open_[hit]:
                break
            pos = start + hit
            node = int(node_idx[pos])
            group = members[pos]
            placement[group] = node
            placed[group] = True
            node_free[node] = False
            start = pos + 1

    leftover = np.flatnonzero(placement == -1)
    if leftover.size:
        totals = matrix.counts[leftover].sum(axis=0)
        totals = np.where(node_free, totals, -1)
        placement[leftover] = int(np.argmax(totals))
    return Schedule(tuple(placement.tolist()), topology)


class GroupEnumerationScheduler(BaseScheduler):
    """
    Greedy over whole groups.

    Enumerates C(N, K) * L candidates per quantum, so it is bounded by the
    enumeration limit.
    """

    def __init__(self, bound: int = DEFAULT_ENUMERATION_BOUND):
        super().__init__(
            identifier="algo3",
            name="Algo 3",
            description="Place whole K-thread groups by descending summed access count",
        )
        self.bound = bound

    def schedule(self, matrix, topology, latency=None):
        return algo3_group_enumeration(matrix, topology, self.bound)
