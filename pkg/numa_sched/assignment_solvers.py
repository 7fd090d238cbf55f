"""
Exact solvers for capacitated thread placement.

Capacity is handled by slot replication: node n becomes cores_per_node
identical columns, so the capacitated problem becomes a square assignment
problem. Threads beyond N are zero-cost padding rows.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from numa_sched.config import DEFAULT_ORACLE_BOUND
from numa_sched.core_model import (AccessMatrix, LatencyModel, Schedule, Topology,
                                   placement_costs, schedule_cost)
from numa_sched.exceptions import (EnumerationBoundError, InvalidInputError,
                                   OracleMismatchError)

logger = logging.getLogger(__name__)

# Larger than any reachable reduced cost: per-row costs stay below 2**50
_INF = np.int64(2 ** 62)

# Placement tables up to this many rows are kept between oracle calls
_PLACEMENT_CACHE_ROWS = 200_000
_PLACEMENT_CHUNK = 65_536


@dataclass(frozen=True)
class SlotCostMatrix:
    """Square slot-expanded cost matrix; slot s belongs to node s // cores_per_node"""
    costs: np.ndarray
    cores_per_node: int
    real_threads: int

    @property
    def size(self) -> int:
        return self.costs.shape[0]

    def node_of_slot(self, slot: int) -> int:
        return slot // self.cores_per_node


@dataclass(frozen=True)
class Assignment:
    """Perfect matching; columns[r] is the column matched to row r"""
    columns: Tuple[int, ...]
    total_cost: int

    def to_schedule(self, topology: Topology) -> Schedule:
        """Node-level placement of the real threads (padding rows dropped)"""
        return Schedule(
            tuple(self.columns[t] // topology.cores_per_node for t in range(topology.threads)),
            topology)


def build_slot_costs(matrix: AccessMatrix, topology: Topology, lat: LatencyModel) -> SlotCostMatrix:
    """
    Expand per-node placement costs into a square slot matrix

    Args:
        matrix: Access counters for one quantum
        topology: Machine shape
        lat: Latency model

    Returns:
        SlotCostMatrix of size L*K with zero padding rows after the N real threads
    """
    matrix.check(topology)
    per_node = placement_costs(matrix, lat)
    size = topology.capacity
    costs = np.zeros((size, size), dtype=np.int64)
    costs[:topology.threads] = np.repeat(per_node, topology.cores_per_node, axis=1)
    costs.setflags(write=False)
    return SlotCostMatrix(costs=costs, cores_per_node=topology.cores_per_node,
                          real_threads=topology.threads)


def hungarian_solve(costs: Union[SlotCostMatrix, Sequence[Sequence[int]], np.ndarray]) -> Assignment:
    """
    Minimum-cost perfect matching of a square non-negative integer matrix.

    Row-by-row shortest augmenting path with dual potentials, O(M^3).
    Column scans take the lowest-index minimum, which fixes the result
    among equal-cost matchings.

    Args:
        costs: Square matrix of non-negative integers

    Returns:
        Assignment with row -> column matching and its total cost
    """
    c = costs.costs if isinstance(costs, SlotCostMatrix) else np.asarray(costs)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
        raise InvalidInputError(f"cost matrix must be non-empty and square, got shape {c.shape}")
    if not np.issubdtype(c.dtype, np.integer):
        if not np.all(np.equal(np.mod(c, 1), 0)):
            raise InvalidInputError("cost matrix entries must be integers")
    c = c.astype(np.int64)
    if (c < 0).any():
        raise InvalidInputError("cost matrix entries must be non-negative")

    n = c.shape[0]
    # index 0 is the virtual column used to start each augmenting search
    u = np.zeros(n + 1, dtype=np.int64)
    v = np.zeros(n + 1, dtype=np.int64)
    p = np.zeros(n + 1, dtype=np.intp)
    way = np.zeros(n + 1, dtype=np.intp)

    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, _INF, dtype=np.int64)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            reduced = c[i0 - 1] - u[i0] - v[1:]
            better = free & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0
            candidates = np.where(free, minv[1:], _INF)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]

            used_cols = np.flatnonzero(used)
            u[p[used_cols]] += delta
            v[used_cols] -= delta
            minv[~used] -= delta

            j0 = j1
            if p[j0] == 0:
                break

        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    columns = [0] * n
    for j in range(1, n + 1):
        columns[p[j] - 1] = j - 1
    total = int(c[np.arange(n), columns].sum())
    return Assignment(columns=tuple(columns), total_cost=total)


def count_placements(topology: Topology) -> int:
    """Number of capacity-respecting thread -> node mappings"""
    # ways[m]: mappings of m threads onto the nodes seen so far
    ways = [1] + [0] * topology.threads
    for _ in range(topology.nodes):
        nxt = [0] * (topology.threads + 1)
        for m in range(topology.threads + 1):
            for here in range(min(topology.cores_per_node, m) + 1):
                nxt[m] += math.comb(m, here) * ways[m - here]
        ways = nxt
    return ways[topology.threads]


def iter_placements(topology: Topology) -> Iterator[Tuple[int, ...]]:
    """Yield every capacity-respecting placement vector in lexicographic order"""
    load = [0] * topology.nodes
    current = [0] * topology.threads

    def extend(thread: int):
        if thread == topology.threads:
            yield tuple(current)
            return
        for node in range(topology.nodes):
            if load[node] < topology.cores_per_node:
                load[node] += 1
                current[thread] = node
                yield from extend(thread + 1)
                load[node] -= 1

    return extend(0)


@lru_cache(maxsize=16)
def _placement_table(topology: Topology) -> np.ndarray:
    table = np.array(list(iter_placements(topology)), dtype=np.intp)
    table.setflags(write=False)
    return table


def _placement_chunks(topology: Topology, total: int) -> Iterator[np.ndarray]:
    if total <= _PLACEMENT_CACHE_ROWS:
        yield _placement_table(topology)
        return
    placements = iter_placements(topology)
    while True:
        chunk = list(itertools.islice(placements, _PLACEMENT_CHUNK))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.intp)


def brute_force_optimal(matrix: AccessMatrix, topology: Topology, lat: LatencyModel,
                        bound: int = DEFAULT_ORACLE_BOUND) -> Tuple[Schedule, int]:
    """
    Exhaustive search over capacity-respecting placements

    Args:
        matrix: Access counters for one quantum
        topology: Machine shape
        lat: Latency model
        bound: Largest number of placements the search may enumerate

    Returns:
        (schedule, total_cycles) of minimum cost; ties go to the
        lexicographically smallest placement vector

    Raises:
        EnumerationBoundError: the instance has more placements than bound
    """
    matrix.check(topology)
    total = count_placements(topology)
    if total > bound:
        raise EnumerationBoundError("oracle", total, bound)

    per_node = placement_costs(matrix, lat)
    rows = np.arange(topology.threads)
    best_cost: Optional[int] = None
    best_placement: Optional[Tuple[int, ...]] = None
    for chunk in _placement_chunks(topology, total):
        chunk_costs = per_node[rows, chunk].sum(axis=1)
        idx = int(np.argmin(chunk_costs))
        cost = int(chunk_costs[idx])
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_placement = tuple(int(n) for n in chunk[idx])

    schedule = Schedule(best_placement, topology)
    return schedule, schedule_cost(matrix, schedule, lat).total_cycles


DEFAULT_VERIFY_TOPOLOGIES = (
    Topology(nodes=2, cores_per_node=2, threads=4),
    Topology(nodes=3, cores_per_node=3, threads=9),
    Topology(nodes=4, cores_per_node=2, threads=8),
)


def cross_check(topologies: Sequence[Topology], latencies: Sequence[LatencyModel],
                instances: int = 100, seed: int = 0, count_max: int = 10000,
                bound: int = DEFAULT_ORACLE_BOUND) -> int:
    """
    Compare Hungarian placement cost with the brute-force optimum on random matrices

    Returns:
        Number of (instance, latency) pairs checked

    Raises:
        OracleMismatchError: on the first disagreement
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    checked = 0
    for topology in topologies:
        for _ in range(instances):
            matrix = AccessMatrix(rng.integers(
                0, count_max, size=(topology.threads, topology.nodes), endpoint=True))
            for lat in latencies:
                solved = hungarian_solve(build_slot_costs(matrix, topology, lat))
                hungarian_cycles = schedule_cost(matrix, solved.to_schedule(topology), lat).total_cycles
                _, oracle_cycles = brute_force_optimal(matrix, topology, lat, bound=bound)
                if hungarian_cycles != oracle_cycles:
                    raise OracleMismatchError(
                        f"Hungarian placement costs {hungarian_cycles} cycles but the optimum is "
                        f"{oracle_cycles} on {topology} at {lat}: {matrix.to_list()}")
                checked += 1
        logger.info(f"Oracle cross-check passed for {topology} ({instances} instances)")
    return checked
