"""
Domain types and the DRAM latency cost model
"""
import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from numa_sched.exceptions import CapacityError, DimensionMismatchError, InvalidInputError

logger = logging.getLogger(__name__)


def _require_int(name: str, value, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidInputError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidInputError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


@dataclass(frozen=True)
class Topology:
    """Machine shape: L nodes of K cores each, running N threads"""
    nodes: int = 4
    cores_per_node: int = 4
    threads: int = 16

    def __post_init__(self):
        _require_int("nodes", self.nodes, 1)
        _require_int("cores_per_node", self.cores_per_node, 1)
        _require_int("threads", self.threads, 1)
        if self.threads > self.capacity:
            raise CapacityError(
                f"{self.threads} threads do not fit on {self.nodes} nodes x "
                f"{self.cores_per_node} cores ({self.capacity} slots)")

    @property
    def capacity(self) -> int:
        return self.nodes * self.cores_per_node

    def to_dict(self):
        return {
            "nodes": self.nodes,
            "cores_per_node": self.cores_per_node,
            "threads": self.threads,
        }


@dataclass(frozen=True)
class LatencyModel:
    """Cycles per local and per remote DRAM access"""
    local_cycles: int = 100
    remote_cycles: int = 150
    cpu_frequency_hz: int = 1_000_000_000

    def __post_init__(self):
        _require_int("local_cycles", self.local_cycles, 1)
        _require_int("remote_cycles", self.remote_cycles, 1)
        _require_int("cpu_frequency_hz", self.cpu_frequency_hz, 1)
        if self.remote_cycles < self.local_cycles:
            raise InvalidInputError(
                f"remote latency ({self.remote_cycles}) must not be below "
                f"local latency ({self.local_cycles})")

    @property
    def remote_penalty(self) -> int:
        """Extra cycles a remote access costs over a local one"""
        return self.remote_cycles - self.local_cycles

    def cycles_to_seconds(self, cycles: float) -> float:
        return cycles / self.cpu_frequency_hz

    def to_dict(self):
        return {
            "local_cycles": self.local_cycles,
            "remote_cycles": self.remote_cycles,
            "cpu_frequency_hz": self.cpu_frequency_hz,
        }


class AccessMatrix:
    """
    Per-quantum DRAM read counters.

    counts[t][n] is the number of reads thread t issued to memory homed on
    node n. The counts do not depend on where the thread ran.
    """

    __slots__ = ("_counts",)

    def __init__(self, counts):
        array = np.array(counts, dtype=np.int64)
        if array.ndim != 2 or array.shape[0] == 0 or array.shape[1] == 0:
            raise DimensionMismatchError(
                f"access matrix must be a non-empty 2-D grid, got shape {array.shape}")
        if (array < 0).any():
            raise InvalidInputError("access counts must be non-negative")
        array.setflags(write=False)
        self._counts = array

    @classmethod
    def zeros(cls, topology: Topology) -> "AccessMatrix":
        return cls(np.zeros((topology.threads, topology.nodes), dtype=np.int64))

    @property
    def counts(self) -> np.ndarray:
        """Read-only N x L view of the counters"""
        return self._counts

    @property
    def threads(self) -> int:
        return self._counts.shape[0]

    @property
    def nodes(self) -> int:
        return self._counts.shape[1]

    def total(self) -> int:
        return int(self._counts.sum())

    def row_totals(self) -> np.ndarray:
        return self._counts.sum(axis=1)

    def check(self, topology: Topology) -> None:
        """Raise DimensionMismatchError unless the matrix is N x L for topology"""
        if self._counts.shape != (topology.threads, topology.nodes):
            raise DimensionMismatchError(
                f"access matrix is {self.threads}x{self.nodes} but topology has "
                f"{topology.threads} threads on {topology.nodes} nodes")

    def scaled(self, factor: int) -> "AccessMatrix":
        return AccessMatrix(self._counts * int(factor))

    def to_list(self) -> List[List[int]]:
        return self._counts.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, AccessMatrix):
            return NotImplemented
        return np.array_equal(self._counts, other._counts)

    def __hash__(self) -> int:
        return hash((self._counts.shape, self._counts.tobytes()))

    def __reduce__(self):
        return (AccessMatrix, (self._counts,))

    def __repr__(self) -> str:
        return f"AccessMatrix({self.to_list()})"


@dataclass(frozen=True)
class Schedule:
    """Total thread -> node mapping that never over-fills a node"""
    placement: Tuple[int, ...]
    topology: Topology

    def __post_init__(self):
        placement = tuple(int(n) for n in self.placement)
        object.__setattr__(self, "placement", placement)
        if len(placement) != self.topology.threads:
            raise DimensionMismatchError(
                f"schedule places {len(placement)} threads, topology has {self.topology.threads}")
        loads = [0] * self.topology.nodes
        for thread, node in enumerate(placement):
            if not 0 <= node < self.topology.nodes:
                raise InvalidInputError(f"thread {thread} placed on unknown node {node}")
            loads[node] += 1
        for node, load in enumerate(loads):
            if load > self.topology.cores_per_node:
                raise CapacityError(
                    f"node {node} holds {load} threads but has only "
                    f"{self.topology.cores_per_node} cores")

    @classmethod
    def from_placement(cls, placement: Iterable[int], topology: Topology) -> "Schedule":
        return cls(tuple(placement), topology)

    def node_of(self, thread: int) -> int:
        return self.placement[thread]

    def threads_on(self, node: int) -> List[int]:
        return [t for t, n in enumerate(self.placement) if n == node]

    def node_loads(self) -> List[int]:
        loads = [0] * self.topology.nodes
        for node in self.placement:
            loads[node] += 1
        return loads

    def as_array(self) -> np.ndarray:
        return np.array(self.placement, dtype=np.intp)

    def __len__(self) -> int:
        return len(self.placement)


@dataclass(frozen=True)
class QuantumResult:
    """Cost of one quantum under the schedule that was acting during it"""
    quantum_index: int
    schedule_used: Schedule
    total_cycles: int
    local_accesses: int
    remote_accesses: int

    @property
    def total_accesses(self) -> int:
        return self.local_accesses + self.remote_accesses

    def to_dict(self):
        return {
            "quantum": self.quantum_index,
            "placement": list(self.schedule_used.placement),
            "total_cycles": self.total_cycles,
            "local_accesses": self.local_accesses,
            "remote_accesses": self.remote_accesses,
        }


@dataclass(frozen=True)
class SimulationReport:
    """Outcome of running one algorithm over one workload at one latency"""
    algorithm: str
    latency: LatencyModel
    per_quantum: Tuple[QuantumResult, ...]
    total_cycles: int
    baseline_total_cycles: int
    baseline_remote_accesses: int
    savings_percent: float
    baseline_per_quantum: Tuple[int, ...] = field(default=())

    @property
    def local_accesses(self) -> int:
        return sum(q.local_accesses for q in self.per_quantum)

    @property
    def remote_accesses(self) -> int:
        return sum(q.remote_accesses for q in self.per_quantum)

    @property
    def total_accesses(self) -> int:
        return self.local_accesses + self.remote_accesses

    @property
    def remote_fraction(self) -> float:
        total = self.total_accesses
        return self.remote_accesses / total if total else 0.0

    @property
    def baseline_remote_fraction(self) -> float:
        total = self.total_accesses
        return self.baseline_remote_accesses / total if total else 0.0

    @property
    def cycles_saved(self) -> int:
        return self.baseline_total_cycles - self.total_cycles

    @property
    def seconds_saved(self) -> float:
        return self.latency.cycles_to_seconds(self.cycles_saved)

    @property
    def schedules(self) -> List[Schedule]:
        return [q.schedule_used for q in self.per_quantum]

    def to_dict(self):
        return {
            "algorithm": self.algorithm,
            "latency": self.latency.to_dict(),
            "total_cycles": self.total_cycles,
            "baseline_total_cycles": self.baseline_total_cycles,
            "savings_percent": self.savings_percent,
            "remote_fraction": self.remote_fraction,
            "baseline_remote_fraction": self.baseline_remote_fraction,
            "per_quantum": [q.to_dict() for q in self.per_quantum],
        }


def baseline_schedule(topology: Topology) -> Schedule:
    """
    Block placement used as the no-migration control

    Args:
        topology: Machine shape

    Returns:
        Schedule with thread t on node t // cores_per_node
    """
    return Schedule(
        tuple(t // topology.cores_per_node for t in range(topology.threads)), topology)


def placement_costs(matrix: AccessMatrix, lat: LatencyModel) -> np.ndarray:
    """
    Cycles each thread would spend if placed on each node

    Returns:
        N x L int64 array; entry [t, s] = local * counts[t, s] + remote * (row_total - counts[t, s])
    """
    counts = matrix.counts
    row_totals = counts.sum(axis=1, keepdims=True)
    return lat.local_cycles * counts + lat.remote_cycles * (row_totals - counts)


def _check_schedule(matrix: AccessMatrix, schedule: Schedule) -> None:
    if matrix.threads != schedule.topology.threads or matrix.nodes != schedule.topology.nodes:
        raise DimensionMismatchError(
            f"access matrix is {matrix.threads}x{matrix.nodes} but schedule covers "
            f"{schedule.topology.threads} threads on {schedule.topology.nodes} nodes")


def local_access_count(matrix: AccessMatrix, schedule: Schedule) -> int:
    _check_schedule(matrix, schedule)
    counts = matrix.counts
    return int(counts[np.arange(matrix.threads), schedule.as_array()].sum())


def schedule_cost(matrix: AccessMatrix, schedule: Schedule, lat: LatencyModel,
                  quantum_index: int = 1) -> QuantumResult:
    """
    DRAM cycles spent in one quantum under a placement

    Args:
        matrix: The quantum's access counters
        schedule: Placement acting during the quantum
        lat: Latency model
        quantum_index: 1-based quantum number recorded in the result

    Returns:
        QuantumResult with the local/remote split and total cycles
    """
    local = local_access_count(matrix, schedule)
    remote = matrix.total() - local
    total_cycles = local * lat.local_cycles + remote * lat.remote_cycles
    return QuantumResult(
        quantum_index=quantum_index,
        schedule_used=schedule,
        total_cycles=total_cycles,
        local_accesses=local,
        remote_accesses=remote,
    )


def savings_percent(baseline_cycles: int, algo_cycles: int) -> float:
    """
    Percentage of baseline DRAM cycles saved; negative when the algorithm is worse

    Raises:
        InvalidInputError: baseline is zero but the algorithm spent cycles
    """
    if baseline_cycles < 0 or algo_cycles < 0:
        raise InvalidInputError("cycle totals must be non-negative")
    if baseline_cycles == 0:
        if algo_cycles == 0:
            return 0.0
        raise InvalidInputError(
            f"degenerate workload: baseline spent 0 cycles but algorithm spent {algo_cycles}")
    return 100.0 * (baseline_cycles - algo_cycles) / baseline_cycles


def total_cycles(results: Sequence[QuantumResult]) -> int:
    return sum(r.total_cycles for r in results)
