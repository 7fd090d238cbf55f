"""
Node-by-node placement
"""
import numpy as np

from numa_sched.core_model import AccessMatrix, Schedule, Topology
from numa_sched.schedulers.scheduler_base import BaseScheduler


def algo2_per_node(matrix: AccessMatrix, topology: Topology) -> Schedule:
    """
    Visit nodes 0..L-1 in order; each takes the K unplaced threads with the
    most accesses to it (ties to the lower thread index).
    """
    matrix.check(topology)
    counts = matrix.counts
    placement = [-1] * topology.threads
    pool = np.arange(topology.threads)
    for node in range(topology.nodes):
        if pool.size == 0:
            break
        ranked = pool[np.argsort(-counts[pool, node], kind="mergesort")]
        chosen = ranked[:topology.cores_per_node]
        for thread in chosen.tolist():
            placement[thread] = node
        pool = np.sort(ranked[topology.cores_per_node:])
    return Schedule(tuple(placement), topology)


class PerNodeScheduler(BaseScheduler):
    """Greedy over nodes in fixed ascending order; early nodes choose first"""

    def __init__(self):
        super().__init__(
            identifier="algo2",
            name="Algo 2",
            description="Fill nodes in order with the unplaced threads that access them most",
        )

    def schedule(self, matrix, topology, latency=None):
        return algo2_per_node(matrix, topology)
