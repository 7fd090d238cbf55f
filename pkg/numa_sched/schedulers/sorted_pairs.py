"""
Sorted (thread, node) pairs placement
"""
import numpy as np

from numa_sched.core_model import AccessMatrix, Schedule, Topology
from numa_sched.schedulers.scheduler_base import BaseScheduler


def algo1_sorted_pairs(matrix: AccessMatrix, topology: Topology) -> Schedule:
    """
    Scan all N*L counters in descending order and place a thread on the
    node of its pair when the thread is unplaced and the node has room.

    Ties fall to the lower thread index, then the lower node index.
    """
    matrix.check(topology)
    counts = matrix.counts
    nodes = topology.nodes
    # row-major flattening orders equal counts by thread, then node
    order = np.argsort(-counts.ravel(), kind="mergesort").tolist()

    placement = [-1] * topology.threads
    loads = [0] * nodes
    remaining = topology.threads
    for flat in order:
        thread, node = divmod(flat, nodes)
        if placement[thread] != -1 or loads[node] >= topology.cores_per_node:
            continue
        placement[thread] = node
        loads[node] += 1
        remaining -= 1
        if remaining == 0:
            break
    return Schedule(tuple(placement), topology)


class SortedPairsScheduler(BaseScheduler):
    """
    Greedy over individual counters.

    Complexity is dominated by the O(NL log NL) sort.
    """

    def __init__(self):
        super().__init__(
            identifier="algo1",
            name="Algo 1",
            description="Place threads by scanning all (thread, node) counters in descending order",
        )

    def schedule(self, matrix, topology, latency=None):
        return algo1_sorted_pairs(matrix, topology)
