"""
Latency-optimal placement via the Hungarian method
"""
from typing import Optional

from numa_sched.assignment_solvers import build_slot_costs, hungarian_solve
from numa_sched.core_model import AccessMatrix, LatencyModel, Schedule, Topology
from numa_sched.schedulers.scheduler_base import BaseScheduler


def algo4_hungarian(matrix: AccessMatrix, topology: Topology, lat: LatencyModel) -> Schedule:
    """Placement minimising total DRAM cycles over all capacity-respecting schedules"""
    assignment = hungarian_solve(build_slot_costs(matrix, topology, lat))
    return assignment.to_schedule(topology)


class HungarianScheduler(BaseScheduler):
    """Exact scheduler; its objective is latency weighted so it is re-solved per latency"""

    uses_latency = True

    def __init__(self):
        super().__init__(
            identifier="algo4",
            name="Algo4",
            description="Minimise DRAM cycles with a slot-expanded Hungarian assignment",
        )

    def schedule(self, matrix, topology, latency: Optional[LatencyModel] = None):
        if latency is None:
            latency = LatencyModel()
        return algo4_hungarian(matrix, topology, latency)
