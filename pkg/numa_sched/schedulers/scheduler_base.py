"""
Base scheduler class for per-quantum thread placement
"""
import logging
from typing import Optional

from numa_sched.core_model import AccessMatrix, LatencyModel, Schedule, Topology

logger = logging.getLogger(__name__)


class BaseScheduler:
    """
    Base class for all placement algorithms.

    A scheduler reads one quantum's counters and returns the schedule for
    the next quantum.
    """

    # Greedy algorithms work on raw counts and never read the latency model
    uses_latency = False

    def __init__(self, identifier: str, name: str, description: str):
        self.identifier = identifier
        self.name = name
        self.description = description

    def schedule(self, matrix: AccessMatrix, topology: Topology,
                 latency: Optional[LatencyModel] = None) -> Schedule:
        """
        Compute the next quantum's schedule

        Args:
            matrix: Counters observed during the quantum that just ended
            topology: Machine shape
            latency: Latency model, only read when uses_latency is set

        Returns:
            A capacity-respecting Schedule
        """
        raise NotImplementedError("Scheduler classes must implement schedule()")

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.identifier!r})"
