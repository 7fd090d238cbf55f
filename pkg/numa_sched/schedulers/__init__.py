"""
Schedulers package: the per-quantum placement algorithms
"""
import logging
from typing import List, Optional, Type, Union

from numa_sched.exceptions import InvalidInputError
from numa_sched.schedulers.scheduler_base import BaseScheduler
from numa_sched.schedulers.sorted_pairs import SortedPairsScheduler, algo1_sorted_pairs
from numa_sched.schedulers.per_node import PerNodeScheduler, algo2_per_node
from numa_sched.schedulers.group_enumeration import (GroupEnumerationScheduler,
                                                     algo3_group_enumeration,
                                                     group_candidates)
from numa_sched.schedulers.hungarian_scheduler import HungarianScheduler, algo4_hungarian

# Logger for this module
logger = logging.getLogger(__name__)

# List of all available schedulers, in report column order
AVAILABLE_SCHEDULERS: List[Type[BaseScheduler]] = [
    SortedPairsScheduler,
    PerNodeScheduler,
    GroupEnumerationScheduler,
    HungarianScheduler,
]


def get_available_schedulers() -> List[Type[BaseScheduler]]:
    return AVAILABLE_SCHEDULERS


def algorithm_ids() -> List[str]:
    return [scheduler_class().identifier for scheduler_class in AVAILABLE_SCHEDULERS]


def register_scheduler(scheduler_class: Type[BaseScheduler]) -> None:
    """
    Register a new scheduler class

    Args:
        scheduler_class: The scheduler class to register
    """
    if scheduler_class not in AVAILABLE_SCHEDULERS:
        AVAILABLE_SCHEDULERS.append(scheduler_class)
        logger.info(f"Registered scheduler: {scheduler_class.__name__}")


def get_scheduler(identifier: Union[str, int, BaseScheduler],
                  enumeration_bound: Optional[int] = None) -> BaseScheduler:
    """
    Instantiate a scheduler by identifier

    Args:
        identifier: "algo1".."algo4", the bare number, or a scheduler instance
        enumeration_bound: Candidate limit for group enumeration, if not the default

    Returns:
        Scheduler instance
    """
    if isinstance(identifier, BaseScheduler):
        return identifier
    key = str(identifier).strip().lower()
    if key.isdigit():
        key = f"algo{key}"
    for scheduler_class in AVAILABLE_SCHEDULERS:
        scheduler = scheduler_class()
        if scheduler.identifier != key:
            continue
        if enumeration_bound is not None and isinstance(scheduler, GroupEnumerationScheduler):
            scheduler.bound = enumeration_bound
        return scheduler
    raise InvalidInputError(f"Unknown scheduling algorithm: {identifier!r}")


__all__ = [
    "AVAILABLE_SCHEDULERS",
    "BaseScheduler",
    "GroupEnumerationScheduler",
    "HungarianScheduler",
    "PerNodeScheduler",
    "SortedPairsScheduler",
    "algo1_sorted_pairs",
    "algo2_per_node",
    "algo3_group_enumeration",
    "algo4_hungarian",
    "algorithm_ids",
    "get_available_schedulers",
    "get_scheduler",
    "group_candidates",
    "register_scheduler",
]
