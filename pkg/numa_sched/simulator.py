"""
Quantum-by-quantum simulation of the placement algorithms
"""
import logging
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from numa_sched.config import DEFAULT_ENUMERATION_BOUND
from numa_sched.core_model import (LatencyModel, Schedule, SimulationReport, Topology,
                                   baseline_schedule, savings_percent, schedule_cost)
from numa_sched.exceptions import InvalidInputError
from numa_sched.schedulers import BaseScheduler, algorithm_ids, get_scheduler
from numa_sched.workload_gen import SEED_LIMIT, SynthSpec, Workload, gen_synth

logger = logging.getLogger(__name__)

WorkloadSource = Union[SynthSpec, Workload]


def source_label(source: WorkloadSource) -> str:
    if isinstance(source, SynthSpec):
        return source.kind.value
    return source.meta.label


def source_workload(source: WorkloadSource, seed: int) -> Workload:
    """The workload a replication runs on: regenerated per seed for synthetic sources"""
    if isinstance(source, SynthSpec):
        return gen_synth(source.with_seed(seed))
    return source


@dataclass(frozen=True)
class ExperimentSpec:
    """What to run: workload sources x algorithms x latencies, replicated"""
    workloads: Tuple[WorkloadSource, ...]
    algorithms: Tuple[str, ...] = ("algo1", "algo2", "algo3", "algo4")
    latencies: Tuple[LatencyModel, ...] = (LatencyModel(),)
    replications: int = 1
    base_seed: int = 0
    enumeration_bound: int = DEFAULT_ENUMERATION_BOUND

    def __post_init__(self):
        object.__setattr__(self, "workloads", tuple(self.workloads))
        object.__setattr__(self, "algorithms", tuple(
            get_scheduler(a).identifier for a in self.algorithms))
        object.__setattr__(self, "latencies", tuple(self.latencies))
        if not self.workloads:
            raise InvalidInputError("experiment needs at least one workload")
        if not self.algorithms:
            raise InvalidInputError("experiment needs at least one algorithm")
        if not self.latencies:
            raise InvalidInputError("experiment needs at least one latency model")
        if not isinstance(self.replications, int) or self.replications < 1:
            raise InvalidInputError(f"replications must be >= 1, got {self.replications!r}")
        if not isinstance(self.base_seed, int) or not 0 <= self.base_seed < SEED_LIMIT:
            raise InvalidInputError(f"base seed must be a 64-bit unsigned integer, got {self.base_seed!r}")

    def to_dict(self):
        return {
            "workloads": [
                w.to_dict() if isinstance(w, SynthSpec) else {"kind": "trace", "source": w.meta.source}
                for w in self.workloads
            ],
            "algorithms": list(self.algorithms),
            "latencies": [lat.to_dict() for lat in self.latencies],
            "replications": self.replications,
            "base_seed": self.base_seed,
        }


class ReplicationOutcome(NamedTuple):
    savings_percent: float
    remote_fraction: float
    baseline_remote_fraction: float
    seconds_saved: float


@dataclass(frozen=True)
class AggregateCell:
    """Savings statistics of one (workload, algorithm, latency) cell"""
    workload: str
    algorithm: str
    latency: LatencyModel
    replications: int
    mean_savings: float
    stddev_savings: float
    min_savings: float
    max_savings: float
    values: Tuple[float, ...] = ()
    mean_remote_fraction: float = 0.0
    mean_baseline_remote_fraction: float = 0.0
    mean_seconds_saved: float = 0.0

    @property
    def remote_latency(self) -> int:
        return self.latency.remote_cycles

    @classmethod
    def from_outcomes(cls, workload: str, algorithm: str, latency: LatencyModel,
                      outcomes: Sequence[ReplicationOutcome]) -> "AggregateCell":
        savings = np.array([o.savings_percent for o in outcomes], dtype=float)
        stddev = float(np.std(savings, ddof=1)) if savings.size > 1 else 0.0
        return cls(
            workload=workload,
            algorithm=algorithm,
            latency=latency,
            replications=int(savings.size),
            mean_savings=float(np.mean(savings)),
            stddev_savings=stddev,
            min_savings=float(savings.min()),
            max_savings=float(savings.max()),
            values=tuple(float(s) for s in savings),
            mean_remote_fraction=float(np.mean([o.remote_fraction for o in outcomes])),
            mean_baseline_remote_fraction=float(np.mean([o.baseline_remote_fraction for o in outcomes])),
            mean_seconds_saved=float(np.mean([o.seconds_saved for o in outcomes])),
        )

    def to_dict(self):
        return {
            "workload": self.workload,
            "algorithm": self.algorithm,
            "local_latency": self.latency.local_cycles,
            "remote_latency": self.latency.remote_cycles,
            "replications": self.replications,
            "mean_savings_pct": self.mean_savings,
            "stddev_savings_pct": self.stddev_savings,
            "min_savings_pct": self.min_savings,
            "max_savings_pct": self.max_savings,
            "mean_remote_fraction": self.mean_remote_fraction,
            "mean_baseline_remote_fraction": self.mean_baseline_remote_fraction,
            "mean_seconds_saved": self.mean_seconds_saved,
        }


@dataclass(frozen=True)
class AggregateResult:
    """Cells ordered by (workload, algorithm, latency)"""
    cells: Tuple[AggregateCell, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))

    def cell(self, workload: str, algorithm: str, remote_latency: int) -> AggregateCell:
        algorithm = get_scheduler(algorithm).identifier
        for cell in self.cells:
            if (cell.workload == workload and cell.algorithm == algorithm
                    and cell.remote_latency == remote_latency):
                return cell
        raise KeyError((workload, algorithm, remote_latency))

    def workloads(self) -> List[str]:
        return list(dict.fromkeys(c.workload for c in self.cells))

    def algorithms(self) -> List[str]:
        return list(dict.fromkeys(c.algorithm for c in self.cells))

    def latencies(self) -> List[LatencyModel]:
        return list(dict.fromkeys(c.latency for c in self.cells))

    def is_empty(self) -> bool:
        return not self.cells

    @classmethod
    def combine(cls, results: Iterable["AggregateResult"]) -> "AggregateResult":
        cells: List[AggregateCell] = []
        for result in results:
            cells.extend(result.cells)
        return cls(tuple(cells))

    def to_dict(self):
        return {"cells": [c.to_dict() for c in self.cells]}


class Simulator:
    """Runs schedulers over workloads on one topology"""

    def __init__(self, topology: Topology, enumeration_bound: int = DEFAULT_ENUMERATION_BOUND):
        self.topology = topology
        self.enumeration_bound = enumeration_bound
        self.baseline = baseline_schedule(topology)
        self.decision_seconds: Dict[str, float] = defaultdict(float)

    def scheduler(self, algorithm: Union[str, BaseScheduler]) -> BaseScheduler:
        return get_scheduler(algorithm, enumeration_bound=self.enumeration_bound)

    def schedule_sequence(self, workload: Workload, scheduler: BaseScheduler,
                          lat: Optional[LatencyModel] = None) -> List[Schedule]:
        """
        Schedules acting in each quantum.

        Quantum 1 runs the baseline; quantum q+1 runs what the scheduler
        derived from quantum q's counters.
        """
        workload.check(self.topology)
        schedules = [self.baseline]
        start = time.perf_counter()
        for matrix in workload.quanta[:-1]:
            schedules.append(scheduler.schedule(matrix, self.topology, lat))
        elapsed = time.perf_counter() - start
        self.decision_seconds[scheduler.identifier] += elapsed
        logger.debug(f"{scheduler.identifier}: {len(schedules) - 1} decisions in {elapsed:.4f}s")
        return schedules

    def cost(self, workload: Workload, schedules: Sequence[Schedule], lat: LatencyModel,
             algorithm: str) -> SimulationReport:
        """Cost a schedule sequence against the block baseline"""
        if len(schedules) != workload.num_quanta:
            raise InvalidInputError(
                f"{len(schedules)} schedules for {workload.num_quanta} quanta")
        per_quantum = tuple(
            schedule_cost(matrix, schedule, lat, quantum)
            for quantum, (matrix, schedule) in enumerate(zip(workload.quanta, schedules), start=1))
        baseline = [schedule_cost(matrix, self.baseline, lat, quantum)
                    for quantum, matrix in enumerate(workload.quanta, start=1)]
        total = sum(q.total_cycles for q in per_quantum)
        baseline_total = sum(b.total_cycles for b in baseline)
        return SimulationReport(
            algorithm=algorithm,
            latency=lat,
            per_quantum=per_quantum,
            total_cycles=total,
            baseline_total_cycles=baseline_total,
            baseline_remote_accesses=sum(b.remote_accesses for b in baseline),
            savings_percent=savings_percent(baseline_total, total),
            baseline_per_quantum=tuple(b.total_cycles for b in baseline),
        )

    def run(self, workload: Workload, algorithm: Union[str, BaseScheduler],
            lat: LatencyModel) -> SimulationReport:
        scheduler = self.scheduler(algorithm)
        schedules = self.schedule_sequence(workload, scheduler, lat)
        return self.cost(workload, schedules, lat, scheduler.identifier)

    def run_latencies(self, workload: Workload, algorithm: Union[str, BaseScheduler],
                      latencies: Sequence[LatencyModel]) -> List[SimulationReport]:
        """
        One report per latency. Greedy schedules are computed once and
        re-costed; latency-aware schedulers are re-solved per latency.
        """
        scheduler = self.scheduler(algorithm)
        if scheduler.uses_latency:
            return [self.run(workload, scheduler, lat) for lat in latencies]
        schedules = self.schedule_sequence(workload, scheduler)
        return [self.cost(workload, schedules, lat, scheduler.identifier) for lat in latencies]


def run_simulation(workload: Workload, algorithm: Union[str, BaseScheduler], lat: LatencyModel,
                   topology: Topology) -> SimulationReport:
    """
    Simulate one algorithm over a workload

    Args:
        workload: Per-quantum access counters
        algorithm: Scheduler identifier ("algo1".."algo4") or instance
        lat: Latency model
        topology: Machine shape; must match the workload's dimensions

    Returns:
        SimulationReport with per-quantum costs and savings against the baseline
    """
    return Simulator(topology).run(workload, algorithm, lat)


def _replicate(task: Tuple[WorkloadSource, int, ExperimentSpec, Topology]
               ) -> Dict[Tuple[str, LatencyModel], ReplicationOutcome]:
    source, replication, spec, topology = task
    workload = source_workload(source, (spec.base_seed + replication) % SEED_LIMIT)
    simulator = Simulator(topology, spec.enumeration_bound)
    outcomes = {}
    for algorithm in spec.algorithms:
        for report in simulator.run_latencies(workload, algorithm, spec.latencies):
            outcomes[(algorithm, report.latency)] = ReplicationOutcome(
                savings_percent=report.savings_percent,
                remote_fraction=report.remote_fraction,
                baseline_remote_fraction=report.baseline_remote_fraction,
                seconds_saved=report.seconds_saved,
            )
    return outcomes


def run_replicated(spec: ExperimentSpec, topology: Topology,
                   source: Optional[WorkloadSource] = None, workers: int = 1) -> AggregateResult:
    """
    Replicate one workload source over seeds base_seed + r.

    Every (algorithm, latency) pair of a replication sees the same workload.

    Args:
        spec: Experiment spec
        topology: Machine shape
        source: Workload source; defaults to the experiment's only workload
        workers: Worker processes for replications (1 runs in-process)

    Returns:
        AggregateResult with one cell per (algorithm, latency)
    """
    if source is None:
        if len(spec.workloads) != 1:
            raise InvalidInputError(
                "run_replicated needs a single workload source; use sensitivity_sweep for several")
        source = spec.workloads[0]
    label = source_label(source)
    tasks = [(source, r, spec, topology) for r in range(spec.replications)]

    logger.info(f"Running {label}: {len(spec.algorithms)} algorithms x "
                f"{len(spec.latencies)} latencies x {spec.replications} replications")
    start = time.perf_counter()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_replication = list(pool.map(_replicate, tasks))
    else:
        per_replication = [_replicate(task) for task in tasks]
    logger.info(f"Finished {label} in {time.perf_counter() - start:.2f} seconds")

    cells = []
    for algorithm in spec.algorithms:
        for lat in spec.latencies:
            outcomes = [outcome[(algorithm, lat)] for outcome in per_replication]
            cells.append(AggregateCell.from_outcomes(label, algorithm, lat, outcomes))
    return AggregateResult(tuple(cells))


def sensitivity_sweep(spec: ExperimentSpec, topology: Topology, workers: int = 1) -> AggregateResult:
    """
    Every workload x algorithm x latency cell of the experiment

    Returns:
        AggregateResult ordered by (workload, algorithm, latency)
    """
    return AggregateResult.combine(
        run_replicated(spec, topology, source=source, workers=workers) for source in spec.workloads)
