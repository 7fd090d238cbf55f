"""
Seeded synthetic workloads with planted phase structure.

Quantum 1 is fully random. The remaining quanta are split into phases;
each phase plants a preferred node per thread, and the phase matrix gives
preferred entries the full count range while every other entry stays
below floor(dominance * count_max).
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from numa_sched.core_model import AccessMatrix, Topology
from numa_sched.exceptions import DimensionMismatchError, InvalidInputError

logger = logging.getLogger(__name__)

SEED_LIMIT = 2 ** 64


class WorkloadKind(str, Enum):
    SYNTH1 = "synth1"
    SYNTH2 = "synth2"
    SYNTH3 = "synth3"
    TRACE = "trace"

    @property
    def display_name(self) -> str:
        return self.value.capitalize()


SYNTH_KINDS = (WorkloadKind.SYNTH1, WorkloadKind.SYNTH2, WorkloadKind.SYNTH3)

# Phases after the first quantum
PHASES_BY_KIND = {
    WorkloadKind.SYNTH1: 1,
    WorkloadKind.SYNTH2: 2,
    WorkloadKind.SYNTH3: 4,
}


@dataclass(frozen=True)
class WorkloadMeta:
    """
    Provenance of a workload.

    phase_boundaries are 1-based quantum numbers at which a new access
    pattern starts. planted holds each phase's preferred-node vector
    (synthetic workloads only).
    """
    kind: WorkloadKind
    seed: int = 0
    phase_boundaries: Tuple[int, ...] = ()
    planted: Tuple[Tuple[int, ...], ...] = ()
    source: str = ""

    @property
    def label(self) -> str:
        if self.kind is WorkloadKind.TRACE and self.source:
            return f"trace:{self.source}"
        return self.kind.value


@dataclass(frozen=True)
class Workload:
    """Q per-quantum access matrices of one shape plus provenance"""
    quanta: Tuple[AccessMatrix, ...]
    meta: WorkloadMeta

    def __post_init__(self):
        object.__setattr__(self, "quanta", tuple(self.quanta))
        if not self.quanta:
            raise InvalidInputError("workload has no quanta")
        shape = (self.quanta[0].threads, self.quanta[0].nodes)
        for index, matrix in enumerate(self.quanta, start=1):
            if (matrix.threads, matrix.nodes) != shape:
                raise DimensionMismatchError(
                    f"quantum {index} is {matrix.threads}x{matrix.nodes}, expected {shape[0]}x{shape[1]}")
        previous = 1
        for boundary in self.meta.phase_boundaries:
            if boundary <= previous or boundary > len(self.quanta):
                raise InvalidInputError(
                    f"phase boundaries must be strictly increasing within 2..{len(self.quanta)}, "
                    f"got {list(self.meta.phase_boundaries)}")
            previous = boundary

    @property
    def threads(self) -> int:
        return self.quanta[0].threads

    @property
    def nodes(self) -> int:
        return self.quanta[0].nodes

    @property
    def num_quanta(self) -> int:
        return len(self.quanta)

    def check(self, topology: Topology) -> None:
        self.quanta[0].check(topology)

    def truncated(self, quanta: int) -> "Workload":
        """First `quanta` quanta of this workload"""
        boundaries = tuple(b for b in self.meta.phase_boundaries if b <= quanta)
        return Workload(self.quanta[:quanta], replace(self.meta, phase_boundaries=boundaries))

    def __len__(self) -> int:
        return len(self.quanta)


def _as_fraction(value: Union[Fraction, float, int, str]) -> Fraction:
    if isinstance(value, Fraction):
        return value
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise InvalidInputError(f"dominance must be a number, got {value!r}")


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of a synthetic workload; equal specs give identical workloads"""
    kind: WorkloadKind
    topology: Topology = field(default_factory=Topology)
    quanta: int = 16
    seed: int = 0
    count_max: int = 10000
    dominance: Fraction = Fraction(1, 100)
    balanced_planting: bool = True
    redraw_per_quantum: bool = False

    def __post_init__(self):
        try:
            kind = WorkloadKind(self.kind)
        except ValueError:
            raise InvalidInputError(f"unknown workload kind {self.kind!r}")
        if kind not in SYNTH_KINDS:
            raise InvalidInputError(f"{kind.value} is not a synthetic workload kind")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "dominance", _as_fraction(self.dominance))

        phases = PHASES_BY_KIND[kind]
        if not isinstance(self.quanta, int) or self.quanta < phases + 1:
            raise InvalidInputError(
                f"{kind.value} needs at least {phases + 1} quanta "
                f"(one random quantum plus {phases} phases), got {self.quanta}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < SEED_LIMIT:
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not isinstance(self.count_max, int) or self.count_max < 1:
            raise InvalidInputError(f"count_max must be a positive integer, got {self.count_max!r}")
        if not 0 < self.dominance <= 1:
            raise InvalidInputError(f"dominance must lie in (0, 1], got {self.dominance}")

    @property
    def phases(self) -> int:
        return PHASES_BY_KIND[self.kind]

    @property
    def off_node_max(self) -> int:
        """Largest count a thread may issue to a node it does not prefer"""
        return math.floor(self.dominance * self.count_max)

    def with_seed(self, seed: int) -> "SynthSpec":
        return replace(self, seed=seed % SEED_LIMIT)

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "quanta": self.quanta,
            "seed": self.seed,
            "count_max": self.count_max,
            "dominance": str(self.dominance),
            "balanced_planting": self.balanced_planting,
            "redraw_per_quantum": self.redraw_per_quantum,
        }


def phase_sizes(quanta: int, phases: int) -> List[int]:
    """Split the quanta after the first into phases; earlier phases take the extra quanta"""
    base, extra = divmod(quanta - 1, phases)
    return [base + (1 if index < extra else 0) for index in range(phases)]


def phase_starts(quanta: int, phases: int) -> List[int]:
    """1-based quantum numbers at which each phase begins"""
    starts = []
    start = 2
    for size in phase_sizes(quanta, phases):
        starts.append(start)
        start += size
    return starts


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream for a 64-bit seed; never seeded from OS entropy"""
    return np.random.Generator(np.random.PCG64(seed))


def _plant(rng: np.random.Generator, topology: Topology, balanced: bool) -> np.ndarray:
    if balanced:
        slots = np.repeat(np.arange(topology.nodes), topology.cores_per_node)
        return rng.permutation(slots)[:topology.threads]
    return rng.integers(0, topology.nodes, size=topology.threads)


def _draw_phase_matrix(rng: np.random.Generator, spec: SynthSpec, planted: np.ndarray) -> np.ndarray:
    topology = spec.topology
    counts = rng.integers(0, spec.off_node_max, size=(topology.threads, topology.nodes), endpoint=True)
    preferred = rng.integers(0, spec.count_max, size=topology.threads, endpoint=True)
    counts[np.arange(topology.threads), planted] = preferred
    return counts


def gen_synth(spec: SynthSpec) -> Workload:
    """
    Generate a synthetic workload

    Args:
        spec: Generator parameters

    Returns:
        Workload whose quantum 1 is uniform in [0, count_max] and whose later
        quanta follow the kind's phase structure
    """
    topology = spec.topology
    rng = make_rng(spec.seed)
    shape = (topology.threads, topology.nodes)

    quanta: List[AccessMatrix] = [
        AccessMatrix(rng.integers(0, spec.count_max, size=shape, endpoint=True))]
    planted_vectors: List[Tuple[int, ...]] = []
    previous: Optional[np.ndarray] = None

    for size in phase_sizes(spec.quanta, spec.phases):
        planted = _plant(rng, topology, spec.balanced_planting)
        counts = _draw_phase_matrix(rng, spec, planted)
        # adjacent phases must differ; redraw from the same stream on a collision
        while previous is not None and np.array_equal(counts, previous):
            logger.debug("Phase matrix repeated its predecessor, redrawing")
            counts = _draw_phase_matrix(rng, spec, planted)
        planted_vectors.append(tuple(int(n) for n in planted))

        phase_matrix = AccessMatrix(counts)
        quanta.append(phase_matrix)
        for _ in range(size - 1):
            if spec.redraw_per_quantum:
                quanta.append(AccessMatrix(_draw_phase_matrix(rng, spec, planted)))
            else:
                quanta.append(phase_matrix)
        previous = quanta[-1].counts

    meta = WorkloadMeta(
        kind=spec.kind,
        seed=spec.seed,
        phase_boundaries=tuple(phase_starts(spec.quanta, spec.phases)),
        planted=tuple(planted_vectors),
    )
    logger.debug(f"Generated {spec.kind.value} workload (seed {spec.seed}, {spec.quanta} quanta)")
    return Workload(tuple(quanta), meta)


def infer_phase_boundaries(quanta: Sequence[AccessMatrix]) -> Tuple[int, ...]:
    """Quantum numbers (>= 2) whose matrix differs from the one before"""
    return tuple(
        index + 1 for index in range(1, len(quanta)) if quanta[index] != quanta[index - 1])
