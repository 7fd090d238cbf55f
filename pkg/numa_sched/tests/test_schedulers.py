"""
Tests for the four placement algorithms
"""
import unittest

import numpy as np

from numa_sched.core_model import (AccessMatrix, LatencyModel, Schedule, Topology,
                                   baseline_schedule, schedule_cost)
from numa_sched.exceptions import EnumerationBoundError, InvalidInputError
from numa_sched.schedulers import (AVAILABLE_SCHEDULERS, GroupEnumerationScheduler,
                                   HungarianScheduler, algo1_sorted_pairs, algo2_per_node,
                                   algo3_group_enumeration, algo4_hungarian, algorithm_ids,
                                   get_scheduler, group_candidates)

SMALL = Topology(nodes=2, cores_per_node=2, threads=4)
SMALL_MATRIX = AccessMatrix([[100, 90], [95, 0], [94, 0], [0, 10]])


def _dominant_thread_matrix() -> AccessMatrix:
    counts = np.zeros((16, 4), dtype=np.int64)
    counts[0] = [10, 10, 10, 1000]
    return AccessMatrix(counts)


def _random_topologies():
    return [
        Topology(),
        Topology(nodes=4, cores_per_node=4, threads=10),
        Topology(nodes=3, cores_per_node=3, threads=7),
        Topology(nodes=2, cores_per_node=2, threads=4),
        Topology(nodes=5, cores_per_node=1, threads=5),
    ]


def _all_schedules(matrix, topology, lat):
    return {
        "algo1": algo1_sorted_pairs(matrix, topology),
        "algo2": algo2_per_node(matrix, topology),
        "algo3": algo3_group_enumeration(matrix, topology),
        "algo4": algo4_hungarian(matrix, topology, lat),
    }


class TestRegistry(unittest.TestCase):
    """Looking schedulers up by identifier"""

    def test_identifiers(self):
        self.assertEqual(algorithm_ids(), ["algo1", "algo2", "algo3", "algo4"])
        self.assertEqual(len(AVAILABLE_SCHEDULERS), 4)

    def test_lookup_forms(self):
        self.assertEqual(get_scheduler("algo2").identifier, "algo2")
        self.assertEqual(get_scheduler("3").identifier, "algo3")
        self.assertEqual(get_scheduler(4).identifier, "algo4")
        scheduler = HungarianScheduler()
        self.assertIs(get_scheduler(scheduler), scheduler)

    def test_unknown(self):
        with self.assertRaises(InvalidInputError):
            get_scheduler("algo9")

    def test_enumeration_bound_passed_through(self):
        scheduler = get_scheduler("algo3", enumeration_bound=100)
        self.assertIsInstance(scheduler, GroupEnumerationScheduler)
        self.assertEqual(scheduler.bound, 100)

    def test_only_hungarian_reads_latency(self):
        flags = {get_scheduler(a).identifier: get_scheduler(a).uses_latency for a in algorithm_ids()}
        self.assertEqual(flags, {"algo1": False, "algo2": False, "algo3": False, "algo4": True})


class TestSortedPairs(unittest.TestCase):
    """Algorithm 1"""

    def test_dominant_thread(self):
        schedule = algo1_sorted_pairs(_dominant_thread_matrix(), Topology())
        self.assertEqual(schedule.placement,
                         (3, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3))

    def test_two_clear_pairs(self):
        matrix = AccessMatrix([[100, 0], [0, 100], [90, 10], [10, 90]])
        self.assertEqual(algo1_sorted_pairs(matrix, SMALL).placement, (0, 1, 0, 1))

    def test_greedy_falls_short(self):
        schedule = algo1_sorted_pairs(SMALL_MATRIX, SMALL)
        self.assertEqual(schedule.placement, (0, 0, 1, 1))
        result = schedule_cost(SMALL_MATRIX, schedule, LatencyModel())
        self.assertEqual(result.total_cycles, 48100)
        self.assertEqual(result.local_accesses, 205)


class TestPerNode(unittest.TestCase):
    """Algorithm 2"""

    def test_two_clear_pairs(self):
        matrix = AccessMatrix([[100, 0], [0, 100], [90, 10], [10, 90]])
        self.assertEqual(algo2_per_node(matrix, SMALL).placement, (0, 1, 0, 1))

    def test_early_node_chooses_first(self):
        self.assertEqual(algo2_per_node(SMALL_MATRIX, SMALL).placement, (0, 0, 1, 1))

    def test_all_zero_gives_block_placement(self):
        topology = Topology()
        self.assertEqual(algo2_per_node(AccessMatrix.zeros(topology), topology),
                         baseline_schedule(topology))


class TestGroupEnumeration(unittest.TestCase):
    """Algorithm 3"""

    def test_candidate_count(self):
        matrix = AccessMatrix(np.ones((16, 4), dtype=np.int64))
        candidates = group_candidates(matrix, 4)
        self.assertEqual(candidates.size, 7280)
        self.assertEqual(candidates.groups.shape, (1820, 4))
        self.assertTrue((candidates.sums == 4).all())

    def test_best_group_first(self):
        self.assertEqual(algo3_group_enumeration(SMALL_MATRIX, SMALL).placement, (0, 0, 1, 1))

    def test_tied_groups_by_rank(self):
        matrix = AccessMatrix([[100, 0], [0, 100], [90, 10], [10, 90]])
        self.assertEqual(algo3_group_enumeration(matrix, SMALL).placement, (0, 1, 0, 1))

    def test_all_zero_gives_block_placement(self):
        topology = Topology()
        self.assertEqual(algo3_group_enumeration(AccessMatrix.zeros(topology), topology),
                         baseline_schedule(topology))

    def test_leftover_threads(self):
        topology = Topology(nodes=2, cores_per_node=2, threads=3)
        matrix = AccessMatrix([[5, 0], [4, 0], [0, 3]])
        self.assertEqual(algo3_group_enumeration(matrix, topology).placement, (0, 0, 1))

    def test_fewer_threads_than_a_group(self):
        topology = Topology(nodes=3, cores_per_node=4, threads=2)
        matrix = AccessMatrix([[0, 1, 7], [2, 0, 1]])
        self.assertEqual(algo3_group_enumeration(matrix, topology).placement, (2, 2))

    def test_bound(self):
        with self.assertRaises(EnumerationBoundError) as raised:
            algo3_group_enumeration(_dominant_thread_matrix(), Topology(), bound=7279)
        self.assertEqual(raised.exception.size, 7280)
        with self.assertRaises(EnumerationBoundError):
            get_scheduler("algo3", enumeration_bound=10).schedule(_dominant_thread_matrix(), Topology())


class TestHungarianScheduler(unittest.TestCase):
    """Algorithm 4"""

    def test_small_instance(self):
        schedule = algo4_hungarian(SMALL_MATRIX, SMALL, LatencyModel())
        self.assertEqual(schedule.placement, (1, 0, 0, 1))
        result = schedule_cost(SMALL_MATRIX, schedule, LatencyModel())
        self.assertEqual(result.total_cycles, 43900)
        self.assertEqual(result.local_accesses, 289)

    def test_dominant_thread(self):
        schedule = algo4_hungarian(_dominant_thread_matrix(), Topology(), LatencyModel())
        self.assertEqual(schedule.node_of(0), 3)
        self.assertEqual(schedule_cost(_dominant_thread_matrix(), schedule, LatencyModel()).total_cycles,
                         104500)

    def test_symmetric_latency(self):
        rng = np.random.default_rng(4)
        topology = Topology()
        lat = LatencyModel(100, 100)
        matrix = AccessMatrix(rng.integers(0, 10000, size=(16, 4)))
        schedule = algo4_hungarian(matrix, topology, lat)
        self.assertEqual(schedule_cost(matrix, schedule, lat).total_cycles,
                         schedule_cost(matrix, baseline_schedule(topology), lat).total_cycles)

    def test_default_latency(self):
        self.assertEqual(HungarianScheduler().schedule(SMALL_MATRIX, SMALL).placement, (1, 0, 0, 1))

    def test_all_zero_gives_block_placement(self):
        topology = Topology()
        schedule = algo4_hungarian(AccessMatrix.zeros(topology), topology, LatencyModel(100, 100))
        self.assertEqual(schedule, baseline_schedule(topology))


class TestSchedulerProperties(unittest.TestCase):
    """Behaviour shared by, or compared across, the algorithms"""

    def setUp(self):
        self.rng = np.random.default_rng(20240601)
        self.lat = LatencyModel()

    def test_always_valid(self):
        for topology in _random_topologies():
            for _ in range(60):
                high = int(self.rng.choice([0, 1, 3, 10000]))
                matrix = AccessMatrix(self.rng.integers(
                    0, high, size=(topology.threads, topology.nodes), endpoint=True))
                for name, schedule in _all_schedules(matrix, topology, self.lat).items():
                    self.assertIsInstance(schedule, Schedule, name)
                    self.assertEqual(len(schedule), topology.threads)
                    self.assertLessEqual(max(schedule.node_loads()), topology.cores_per_node, name)

    def test_hungarian_never_worse(self):
        topology = Topology()
        for _ in range(10_000):
            matrix = AccessMatrix(self.rng.integers(0, 10000, size=(16, 4), endpoint=True))
            costs = {name: schedule_cost(matrix, schedule, self.lat).total_cycles
                     for name, schedule in _all_schedules(matrix, topology, self.lat).items()}
            for name in ("algo1", "algo2", "algo3"):
                self.assertLessEqual(costs["algo4"], costs[name], name)

    def test_planted_optimum_recovered(self):
        topology = Topology()
        for _ in range(50):
            planted = self.rng.permutation(np.repeat(np.arange(4), 4))
            counts = self.rng.integers(0, 100, size=(16, 4), endpoint=True)
            counts[np.arange(16), planted] = 1000 + self.rng.integers(0, 100, size=16, endpoint=True)
            matrix = AccessMatrix(counts)
            for name, schedule in _all_schedules(matrix, topology, self.lat).items():
                self.assertEqual(schedule.placement, tuple(planted.tolist()), name)

    def test_scale_invariance(self):
        topology = Topology()
        for _ in range(30):
            matrix = AccessMatrix(self.rng.permutation(64).reshape(16, 4) * 13 + 1)
            scaled = matrix.scaled(7)
            for scheduler in (algo1_sorted_pairs, algo2_per_node, algo3_group_enumeration):
                self.assertEqual(scheduler(matrix, topology), scheduler(scaled, topology))
            best = schedule_cost(matrix, algo4_hungarian(matrix, topology, self.lat), self.lat)
            best_scaled = schedule_cost(scaled, algo4_hungarian(scaled, topology, self.lat), self.lat)
            self.assertEqual(best_scaled.total_cycles, 7 * best.total_cycles)

    def test_permutation_equivariance(self):
        # distinct powers of two keep every comparison strict
        topology = Topology(nodes=3, cores_per_node=2, threads=6)
        for _ in range(30):
            matrix = AccessMatrix((2 ** self.rng.permutation(18)).reshape(6, 3))
            perm = self.rng.permutation(6)
            permuted = AccessMatrix(matrix.counts[perm])
            original = _all_schedules(matrix, topology, self.lat)
            relabelled = _all_schedules(permuted, topology, self.lat)
            for name in original:
                expected = tuple(original[name].placement[p] for p in perm.tolist())
                self.assertEqual(relabelled[name].placement, expected, name)

    def test_greedy_ignores_latency(self):
        topology = Topology()
        for identifier in ("algo1", "algo2", "algo3"):
            scheduler = get_scheduler(identifier)
            for _ in range(10):
                matrix = AccessMatrix(self.rng.integers(0, 10000, size=(16, 4), endpoint=True))
                schedules = {scheduler.schedule(matrix, topology, LatencyModel(100, r))
                             for r in (100, 150, 200, 300)}
                schedules.add(scheduler.schedule(matrix, topology))
                self.assertEqual(len(schedules), 1, identifier)


if __name__ == "__main__":
    unittest.main()
