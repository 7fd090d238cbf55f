"""
Tests for the command-line interface and settings
"""
import json
import os
import tempfile
import unittest
from unittest.mock import patch

import click
from click.testing import CliRunner

from numa_sched.cli import cli, parse_cli
from numa_sched.config import DEFAULT_ENUMERATION_BOUND, load_settings
from numa_sched.core_model import LatencyModel, Topology
from numa_sched.exceptions import InvalidInputError
from numa_sched.file_utils import parse_trace
from numa_sched.output_utils import OutputFormat
from numa_sched.workload_gen import SynthSpec, WorkloadKind


class TestParseCli(unittest.TestCase):
    """Turning arguments into an experiment"""

    def test_defaults(self):
        spec, topology, fmt = parse_cli([])
        self.assertEqual(topology, Topology())
        self.assertEqual(fmt, OutputFormat.TABLE)
        self.assertEqual([source.kind for source in spec.workloads],
                         [WorkloadKind.SYNTH1, WorkloadKind.SYNTH2, WorkloadKind.SYNTH3])
        self.assertEqual(spec.algorithms, ("algo1", "algo2", "algo3", "algo4"))
        self.assertEqual(spec.latencies, (LatencyModel(100, 150),))
        self.assertEqual(spec.replications, 1)
        source = spec.workloads[0]
        self.assertEqual((source.quanta, source.count_max, source.balanced_planting), (16, 10000, True))

    def test_single_cell(self):
        spec, _, _ = parse_cli(["--workload", "synth1", "--algo", "4", "--remote-latency", "300"])
        self.assertEqual(len(spec.workloads), 1)
        self.assertEqual(spec.algorithms, ("algo4",))
        self.assertEqual(spec.latencies, (LatencyModel(100, 300),))

    def test_lists(self):
        spec, _, fmt = parse_cli(["--workload", "synth3,synth1", "--algo", "1,3",
                                  "--remote-latency", "150,200,300", "--format", "csv"])
        self.assertEqual([s.kind for s in spec.workloads], [WorkloadKind.SYNTH3, WorkloadKind.SYNTH1])
        self.assertEqual(spec.algorithms, ("algo1", "algo3"))
        self.assertEqual([lat.remote_cycles for lat in spec.latencies], [150, 200, 300])
        self.assertEqual(fmt, OutputFormat.CSV)

    def test_generator_flags(self):
        spec, _, _ = parse_cli(["--workload", "synth2", "--quanta", "8", "--dominance", "0.05",
                                "--no-balanced-planting", "--redraw-per-quantum", "--seed", "9"])
        source = spec.workloads[0]
        self.assertIsInstance(source, SynthSpec)
        self.assertEqual(source.quanta, 8)
        self.assertEqual(source.off_node_max, 500)
        self.assertFalse(source.balanced_planting)
        self.assertTrue(source.redraw_per_quantum)
        self.assertEqual(spec.base_seed, 9)

    def test_rejects_bad_arguments(self):
        bad = [
            ["--threads", "20"],
            ["--no-such-flag"],
            ["--algo", "7"],
            ["--workload", "synth9"],
            ["--remote-latency", "90"],
            ["--remote-latency", "fast"],
            ["--workload", "synth3", "--quanta", "3"],
            ["--replications", "0"],
        ]
        for argv in bad:
            with self.assertRaises(click.UsageError, msg=argv):
                parse_cli(argv)

    def test_trace_workload(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = os.path.join(temp_dir, "w.trace")
            with open(path, "w") as handle:
                handle.write("numasched-trace,v1,4,2,3\n1,0,0,5\n2,1,1,3\n")
            spec, topology, _ = parse_cli(["--workload", f"trace:{path}", "--cores-per-node", "2"])
            self.assertEqual(topology, Topology(nodes=2, cores_per_node=2, threads=4))
            self.assertEqual(spec.workloads[0].meta.label, "trace:w.trace")

            with self.assertRaises(click.UsageError):
                parse_cli(["--workload", f"trace:{path}", "--dominance", "0.02"])
            with self.assertRaises(click.UsageError):
                parse_cli(["--workload", f"trace:{path}", "--threads", "5", "--cores-per-node", "4"])
        with self.assertRaises(click.UsageError):
            parse_cli(["--workload", "trace:/nonexistent.trace"])


class TestCliCommands(unittest.TestCase):
    """Running commands end to end"""

    def setUp(self):
        self.runner = CliRunner()

    def test_run_single_cell(self):
        result = self.runner.invoke(cli, ["run", "--workload", "synth1", "--algo", "4",
                                          "--remote-latency", "300"])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("Remote DRAM latency 300 cycles", result.output)
        self.assertIn("Synth1", result.output)
        self.assertIn("Algo4", result.output)

    def test_csv_is_reproducible(self):
        argv = ["run", "--workload", "synth2", "--algo", "1,2", "--replications", "3",
                "--remote-latency", "150,300", "--format", "csv", "--seed", "42"]
        first = self.runner.invoke(cli, argv)
        second = self.runner.invoke(cli, argv)
        self.assertEqual(first.exit_code, 0, first.output)
        self.assertEqual(first.output, second.output)
        lines = first.output.splitlines()
        self.assertEqual(lines[0], "workload,algorithm,remote_latency,replications,"
                                   "mean_savings_pct,stddev_savings_pct")
        self.assertEqual(len(lines), 5)

    def test_json_to_file_and_pdf(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            out = os.path.join(temp_dir, "report.json")
            pdf = os.path.join(temp_dir, "report.pdf")
            result = self.runner.invoke(cli, ["run", "--workload", "synth1", "--algo", "2",
                                              "--format", "json", "--out", out, "--pdf", pdf])
            self.assertEqual(result.exit_code, 0, result.output)
            with open(out) as handle:
                document = json.load(handle)
            self.assertTrue(os.path.exists(pdf))
        self.assertEqual(document["cells"][0]["algorithm"], "algo2")
        self.assertEqual(document["spec"]["replications"], 1)

    def test_too_many_threads(self):
        result = self.runner.invoke(cli, ["run", "--threads", "20"])
        self.assertNotEqual(result.exit_code, 0)

    def test_unknown_flag(self):
        result = self.runner.invoke(cli, ["run", "--bogus"])
        self.assertEqual(result.exit_code, 2)

    def test_generate_then_run_trace(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            path = os.path.join(temp_dir, "synth3.trace")
            result = self.runner.invoke(cli, ["generate", "--workload", "synth3", "--seed", "4",
                                              "--out", path])
            self.assertEqual(result.exit_code, 0, result.output)
            workload = parse_trace(path)
            self.assertEqual(workload.num_quanta, 16)
            self.assertEqual(workload.meta.phase_boundaries, (2, 6, 10, 14))

            result = self.runner.invoke(cli, ["run", "--workload", f"trace:{path}", "--algo", "1"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertIn("trace:synth3.trace", result.output)

    def test_generate_to_stdout(self):
        result = self.runner.invoke(cli, ["generate", "--workload", "synth1", "--quanta", "2",
                                          "--threads", "4", "--nodes", "2", "--cores-per-node", "2"])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue(result.output.startswith("numasched-trace,v1,4,2,2\n"))

    def test_verify(self):
        result = self.runner.invoke(cli, ["verify", "--instances", "5", "--remote-latency", "150,300"])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("30 instances", result.output)

    def test_run_with_verify(self):
        result = self.runner.invoke(cli, ["run", "--workload", "synth1", "--algo", "4", "--verify"])
        self.assertEqual(result.exit_code, 0, result.output)

    def test_version(self):
        result = self.runner.invoke(cli, ["version"])
        self.assertEqual(result.exit_code, 0)
        self.assertIn("numa-sched v", result.output)


class TestSettings(unittest.TestCase):
    """Environment-driven settings"""

    @patch.dict(os.environ, {}, clear=True)
    def test_defaults(self):
        settings = load_settings()
        self.assertEqual(settings.log_level, "INFO")
        self.assertEqual(settings.workers, 1)
        self.assertEqual(settings.enumeration_bound, DEFAULT_ENUMERATION_BOUND)

    @patch.dict(os.environ, {"NUMASCHED_LOG_LEVEL": "debug", "NUMASCHED_WORKERS": "3",
                             "NUMASCHED_ORACLE_BOUND": "1000"}, clear=True)
    def test_overrides(self):
        settings = load_settings()
        self.assertEqual(settings.log_level, "DEBUG")
        self.assertEqual(settings.workers, 3)
        self.assertEqual(settings.oracle_bound, 1000)

    @patch.dict(os.environ, {"NUMASCHED_WORKERS": "0"}, clear=True)
    def test_invalid_workers(self):
        with self.assertRaises(InvalidInputError):
            load_settings()

    @patch.dict(os.environ, {"NUMASCHED_LOG_LEVEL": "LOUD"}, clear=True)
    def test_invalid_log_level(self):
        with self.assertRaises(InvalidInputError):
            load_settings()

    @patch.dict(os.environ, {"NUMASCHED_ENUMERATION_BOUND": "100"}, clear=True)
    def test_enumeration_bound_reaches_algo3(self):
        result = CliRunner().invoke(cli, ["run", "--workload", "synth1", "--algo", "3"])
        self.assertNotEqual(result.exit_code, 0)
        self.assertIn("bound exceeded", result.output)

    @patch.dict(os.environ, {"NUMASCHED_ENUMERATION_BOUND": "100"}, clear=True)
    def test_enumeration_bound_from_worker_processes(self):
        result = CliRunner().invoke(cli, ["run", "--workload", "synth1", "--algo", "3",
                                          "--replications", "2", "--workers", "2"])
        self.assertEqual(result.exit_code, 1)
        self.assertIn("group enumeration bound exceeded", result.output)


if __name__ == "__main__":
    unittest.main()
