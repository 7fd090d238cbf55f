"""
Command-line interface for numa-sched
"""
import logging
import sys
from typing import List, Optional, Sequence, Tuple

import click
from click.core import ParameterSource

from numa_sched.assignment_solvers import DEFAULT_VERIFY_TOPOLOGIES, cross_check
from numa_sched.config import Settings, load_settings
from numa_sched.core_model import LatencyModel, Topology
from numa_sched.exceptions import NumaSchedError
from numa_sched.file_utils import format_trace, parse_trace, write_file_content
from numa_sched.output_utils import OutputFormat, generate_pdf_report, render_report
from numa_sched.schedulers import algorithm_ids, get_scheduler
from numa_sched.simulator import ExperimentSpec, sensitivity_sweep
from numa_sched.workload_gen import SYNTH_KINDS, SynthSpec, WorkloadKind, gen_synth

# Configure logging
logging.basicConfig(level=logging.INFO,
                    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# Flags that only shape generated workloads; they make no sense with a trace
GENERATOR_PARAMS = ("quanta", "count_max", "dominance", "balanced_planting", "redraw_per_quantum")

VERIFY_INSTANCES = 50


def _split_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _parse_remote_latencies(ctx, param, value: str) -> List[int]:
    items = _split_list(value)
    if not items:
        raise click.BadParameter("at least one remote latency is required")
    try:
        return [int(item) for item in items]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of integers, got {value!r}")


def _parse_algorithms(ctx, param, value: str) -> List[str]:
    items = _split_list(value)
    if not items:
        raise click.BadParameter("at least one algorithm is required")
    if any(item.lower() == "all" for item in items):
        return algorithm_ids()
    try:
        identifiers = [get_scheduler(item).identifier for item in items]
    except NumaSchedError as e:
        raise click.BadParameter(str(e))
    return list(dict.fromkeys(identifiers))


def _parse_workloads(ctx, param, value: str) -> List[str]:
    if value.startswith("trace:"):
        if not value[len("trace:"):]:
            raise click.BadParameter("trace: needs a file path")
        return [value]
    items = _split_list(value)
    if not items:
        raise click.BadParameter("at least one workload is required")
    kinds = []
    for item in items:
        if item.lower() == "all":
            kinds.extend(kind.value for kind in SYNTH_KINDS)
        elif item.lower() in {kind.value for kind in SYNTH_KINDS}:
            kinds.append(item.lower())
        else:
            raise click.BadParameter(
                f"unknown workload {item!r}; use synth1, synth2, synth3, all or trace:<path>")
    return list(dict.fromkeys(kinds))


def topology_options(function):
    function = click.option('--threads', type=click.IntRange(min=1), default=16, show_default=True,
                            help='Number of threads (N)')(function)
    function = click.option('--cores-per-node', type=click.IntRange(min=1), default=4, show_default=True,
                            help='Cores per node (K), the per-node thread capacity')(function)
    function = click.option('--nodes', type=click.IntRange(min=1), default=4, show_default=True,
                            help='Number of NUMA nodes (L)')(function)
    return function


def generator_options(function):
    function = click.option('--redraw-per-quantum', is_flag=True, default=False,
                            help='Redraw counts every quantum, keeping the phase grouping')(function)
    function = click.option('--balanced-planting/--no-balanced-planting', default=True, show_default=True,
                            help='Plant exactly cores-per-node threads per preferred node')(function)
    function = click.option('--dominance', type=click.FloatRange(min=0, max=1, min_open=True), default=0.01,
                            show_default=True, help='Off-node counts stay below dominance x count-max')(function)
    function = click.option('--count-max', type=click.IntRange(min=1), default=10000, show_default=True,
                            help='Largest generated access count')(function)
    function = click.option('--quanta', type=click.IntRange(min=1), default=16, show_default=True,
                            help='Scheduling quanta per workload')(function)
    return function


def _topology(params) -> Topology:
    try:
        return Topology(nodes=params["nodes"], cores_per_node=params["cores_per_node"],
                        threads=params["threads"])
    except NumaSchedError as e:
        raise click.UsageError(str(e))


def _is_explicit(ctx: click.Context, name: str) -> bool:
    source = ctx.get_parameter_source(name)
    return source not in (None, ParameterSource.DEFAULT, ParameterSource.DEFAULT_MAP)


def build_experiment(ctx: click.Context, settings: Optional[Settings] = None
                     ) -> Tuple[ExperimentSpec, Topology, OutputFormat]:
    """
    Turn parsed `run` options into an experiment

    Raises:
        click.UsageError: invalid or conflicting options
    """
    settings = settings or load_settings()
    params = ctx.params
    workloads = params["workload"]

    if workloads[0].startswith("trace:"):
        conflicting = [name for name in GENERATOR_PARAMS if _is_explicit(ctx, name)]
        if conflicting:
            flags = ", ".join("--" + name.replace("_", "-") for name in conflicting)
            raise click.UsageError(f"generator options cannot be combined with a trace workload: {flags}")
        path = workloads[0][len("trace:"):]
        try:
            trace = parse_trace(path)
        except NumaSchedError as e:
            raise click.UsageError(str(e))
        resolved = dict(params)
        if not _is_explicit(ctx, "threads"):
            resolved["threads"] = trace.threads
        if not _is_explicit(ctx, "nodes"):
            resolved["nodes"] = trace.nodes
        topology = _topology(resolved)
        try:
            trace.check(topology)
        except NumaSchedError as e:
            raise click.UsageError(str(e))
        sources = (trace,)
    else:
        topology = _topology(params)
        try:
            sources = tuple(
                SynthSpec(kind=WorkloadKind(kind), topology=topology, quanta=params["quanta"],
                          seed=params["seed"], count_max=params["count_max"],
                          dominance=params["dominance"],
                          balanced_planting=params["balanced_planting"],
                          redraw_per_quantum=params["redraw_per_quantum"])
                for kind in workloads)
        except NumaSchedError as e:
            raise click.UsageError(str(e))

    try:
        latencies = tuple(
            LatencyModel(local_cycles=params["local_latency"], remote_cycles=remote)
            for remote in params["remote_latency"])
        spec = ExperimentSpec(
            workloads=sources,
            algorithms=tuple(params["algo"]),
            latencies=latencies,
            replications=params["replications"],
            base_seed=params["seed"],
            enumeration_bound=settings.enumeration_bound,
        )
    except NumaSchedError as e:
        raise click.UsageError(str(e))
    return spec, topology, OutputFormat(params["fmt"])


@click.group()
@click.pass_context
def cli(ctx):
    """numasched - NUMA thread placement scheduling simulator"""
    try:
        settings = load_settings()
    except NumaSchedError as e:
        raise click.UsageError(str(e))
    logging.getLogger().setLevel(settings.log_level)
    ctx.obj = settings


@cli.command()
@click.option('--workload', default='all', show_default=True, callback=_parse_workloads,
              help='synth1, synth2, synth3, all (comma lists allowed) or trace:<path>')
@click.option('--algo', default='all', show_default=True, callback=_parse_algorithms,
              help='1, 2, 3, 4 or all (comma lists allowed)')
@topology_options
@generator_options
@click.option('--local-latency', type=click.IntRange(min=1), default=100, show_default=True,
              help='Cycles per local DRAM access')
@click.option('--remote-latency', default='150', show_default=True, callback=_parse_remote_latencies,
              help='Cycles per remote DRAM access; a comma list runs a sensitivity sweep')
@click.option('--seed', type=click.IntRange(min=0, max=2 ** 64 - 1), default=0, show_default=True,
              help='Base seed; replication r uses seed + r')
@click.option('--replications', type=click.IntRange(min=1), default=1, show_default=True,
              help='Replications per cell')
@click.option('--format', 'fmt', type=click.Choice([f.value for f in OutputFormat]), default='table',
              show_default=True, help='Report format')
@click.option('--out', '-o', type=click.Path(dir_okay=False), help='Write the report here instead of stdout')
@click.option('--pdf', '-p', type=click.Path(dir_okay=False), help='Also save the report as PDF')
@click.option('--workers', type=click.IntRange(min=1), default=None,
              help='Worker processes for replications (default NUMASCHED_WORKERS or 1)')
@click.option('--verify', is_flag=True, help='Cross-check Hungarian against brute force before running')
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose output')
@click.pass_context
def run(ctx, **params):
    """
    Simulate the placement algorithms over workloads and report DRAM cycles saved
    """
    if params["verbose"]:
        logging.getLogger().setLevel(logging.DEBUG)
    settings = ctx.obj if isinstance(ctx.obj, Settings) else load_settings()
    spec, topology, fmt = build_experiment(ctx, settings)
    workers = params["workers"] or settings.workers

    try:
        if params["verify"]:
            checked = cross_check(DEFAULT_VERIFY_TOPOLOGIES, spec.latencies,
                                  instances=VERIFY_INSTANCES, seed=spec.base_seed,
                                  bound=settings.oracle_bound)
            logger.info(f"Oracle cross-check passed on {checked} instances")
        result = sensitivity_sweep(spec, topology, workers=workers)
        text = render_report(result, fmt, spec, topology)
        if params["out"]:
            write_file_content(params["out"], text)
            logger.info(f"Report saved to: {params['out']}")
        else:
            click.echo(text, nl=False)
        if params["pdf"]:
            generate_pdf_report(result, params["pdf"], spec, topology)
    except NumaSchedError as e:
        logger.error(str(e))
        raise click.ClickException(str(e))


def parse_cli(argv: Sequence[str]) -> Tuple[ExperimentSpec, Topology, OutputFormat]:
    """
    Parse `run` arguments without running anything

    Raises:
        click.UsageError: unknown flags, invalid values or conflicting options
    """
    ctx = run.make_context("run", list(argv))
    return build_experiment(ctx)


@cli.command()
@click.option('--workload', type=click.Choice([kind.value for kind in SYNTH_KINDS]), default='synth1',
              show_default=True, help='Synthetic workload kind')
@topology_options
@generator_options
@click.option('--seed', type=click.IntRange(min=0, max=2 ** 64 - 1), default=0, show_default=True,
              help='Generator seed')
@click.option('--out', '-o', type=click.Path(dir_okay=False), help='Trace file to write (default stdout)')
def generate(workload: str, nodes: int, cores_per_node: int, threads: int, quanta: int,
             count_max: int, dominance: float, balanced_planting: bool, redraw_per_quantum: bool,
             seed: int, out: Optional[str]):
    """
    Write a synthetic workload as a trace file
    """
    topology = _topology({"nodes": nodes, "cores_per_node": cores_per_node, "threads": threads})
    try:
        spec = SynthSpec(kind=WorkloadKind(workload), topology=topology, quanta=quanta, seed=seed,
                         count_max=count_max, dominance=dominance,
                         balanced_planting=balanced_planting,
                         redraw_per_quantum=redraw_per_quantum)
    except NumaSchedError as e:
        raise click.UsageError(str(e))

    content = format_trace(gen_synth(spec))
    if out:
        try:
            write_file_content(out, content)
        except NumaSchedError as e:
            raise click.ClickException(str(e))
        logger.info(f"Trace written to: {out}")
    else:
        click.echo(content, nl=False)


@cli.command()
@click.option('--instances', type=click.IntRange(min=1), default=VERIFY_INSTANCES, show_default=True,
              help='Random matrices per topology')
@click.option('--local-latency', type=click.IntRange(min=1), default=100, show_default=True,
              help='Cycles per local DRAM access')
@click.option('--remote-latency', default='150,200,300', show_default=True,
              callback=_parse_remote_latencies, help='Remote latencies to check')
@click.option('--seed', type=click.IntRange(min=0, max=2 ** 64 - 1), default=0, show_default=True,
              help='Seed for the random matrices')
@click.pass_context
def verify(ctx, instances: int, local_latency: int, remote_latency: List[int], seed: int):
    """
    Check that the Hungarian scheduler matches the brute-force optimum
    """
    settings = ctx.obj if isinstance(ctx.obj, Settings) else load_settings()
    try:
        latencies = [LatencyModel(local_cycles=local_latency, remote_cycles=r) for r in remote_latency]
    except NumaSchedError as e:
        raise click.UsageError(str(e))
    try:
        checked = cross_check(DEFAULT_VERIFY_TOPOLOGIES, latencies, instances=instances,
                              seed=seed, bound=settings.oracle_bound)
    except NumaSchedError as e:
        logger.error(str(e))
        raise click.ClickException(str(e))
    click.echo(f"Hungarian placement matched the brute-force optimum on {checked} instances")


@cli.command()
def version():
    """Display the version of numa-sched"""
    from numa_sched import __version__
    click.echo(f"numa-sched v{__version__}")


def main():
    """Main entry point for the CLI"""
    try:
        cli()
    except Exception as e:
        logger.error(f"Error: {str(e)}")
        sys.exit(1)


if __name__ == "__main__":
    main()
