"""
Output formatting utilities for numa-sched reports
"""
import csv
import datetime
import io
import json
import logging
from enum import Enum
from typing import Dict, List, Optional

from reportlab.lib import colors
from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from numa_sched.core_model import LatencyModel, Topology
from numa_sched.exceptions import InvalidInputError
from numa_sched.schedulers import get_scheduler
from numa_sched.simulator import AggregateResult, ExperimentSpec
from numa_sched.workload_gen import SYNTH_KINDS

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "numasched-report/v1"

CSV_COLUMNS = [
    "workload",
    "algorithm",
    "remote_latency",
    "replications",
    "mean_savings_pct",
    "stddev_savings_pct",
]


class OutputFormat(str, Enum):
    TABLE = "table"
    CSV = "csv"
    JSON = "json"


def workload_display_name(label: str) -> str:
    """'synth1' -> 'Synth1'; trace labels are shown as given"""
    if label in {kind.value for kind in SYNTH_KINDS}:
        return label.capitalize()
    return label


def algorithm_display_name(identifier: str) -> str:
    return get_scheduler(identifier).name


def format_savings(mean: float, stddev: float, replications: int) -> str:
    text = f"{mean:.1f}"
    if replications > 1:
        text += f" ± {stddev:.1f}"
    return text


def _latency_heading(lat: LatencyModel) -> str:
    return (f"Remote DRAM latency {lat.remote_cycles} cycles "
            f"(local {lat.local_cycles} cycles), % DRAM cycles saved")


def _savings_grid(result: AggregateResult, lat: LatencyModel) -> List[List[str]]:
    """Header row plus one row per workload for a single latency"""
    algorithms = result.algorithms()
    grid = [["Workload"] + [algorithm_display_name(a) for a in algorithms]]
    for workload in result.workloads():
        row = [workload_display_name(workload)]
        for algorithm in algorithms:
            try:
                cell = result.cell(workload, algorithm, lat.remote_cycles)
            except KeyError:
                row.append("-")
                continue
            row.append(format_savings(cell.mean_savings, cell.stddev_savings, cell.replications))
        grid.append(row)
    return grid


def format_table(result: AggregateResult) -> str:
    """One aligned table per latency: rows are workloads, columns algorithms"""
    blocks = []
    for lat in result.latencies():
        grid = _savings_grid(result, lat)
        widths = [max(len(row[col]) for row in grid) for col in range(len(grid[0]))]
        lines = [_latency_heading(lat)]
        for index, row in enumerate(grid):
            cells = [row[0].ljust(widths[0])] + [
                text.rjust(width) for text, width in zip(row[1:], widths[1:])]
            lines.append("  ".join(cells).rstrip())
            if index == 0:
                lines.append("  ".join("-" * width for width in widths))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def format_csv(result: AggregateResult) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for cell in result.cells:
        writer.writerow([
            cell.workload,
            cell.algorithm,
            cell.remote_latency,
            cell.replications,
            f"{cell.mean_savings:.6f}",
            f"{cell.stddev_savings:.6f}",
        ])
    return out.getvalue()


def report_document(result: AggregateResult, spec: Optional[ExperimentSpec] = None,
                    topology: Optional[Topology] = None) -> Dict:
    """
    JSON report object.

    Keys: schema, topology (or null), spec (or null), cells. Each cell has
    workload, algorithm, local_latency, remote_latency, replications,
    mean/stddev/min/max_savings_pct, mean_remote_fraction,
    mean_baseline_remote_fraction and mean_seconds_saved.
    """
    return {
        "schema": REPORT_SCHEMA,
        "topology": topology.to_dict() if topology is not None else None,
        "spec": spec.to_dict() if spec is not None else None,
        "cells": result.to_dict()["cells"],
    }


def format_json(result: AggregateResult, spec: Optional[ExperimentSpec] = None,
                topology: Optional[Topology] = None) -> str:
    return json.dumps(report_document(result, spec, topology), indent=2) + "\n"


def render_report(result: AggregateResult, fmt: OutputFormat = OutputFormat.TABLE,
                  spec: Optional[ExperimentSpec] = None,
                  topology: Optional[Topology] = None) -> str:
    """
    Render aggregate results

    Args:
        result: Cells to render
        fmt: table, csv or json
        spec: Experiment echoed into JSON output
        topology: Machine shape echoed into JSON output

    Returns:
        The rendered report text
    """
    if result.is_empty():
        raise InvalidInputError("nothing to report: no result cells")
    fmt = OutputFormat(fmt)
    if fmt is OutputFormat.CSV:
        return format_csv(result)
    if fmt is OutputFormat.JSON:
        return format_json(result, spec, topology)
    return format_table(result)


def generate_pdf_report(result: AggregateResult, output_file: str,
                        spec: Optional[ExperimentSpec] = None,
                        topology: Optional[Topology] = None) -> None:
    """
    Generate a PDF report with one savings table per remote latency

    Args:
        result: Aggregate results
        output_file: Path to save the PDF file
        spec: Experiment whose settings are summarised
        topology: Machine shape
    """
    doc = SimpleDocTemplate(output_file, pagesize=letter)
    elements = []

    styles = getSampleStyleSheet()
    title_style = styles['Title']
    heading_style = styles['Heading2']
    normal_style = styles['Normal']

    timestamp = datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    elements.append(Paragraph("NUMA Scheduling Simulation Report", title_style))
    elements.append(Paragraph(f"Generated on: {timestamp}", normal_style))
    elements.append(Spacer(1, 0.25 * inch))

    if topology is not None:
        elements.append(Paragraph(
            f"{topology.nodes} nodes x {topology.cores_per_node} cores, "
            f"{topology.threads} threads", normal_style))
    if spec is not None:
        elements.append(Paragraph(
            f"{spec.replications} replication(s), base seed {spec.base_seed}", normal_style))
    elements.append(Spacer(1, 0.25 * inch))

    for lat in result.latencies():
        elements.append(Paragraph(_latency_heading(lat), heading_style))
        elements.append(Spacer(1, 0.1 * inch))
        table = Table(_savings_grid(result, lat))
        table.setStyle(TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), colors.lightgrey),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('ALIGN', (1, 0), (-1, -1), 'RIGHT'),
            ('BOTTOMPADDING', (0, 0), (-1, -1), 6),
            ('GRID', (0, 0), (-1, -1), 1, colors.black),
        ]))
        elements.append(table)
        elements.append(Spacer(1, 0.25 * inch))

    doc.build(elements)
    logger.info(f"PDF report generated: {output_file}")
