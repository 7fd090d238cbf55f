"""
Workload trace files and other file helpers for numa-sched.

Trace format (UTF-8, LF line endings):

    numasched-trace,v1,<threads>,<nodes>,<quanta>
    <quantum>,<thread>,<node>,<count>
    ...

Quanta are numbered from 1, threads and nodes from 0. Zero counts may be
omitted; rows are written sorted by (quantum, thread, node).
"""
import io
import logging
import os
from pathlib import Path
from typing import IO, Dict, Optional, Tuple, Union

import numpy as np

from numa_sched.core_model import AccessMatrix
from numa_sched.exceptions import TraceFormatError, WorkloadIOError
from numa_sched.workload_gen import Workload, WorkloadKind, WorkloadMeta, infer_phase_boundaries

logger = logging.getLogger(__name__)

TRACE_MAGIC = "numasched-trace"
TRACE_VERSION = "v1"
# counts are stored as int64
MAX_TRACE_COUNT = 2 ** 63 - 1
# quanta x threads x nodes
MAX_TRACE_CELLS = 10 ** 7

PathOrStream = Union[str, os.PathLike, IO[str]]


def read_file_content(file_path: Union[str, os.PathLike]) -> str:
    """
    Read the content of a text file

    Args:
        file_path: Path to the file

    Returns:
        File content as string

    Raises:
        WorkloadIOError: the file can't be read
    """
    try:
        with open(file_path, "r", encoding="utf-8") as file:
            return file.read()
    except OSError as e:
        raise WorkloadIOError(f"Error reading file {file_path}: {e}") from e


def write_file_content(file_path: Union[str, os.PathLike], content: str) -> None:
    """Write text with LF line endings, wrapping OS errors with the path"""
    try:
        with open(file_path, "w", encoding="utf-8", newline="\n") as file:
            file.write(content)
    except OSError as e:
        raise WorkloadIOError(f"Error writing file {file_path}: {e}") from e


def _parse_int(field: str, what: str, line_number: int) -> int:
    try:
        return int(field.strip())
    except ValueError:
        raise TraceFormatError(f"{what} is not an integer: {field.strip()!r}", line_number)


def _parse_header(line: str) -> Tuple[int, int, int]:
    fields = line.split(",")
    if len(fields) != 5 or fields[0].strip() != TRACE_MAGIC:
        raise TraceFormatError(
            f"expected header '{TRACE_MAGIC},{TRACE_VERSION},<threads>,<nodes>,<quanta>'", 1)
    if fields[1].strip() != TRACE_VERSION:
        raise TraceFormatError(f"unsupported trace version {fields[1].strip()!r}", 1)
    threads = _parse_int(fields[2], "thread count", 1)
    nodes = _parse_int(fields[3], "node count", 1)
    quanta = _parse_int(fields[4], "quantum count", 1)
    if threads < 1 or nodes < 1:
        raise TraceFormatError("thread and node counts must be positive", 1)
    if quanta < 1:
        raise TraceFormatError("no quanta", 1)
    if quanta * threads * nodes > MAX_TRACE_CELLS:
        raise TraceFormatError(
            f"trace too large: {quanta} x {threads} x {nodes} counters exceed {MAX_TRACE_CELLS}", 1)
    return threads, nodes, quanta


def parse_trace(source: PathOrStream, name: Optional[str] = None) -> Workload:
    """
    Read a workload trace

    Args:
        source: Path to a trace file or an open text stream
        name: Label recorded in the workload metadata (defaults to the file name)

    Returns:
        Workload of kind trace; omitted cells are zero

    Raises:
        TraceFormatError: malformed content, with the offending line number
        WorkloadIOError: the file can't be read
    """
    if hasattr(source, "read"):
        text = source.read()
        label = name if name is not None else getattr(source, "name", "")
    else:
        text = read_file_content(source)
        label = name if name is not None else Path(source).name

    lines = text.split("\n")
    # one trailing newline (or several) is not a data row
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        raise TraceFormatError("empty trace: missing header")

    threads, nodes, quanta = _parse_header(lines[0].rstrip("\r"))
    counts = np.zeros((quanta, threads, nodes), dtype=np.int64)
    seen: Dict[Tuple[int, int, int], int] = {}
    current_quantum = 1

    for line_number, raw in enumerate(lines[1:], start=2):
        line = raw.rstrip("\r")
        fields = line.split(",")
        if len(fields) != 4:
            raise TraceFormatError(
                f"expected 4 fields '<quantum>,<thread>,<node>,<count>', got {len(fields)}", line_number)
        quantum = _parse_int(fields[0], "quantum", line_number)
        thread = _parse_int(fields[1], "thread", line_number)
        node = _parse_int(fields[2], "node", line_number)
        count = _parse_int(fields[3], "count", line_number)

        if not 1 <= quantum <= quanta:
            raise TraceFormatError(f"quantum {quantum} out of range 1..{quanta}", line_number)
        if quantum < current_quantum:
            raise TraceFormatError(
                f"non-contiguous quantum numbering: quantum {quantum} after quantum {current_quantum}",
                line_number)
        if not 0 <= thread < threads:
            raise TraceFormatError(f"thread {thread} out of range 0..{threads - 1}", line_number)
        if not 0 <= node < nodes:
            raise TraceFormatError(f"node {node} out of range 0..{nodes - 1}", line_number)
        if count < 0:
            raise TraceFormatError(f"negative count {count}", line_number)
        if count > MAX_TRACE_COUNT:
            raise TraceFormatError(f"count {count} does not fit in 64 bits", line_number)
        key = (quantum, thread, node)
        if key in seen:
            raise TraceFormatError(
                f"duplicate entry for quantum {quantum}, thread {thread}, node {node} "
                f"(first on line {seen[key]})", line_number)
        seen[key] = line_number
        current_quantum = quantum
        counts[quantum - 1, thread, node] = count

    matrices = tuple(AccessMatrix(counts[q]) for q in range(quanta))
    meta = WorkloadMeta(
        kind=WorkloadKind.TRACE,
        phase_boundaries=infer_phase_boundaries(matrices),
        source=label,
    )
    logger.debug(f"Parsed trace {label or '<stream>'}: {quanta} quanta, {len(seen)} rows")
    return Workload(matrices, meta)


def format_trace(workload: Workload) -> str:
    """Render a workload in the sparse trace format"""
    out = io.StringIO()
    out.write(f"{TRACE_MAGIC},{TRACE_VERSION},{workload.threads},{workload.nodes},{workload.num_quanta}\n")
    for quantum, matrix in enumerate(workload.quanta, start=1):
        threads, nodes = np.nonzero(matrix.counts)
        for thread, node in zip(threads.tolist(), nodes.tolist()):
            out.write(f"{quantum},{thread},{node},{int(matrix.counts[thread, node])}\n")
    return out.getvalue()


def write_trace(workload: Workload, target: PathOrStream) -> None:
    """
    Write a workload as a trace

    Args:
        workload: Workload to write
        target: Path or open text stream

    Raises:
        WorkloadIOError: the file can't be written
    """
    content = format_trace(workload)
    if hasattr(target, "write"):
        try:
            target.write(content)
        except OSError as e:
            raise WorkloadIOError(f"Error writing trace: {e}") from e
    else:
        write_file_content(target, content)
        logger.info(f"Trace written to: {target}")
