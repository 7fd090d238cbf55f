"""
Error hierarchy for numa-sched
"""
from typing import Optional


class NumaSchedError(Exception):
    """Base class for all errors raised by numa-sched"""


class InvalidInputError(NumaSchedError, ValueError):
    """A value, spec or setting is outside its valid range"""


class DimensionMismatchError(InvalidInputError):
    """Matrix, schedule and topology shapes disagree"""


class CapacityError(InvalidInputError):
    """A placement puts more threads on a node than it has cores"""


class EnumerationBoundError(InvalidInputError):
    """An exhaustive enumeration would exceed its configured bound"""

    def __init__(self, what: str, size: int, bound: int):
        # args must match the constructor for pickling
        super().__init__(what, size, bound)
        self.what = what
        self.size = size
        self.bound = bound

    def __str__(self):
        return f"{self.what} bound exceeded: {self.size} candidates > bound {self.bound}"


class TraceFormatError(InvalidInputError):
    """A workload trace could not be parsed"""

    def __init__(self, reason: str, line_number: Optional[int] = None):
        super().__init__(reason, line_number)
        self.reason = reason
        self.line_number = line_number

    def __str__(self):
        if self.line_number is None:
            return self.reason
        return f"line {self.line_number}: {self.reason}"


class WorkloadIOError(NumaSchedError, OSError):
    """Reading or writing a workload file failed"""


class OracleMismatchError(NumaSchedError):
    """The Hungarian solver disagreed with the brute-force oracle"""
