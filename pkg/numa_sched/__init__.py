"""
numa-sched - NUMA-aware thread placement algorithms and a quantum-level simulator
"""

__version__ = "0.1.0"
