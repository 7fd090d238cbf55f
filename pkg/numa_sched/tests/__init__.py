"""
Test package for numa-sched
"""
