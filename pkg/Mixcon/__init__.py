"""Congestion games with mixed objectives: latency sums and bottlenecks"""

__version__ = "0.1.0"
