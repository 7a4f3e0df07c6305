"""Command-line entry points, trace replay, grammar fuzzing, and the service."""

from .trace import TraceRecord, load_trace, run_trace
from .fuzzing import FuzzReport, fuzz

__all__ = ["TraceRecord", "load_trace", "run_trace", "FuzzReport", "fuzz"]
