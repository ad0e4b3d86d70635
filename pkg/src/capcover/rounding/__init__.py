"""Bicriteria LP rounding for capacitated covering with balls."""

from .aux2 import round_aux2
from .clusters import ClusterState, cluster_formation
from .combine import combine
from .config import Copy, PipelineConfig
from .pipeline import PipelineResult, run_pipeline
from .prepare import (
    build_aux1,
    build_aux2,
    double_and_cap,
    partition_points,
    reroute,
    reroute_ball,
    scale_capacities,
    threshold,
)
from .selection import select_balls_monotonic, select_balls_uniform
from .trace import Event, format_trace, parse_trace

__all__ = [
    "ClusterState", "Copy", "Event", "PipelineConfig", "PipelineResult",
    "build_aux1", "build_aux2", "cluster_formation", "combine", "double_and_cap",
    "format_trace", "parse_trace", "partition_points", "reroute", "reroute_ball",
    "round_aux2", "run_pipeline", "scale_capacities", "select_balls_monotonic",
    "select_balls_uniform", "threshold",
]
