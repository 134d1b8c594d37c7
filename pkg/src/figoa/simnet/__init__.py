"""Network simulation and closed-form latency/overhead models."""

from .model import (
    CurveRow,
    LatencyParams,
    LatencyResult,
    latency_curve,
    latency_model,
    segmentation_overhead,
)
from .scenarios import linear, mu_mtu_collapse, reassembly_cost_line
from .sim import SimResult, SimTrace, Simulator, TraceEvent, run
from .topology import ContentSpec, LinkSpec, NodeSpec, SimTopology, load_config, parse_config

__all__ = [
    "ContentSpec",
    "CurveRow",
    "LatencyParams",
    "LatencyResult",
    "LinkSpec",
    "NodeSpec",
    "SimResult",
    "SimTopology",
    "SimTrace",
    "Simulator",
    "TraceEvent",
    "latency_curve",
    "latency_model",
    "linear",
    "load_config",
    "mu_mtu_collapse",
    "parse_config",
    "reassembly_cost_line",
    "run",
    "segmentation_overhead",
]
