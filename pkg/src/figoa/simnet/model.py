"""Closed-form latency and overhead models.

Latency model for one object crossing a line of links. Each link carries
``F`` flows whose fragments are interleaved round-robin, so consecutive
fragments of our object are ``F`` fragment-times apart on the wire::

    t_f   = fragment_bytes * 8 / bandwidth
    gap   = F * t_f                      # inter-fragment gap
    G     = (k - 1) * F * t_f + t_f      # first-to-last fragment gap
    reassembly  = sum over links of (d + G_l)
    cut-through = sum over links of d + max_l G_l

All times are in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import MtuTooSmall


@dataclass(frozen=True)
class LatencyParams:
    hops: int = 8
    link_latency: float = 0.010
    bandwidth: float = 100e6
    fragment_bytes: float = 1300
    fragments: int = 7
    flows: int | tuple[int, ...] = 5

    def __post_init__(self):
        if self.hops < 1 or self.fragments < 1:
            raise ValueError("hops and fragments must be at least 1")
        if self.link_latency < 0 or self.bandwidth <= 0 or self.fragment_bytes <= 0:
            raise ValueError("latency must be >= 0, bandwidth and fragment size > 0")
        flows = self.flows_per_link
        if len(flows) != self.hops:
            raise ValueError(f"{len(flows)} per-link flow counts for {self.hops} hops")
        if any(f < 1 for f in flows):
            raise ValueError("flow counts must be at least 1")

    @property
    def flows_per_link(self) -> tuple[int, ...]:
        if isinstance(self.flows, (int, float)):
            return (self.flows,) * self.hops
        return tuple(self.flows)

    @property
    def fragment_time(self) -> float:
        return self.fragment_bytes * 8 / self.bandwidth


@dataclass(frozen=True)
class LatencyResult:
    inter_fragment_gap: float
    first_to_last_gap: float
    e2e_reassembly: float
    e2e_cut_through: float
    slowdown_pct: float
    per_link_gap: tuple[float, ...] = field(default=(), repr=False)

    def as_ms(self) -> tuple[float, float, float, float, float]:
        return (
            self.inter_fragment_gap * 1e3,
            self.first_to_last_gap * 1e3,
            self.e2e_reassembly * 1e3,
            self.e2e_cut_through * 1e3,
            self.slowdown_pct,
        )


def latency_model(params: LatencyParams) -> LatencyResult:
    """Per-hop reassembly versus cut-through latency.

    With per-link flow counts the gap columns report the worst link.
    """
    t_f = params.fragment_time
    k = params.fragments
    flows = params.flows_per_link
    gaps = tuple((k - 1) * f * t_f + t_f for f in flows)
    reassembly = sum(params.link_latency + g for g in gaps)
    cut_through = params.hops * params.link_latency + max(gaps)
    return LatencyResult(
        inter_fragment_gap=max(flows) * t_f,
        first_to_last_gap=max(gaps),
        e2e_reassembly=reassembly,
        e2e_cut_through=cut_through,
        slowdown_pct=100.0 * reassembly / cut_through,
        per_link_gap=gaps,
    )


@dataclass(frozen=True)
class CurveRow:
    object_bytes: int
    fragments: int
    e2e_reassembly: float
    e2e_cut_through: float

    @property
    def ratio(self) -> float:
        return self.e2e_reassembly / self.e2e_cut_through


def latency_curve(
    object_sizes: Sequence[int],
    fragment_counts: Sequence[int],
    flows: int | Sequence[int] = (10, 20, 50, 100, 100, 50, 20, 10),
    hops: int | None = None,
    link_latency: float = 0.010,
    bandwidth: float = 100e6,
) -> list[CurveRow]:
    """Latency of each object size split into each fragment count (fragment = size / k)."""
    if not isinstance(flows, int):
        flows = tuple(flows)
        hops = hops or len(flows)
    hops = hops or 8
    rows = []
    for size in object_sizes:
        for k in fragment_counts:
            if k < 1:
                raise ValueError("fragment counts start at 1")
            res = latency_model(LatencyParams(hops, link_latency, bandwidth, math.ceil(size / k), k, flows))
            rows.append(CurveRow(size, k, res.e2e_reassembly, res.e2e_cut_through))
    return rows


def segmentation_overhead(
    object_size: int,
    mtu: int,
    sig_bytes: int,
    key_locator_bytes: int,
    fixed_header_bytes: int,
) -> float:
    """Share of transmitted bytes wasted when a producer segments instead of signing once.

    Each MTU-sized segment repeats the signature block (fixed header,
    signature, key locator). One such block is needed anyway, so the waste is
    every copy beyond the first, as a fraction of all bytes on the wire.
    """
    per_segment = sig_bytes + key_locator_bytes + fixed_header_bytes
    if min(sig_bytes, key_locator_bytes, fixed_header_bytes) < 0:
        raise ValueError("byte counts must be non-negative")
    if mtu <= per_segment:
        raise MtuTooSmall(f"MTU {mtu} leaves no room next to {per_segment} bytes of per-segment overhead")
    if object_size <= 0:
        raise ValueError("object_size must be positive")
    segments = math.ceil(object_size / (mtu - per_segment))
    wire = object_size + segments * per_segment
    return (segments - 1) * per_segment / wire
