"""Splitting signed content into chained fragments, and splitting fragments again.

Each fragment carries the hash state reached after every byte before it, so
a router can hash its payload without seeing the neighbours. Cuts always fall
on 64-byte block boundaries; only the fragment holding the final byte may be
short or unaligned.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import hashstate
from .errors import MtuTooSmall
from .hashstate import BLOCK_SIZE
from .wire import ContentFragment, ContentObject, Trailer, encoded_size, header_size


@dataclass(frozen=True)
class FragmentPlan:
    cuts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prev_end = None
        for i, (v, s) in enumerate(self.cuts):
            if s <= 0 or v % BLOCK_SIZE:
                raise ValueError(f"cut {i} = ({v}, {s}) is not a valid block-aligned range")
            if prev_end is not None and v != prev_end:
                raise ValueError(f"cut {i} starts at {v}, expected {prev_end}")
            if i < len(self.cuts) - 1 and s % BLOCK_SIZE:
                raise ValueError(f"only the final cut may be unaligned (cut {i} has {s} bytes)")
            prev_end = v + s

    def __len__(self):
        return len(self.cuts)

    def __iter__(self):
        return iter(self.cuts)

    @property
    def sizes(self) -> list[int]:
        return [s for _, s in self.cuts]


def plan_cuts(total: int, region_start: int, region_len: int, ao_mtu: int, last_ao_mtu: int | None = None) -> FragmentPlan:
    """Greedy block-aligned cuts of ``[region_start, region_start + region_len)``.

    ``ao_mtu`` is the payload budget of an ordinary fragment. When the region
    ends at ``total`` its final cut may hold an unaligned tail, bounded by
    ``last_ao_mtu`` (defaults to ``ao_mtu``; it is smaller when the final
    fragment also carries the signature trailer).
    """
    if last_ao_mtu is None:
        last_ao_mtu = ao_mtu
    if ao_mtu < BLOCK_SIZE or last_ao_mtu < BLOCK_SIZE:
        raise MtuTooSmall(f"payload budget {min(ao_mtu, last_ao_mtu)} is smaller than one {BLOCK_SIZE}-byte block")
    if region_start % BLOCK_SIZE:
        raise ValueError(f"region_start {region_start} is not block aligned")
    if region_len <= 0 or region_start < 0 or region_start + region_len > total:
        raise ValueError(f"region [{region_start}, {region_start + region_len}) not within [0, {total})")

    step = ao_mtu - ao_mtu % BLOCK_SIZE
    end = region_start + region_len
    reaches_end = end == total
    final_budget = last_ao_mtu if reaches_end else step
    cuts = []
    v = region_start
    while end - v > final_budget:
        remaining = end - v
        # the cut must leave something behind for the final fragment
        s = min(step, (remaining - 1) // BLOCK_SIZE * BLOCK_SIZE)
        cuts.append((v, s))
        v += s
    cuts.append((v, end - v))
    return FragmentPlan(tuple(cuts))


def _emit(name, total, digest, state, data, data_start, plan, trailer):
    """Build fragments for ``plan`` over ``data`` (which starts at ``data_start``), chaining from ``state``."""
    out = []
    last_index = len(plan) - 1
    for i, (v, s) in enumerate(plan):
        chunk = data[v - data_start : v - data_start + s]
        out.append(
            ContentFragment(
                name=name,
                content_object_size=total,
                internal_state=state,
                payload_offset=v,
                content_digest=digest,
                payload=chunk,
                trailer=trailer if i == last_index else None,
            )
        )
        if i != last_index:
            state = hashstate.compress(state, chunk)
    return out


def _budgets(name, trailer, o_mtu):
    ao = o_mtu - header_size(name)
    ao_last = o_mtu - header_size(name, trailer) if trailer is not None else ao
    if min(ao, ao_last) < BLOCK_SIZE:
        need = header_size(name, trailer) + BLOCK_SIZE
        raise MtuTooSmall(f"MTU {o_mtu} cannot hold a fragment header plus one block (needs at least {need})")
    return ao, ao_last


def fragment_content(co: ContentObject, o_mtu: int) -> list[ContentFragment]:
    """Fragment a signed content object for an interface with MTU ``o_mtu``."""
    region = co.signable_region
    total = len(region)
    trailer = Trailer(co.key_locator, co.signature)
    ao, ao_last = _budgets(co.name, trailer, o_mtu)
    plan = plan_cuts(total, 0, total, ao, ao_last)
    return _emit(co.name, total, co.content_digest, hashstate.new_state(), region, 0, plan, trailer)


def refragment(cf: ContentFragment, o_mtu: int) -> list[ContentFragment]:
    """Split ``cf`` so every piece encodes to at most ``o_mtu`` bytes.

    The first piece keeps ``cf``'s state; later ones are derived by hashing
    forward. The trailer (if any) stays on the piece with the final byte.
    """
    if encoded_size(cf) <= o_mtu:
        return [cf]
    ao, ao_last = _budgets(cf.name, cf.trailer, o_mtu)
    plan = plan_cuts(cf.content_object_size, cf.payload_offset, len(cf.payload), ao, ao_last)
    return _emit(
        cf.name, cf.content_object_size, cf.content_digest, cf.internal_state, cf.payload, cf.payload_offset, plan, cf.trailer
    )
