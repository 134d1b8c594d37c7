"""Ready-made topologies: linear paths and the 8-hop reassembly-cost scenario."""

from __future__ import annotations

from typing import Sequence

from .. import crypto
from ..forwarder import Mode, NodeConfig
from ..hashstate import BLOCK_SIZE
from ..name import Name
from ..wire import TL_SIZE, Trailer, encode_key_locator, encode_name, header_size
from .sim import producer_key_name
from .topology import ContentSpec, LinkSpec, NodeSpec, SimTopology

# a one-component name whose fragment header leaves exactly 18 blocks in 1300 bytes
COST_LINE_NAME = "/obj1"


def _per_link(value, n, what):
    if isinstance(value, (int, float)):
        return [value] * n
    value = list(value)
    if len(value) != n:
        raise ValueError(f"{len(value)} {what} values for {n} links")
    return value


def linear(
    hops: int,
    *,
    latency: float = 0.010,
    bandwidth: float = 100e6,
    mtu: int | Sequence[int] = 1500,
    flows: int | Sequence[int] = 1,
    mode: Mode | str = Mode.CUT_THROUGH,
    content: str = "/ndn/usa/cnn/frontpage/news",
    payload_size: int = 1024,
    verify_signatures: bool = True,
    request_at: float = 0.0,
) -> SimTopology:
    """Consumer ``c`` -- routers ``r1..r{hops-1}`` -- producer ``p``.

    Per-link sequences run from the consumer end towards the producer.
    """
    if hops < 1:
        raise ValueError("need at least one hop")
    ids = ["c"] + [f"r{i}" for i in range(1, hops)] + ["p"]
    mtus = _per_link(mtu, hops, "mtu")
    flow = _per_link(flows, hops, "flows")
    nodes = {}
    for nid in ids:
        role = "consumer" if nid == "c" else "producer" if nid == "p" else "router"
        nodes[nid] = NodeSpec(nid, role, NodeConfig(mode=Mode(mode), verify_signatures=verify_signatures))
    nodes["p"].contents.append(ContentSpec(Name.from_uri(content), payload_size))
    links = [
        LinkSpec(ids[i], ids[i + 1], latency, bandwidth, mtus[i], mtus[i], flow[i])
        for i in range(hops)
    ]
    return SimTopology(nodes, links, [(request_at, "c", Name.from_uri(content))])


def payload_for_fragments(name: Name, key_locator: crypto.KeyLocator, scheme_id: int, mtu: int, k: int) -> int:
    """Payload size whose content fragments into exactly ``k`` fragments that each fill ``mtu``.

    Only possible when ``mtu - header`` is block aligned; otherwise the
    non-final fragments fall short of ``mtu`` by the misalignment.
    """
    signature = crypto.Signature(scheme_id, bytes(crypto.SIGNATURE_SIZE[scheme_id]))
    ao = mtu - header_size(name)
    ao -= ao % BLOCK_SIZE
    last = mtu - header_size(name, Trailer(key_locator, signature))
    region = (k - 1) * ao + last
    return region - len(encode_name(name)) - len(encode_key_locator(key_locator)) - TL_SIZE


def reassembly_cost_line(
    flows: int | Sequence[int],
    mode: Mode | str,
    *,
    fragment_bytes: int = 1300,
    fragments: int = 7,
    hops: int = 8,
    latency: float = 0.010,
    bandwidth: float = 100e6,
) -> SimTopology:
    """The 8-hop, 100 Mb/s, 10 ms path carrying an object as 7 fragments of 1300 bytes.

    The object name is sized so a fragment header plus whole blocks is exactly
    1300 bytes; the payload is chosen so all seven fragments are full.
    """
    name = Name.from_uri(COST_LINE_NAME)
    locator = crypto.KeyLocator.named(producer_key_name("p"))
    payload = payload_for_fragments(name, locator, crypto.ED25519, fragment_bytes, fragments)
    return linear(hops, latency=latency, bandwidth=bandwidth, mtu=fragment_bytes, flows=flows, mode=mode,
                  content=COST_LINE_NAME, payload_size=payload)


def mu_mtu_collapse(
    *,
    content: str = "/ndn/usa/cnn/frontpage/news",
    payload_size: int = 64 * 1024,
    late_request_at: float = 0.120,
    bandwidth: float = 10e6,
    latency: float = 0.010,
    mode: Mode | str = Mode.CUT_THROUGH,
) -> SimTopology:
    """An 8-hop line whose MTU shrinks towards consumer ``a``, plus a late consumer ``b``.

    ``b`` hangs off the middle router ``r4`` through ``rb`` on links smaller
    than anything on the main path, and asks for the same content while it is
    still streaming through ``r4``. Its interest collapses into ``r4``'s PIT
    entry, so ``r4`` must refragment what it forwards towards ``b``.
    """
    path = ["a", "r1", "r2", "r3", "r4", "r5", "r6", "r7", "p"]
    mtus = [1500, 1500, 2000, 3000, 4000, 6000, 8000, 9000]
    cfg = lambda: NodeConfig(mode=Mode(mode))  # noqa: E731
    nodes = {n: NodeSpec(n, "router", cfg()) for n in path[1:-1] + ["rb"]}
    nodes["a"] = NodeSpec("a", "consumer", cfg())
    nodes["b"] = NodeSpec("b", "consumer", cfg())
    nodes["p"] = NodeSpec("p", "producer", cfg(), [ContentSpec(Name.from_uri(content), payload_size)])
    links = [LinkSpec(x, y, latency, bandwidth, m, m) for x, y, m in zip(path, path[1:], mtus)]
    links += [LinkSpec("r4", "rb", latency, bandwidth, 1000, 1000), LinkSpec("rb", "b", latency, bandwidth, 700, 700)]
    name = Name.from_uri(content)
    return SimTopology(nodes, links, [(0.0, "a", name), (late_request_at, "b", name)])
