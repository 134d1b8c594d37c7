"""``figoa`` command line: fragment and verify files, simulate, print model tables.

Exit status: 0 success, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
from pathlib import Path

from . import crypto, sign_content
from .errors import FigoaError, MtuTooSmall, WireError
from .fragmenter import fragment_content, refragment
from .simnet.model import LatencyParams, latency_curve, latency_model, segmentation_overhead
from .simnet.sim import Simulator
from .simnet.topology import load_config
from .verifier import AcceptComplete, BufferTable, Reject
from .wire import ContentFragment, decode_content_fragment, encode

EXIT_OK, EXIT_REJECT, EXIT_USAGE = 0, 1, 2

TABLE_ROWS = (
    ("inter_fragment_gap_ms", 0),
    ("first_to_last_gap_ms", 1),
    ("e2e_reassembly_ms", 2),
    ("e2e_cut_through_ms", 3),
    ("slowdown_pct", 4),
)
SCHEMES = {"test": crypto.TEST_SCHEME, "ed25519": crypto.ED25519, "0": crypto.TEST_SCHEME, "1": crypto.ED25519}


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _k_range(text: str) -> list[int]:
    if "-" in text:
        lo, hi = text.split("-", 1)
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    return _ints(text)


def fragment_file_name(cf: ContentFragment) -> str:
    return f"{cf.content_digest.hex()}.{cf.payload_offset:012d}.frag"


def _write_fragments(frags, out_dir: Path, out) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("offset", "size", "state"))
    for cf in frags:
        data = encode(cf)
        (out_dir / fragment_file_name(cf)).write_bytes(data)
        w.writerow((cf.payload_offset, len(data), cf.internal_state.hex()))


def _read_fragments(directory: Path) -> list[bytes]:
    if not directory.is_dir():
        raise UsageError(f"{directory}: not a directory")
    files = sorted(directory.glob("*.frag"))
    if not files:
        raise UsageError(f"{directory}: no .frag files")
    return [f.read_bytes() for f in files]


# ---------------------------------------------------------------------------
# commands


def cmd_keygen(args, out) -> int:
    seed = args.seed.encode() if args.seed is not None else None
    kp = crypto.generate_keypair(SCHEMES[args.scheme], seed)
    crypto.write_key_file(args.out, kp.scheme_id, kp.private)
    crypto.write_key_file(args.out + ".pub", kp.scheme_id, kp.public)
    print(f"wrote {args.out} and {args.out}.pub", file=out)
    return EXIT_OK


def cmd_fragment(args, out) -> int:
    payload = Path(args.input).read_bytes()
    kp = crypto.read_keypair(args.key)
    locator = crypto.KeyLocator.named(args.key_name) if args.key_name else None
    co = sign_content(args.name, payload, kp, locator)
    frags = fragment_content(co, args.mtu)
    _write_fragments(frags, Path(args.out_dir), out)
    return EXIT_OK


def cmd_refragment(args, out) -> int:
    frags = []
    for data in _read_fragments(Path(args.frags)):
        frags += refragment(decode_content_fragment(data), args.mtu)
    _write_fragments(frags, Path(args.out_dir), out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    blobs = _read_fragments(Path(args.frags))
    if args.shuffle is not None:
        random.Random(args.shuffle).shuffle(blobs)
    key = crypto.read_public_key(args.key) if args.key else None
    table = BufferTable(verify_signatures=True, require_signature=key is not None)
    final = None
    for data in blobs:
        try:
            cf = decode_content_fragment(data)
        except WireError as exc:
            print(f"Reject: malformed fragment ({exc})", file=out)
            return EXIT_REJECT
        if key is not None and table.registry is None:
            locator = cf.trailer.key_locator if cf.trailer else None
            if locator is not None and locator.key_name is not None:
                table.registry = crypto.KeyRegistry({locator.key_name: key})
        decision = table.on_fragment(cf)
        print(f"{cf.payload_offset:>10} {len(cf.payload):>6} {type(decision).__name__}", file=out)
        if isinstance(decision, Reject):
            print(f"Reject: {decision.reason}", file=out)
            return EXIT_REJECT
        if isinstance(decision, AcceptComplete):
            final = decision
    if final is None:
        pending = [b for b in table.buffers.values()]
        got = pending[0].received if pending else 0
        total = pending[0].total if pending else 0
        print(f"Reject: Incomplete ({got} of {total} bytes received)", file=out)
        return EXIT_REJECT
    co = final.content
    if key is not None and co.key_locator.key is not None and co.key_locator.key != key:
        print("Reject: embedded key differs from --key", file=out)
        return EXIT_REJECT
    print(f"AcceptComplete {co.name} {len(co.payload)} payload bytes digest {co.content_digest.hex()}", file=out)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    topo = load_config(args.config)
    result = Simulator(topo, args.seed).run(args.until)
    if args.trace:
        with open(args.trace, "w", newline="", encoding="utf-8") as fh:
            result.trace.write_csv(fh)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("consumer", "name", "status", "completion_ms", "reason"))
    rejected = False
    for consumer, outcomes in sorted(result.outcomes.items()):
        for o in outcomes:
            ms = "" if o.completion_time is None else f"{o.completion_time * 1e3:.2f}"
            w.writerow((consumer, str(o.name), o.status, ms, o.reason))
            rejected |= o.status != "accept"
    return EXIT_REJECT if rejected else EXIT_OK


def cmd_latency_table(args, out) -> int:
    results = [
        latency_model(LatencyParams(args.hops, args.latency / 1e3, args.bw, args.frag_size, args.k, f)).as_ms()
        for f in args.flows
    ]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["metric"] + [str(f) for f in args.flows])
    for label, i in TABLE_ROWS:
        w.writerow([label] + [f"{r[i]:.2f}" for r in results])
    return EXIT_OK


def cmd_latency_curve(args, out) -> int:
    flows = args.flows[0] if len(args.flows) == 1 else args.flows
    rows = latency_curve(args.sizes, args.k, flows, args.hops, args.latency / 1e3, args.bw)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("object_bytes", "k", "e2e_reassembly_ms", "e2e_cut_through_ms", "ratio"))
    for r in rows:
        w.writerow((r.object_bytes, r.fragments, f"{r.e2e_reassembly * 1e3:.2f}", f"{r.e2e_cut_through * 1e3:.2f}",
                    f"{r.ratio:.2f}"))
    return EXIT_OK


def cmd_overhead(args, out) -> int:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("object_bytes", "mtu", "sig_bytes", "key_locator_bytes", "fixed_bytes", "overhead_pct"))
    for size in args.object_size:
        for sig in args.sig:
            frac = segmentation_overhead(size, args.mtu, sig, args.key_locator, args.fixed)
            w.writerow((size, args.mtu, sig, args.key_locator, args.fixed, f"{frac * 100:.2f}"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="figoa", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("keygen", help="write a private key file and its .pub")
    s.add_argument("--scheme", choices=sorted(SCHEMES), default="ed25519")
    s.add_argument("--out", required=True)
    s.add_argument("--seed", help="derive the key deterministically from this string")
    s.set_defaults(func=cmd_keygen)

    s = sub.add_parser("fragment", help="sign a file and write its fragments")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--name", required=True)
    s.add_argument("--key", required=True, help="private key file from keygen")
    s.add_argument("--key-name", help="name the key instead of embedding it")
    s.add_argument("--mtu", type=int, required=True)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_fragment)

    s = sub.add_parser("refragment", help="split every fragment in a directory for a smaller MTU")
    s.add_argument("--frags", required=True)
    s.add_argument("--mtu", type=int, required=True)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_refragment)

    s = sub.add_parser("verify", help="feed fragment files through the verifier")
    s.add_argument("--frags", required=True)
    s.add_argument("--key", help="public key file (.pub); makes a valid signature mandatory")
    s.add_argument("--shuffle", type=int, metavar="SEED")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="run a network simulation from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trace", help="write the event trace CSV here")
    s.add_argument("--until", type=float, help="stop at this simulated time (s)")
    s.set_defaults(func=cmd_simulate)

    def path_flags(s, flows_default):
        s.add_argument("--flows", type=_ints, default=flows_default)
        s.add_argument("-H", "--hops", type=int, default=8)
        s.add_argument("-d", "--latency", type=float, default=10.0, help="per-link latency in ms")
        s.add_argument("--bw", type=float, default=100e6, help="bits per second")

    s = sub.add_parser("latency-table", help="per-hop reassembly vs cut-through latency table")
    path_flags(s, [5, 10, 20, 30, 50, 100])
    s.add_argument("--frag-size", type=float, default=1300)
    s.add_argument("-k", type=int, default=7, help="fragments per object")
    s.set_defaults(func=cmd_latency_table)

    s = sub.add_parser("latency-curve", help="latency against fragment count for several object sizes")
    path_flags(s, [10, 20, 50, 100, 100, 50, 20, 10])
    s.add_argument("--sizes", type=_ints, default=[8400, 16800, 33600])
    s.add_argument("-k", type=_k_range, default=list(range(1, 11)), help="list or range, e.g. 1-10")
    s.set_defaults(func=cmd_latency_curve)

    s = sub.add_parser("overhead", help="byte overhead of signing every MTU-sized segment")
    s.add_argument("--object-size", type=_ints, default=[8192])
    s.add_argument("--mtu", type=int, default=1500)
    s.add_argument("--sig", type=_ints, default=[192, 256])
    s.add_argument("--key-locator", type=int, default=20)
    s.add_argument("--fixed", type=int, default=12)
    s.set_defaults(func=cmd_overhead)
    return p


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "latency-curve" and len(args.flows) not in (1, args.hops):
            raise UsageError(f"--flows needs 1 or {args.hops} values")
        return args.func(args, out)
    except MtuTooSmall as exc:
        print(f"figoa: MtuTooSmall: {exc}", file=sys.stderr)
    except (UsageError, OSError, FigoaError, ValueError) as exc:
        print(f"figoa: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
