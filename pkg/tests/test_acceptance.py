"""Acceptance checks. Each prints one PASS/FAIL line with its measured runtime."""

import csv
import hashlib
import io
import itertools
import random
import time
from collections import Counter
from contextlib import contextmanager

import pytest

from figoa import cli, hashstate
from figoa.forwarder import Mode
from figoa.fragmenter import fragment_content, refragment
from figoa.hashstate import BLOCK_SIZE
from figoa.simnet import (
    LatencyParams,
    latency_curve,
    latency_model,
    mu_mtu_collapse,
    reassembly_cost_line,
    run,
    segmentation_overhead,
)
from figoa.wire import encoded_size

from conftest import LONG_NAME, make_content
from harness import MUTATIONS, deliver, mutate, shuffle_keeping_pairs, shuffled
from latency_reference import FLOWS, ROWS
from test_overhead import GRID, enumerate_overhead

MIXED = (10, 20, 50, 100, 100, 50, 20, 10)


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def check(label, limit):
        t0 = time.perf_counter()
        ok = False
        detail = ""
        try:
            yield
            elapsed = time.perf_counter() - t0
            ok = elapsed < limit
            detail = f"{elapsed:.2f}s (limit {limit}s)"
            assert ok, f"{label} took {elapsed:.2f}s, limit {limit}s"
        except AssertionError as exc:
            detail = detail or str(exc).splitlines()[0]
            raise
        finally:
            with capsys.disabled():
                print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")

    return check


def test_table_reproduction(criterion):
    with criterion("latency table, 30 cells within 0.01", 1.0):
        out = io.StringIO()
        assert cli.main(["latency-table", "--flows", ",".join(map(str, FLOWS)), "-H", "8", "-d", "10",
                         "--bw", "100e6", "--frag-size", "1300", "-k", "7"], out) == 0
        rows = {r[0]: r[1:] for r in csv.reader(io.StringIO(out.getvalue()))}
        cells = 0
        for label, expected in ROWS.items():
            raw = [latency_model(LatencyParams(flows=f)).as_ms()[list(ROWS).index(label)] for f in FLOWS]
            for printed, value, want in zip(rows[label], raw, expected):
                assert abs(float(printed) - want) <= 0.01 + 1e-9, (label, printed, want)
                assert abs(value - want) <= 0.01, (label, value, want)
                cells += 1
        assert cells == 30


def test_simulator_agreement(criterion):
    with criterion("simulator vs model within 5%, both modes, all flow counts", 30.0):
        for flows, mode in itertools.product(FLOWS, Mode):
            r = run(reassembly_cost_line(flows, mode))
            model = latency_model(LatencyParams(flows=flows))
            want = model.e2e_cut_through if mode is Mode.CUT_THROUGH else model.e2e_reassembly
            got = r.content_latency("c")
            assert got is not None and abs(got - want) / want <= 0.05, (flows, mode, got, want)


def test_fragment_count_trend(criterion):
    with criterion("reassembly/cut-through ratio monotone in k, >= 2 at k=6", 1.0):
        doubled = False
        for size in (8400, 16800, 33600):
            rows = latency_curve([size], range(1, 21), MIXED)
            ratios = [r.ratio for r in rows]
            assert all(b >= a for a, b in zip(ratios, ratios[1:])), size
            doubled |= rows[5].fragments == 6 and rows[5].ratio >= 2.0
        assert doubled


def test_hash_oracle_equivalence(criterion):
    rng = random.Random(2024)
    with criterion("10,000 chained digests equal one-shot SHA-256", 10.0):
        agree = 0
        for _ in range(10_000):
            msg = rng.randbytes(rng.randint(0, 4096))
            blocks = len(msg) // BLOCK_SIZE
            cuts = sorted(rng.sample(range(1, blocks + 1), rng.randint(0, min(blocks, 8)))) if blocks else []
            state, prev = hashstate.new_state(), 0
            for c in cuts:
                state = hashstate.compress(state, msg[prev : c * BLOCK_SIZE])
                prev = c * BLOCK_SIZE
            agree += hashstate.finalize(state, msg[prev:], len(msg)) == hashlib.sha256(msg).digest()
        assert agree == 10_000


def test_permutation_invariance(criterion):
    rng = random.Random(99)
    with criterion("1,000 shuffled deliveries accepted byte-identical", 30.0):
        for _ in range(1000):
            co, _ = make_content(rng.randint(1, 64 * 1024), seed=rng.randrange(256))
            frags = fragment_content(co, rng.randint(400, 9000))
            r = deliver(shuffled(frags, rng))
            assert r.accepted is not None and not r.hostage_leaked
            assert r.accepted.content.signable_region == co.signable_region
            assert r.accepted.content == co


def test_corruption_detection(criterion):
    rng = random.Random(5)
    with criterion("1,000 single mutations all rejected, hostage never released", 60.0):
        kinds = Counter()
        for trial in range(1000):
            kind = MUTATIONS[trial % len(MUTATIONS)]
            co, _ = make_content(rng.randint(1, 16 * 1024), seed=rng.randrange(256))
            frags = fragment_content(co, rng.randint(400, 4000))
            r = deliver(shuffle_keeping_pairs(mutate(frags, kind, rng), kind, rng))
            assert r.rejected, (trial, kind)
            assert r.accepted is None and not r.hostage_leaked, (trial, kind)
            kinds[kind] += 1
        assert set(kinds) == set(MUTATIONS)


def test_refragmentation(criterion):
    rng = random.Random(11)
    with criterion("1152/768+384/3-way splits and 1,000 depth-3 refragmentations verify", 60.0):
        co, _ = make_content(4096, LONG_NAME)
        frags = fragment_content(co, 1500)
        assert len(frags) == 4 and [len(f.payload) for f in frags[:-1]] == [1152] * 3
        for mtu, pieces in ((1100, [768, 384]), (700, [384, 384, 384])):
            for f in frags[:-1]:
                assert [len(p.payload) for p in refragment(f, mtu)] == pieces
            stream = [p for f in frags for p in refragment(f, mtu)]
            assert deliver(shuffled(stream, rng)).accepted.content == co
        for _ in range(1000):
            co, _ = make_content(rng.randint(1, 32 * 1024), seed=rng.randrange(256))
            stream = fragment_content(co, rng.randint(1500, 9000))
            for _depth in range(3):
                mtu = rng.randint(400, 3000)
                stream = [p for f in stream for p in refragment(f, mtu)]
                assert all(encoded_size(p) <= mtu for p in stream)
            r = deliver(shuffled(stream, rng))
            assert r.accepted is not None and r.accepted.content == co


def test_mu_mtu_bound(criterion):
    with criterion("late collapse refragments once per fragment, only at the collapse router", 30.0):
        r = run(mu_mtu_collapse())
        assert all(o.status == "accept" for v in r.outcomes.values() for o in v)
        events = r.trace.of_kind("refragment")
        primary = {"a", "r1", "r2", "r3", "r5", "r6", "r7", "p"}
        assert not [e for e in events if e.node in primary]
        assert {(e.node, e.face) for e in events} == {("r4", "rb")}
        per = Counter((e.node, e.name, e.face, e.offset) for e in events)
        assert max(per.values()) == 1
        alone = run(mu_mtu_collapse(late_request_at=10.0))
        assert alone.trace.of_kind("refragment") == []


def test_overhead_model(criterion):
    rng = random.Random(3)
    with criterion("overhead equals byte enumeration on 200 points, monotone", 5.0):
        assert len(GRID) == 200
        for args in GRID:
            assert segmentation_overhead(*args) == pytest.approx(enumerate_overhead(*args), abs=1e-12)
        for _ in range(2000):
            size, mtu = rng.randint(1, 10**6), rng.randint(600, 9000)
            sig, kl, fixed = rng.randint(0, 512), rng.randint(0, 40), rng.randint(0, 40)
            base = segmentation_overhead(size, mtu, sig, kl, fixed)
            assert segmentation_overhead(size, mtu, sig + 1, kl, fixed) >= base
            assert segmentation_overhead(2 * size, mtu, sig, kl, fixed) >= base
