"""Published per-hop reassembly latency table: 8 hops, 10 ms links, 100 Mb/s, 7 x 1300-byte fragments."""

FLOWS = (5, 10, 20, 30, 50, 100)
ROWS = {
    "inter_fragment_gap_ms": (0.52, 1.04, 2.08, 3.12, 5.20, 10.4),
    "first_to_last_gap_ms": (3.22, 6.34, 12.58, 18.82, 31.30, 62.50),
    "e2e_reassembly_ms": (105.79, 130.75, 180.67, 230.59, 330.43, 580.03),
    "e2e_cut_through_ms": (83.22, 86.34, 92.58, 98.82, 111.30, 142.50),
    "slowdown_pct": (127.12, 151.43, 195.14, 233.34, 296.87, 407.03),
}
