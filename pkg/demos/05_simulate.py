# %% [markdown]
# # The same numbers from a packet-level simulation
#
# The discrete-event simulator runs the real forwarder and verifier code on
# the 8-hop line. It should land on the closed-form numbers.

# %%
from figoa.forwarder import Mode
from figoa.simnet import LatencyParams, latency_model, mu_mtu_collapse, reassembly_cost_line, run

for flows in (5, 20, 100):
    model = latency_model(LatencyParams(flows=flows))
    for mode, want in ((Mode.CUT_THROUGH, model.e2e_cut_through), (Mode.HOP_BY_HOP, model.e2e_reassembly)):
        got = run(reassembly_cost_line(flows, mode)).content_latency("c")
        print(f"F={flows:<4} {mode.value:<22} sim {got * 1e3:8.2f} ms   model {want * 1e3:8.2f} ms")

# %% [markdown]
# A second consumer asks for the same object mid-stream, through a thinner
# branch. Only the router where the interests meet has to refragment.

# %%
r = run(mu_mtu_collapse())
for consumer, outcomes in r.outcomes.items():
    print(consumer, outcomes[0].status, f"{outcomes[0].completion_time * 1e3:.1f} ms")
events = r.trace.of_kind("refragment")
print(len(events), "refragment events at", sorted({e.node for e in events}))
