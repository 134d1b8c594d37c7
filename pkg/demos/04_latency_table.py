# %% [markdown]
# # What per-hop reassembly costs
#
# An object of 7 fragments of 1300 bytes crosses 8 links of 10 ms at
# 100 Mb/s. Each link is shared round-robin with F flows. Cut-through pays
# the first-to-last fragment gap once; hop-by-hop reassembly pays it on every
# link.

# %%
import numpy as np

from figoa.simnet import LatencyParams, latency_curve, latency_model

flows = np.array([5, 10, 20, 30, 50, 100])
table = np.array([latency_model(LatencyParams(flows=int(f))).as_ms() for f in flows]).T
labels = ["inter-fragment gap", "first-to-last gap", "reassembly", "cut-through", "slowdown %"]
print(" " * 20 + "".join(f"{f:>9}" for f in flows))
for label, row in zip(labels, table):
    print(f"{label:<20}" + "".join(f"{v:9.2f}" for v in row))

# %% [markdown]
# Mixed flows: 10 flows at the edges, 100 in the core. How many fragments
# per object does it take to double end-to-end latency?

# %%
mixed = (10, 20, 50, 100, 100, 50, 20, 10)
for size in (8400, 16800, 33600):
    ratios = np.array([r.ratio for r in latency_curve([size], range(1, 11), mixed)])
    first = int(np.argmax(ratios >= 2.0)) + 1 if (ratios >= 2.0).any() else None
    print(size, np.round(ratios, 2), "doubles at k =", first)
