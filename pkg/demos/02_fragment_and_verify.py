# %% [markdown]
# # Fragmenting a signed object and checking it out of order
#
# The producer signs once. Each fragment carries the hash state at its start.
# That lets a router check every junction between fragments as they arrive,
# in any order. It holds only the last fragment (the hostage) until the whole
# object checks out.

# %%
import random
from dataclasses import replace

from figoa import BufferTable, crypto, fragment_content, sign_content
from figoa.wire import encoded_size

keys = crypto.generate_keypair(crypto.ED25519, b"demo producer")
co = sign_content("/ndn/usa/cnn/frontpage/news", random.Random(1).randbytes(4096), keys)
frags = fragment_content(co, 1500)
for f in frags:
    print(f"offset {f.payload_offset:5}  payload {len(f.payload):5}  on wire {encoded_size(f):5}  last={f.is_last}")

# %% deliver in a random order
order = frags[:]
random.Random(7).shuffle(order)
table = BufferTable()
for f in order:
    print(f.payload_offset, type(table.on_fragment(f)).__name__)

# %% flip one payload bit in a middle fragment and try again
bad = frags[:]
payload = bytearray(bad[1].payload)
payload[10] ^= 0x01
bad[1] = replace(bad[1], payload=bytes(payload))
table = BufferTable()
for f in reversed(bad):
    d = table.on_fragment(f)
    print(f.payload_offset, type(d).__name__, getattr(d, "reason", ""))
