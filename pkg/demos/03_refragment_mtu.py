# %% [markdown]
# # Splitting fragments again on smaller links
#
# A router facing a smaller MTU can split a fragment without the rest of the
# object. It hashes forward from the state the fragment carries to get each
# new piece's state. With a production-sized header (about 300 bytes), a
# 4 KB object at MTU 1500 has 1152-byte payloads. Those split into 768 + 384
# at MTU 1100 and into three pieces at MTU 700.

# %%
import random

from figoa import BufferTable, crypto, fragment_content, refragment, sign_content
from figoa.name import Name
from figoa.wire import header_size

name = Name.from_uri("/ndn/usa/cnn/frontpage/news/2026/10/19/europe/markets/"
                     "energy-prices-climb-as-winter-approaches-analysts-warn-of-shortages")
print("fragment header:", header_size(name), "bytes")
keys = crypto.generate_keypair(crypto.ED25519, b"demo")
co = sign_content(name, random.Random(0).randbytes(4096), keys)
frags = fragment_content(co, 1500)
print("MTU 1500:", [len(f.payload) for f in frags])

# %%
for mtu in (1100, 700):
    pieces = [p for f in frags for p in refragment(f, mtu)]
    print(f"MTU {mtu}:", [[len(p.payload) for p in refragment(f, mtu)] for f in frags])
    random.Random(mtu).shuffle(pieces)
    table = BufferTable()
    decisions = [table.on_fragment(p) for p in pieces]
    print("  verified:", type(decisions[-1]).__name__)
