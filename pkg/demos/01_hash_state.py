# %% [markdown]
# # Carrying a SHA-256 computation across packets
#
# A hash state is eight 32-bit words plus a byte count. We can stop after any
# whole 64-byte block, ship those 40 bytes somewhere else, and carry on.

# %%
import hashlib
import os

from figoa import hashstate

message = os.urandom(1000)
oracle = hashlib.sha256(message).digest()

# %% absorb the first 640 bytes "here" ...
state = hashstate.compress(hashstate.new_state(), message[:640])
wire = hashstate.serialize_state(state)
print(len(wire), "bytes of state:", wire.hex()[:32], "...")

# %% ... and finish "somewhere else"
resumed = hashstate.deserialize_state(wire)
digest = hashstate.finalize(resumed, message[640:], len(message))
print("matches hashlib:", digest == oracle)

# %% any block-aligned split gives the same answer
for cut in (0, 64, 512, 960):
    s = hashstate.advance(hashstate.new_state(), message[:cut])
    print(cut, hashstate.finalize(s, message[cut:], len(message)) == oracle)

# %% partial blocks are refused
try:
    hashstate.compress(hashstate.new_state(), message[:100])
except ValueError as exc:
    print(type(exc).__name__, exc)
