"""Sub-seed derivation: every random stream in a run comes from one master
seed hashed together with a role tag."""

import hashlib


def derive_seed(master: int, tag: str) -> int:
    digest = hashlib.sha256(f"{int(master)}:{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "little")
