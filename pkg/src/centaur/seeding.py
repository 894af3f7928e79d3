"""Stable seed derivation so every worker, game and rollout is replayable."""

import hashlib


def stable_seed(*parts) -> int:
    """Deterministic 63-bit seed from any mix of strings and ints."""
    text = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1
