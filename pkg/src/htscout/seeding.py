"""Deterministic seed derivation: one master seed, labeled sub-streams."""

import hashlib


def derive_seed(master: int, label: str) -> int:
    """Stable 63-bit seed for the sub-stream named by ``label``."""
    digest = hashlib.sha256(f"{master}|{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little") & (2**63 - 1)
