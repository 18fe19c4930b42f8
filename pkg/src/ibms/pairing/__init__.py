"""Pairing backends and operation counting."""

from __future__ import annotations

from functools import lru_cache

from .counters import OpCounters, counters_reset, counters_snapshot, measure
from .groups import LeftElement, PairingBackend, RightElement, TargetElement

BACKENDS = {"bls12-381": 1, "toy": 2}
DEFAULT_BACKEND = "bls12-381"


def get_backend(name: str | int = DEFAULT_BACKEND) -> PairingBackend:
    """Return the shared instance for a backend name or numeric id."""
    if isinstance(name, int):
        ids = {v: k for k, v in BACKENDS.items()}
        if name not in ids:
            raise ValueError(f"unknown pairing backend id {name}")
        name = ids[name]
    return _load(name)


@lru_cache(maxsize=None)
def _load(name: str) -> PairingBackend:
    if name == "bls12-381":
        from .bls12 import BLS12Backend

        return BLS12Backend()
    if name == "toy":
        from .toy import ToyBackend

        return ToyBackend()
    raise ValueError(f"unknown pairing backend {name!r}")


__all__ = [
    "BACKENDS",
    "DEFAULT_BACKEND",
    "LeftElement",
    "OpCounters",
    "PairingBackend",
    "RightElement",
    "TargetElement",
    "counters_reset",
    "counters_snapshot",
    "get_backend",
    "measure",
]
