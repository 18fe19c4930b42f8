"""Operation tallies for the expensive group operations.

Counting is scoped: ``with measure() as c:`` opens a fresh scope for the
current context (thread or asyncio task), and every counted operation bumps
all scopes that are open in that context. Nothing is recorded when no scope
is open.
"""

from __future__ import annotations

import contextlib
import dataclasses
from contextvars import ContextVar
from typing import Iterator

FIELDS = ("left_muls", "right_muls", "gt_exps", "pairings", "hash_to_group")


@dataclasses.dataclass
class OpCounters:
    left_muls: int = 0
    right_muls: int = 0
    gt_exps: int = 0
    pairings: int = 0
    hash_to_group: int = 0

    @property
    def muls(self) -> int:
        """Scalar multiplications in either source group (the symmetric-pairing "G1 Mul" column)."""
        return self.left_muls + self.right_muls

    def copy(self) -> OpCounters:
        return dataclasses.replace(self)

    def reset(self) -> None:
        for name in FIELDS:
            setattr(self, name, 0)

    def __sub__(self, other: OpCounters) -> OpCounters:
        return OpCounters(*(getattr(self, f) - getattr(other, f) for f in FIELDS))

    def as_dict(self) -> dict[str, int]:
        return dataclasses.asdict(self)


_scopes: ContextVar[tuple[OpCounters, ...]] = ContextVar("ibms_op_scopes", default=())


def tally(field: str) -> None:
    for scope in _scopes.get():
        setattr(scope, field, getattr(scope, field) + 1)


@contextlib.contextmanager
def measure() -> Iterator[OpCounters]:
    counters = OpCounters()
    token = _scopes.set(_scopes.get() + (counters,))
    try:
        yield counters
    finally:
        _scopes.reset(token)


def counters_snapshot() -> OpCounters:
    """Copy of the innermost open scope (all zeros if none is open)."""
    scopes = _scopes.get()
    return scopes[-1].copy() if scopes else OpCounters()


def counters_reset() -> None:
    scopes = _scopes.get()
    if scopes:
        scopes[-1].reset()
