"""Step-by-step protocol runs that keep every intermediate value."""

from __future__ import annotations

import random
from dataclasses import dataclass

from ibms import (
    SignerSession,
    aggregate,
    mr_aggregate,
    mr_signer_round1,
    mr_signer_round2,
    signer_round1,
    signer_round2,
)


@dataclass
class Transcript:
    sessions: list
    round1: list
    shares: list
    digests: list
    sigma: object


def run(params, signer_keys, receiver_pubs, m, rng=None, *, multi=None, ephemerals=None) -> Transcript:
    """Run every signer. ``receiver_pubs`` is one key (single receiver) or a list."""
    if not isinstance(receiver_pubs, (list, tuple)):
        receiver_pubs = [receiver_pubs]
        multi = bool(multi)
    elif multi is None:
        multi = True
    rng = rng or random.Random(0)
    signer_keys = sorted(signer_keys, key=lambda k: k.identity)
    ids = [k.identity for k in signer_keys]
    recv = [k.identity for k in receiver_pubs]
    sessions = [SignerSession(i, ids, recv) for i in ids]
    xs = ephemerals or [None] * len(ids)
    if multi:
        r1 = [mr_signer_round1(params, s, receiver_pubs, rng, ephemeral=x) for s, x in zip(sessions, xs)]
    else:
        r1 = [signer_round1(params, s, receiver_pubs[0], rng, ephemeral=x) for s, x in zip(sessions, xs)]
    pubs = [k.public() for k in signer_keys]
    round2 = mr_signer_round2 if multi else signer_round2
    out = [round2(params, s, r1, m, pubs, k) for s, k in zip(sessions, signer_keys)]
    shares = [z for z, _ in out]
    digests = [d for _, d in out]
    agg = mr_aggregate if multi else aggregate
    sigma = agg(params, digests[0], shares, session=sessions[0])
    return Transcript(sessions, r1, shares, digests, sigma)


def names(n: int, prefix: str = "signer") -> list[str]:
    return [f"{prefix}-{i:02d}" for i in range(n)]


def random_message(rng: random.Random, n: int) -> bytes:
    return bytes(rng.randrange(256) for _ in range(n))
