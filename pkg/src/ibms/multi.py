"""Multi-signcryption to several receivers at once.

Each signer emits one U slot per receiver, U_{i,j} = x_i (R + Q'_j), and the
challenge h binds every aggregated slot in canonical receiver order. Receiver
j decrypts with slot j. With a single receiver every value, hash input and
field of sigma coincides with the single-receiver scheme.

The receiver list travels in clear inside sigma; there is no receiver
anonymity.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from . import codec
from .core import (
    IdentityKey,
    Round2Message,
    SessionDigest,
    SignerSession,
    Signcryptext,
    SystemParams,
    _aggregate_Z,
    _as_sigma,
    _round1,
    _round2,
    _verify_equation,
    h0,
    h1,
    shared_element,
    xor_bytes,
)
from .errors import DecodeError, ParameterError, ProtocolError, Rejected
from .pairing import LeftElement, RightElement, TargetElement


@dataclass(frozen=True)
class MultiRound1Message:
    sender: bytes
    X_i: LeftElement
    Y_i: TargetElement
    receivers: tuple[bytes, ...]
    U_slots: tuple[RightElement, ...]

    @property
    def slots(self) -> tuple[RightElement, ...]:
        return self.U_slots


@dataclass(frozen=True)
class MultiSigncryptext:
    c: bytes
    X: LeftElement
    Z: RightElement
    U_slots: tuple[RightElement, ...]
    L: tuple[bytes, ...]
    L_star: tuple[bytes, ...]

    def to_bytes(self) -> bytes:
        return codec.encode(self)

    def as_single(self) -> Signcryptext:
        if len(self.U_slots) != 1:
            raise ParameterError("only a one-receiver signcryptext converts to the single-receiver form")
        return Signcryptext(self.c, self.X, self.Z, self.U_slots[0], self.L)


def mr_signer_round1(
    params: SystemParams,
    session: SignerSession,
    receiver_pubs: Sequence[IdentityKey],
    rng: Optional[random.Random] = None,
    *,
    ephemeral: Optional[int] = None,
) -> MultiRound1Message:
    """One x_i drives X_i, Y_i and all n' slots (1 + n' scalar multiplications, 1 exponentiation)."""
    if not receiver_pubs:
        raise ParameterError("receiver list is empty")
    X_i, Y_i, slots = _round1(params, session, receiver_pubs, rng, ephemeral)
    return MultiRound1Message(session.identity, X_i, Y_i, tuple(session.receivers), slots)


def mr_signer_round2(
    params: SystemParams,
    session: SignerSession,
    all_round1: Sequence[MultiRound1Message],
    m: bytes,
    signer_pubs: Optional[Sequence[IdentityKey]],
    my_key: IdentityKey,
) -> tuple[Round2Message, SessionDigest]:
    if any(not isinstance(r, MultiRound1Message) for r in all_round1):
        raise ProtocolError("expected multi-receiver round-1 messages")
    return _round2(params, session, all_round1, m, signer_pubs, my_key)


def mr_aggregate(
    params: SystemParams,
    digest: SessionDigest,
    all_round2: Sequence[Round2Message],
    *,
    session: Optional[SignerSession] = None,
) -> MultiSigncryptext:
    Z = _aggregate_Z(digest, all_round2, session)
    return MultiSigncryptext(digest.c, digest.X, Z, digest.U_slots, digest.signers, digest.receivers)


def _as_multi(sigma) -> MultiSigncryptext:
    sigma = _as_sigma(sigma, codec.SIGMA_MULTI)
    if not isinstance(sigma, MultiSigncryptext):
        raise DecodeError("sigma", "not a multi-receiver signcryptext")
    if len(sigma.U_slots) != len(sigma.L_star):
        raise DecodeError("sigma.U_slots", "slot count differs from receiver count")
    return sigma


def receivers_bound(params: SystemParams, sigma: MultiSigncryptext) -> bool:
    """e(P, U_j) = e(X, R + Q'_j) for every slot.

    Holds for honest sigma because U_j = (sum x_i)(R + Q'_j) and X = (sum x_i) P.
    It ties each slot to its listed receiver, which the challenge h alone does
    not do, since h hashes the slots but not the receiver identities.
    """
    b = params.backend
    return all(
        b.pair(params.P, U) == b.pair(sigma.X, params.R + h0(b, ident))
        for ident, U in zip(sigma.L_star, sigma.U_slots)
    )


def mr_public_verify(
    params: SystemParams,
    sigma: Union[MultiSigncryptext, bytes],
    *,
    bind_receivers: bool = True,
) -> bool:
    """Aggregate signature check, plus (by default) the slot-to-receiver binding.

    With ``bind_receivers=False`` only e(P, Z) = e(X + h P_pub, Q) is checked,
    which costs 1 multiplication and 2 pairings.
    """
    sigma = _as_multi(sigma)
    if not _verify_equation(params, sigma.c, sigma.X, sigma.Z, sigma.U_slots, sigma.L):
        return False
    return not bind_receivers or receivers_bound(params, sigma)


def mr_unsigncrypt(
    params: SystemParams,
    sigma: Union[MultiSigncryptext, bytes],
    receiver_key: IdentityKey,
    receiver_identity: Optional[bytes] = None,
) -> bytes:
    """Verify, pick this receiver's slot and recover m.

    The verification step is the aggregate equation only, so one call costs
    1 multiplication and 4 pairings like the single-receiver unsigncrypt. A
    receiver whose slot was not made for it recovers garbage, not m.
    """
    if receiver_key.S is None:
        raise ParameterError("unsigncrypt needs the receiver's private key")
    ident = receiver_key.identity if receiver_identity is None else bytes(receiver_identity)
    try:
        sigma = _as_multi(sigma)
        if ident not in sigma.L_star:
            raise ParameterError(f"{ident!r} is not a listed receiver")
        ok = _verify_equation(params, sigma.c, sigma.X, sigma.Z, sigma.U_slots, sigma.L)
    except DecodeError as exc:
        raise Rejected("encoding", str(exc)) from None
    if not ok:
        raise Rejected("signature")
    U_j = sigma.U_slots[sigma.L_star.index(ident)]
    Y = shared_element(params, sigma.X, U_j, receiver_key.S)
    return xor_bytes(sigma.c, h1(params, Y))


def mr_signcrypt(
    params: SystemParams,
    m: bytes,
    signer_keys: Sequence[IdentityKey],
    receiver_pubs: Sequence[IdentityKey],
    rng: Optional[random.Random] = None,
) -> MultiSigncryptext:
    """Run every signer's side of the multi-receiver protocol in-process."""
    ids = [k.identity for k in signer_keys]
    recv_ids = [k.identity for k in receiver_pubs]
    sessions = [SignerSession(i, ids, recv_ids) for i in ids]
    r1 = [mr_signer_round1(params, s, receiver_pubs, rng) for s in sessions]
    pubs = [k.public() for k in signer_keys]
    out = [mr_signer_round2(params, s, r1, m, pubs, k) for s, k in zip(sessions, signer_keys)]
    shares = [z for z, _ in out]
    sigmas = [mr_aggregate(params, d, shares, session=s) for s, (_, d) in zip(sessions, out)]
    return sigmas[0]


__all__ = [
    "MultiRound1Message",
    "MultiSigncryptext",
    "mr_aggregate",
    "mr_public_verify",
    "mr_signcrypt",
    "mr_signer_round1",
    "mr_signer_round2",
    "mr_unsigncrypt",
    "receivers_bound",
]
