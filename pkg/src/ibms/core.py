"""Identity-based multi-signcryption: n signers, one receiver.

The PKG runs :func:`setup` and :func:`extract`. Signers then run a two-round
protocol, one :class:`SignerSession` each::

    r1 = signer_round1(params, session, receiver_pub)        # broadcast
    r2, digest = signer_round2(params, session, all_r1, m, signer_pubs, my_key)
    sigma = aggregate(params, digest, all_r2, session=session)

Anyone can check ``sigma`` with :func:`public_verify`; only the receiver can
:func:`unsigncrypt` it. :func:`signcrypt` runs all signers in-process.

The round logic is written for any number of receiver slots; the
multi-receiver variant in :mod:`ibms.multi` reuses it.
"""

from __future__ import annotations

import enum
import hashlib
import operator
import random
import secrets
from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Iterable, Optional, Sequence, Union

from . import codec
from .errors import DecodeError, ParameterError, ProtocolError, Rejected
from .pairing import LeftElement, PairingBackend, RightElement, TargetElement, get_backend

H0_TAG = b"IBMS-H0"
H1_TAG = b"IBMS-H1"
H2_TAG = b"IBMS-H2"

DEFAULT_LENGTH = 32


# -- hashes -----------------------------------------------------------------


def h0(backend: PairingBackend, identity: bytes) -> RightElement:
    """Public key of an identity."""
    return backend.hash_to_right_group(H0_TAG, identity)


def h1(params: SystemParams, y: TargetElement, out_len: Optional[int] = None) -> bytes:
    """Mask derived from a target-group element (SHAKE-256 over tag || encoding)."""
    n = params.l if out_len is None else out_len
    return hashlib.shake_256(H1_TAG + y.to_bytes()).digest(n)


def h2(params: SystemParams, inputs: bytes) -> int:
    """Challenge scalar in [1, q-1] from the canonical byte stream of :func:`codec.hash_input_bytes`."""
    digest = hashlib.shake_256(inputs).digest(64)
    return int.from_bytes(digest, "big") % (params.q - 1) + 1


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError("length mismatch")
    return bytes(x ^ y for x, y in zip(a, b))


def canonical_identities(ids: Iterable[bytes], what: str = "identity list") -> tuple[bytes, ...]:
    """Sort identities bytewise; reject empty lists, empty identities and duplicates."""
    out = tuple(sorted(bytes(i) for i in ids))
    if not out:
        raise ParameterError(f"{what} is empty")
    if any(not i for i in out):
        raise ParameterError(f"{what} contains an empty identity")
    if len(set(out)) != len(out):
        raise ParameterError(f"{what} contains duplicates")
    return out


def _sum(elems: Iterable):
    return reduce(operator.add, elems)


def _rng(rng: Optional[random.Random]) -> random.Random:
    return rng if rng is not None else secrets.SystemRandom()


# -- data -------------------------------------------------------------------


@dataclass(frozen=True)
class SystemParams:
    backend: PairingBackend
    P: LeftElement
    P_pub: LeftElement
    R: RightElement
    theta: TargetElement
    l: int
    hash_config: tuple[str, ...]

    @property
    def q(self) -> int:
        return self.backend.order

    def check(self) -> bool:
        """theta = e(P_pub, R), checkable by anyone."""
        return self.backend.pair(self.P_pub, self.R) == self.theta


@dataclass(frozen=True)
class MasterSecret:
    backend: PairingBackend
    s: int = field(repr=False)


@dataclass(frozen=True)
class IdentityKey:
    identity: bytes
    Q: RightElement
    S: Optional[RightElement] = field(default=None, repr=False)

    @property
    def has_private(self) -> bool:
        return self.S is not None

    def public(self) -> IdentityKey:
        return replace(self, S=None)

    def check(self, params: SystemParams) -> bool:
        """Q = H_0(identity) and, when S is present, e(P, S) = e(P_pub, Q)."""
        if h0(params.backend, self.identity) != self.Q:
            return False
        if self.S is None:
            return True
        b = params.backend
        return b.pair(params.P, self.S) == b.pair(params.P_pub, self.Q)


class Phase(enum.Enum):
    FRESH = "fresh"
    ROUND1_SENT = "round1-sent"
    ROUND2_SENT = "round2-sent"
    DONE = "done"


@dataclass
class SignerSession:
    """One signer's mutable view of a signcryption session. Not thread-safe."""

    identity: bytes
    signers: Sequence[bytes]
    receivers: Union[bytes, Sequence[bytes]]
    phase: Phase = Phase.FRESH
    x: Optional[int] = field(default=None, repr=False)
    digest: Optional[SessionDigest] = field(default=None, repr=False)

    def __post_init__(self):
        self.identity = bytes(self.identity)
        self.signers = canonical_identities(self.signers, "signer list")
        if isinstance(self.receivers, (bytes, bytearray)):
            self.receivers = (bytes(self.receivers),)
        self.receivers = canonical_identities(self.receivers, "receiver list")
        if self.identity not in self.signers:
            raise ParameterError("session identity is not in the signer list")

    @property
    def my_index(self) -> int:
        return self.signers.index(self.identity)

    @property
    def receiver_identity(self) -> bytes:
        if len(self.receivers) != 1:
            raise ParameterError("session has several receivers")
        return self.receivers[0]

    def _advance(self, expected: Phase, new: Phase) -> None:
        if self.phase is not expected:
            raise ProtocolError(f"session is {self.phase.value}, expected {expected.value}")
        self.phase = new


@dataclass(frozen=True)
class Round1Message:
    sender: bytes
    X_i: LeftElement
    Y_i: TargetElement
    U_i: RightElement

    @property
    def slots(self) -> tuple[RightElement, ...]:
        return (self.U_i,)


@dataclass(frozen=True)
class Round2Message:
    sender: bytes
    Z_i: RightElement


@dataclass(frozen=True)
class SessionDigest:
    """Values every signer derives identically after round 1."""

    c: bytes
    X: LeftElement
    U_slots: tuple[RightElement, ...]
    h: int
    Q: RightElement
    signers: tuple[bytes, ...]
    receivers: tuple[bytes, ...]
    Y: TargetElement = field(repr=False, compare=False)

    @property
    def U(self) -> RightElement:
        if len(self.U_slots) != 1:
            raise ParameterError("digest has several receiver slots")
        return self.U_slots[0]


@dataclass(frozen=True)
class Signcryptext:
    c: bytes
    X: LeftElement
    Z: RightElement
    U: RightElement
    L: tuple[bytes, ...]

    def to_bytes(self) -> bytes:
        return codec.encode(self)


# -- PKG ----------------------------------------------------------------------


def setup(
    backend: Union[PairingBackend, str, None] = None,
    l: int = DEFAULT_LENGTH,
    rng: Optional[random.Random] = None,
) -> tuple[SystemParams, MasterSecret]:
    if not isinstance(backend, PairingBackend):
        backend = get_backend(backend) if backend is not None else get_backend()
    if l < 1:
        raise ParameterError("message length must be at least 1 byte")
    rng = _rng(rng)
    q = backend.order
    s = backend.random_scalar(rng)
    # R uniform over the subgroup minus {O, generator}
    R = backend.right_generator() * rng.randrange(2, q)
    P = backend.left_generator()
    P_pub = s * P
    theta = backend.pair(P_pub, R)
    hash_config = (
        f"H0={backend.hash_to_group_id}/{H0_TAG.decode()}",
        f"H1=shake256/{H1_TAG.decode()}",
        f"H2=shake256-512 mod (q-1) + 1/{H2_TAG.decode()}",
    )
    return SystemParams(backend, P, P_pub, R, theta, l, hash_config), MasterSecret(backend, s)


def extract(params: SystemParams, msk: MasterSecret, identity: bytes) -> IdentityKey:
    if not identity:
        raise ParameterError("identity must be non-empty")
    if msk.backend is not params.backend:
        raise ParameterError("master secret belongs to a different backend")
    Q = h0(params.backend, bytes(identity))
    return IdentityKey(bytes(identity), Q, msk.s * Q)


def public_key(params: SystemParams, identity: bytes) -> IdentityKey:
    if not identity:
        raise ParameterError("identity must be non-empty")
    return IdentityKey(bytes(identity), h0(params.backend, bytes(identity)))


# -- shared round logic (any number of receiver slots) -------------------------


def _receiver_points(params: SystemParams, session: SignerSession, receiver_pubs: Sequence[IdentityKey]):
    by_id = {k.identity: k.Q for k in receiver_pubs}
    if len(by_id) != len(receiver_pubs) or set(by_id) != set(session.receivers):
        raise ParameterError("receiver keys do not match the session's receiver list")
    return [by_id[i] for i in session.receivers]


def _round1(params, session, receiver_pubs, rng, ephemeral):
    points = _receiver_points(params, session, receiver_pubs)
    if session.phase is not Phase.FRESH:
        raise ProtocolError(f"round 1 needs a fresh session, this one is {session.phase.value}")
    if ephemeral is not None:
        x = ephemeral % params.q
        if x == 0:
            raise ParameterError("ephemeral exponent must be nonzero")
    else:
        x = params.backend.random_scalar(_rng(rng))
    X_i = x * params.P
    Y_i = params.theta ** x
    slots = tuple(x * (params.R + Qj) for Qj in points)
    session.x = x
    session._advance(Phase.FRESH, Phase.ROUND1_SENT)
    return X_i, Y_i, slots


def _collect(messages, expected: tuple[bytes, ...], what: str) -> dict:
    seen: dict = {}
    for msg in messages:
        if msg.sender in seen:
            raise ProtocolError(f"duplicate {what} from {msg.sender!r}")
        seen[msg.sender] = msg
    missing = [i for i in expected if i not in seen]
    extra = [i for i in seen if i not in expected]
    if missing:
        raise ProtocolError(f"missing {what} from {missing!r}")
    if extra:
        raise ProtocolError(f"unexpected {what} from {extra!r}")
    return seen


def _signer_points(params, signers, signer_pubs) -> list[RightElement]:
    if signer_pubs is None:
        return [h0(params.backend, i) for i in signers]
    by_id: dict = {}
    for k in signer_pubs:
        if k.identity in by_id:
            raise ProtocolError(f"duplicate signer key for {k.identity!r}")
        by_id[k.identity] = k.Q
    if set(by_id) != set(signers):
        raise ProtocolError("signer keys do not cover the signer list")
    return [by_id[i] for i in signers]


def _round2(params, session, all_round1, m, signer_pubs, my_key):
    if session.phase is not Phase.ROUND1_SENT:
        raise ProtocolError(f"round 2 needs a round1-sent session, this one is {session.phase.value}")
    if len(m) != params.l:
        raise ParameterError(f"message must be exactly {params.l} bytes, got {len(m)}")
    if my_key.S is None or my_key.identity != session.identity:
        raise ParameterError("round 2 needs this signer's private key")
    msgs = _collect(all_round1, session.signers, "round-1 message")
    ordered = [msgs[i] for i in session.signers]
    n_slots = len(session.receivers)
    for msg in ordered:
        if len(msg.slots) != n_slots:
            raise ProtocolError(f"round-1 message from {msg.sender!r} has {len(msg.slots)} slots, expected {n_slots}")
        if getattr(msg, "receivers", session.receivers) != session.receivers:
            raise ProtocolError(f"round-1 message from {msg.sender!r} uses a non-canonical receiver order")

    X = _sum(msg.X_i for msg in ordered)
    Y = reduce(operator.mul, (msg.Y_i for msg in ordered))
    Q = _sum(_signer_points(params, session.signers, signer_pubs))
    U_slots = tuple(_sum(msg.slots[j] for msg in ordered) for j in range(n_slots))
    c = xor_bytes(h1(params, Y), bytes(m))
    h = h2(params, codec.hash_input_bytes(c, X, U_slots))
    Z_i = h * my_key.S + session.x * Q

    digest = SessionDigest(c, X, U_slots, h, Q, session.signers, session.receivers, Y)
    session.digest = digest
    session._advance(Phase.ROUND1_SENT, Phase.ROUND2_SENT)
    return Round2Message(session.identity, Z_i), digest


def _aggregate_Z(digest: SessionDigest, all_round2, session: Optional[SignerSession]) -> RightElement:
    shares = _collect(all_round2, digest.signers, "round-2 share")
    Z = _sum(shares[i].Z_i for i in digest.signers)
    if session is not None:
        session._advance(Phase.ROUND2_SENT, Phase.DONE)
        session.x = None
    return Z


def _verify_equation(params, c, X, Z, U_slots, L) -> bool:
    b = params.backend
    for e in (X, Z, *U_slots):
        if e.backend is not b:
            raise DecodeError("sigma", "element from a different backend")
    if len(c) != params.l:
        raise DecodeError("sigma.c", f"expected {params.l} bytes, got {len(c)}")
    Q = _sum(h0(b, i) for i in L)
    h = h2(params, codec.hash_input_bytes(c, X, U_slots))
    return b.pair(params.P, Z) == b.pair(X + h * params.P_pub, Q)


def shared_element(params: SystemParams, X: LeftElement, U: RightElement, S: RightElement) -> TargetElement:
    """Y' = e(P_pub, U) / e(X, S): the receiver's copy of Y = prod Y_i."""
    b = params.backend
    return b.pair(params.P_pub, U) / b.pair(X, S)


def check_round1(params: SystemParams, r1, receiver_pubs: Sequence[IdentityKey]) -> bool:
    """Public consistency of a round-1 message: e(P, U_{i,j}) = e(X_i, R + Q_j) for every slot.

    Catches a co-signer whose U values do not match X_i. Y_i cannot be
    checked this way.
    """
    b = params.backend
    by_id = {k.identity: k.Q for k in receiver_pubs}
    receivers = getattr(r1, "receivers", None) or tuple(sorted(by_id))
    if len(receivers) != len(r1.slots) or any(i not in by_id for i in receivers):
        return False
    return all(
        b.pair(params.P, U) == b.pair(r1.X_i, params.R + by_id[i]) for i, U in zip(receivers, r1.slots)
    )


# -- single-receiver API ------------------------------------------------------


def signer_round1(
    params: SystemParams,
    session: SignerSession,
    receiver_pub: IdentityKey,
    rng: Optional[random.Random] = None,
    *,
    ephemeral: Optional[int] = None,
) -> Round1Message:
    """Draw x_i and emit (X_i, Y_i, U_i). ``ephemeral`` pins x_i (tests only)."""
    if len(session.receivers) != 1:
        raise ParameterError("single-receiver round on a multi-receiver session")
    X_i, Y_i, (U_i,) = _round1(params, session, [receiver_pub], rng, ephemeral)
    return Round1Message(session.identity, X_i, Y_i, U_i)


def signer_round2(
    params: SystemParams,
    session: SignerSession,
    all_round1: Sequence[Round1Message],
    m: bytes,
    signer_keys_public: Optional[Sequence[IdentityKey]],
    my_key: IdentityKey,
) -> tuple[Round2Message, SessionDigest]:
    if any(not isinstance(r, Round1Message) for r in all_round1):
        raise ProtocolError("expected single-receiver round-1 messages")
    return _round2(params, session, all_round1, m, signer_keys_public, my_key)


def aggregate(
    params: SystemParams,
    digest: SessionDigest,
    all_round2: Sequence[Round2Message],
    L: Optional[Sequence[bytes]] = None,
    *,
    session: Optional[SignerSession] = None,
) -> Signcryptext:
    """Sum the shares into sigma = <c, X, Z, U, L>. Passing ``session`` closes it and wipes x_i."""
    if L is not None and canonical_identities(L, "signer list") != digest.signers:
        raise ProtocolError("signer list differs from the session's")
    Z = _aggregate_Z(digest, all_round2, session)
    return Signcryptext(digest.c, digest.X, Z, digest.U, digest.signers)


def _as_sigma(sigma, kind) -> object:
    if isinstance(sigma, (bytes, bytearray)):
        return codec.decode(kind, bytes(sigma))
    return sigma


def public_verify(params: SystemParams, sigma: Union[Signcryptext, bytes]) -> bool:
    """e(P, Z) = e(X + h P_pub, Q) with h = H_2(c, X, U), Q = sum of H_0 over L.

    Needs no private key. Raises DecodeError for malformed input.
    """
    sigma = _as_sigma(sigma, codec.SIGMA)
    if not isinstance(sigma, Signcryptext):
        raise DecodeError("sigma", "not a single-receiver signcryptext")
    return _verify_equation(params, sigma.c, sigma.X, sigma.Z, (sigma.U,), sigma.L)


def unsigncrypt(params: SystemParams, sigma: Union[Signcryptext, bytes], receiver_key: IdentityKey) -> bytes:
    """Recover m, or raise :class:`Rejected` if sigma fails verification or decoding."""
    if receiver_key.S is None:
        raise ParameterError("unsigncrypt needs the receiver's private key")
    try:
        sigma = _as_sigma(sigma, codec.SIGMA)
        ok = public_verify(params, sigma)
    except DecodeError as exc:
        raise Rejected("encoding", str(exc)) from None
    if not ok:
        raise Rejected("signature")
    Y = shared_element(params, sigma.X, sigma.U, receiver_key.S)
    return xor_bytes(sigma.c, h1(params, Y))


def verify_partial(
    params: SystemParams,
    z: Round2Message,
    digest: SessionDigest,
    signer_pub: IdentityKey,
    r1,
) -> bool:
    """e(P, Z_i) = e(h P_pub, Q_i) * e(X_i, Q): pins a bad share on its sender."""
    if not (z.sender == signer_pub.identity == r1.sender):
        return False
    b = params.backend
    lhs = b.pair(params.P, z.Z_i)
    rhs = b.pair(digest.h * params.P_pub, signer_pub.Q) * b.pair(r1.X_i, digest.Q)
    return lhs == rhs


def signcrypt(
    params: SystemParams,
    m: bytes,
    signer_keys: Sequence[IdentityKey],
    receiver_pub: IdentityKey,
    rng: Optional[random.Random] = None,
) -> Signcryptext:
    """Run every signer's side of the protocol in-process."""
    ids = [k.identity for k in signer_keys]
    sessions = [SignerSession(i, ids, receiver_pub.identity) for i in ids]
    r1 = [signer_round1(params, s, receiver_pub, rng) for s in sessions]
    pubs = [k.public() for k in signer_keys]
    out = [signer_round2(params, s, r1, m, pubs, k) for s, k in zip(sessions, signer_keys)]
    shares = [z for z, _ in out]
    sigmas = [aggregate(params, d, shares, session=s) for s, (_, d) in zip(sessions, out)]
    return sigmas[0]
