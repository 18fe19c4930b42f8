"""Canonical byte encodings.

Every record is an envelope::

    "IBMS1" | kind (1 byte) | field | field | ...

where each field is a 4-byte big-endian length followed by that many bytes.
The first field of every record except SEALED is the one-byte backend id.
Lists are a field holding a 4-byte count followed by that many fields.
Group elements use the backend's fixed-size compressed encoding, scalars are
fixed-width big-endian, identity lists must be strictly increasing
(bytewise). Decoding re-checks all of this and raises DecodeError naming the
offending field; it never accepts two encodings for one value.

Field order per kind:

=============  =====================================================
PARAMS         backend, q, P, P_pub, R, theta, l (u32), hash_config[]
MASTER_SECRET  backend, s
IDENTITY_KEY   backend, identity, Q, has_S (0/1), [S]
ROUND1         backend, sender, X_i, Y_i, U_i
ROUND2         backend, sender, Z_i
SIGMA          backend, c, X, Z, U, L[]
SIGMA_MULTI    backend, c, X, Z, U_slots[], L[], L_star[]
MR_ROUND1      backend, sender, X_i, Y_i, receivers[], U_slots[]
SEALED         message length (u32), inner SIGMA or SIGMA_MULTI record
=============  =====================================================

The H_2 input stream (:func:`hash_input_bytes`) is
``"IBMS-H2" | lp(c) | lp(X) | lp(U_1) | ... | lp(U_n')`` with lp = 4-byte
length prefix, so a one-receiver stream is the single-receiver stream.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .errors import DecodeError

MAGIC = b"IBMS1"
H2_TAG = b"IBMS-H2"

PARAMS = 1
MASTER_SECRET = 2
IDENTITY_KEY = 3
ROUND1 = 4
ROUND2 = 5
SIGMA = 6
SIGMA_MULTI = 7
MR_ROUND1 = 8
SEALED = 9

KIND_NAMES = {
    PARAMS: "params",
    MASTER_SECRET: "master-secret",
    IDENTITY_KEY: "identity-key",
    ROUND1: "round1",
    ROUND2: "round2",
    SIGMA: "sigma-single",
    SIGMA_MULTI: "sigma-multi",
    MR_ROUND1: "mr-round1",
    SEALED: "sealed",
}

_U32 = struct.Struct(">I")


def lp(data: bytes) -> bytes:
    return _U32.pack(len(data)) + data


def hash_input_bytes(c: bytes, X, U_slots) -> bytes:
    """Exact byte stream fed to H_2 by signers and verifiers alike."""
    return H2_TAG + lp(c) + lp(X.to_bytes()) + b"".join(lp(U.to_bytes()) for U in U_slots)


@dataclass(frozen=True)
class Sealed:
    """CLI wrapper: a signcryptext over a padded message plus the unpadded length."""

    msg_len: int
    sigma: object


# -- writing ------------------------------------------------------------------


def _list(items: Iterable[bytes]) -> bytes:
    items = list(items)
    return _U32.pack(len(items)) + b"".join(lp(i) for i in items)


def _envelope(kind: int, fields: Iterable[bytes]) -> bytes:
    return MAGIC + bytes([kind]) + b"".join(lp(f) for f in fields)


def _scalar(backend, k: int) -> bytes:
    return k.to_bytes(backend.scalar_len, "big")


def encode(value) -> bytes:
    from .core import IdentityKey, MasterSecret, Round1Message, Round2Message, Signcryptext, SystemParams
    from .multi import MultiRound1Message, MultiSigncryptext

    if isinstance(value, Sealed):
        return _envelope(SEALED, [_U32.pack(value.msg_len), encode(value.sigma)])
    b = value.backend if isinstance(value, (SystemParams, MasterSecret)) else None
    if isinstance(value, SystemParams):
        q = b.order.to_bytes((b.order.bit_length() + 7) // 8, "big")
        return _envelope(
            PARAMS,
            [_bid(b), q, value.P.to_bytes(), value.P_pub.to_bytes(), value.R.to_bytes(),
             value.theta.to_bytes(), _U32.pack(value.l), _list(s.encode() for s in value.hash_config)],
        )
    if isinstance(value, MasterSecret):
        return _envelope(MASTER_SECRET, [_bid(b), _scalar(b, value.s)])
    if isinstance(value, IdentityKey):
        fields = [_bid(value.Q.backend), value.identity, value.Q.to_bytes()]
        fields += [b"\x01", value.S.to_bytes()] if value.S is not None else [b"\x00"]
        return _envelope(IDENTITY_KEY, fields)
    if isinstance(value, Round1Message):
        return _envelope(
            ROUND1, [_bid(value.X_i.backend), value.sender, value.X_i.to_bytes(), value.Y_i.to_bytes(), value.U_i.to_bytes()]
        )
    if isinstance(value, MultiRound1Message):
        return _envelope(
            MR_ROUND1,
            [_bid(value.X_i.backend), value.sender, value.X_i.to_bytes(), value.Y_i.to_bytes(),
             _list(value.receivers), _list(u.to_bytes() for u in value.U_slots)],
        )
    if isinstance(value, Round2Message):
        return _envelope(ROUND2, [_bid(value.Z_i.backend), value.sender, value.Z_i.to_bytes()])
    if isinstance(value, Signcryptext):
        return _envelope(
            SIGMA,
            [_bid(value.X.backend), value.c, value.X.to_bytes(), value.Z.to_bytes(), value.U.to_bytes(), _list(value.L)],
        )
    if isinstance(value, MultiSigncryptext):
        return _envelope(
            SIGMA_MULTI,
            [_bid(value.X.backend), value.c, value.X.to_bytes(), value.Z.to_bytes(),
             _list(u.to_bytes() for u in value.U_slots), _list(value.L), _list(value.L_star)],
        )
    raise TypeError(f"cannot encode {type(value).__name__}")


def _bid(backend) -> bytes:
    return bytes([backend.backend_id])


# -- reading ------------------------------------------------------------------


class _Reader:
    def __init__(self, data: bytes, where: str):
        self.data = data
        self.pos = 0
        self.where = where

    def field(self, name: str) -> bytes:
        where = f"{self.where}.{name}"
        if len(self.data) - self.pos < 4:
            raise DecodeError(where, "truncated length prefix")
        (n,) = _U32.unpack_from(self.data, self.pos)
        start = self.pos + 4
        if len(self.data) - start < n:
            raise DecodeError(where, "truncated")
        self.pos = start + n
        return self.data[start : self.pos]

    def items(self, name: str) -> list[bytes]:
        raw = self.field(name)
        if len(raw) < 4:
            raise DecodeError(f"{self.where}.{name}", "truncated list count")
        (count,) = _U32.unpack_from(raw, 0)
        sub = _Reader(raw[4:], f"{self.where}.{name}")
        if count > len(raw):
            raise DecodeError(f"{self.where}.{name}", "list count exceeds data")
        out = [sub.field(f"[{i}]") for i in range(count)]
        sub.finish()
        return out

    def u32(self, name: str) -> int:
        raw = self.field(name)
        if len(raw) != 4:
            raise DecodeError(f"{self.where}.{name}", "expected a 4-byte integer")
        return _U32.unpack(raw)[0]

    def finish(self) -> None:
        if self.pos != len(self.data):
            raise DecodeError(self.where, f"{len(self.data) - self.pos} trailing bytes")


def peek_kind(data: bytes) -> int:
    if len(data) < len(MAGIC) + 1 or not data.startswith(MAGIC):
        raise DecodeError("magic", "not an IBMS1 record")
    kind = data[len(MAGIC)]
    if kind not in KIND_NAMES:
        raise DecodeError("kind", f"unknown record kind {kind}")
    return kind


def _backend(r: _Reader):
    from .pairing import BACKENDS, get_backend

    raw = r.field("backend")
    if len(raw) != 1 or raw[0] not in BACKENDS.values():
        raise DecodeError(f"{r.where}.backend", "unknown backend id")
    return get_backend(raw[0])


def _identity(raw: bytes, where: str) -> bytes:
    if not raw:
        raise DecodeError(where, "empty identity")
    return raw


def _identities(r: _Reader, name: str) -> tuple[bytes, ...]:
    ids = r.items(name)
    if not ids:
        raise DecodeError(f"{r.where}.{name}", "empty identity list")
    for i, ident in enumerate(ids):
        _identity(ident, f"{r.where}.{name}[{i}]")
        if i and ids[i - 1] >= ident:
            raise DecodeError(f"{r.where}.{name}[{i}]", "identity list not strictly sorted (unsorted or duplicated)")
    return tuple(ids)


def _elem(b, r: _Reader, group: str, name: str):
    return b.decode_element(group, r.field(name), f"{r.where}.{name}")


def _nonzero_scalar(b, raw: bytes, where: str) -> int:
    if len(raw) != b.scalar_len:
        raise DecodeError(where, f"expected {b.scalar_len} bytes")
    k = int.from_bytes(raw, "big")
    if not 0 < k < b.order:
        raise DecodeError(where, "scalar out of range [1, q-1]")
    return k


def decode(kind: Optional[int], data: bytes):
    """Decode a record. ``kind=None`` accepts any kind."""
    from .core import IdentityKey, MasterSecret, Round1Message, Round2Message, Signcryptext, SystemParams, h0
    from .multi import MultiRound1Message, MultiSigncryptext

    data = bytes(data)
    actual = peek_kind(data)
    if kind is not None and actual != kind:
        raise DecodeError("kind", f"expected {KIND_NAMES.get(kind, kind)}, found {KIND_NAMES[actual]}")
    name = KIND_NAMES[actual]
    r = _Reader(data[len(MAGIC) + 1 :], name)

    if actual == SEALED:
        msg_len = r.u32("msg_len")
        inner = r.field("sigma")
        r.finish()
        if peek_kind(inner) not in (SIGMA, SIGMA_MULTI):
            raise DecodeError("sealed.sigma", "inner record is not a signcryptext")
        sigma = decode(None, inner)
        if msg_len > len(sigma.c):
            raise DecodeError("sealed.msg_len", "longer than the ciphertext")
        return Sealed(msg_len, sigma)

    b = _backend(r)
    if actual == PARAMS:
        q = int.from_bytes(r.field("q"), "big")
        if q != b.order:
            raise DecodeError("params.q", "does not match the backend group order")
        P = _elem(b, r, "left", "P")
        P_pub = _elem(b, r, "left", "P_pub")
        R = _elem(b, r, "right", "R")
        theta = _elem(b, r, "target", "theta")
        l = r.u32("l")
        try:
            hash_config = tuple(s.decode() for s in r.items("hash_config"))
        except UnicodeDecodeError:
            raise DecodeError("params.hash_config", "not UTF-8") from None
        r.finish()
        if P.is_identity() or P_pub.is_identity():
            raise DecodeError("params.P", "identity point")
        if R.is_identity() or R == b.right_generator():
            raise DecodeError("params.R", "R must differ from the identity and the generator")
        if l < 1:
            raise DecodeError("params.l", "message length must be positive")
        if b._pair(P_pub.raw, R.raw) != theta.raw:
            raise DecodeError("params.theta", "theta != e(P_pub, R)")
        return SystemParams(b, P, P_pub, R, theta, l, hash_config)
    if actual == MASTER_SECRET:
        s = _nonzero_scalar(b, r.field("s"), "master-secret.s")
        r.finish()
        return MasterSecret(b, s)
    if actual == IDENTITY_KEY:
        ident = _identity(r.field("identity"), "identity-key.identity")
        Q = _elem(b, r, "right", "Q")
        flag = r.field("has_S")
        if flag not in (b"\x00", b"\x01"):
            raise DecodeError("identity-key.has_S", "expected 0 or 1")
        S = _elem(b, r, "right", "S") if flag == b"\x01" else None
        r.finish()
        if h0(b, ident) != Q:
            raise DecodeError("identity-key.Q", "Q != H_0(identity)")
        return IdentityKey(ident, Q, S)
    if actual == ROUND1:
        sender = _identity(r.field("sender"), "round1.sender")
        X_i = _elem(b, r, "left", "X_i")
        Y_i = _elem(b, r, "target", "Y_i")
        U_i = _elem(b, r, "right", "U_i")
        r.finish()
        return Round1Message(sender, X_i, Y_i, U_i)
    if actual == MR_ROUND1:
        sender = _identity(r.field("sender"), "mr-round1.sender")
        X_i = _elem(b, r, "left", "X_i")
        Y_i = _elem(b, r, "target", "Y_i")
        receivers = _identities(r, "receivers")
        slots = _slots(b, r)
        r.finish()
        if len(slots) != len(receivers):
            raise DecodeError("mr-round1.U_slots", "slot count differs from receiver count")
        return MultiRound1Message(sender, X_i, Y_i, receivers, slots)
    if actual == ROUND2:
        sender = _identity(r.field("sender"), "round2.sender")
        Z_i = _elem(b, r, "right", "Z_i")
        r.finish()
        return Round2Message(sender, Z_i)
    if actual == SIGMA:
        c = _ciphertext(r)
        X = _elem(b, r, "left", "X")
        Z = _elem(b, r, "right", "Z")
        U = _elem(b, r, "right", "U")
        L = _identities(r, "L")
        r.finish()
        return Signcryptext(c, X, Z, U, L)
    # SIGMA_MULTI
    c = _ciphertext(r)
    X = _elem(b, r, "left", "X")
    Z = _elem(b, r, "right", "Z")
    slots = _slots(b, r)
    L = _identities(r, "L")
    L_star = _identities(r, "L_star")
    r.finish()
    if len(slots) != len(L_star):
        raise DecodeError("sigma-multi.U_slots", "slot count differs from receiver count")
    return MultiSigncryptext(c, X, Z, slots, L, L_star)


def _ciphertext(r: _Reader) -> bytes:
    c = r.field("c")
    if not c:
        raise DecodeError(f"{r.where}.c", "empty ciphertext")
    return c


def _slots(b, r: _Reader) -> tuple:
    raw = r.items("U_slots")
    if not raw:
        raise DecodeError(f"{r.where}.U_slots", "no slots")
    return tuple(b.decode_element("right", u, f"{r.where}.U_slots[{i}]") for i, u in enumerate(raw))


# -- text form ------------------------------------------------------------------


def to_hex(data: bytes) -> str:
    return data.hex()


def from_text(data: Union[bytes, str]) -> bytes:
    """Accept a raw envelope or its lowercase-hex text form (surrounding whitespace ignored)."""
    if isinstance(data, str):
        data = data.encode()
    if data.startswith(MAGIC):
        return data
    try:
        return bytes.fromhex(data.strip().decode("ascii"))
    except (ValueError, UnicodeDecodeError):
        raise DecodeError("file", "neither an IBMS1 record nor its hex form") from None


# -- message padding (CLI layer) ------------------------------------------------


def pad_message(m: bytes, length: int) -> bytes:
    """Pad a short message with 0x80 then zeros up to ``length``; exact-length input is untouched."""
    if len(m) > length:
        raise ValueError(f"message is {len(m)} bytes, longer than the scheme length {length}")
    if len(m) == length:
        return m
    return m + b"\x80" + bytes(length - len(m) - 1)


def unpad_message(m: bytes, msg_len: int) -> bytes:
    if msg_len > len(m):
        raise DecodeError("padding", "recorded length exceeds the message")
    if msg_len < len(m) and m[msg_len:] != b"\x80" + bytes(len(m) - msg_len - 1):
        raise DecodeError("padding", "malformed padding")
    return m[:msg_len]
