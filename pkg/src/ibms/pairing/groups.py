"""Group elements and the pairing-backend contract.

The scheme is written for a symmetric pairing, but every pairing it evaluates
takes a generator-lineage value on the left (P, P_pub, X_i, X) and an
identity-lineage value on the right (R, Q_ID, S_ID, U, Z, Q). Elements are
therefore split statically into :class:`LeftElement` and :class:`RightElement`,
which lets the same code run on an asymmetric curve.

Backends implement the underscore-prefixed raw primitives; the public methods
wrap them, type-check operands and feed the operation counters.
"""

from __future__ import annotations

import abc
import random
from typing import Any

from ..errors import DecodeError
from .counters import tally


class _Element:
    __slots__ = ("backend", "raw")
    group = ""

    def __init__(self, backend: PairingBackend, raw: Any):
        self.backend = backend
        self.raw = raw

    def _same(self, other: object) -> bool:
        return type(other) is type(self) and other.backend is self.backend  # type: ignore[attr-defined]

    def __eq__(self, other: object) -> bool:
        return self._same(other) and self.raw == other.raw  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return hash((self.group, self.to_bytes()))

    def to_bytes(self) -> bytes:
        return self.backend.encode_element(self)

    def hex(self) -> str:
        return self.to_bytes().hex()

    def __repr__(self) -> str:
        h = self.hex()
        return f"{type(self).__name__}({self.backend.name}:{h[:16]}{'...' if len(h) > 16 else ''})"


class _PointElement(_Element):
    __slots__ = ()

    def __add__(self, other):
        if not self._same(other):
            return NotImplemented
        return self.backend._add(self, other)

    def __neg__(self):
        return self.backend._neg(self)

    def __sub__(self, other):
        if not self._same(other):
            return NotImplemented
        return self + (-other)

    def __mul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return self.backend._scale(self, k)

    __rmul__ = __mul__

    def is_identity(self) -> bool:
        return self.raw == self.backend._identity_raw(self.group)


class LeftElement(_PointElement):
    """Element of the generator-lineage source group."""

    __slots__ = ()
    group = "left"


class RightElement(_PointElement):
    """Element of the identity-lineage source group (target of H_0)."""

    __slots__ = ()
    group = "right"


class TargetElement(_Element):
    """Element of the multiplicative target group."""

    __slots__ = ()
    group = "target"

    def __mul__(self, other):
        if not self._same(other):
            return NotImplemented
        return self.backend.gt_mul(self, other)

    def __truediv__(self, other):
        if not self._same(other):
            return NotImplemented
        return self * self.backend.gt_inverse(other)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return self.backend.gt_exp(self, k)

    def inverse(self) -> TargetElement:
        return self.backend.gt_inverse(self)

    def is_identity(self) -> bool:
        return self.raw == self.backend._gt_one()


_KINDS = {"left": LeftElement, "right": RightElement, "target": TargetElement}


class PairingBackend(abc.ABC):
    """A bilinear map e: left x right -> target over groups of prime order ``order``."""

    name: str
    backend_id: int
    order: int
    scalar_len: int
    #: fixed encoded sizes, in bytes
    left_len: int
    right_len: int
    target_len: int
    hash_to_group_id: str
    symmetric = False

    # -- raw primitives -------------------------------------------------------

    @abc.abstractmethod
    def _left_add(self, a, b): ...

    @abc.abstractmethod
    def _left_neg(self, a): ...

    @abc.abstractmethod
    def _left_mul(self, a, k: int): ...

    @abc.abstractmethod
    def _left_generator(self): ...

    @abc.abstractmethod
    def _left_identity(self): ...

    @abc.abstractmethod
    def _left_encode(self, a) -> bytes: ...

    @abc.abstractmethod
    def _left_decode(self, data: bytes): ...

    @abc.abstractmethod
    def _right_add(self, a, b): ...

    @abc.abstractmethod
    def _right_neg(self, a): ...

    @abc.abstractmethod
    def _right_mul(self, a, k: int): ...

    @abc.abstractmethod
    def _right_generator(self): ...

    @abc.abstractmethod
    def _right_identity(self): ...

    @abc.abstractmethod
    def _right_encode(self, a) -> bytes: ...

    @abc.abstractmethod
    def _right_decode(self, data: bytes): ...

    @abc.abstractmethod
    def _hash_right(self, message: bytes): ...

    @abc.abstractmethod
    def _gt_mul(self, a, b): ...

    @abc.abstractmethod
    def _gt_inv(self, a): ...

    @abc.abstractmethod
    def _gt_exp(self, a, k: int): ...

    @abc.abstractmethod
    def _gt_one(self): ...

    @abc.abstractmethod
    def _gt_encode(self, a) -> bytes: ...

    @abc.abstractmethod
    def _gt_decode(self, data: bytes): ...

    @abc.abstractmethod
    def _pair(self, a, b): ...

    # -- constructors ---------------------------------------------------------

    def left_generator(self) -> LeftElement:
        return LeftElement(self, self._left_generator())

    def right_generator(self) -> RightElement:
        return RightElement(self, self._right_generator())

    def left_identity(self) -> LeftElement:
        return LeftElement(self, self._left_identity())

    def right_identity(self) -> RightElement:
        return RightElement(self, self._right_identity())

    def gt_identity(self) -> TargetElement:
        return TargetElement(self, self._gt_one())

    def random_scalar(self, rng: random.Random, *, nonzero: bool = True) -> int:
        return rng.randrange(1 if nonzero else 0, self.order)

    # -- counted arithmetic ---------------------------------------------------

    def left_add(self, a: LeftElement, b: LeftElement) -> LeftElement:
        self._check(a, LeftElement)
        self._check(b, LeftElement)
        return LeftElement(self, self._left_add(a.raw, b.raw))

    def right_add(self, a: RightElement, b: RightElement) -> RightElement:
        self._check(a, RightElement)
        self._check(b, RightElement)
        return RightElement(self, self._right_add(a.raw, b.raw))

    def left_mul(self, k: int, a: LeftElement) -> LeftElement:
        self._check(a, LeftElement)
        tally("left_muls")
        return LeftElement(self, self._left_mul(a.raw, k % self.order))

    def right_mul(self, k: int, a: RightElement) -> RightElement:
        self._check(a, RightElement)
        tally("right_muls")
        return RightElement(self, self._right_mul(a.raw, k % self.order))

    def gt_mul(self, a: TargetElement, b: TargetElement) -> TargetElement:
        self._check(a, TargetElement)
        self._check(b, TargetElement)
        return TargetElement(self, self._gt_mul(a.raw, b.raw))

    def gt_exp(self, a: TargetElement, k: int) -> TargetElement:
        self._check(a, TargetElement)
        tally("gt_exps")
        return TargetElement(self, self._gt_exp(a.raw, k % self.order))

    def gt_inverse(self, a: TargetElement) -> TargetElement:
        self._check(a, TargetElement)
        return TargetElement(self, self._gt_inv(a.raw))

    def pair(self, a: LeftElement, b: RightElement) -> TargetElement:
        self._check(a, LeftElement)
        self._check(b, RightElement)
        tally("pairings")
        return TargetElement(self, self._pair(a.raw, b.raw))

    def hash_to_right_group(self, domain_tag: bytes, data: bytes) -> RightElement:
        """Deterministically map ``data`` to a non-identity element of order ``order``."""
        if len(domain_tag) > 255:
            raise ValueError("domain tag longer than 255 bytes")
        tally("hash_to_group")
        return RightElement(self, self._hash_right(bytes([len(domain_tag)]) + domain_tag + data))

    # -- encoding -------------------------------------------------------------

    def element_len(self, group: str) -> int:
        return {"left": self.left_len, "right": self.right_len, "target": self.target_len}[group]

    def encode_element(self, e: _Element) -> bytes:
        if e.backend is not self:
            raise ValueError("element belongs to a different backend")
        enc = {"left": self._left_encode, "right": self._right_encode, "target": self._gt_encode}
        return enc[e.group](e.raw)

    def decode_element(self, group: str, data: bytes, field: str = "element") -> _Element:
        """Parse a canonical encoding; raises DecodeError on anything else.

        Decoding enforces on-curve and order-``order`` subgroup membership.
        """
        if len(data) != self.element_len(group):
            raise DecodeError(field, f"expected {self.element_len(group)} bytes, got {len(data)}")
        dec = {"left": self._left_decode, "right": self._right_decode, "target": self._gt_decode}
        try:
            raw = dec[group](data)
        except DecodeError as exc:
            raise DecodeError(field, str(exc)) from None
        except (ValueError, RuntimeError) as exc:
            raise DecodeError(field, f"invalid {group} element ({exc})") from None
        e = _KINDS[group](self, raw)
        if e.to_bytes() != data:
            raise DecodeError(field, "non-canonical encoding")
        return e

    # -- operator plumbing ----------------------------------------------------

    def _check(self, e, cls) -> None:
        if type(e) is not cls:
            raise TypeError(f"expected {cls.__name__}, got {type(e).__name__}")
        if e.backend is not self:
            raise ValueError("element belongs to a different backend")

    def _add(self, a, b):
        return self.left_add(a, b) if a.group == "left" else self.right_add(a, b)

    def _neg(self, a):
        if a.group == "left":
            return LeftElement(self, self._left_neg(a.raw))
        return RightElement(self, self._right_neg(a.raw))

    def _scale(self, a, k: int):
        return self.left_mul(k, a) if a.group == "left" else self.right_mul(k, a)

    def _identity_raw(self, group: str):
        return self._left_identity() if group == "left" else self._right_identity()

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name} q={self.order}>"
