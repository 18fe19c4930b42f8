"""BLS12-381 backend bound to the mcl library (via pymcl).

Left group = G1, right group = G2, so hashed identities and everything derived
from them (S_ID, U, Z, Q) live in G2. Points use mcl's compressed
little-endian serialization; mcl's deserializer already rejects points
outside the prime-order subgroup, while target-group values get an explicit
order check here.
"""

from __future__ import annotations

from functools import lru_cache

from pymcl import G1, G2, GT, Fr, g1, g2, pairing, r

from ..errors import DecodeError
from .groups import PairingBackend


@lru_cache(maxsize=4096)
def _fr(k: int) -> Fr:
    return Fr(str(k))


class BLS12Backend(PairingBackend):
    name = "bls12-381"
    backend_id = 1
    order = r
    scalar_len = 32
    left_len = 48
    right_len = 96
    target_len = 576
    hash_to_group_id = "mcl-hashAndMapTo-G2"

    def __init__(self):
        self._one = pairing(g1, g2) ** _fr(0)

    def _left_add(self, a, b):
        return a + b

    _right_add = _left_add

    def _left_neg(self, a):
        return -a

    _right_neg = _left_neg

    def _left_mul(self, a, k):
        return a * _fr(k)

    _right_mul = _left_mul

    def _left_generator(self):
        return g1

    def _right_generator(self):
        return g2

    def _left_identity(self):
        return G1()

    def _right_identity(self):
        return G2()

    def _left_encode(self, a) -> bytes:
        return a.serialize()

    _right_encode = _gt_encode = _left_encode

    def _left_decode(self, data: bytes):
        return G1.deserialize(data)

    def _right_decode(self, data: bytes):
        return G2.deserialize(data)

    def _hash_right(self, message: bytes):
        return G2.hash(message)

    def _gt_mul(self, a, b):
        return a * b

    def _gt_inv(self, a):
        return ~a

    def _gt_exp(self, a, k):
        return a ** _fr(k)

    def _gt_one(self):
        return self._one

    def _gt_decode(self, data: bytes):
        y = GT.deserialize(data)
        if not (y ** _fr(r - 1) * y).is_one():
            raise DecodeError("target", "not in the order-r subgroup")
        return y

    def _pair(self, a, b):
        return pairing(a, b)
