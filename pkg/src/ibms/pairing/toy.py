"""Desk-scale symmetric pairing on the supersingular curve y^2 = x^3 + x.

For p = 3 (mod 4) the curve has p + 1 points over F_p and embedding degree 2.
With q | p + 1 the reduced Tate pairing twisted by the distortion map
(x, y) -> (-x, i*y), i^2 = -1, is a non-degenerate symmetric pairing on the
order-q subgroup with values in the order-q subgroup of F_{p^2}^*.

The parameters are tiny on purpose: every identity can be checked by
enumeration. The backend offers no security whatsoever.
"""

from __future__ import annotations

import hashlib
import itertools
from typing import Iterator, Optional, Tuple

from ..errors import DecodeError
from .groups import PairingBackend

Point = Optional[Tuple[int, int]]  # None is the point at infinity
Fp2 = Tuple[int, int]  # a + b*i

#: p = 61*8 - 1; the first prime p = 3 (mod 4) whose curve order has 61 as a factor.
TOY_P = 487
#: largest prime <= 64
TOY_Q = 61


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def count_points(p: int) -> int:
    """#E(F_p) for y^2 = x^3 + x, by enumerating x and counting square roots."""
    squares = {}
    for y in range(p):
        squares[y * y % p] = squares.get(y * y % p, 0) + 1
    return 1 + sum(squares.get((x * x * x + x) % p, 0) for x in range(p))


def scan_toy_curves(q_min: int = 7, q_max: int = 64, p_limit: int = 2000) -> Iterator[tuple[int, int, int]]:
    """Yield (p, #E(F_p), q) for primes p = 3 (mod 4) with a usable subgroup order q.

    q is the largest prime factor of the point count with q_min <= q <= q_max
    and q^2 not dividing the count (so the q-torsion over F_p is cyclic).
    """
    for p in range(7, p_limit, 4):
        if not is_prime(p):
            continue
        n = count_points(p)
        for q in range(q_max, q_min - 1, -1):
            if is_prime(q) and n % q == 0 and n % (q * q):
                yield p, n, q
                break


class ToyBackend(PairingBackend):
    name = "toy"
    backend_id = 2
    symmetric = True
    hash_to_group_id = "toy-try-and-increment-sha256"

    def __init__(self, p: int = TOY_P, q: int = TOY_Q):
        self.p = p
        self.order = q
        self.cofactor = (p + 1) // q
        self.scalar_len = (q.bit_length() + 7) // 8
        self.coord_len = (p.bit_length() + 7) // 8
        self.left_len = self.right_len = 1 + self.coord_len
        self.target_len = 2 * self.coord_len
        self._final_exp = (p * p - 1) // q
        self._check_parameters()
        self.generator = self._find_generator()
        if self._pair(self.generator, self.generator) == (1, 0):
            raise ValueError("degenerate pairing on the chosen generator")

    def _check_parameters(self) -> None:
        p, q = self.p, self.order
        if not is_prime(p) or p % 4 != 3:
            raise ValueError(f"p={p} must be a prime congruent to 3 mod 4")
        n = count_points(p)
        if n != p + 1:
            raise ValueError(f"point count {n} != p + 1; curve is not supersingular over F_{p}")
        if not is_prime(q) or n % q or n % (q * q) == 0:
            raise ValueError(f"q={q} must be a prime dividing #E={n} exactly once")

    # -- field and curve helpers ----------------------------------------------

    def _sqrt(self, a: int) -> Optional[int]:
        p = self.p
        y = pow(a, (p + 1) // 4, p)
        return y if y * y % p == a % p else None

    def _on_curve(self, pt: Point) -> bool:
        if pt is None:
            return True
        x, y = pt
        return (y * y - x * x * x - x) % self.p == 0

    def point_add(self, a: Point, b: Point) -> Point:
        p = self.p
        if a is None:
            return b
        if b is None:
            return a
        (x1, y1), (x2, y2) = a, b
        if x1 == x2:
            if (y1 + y2) % p == 0:
                return None
            lam = (3 * x1 * x1 + 1) * pow(2 * y1, -1, p) % p
        else:
            lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
        x3 = (lam * lam - x1 - x2) % p
        return x3, (lam * (x1 - x3) - y1) % p

    def point_neg(self, a: Point) -> Point:
        return None if a is None else (a[0], -a[1] % self.p)

    def point_mul(self, a: Point, k: int) -> Point:
        acc: Point = None
        while k:
            if k & 1:
                acc = self.point_add(acc, a)
            a = self.point_add(a, a)
            k >>= 1
        return acc

    def _find_generator(self) -> Point:
        for x in range(self.p):
            y = self._sqrt(x * x * x + x)
            if not y:
                continue
            g = self.point_mul((x, min(y, self.p - y)), self.cofactor)
            if g is not None:
                return g
        raise ValueError("no point of order q found")

    def f2_mul(self, a: Fp2, b: Fp2) -> Fp2:
        p = self.p
        return (a[0] * b[0] - a[1] * b[1]) % p, (a[0] * b[1] + a[1] * b[0]) % p

    def f2_pow(self, a: Fp2, k: int) -> Fp2:
        acc = (1, 0)
        while k:
            if k & 1:
                acc = self.f2_mul(acc, a)
            a = self.f2_mul(a, a)
            k >>= 1
        return acc

    def f2_inv(self, a: Fp2) -> Fp2:
        p = self.p
        norm_inv = pow(a[0] * a[0] + a[1] * a[1], -1, p)
        return a[0] * norm_inv % p, -a[1] * norm_inv % p

    # -- pairing ----------------------------------------------------------------

    def _pair(self, a: Point, b: Point) -> Fp2:
        if a is None or b is None:
            return (1, 0)
        p = self.p
        # distorted second argument: (-xb, i*yb); its x lies in F_p, so vertical
        # lines evaluate into F_p^* and vanish under the final exponentiation
        xq, yq = -b[0] % p, b[1]
        f: Fp2 = (1, 0)
        t = a
        for bit in bin(self.order)[3:]:
            lam = (3 * t[0] * t[0] + 1) * pow(2 * t[1], -1, p) % p
            f = self.f2_mul(self.f2_mul(f, f), ((-t[1] + lam * (t[0] - xq)) % p, yq))
            t = self.point_add(t, t)
            if bit == "1":
                if t[0] == a[0]:
                    # t = -a: vertical line, only reached on the last step
                    t = None
                    continue
                lam = (a[1] - t[1]) * pow(a[0] - t[0], -1, p) % p
                f = self.f2_mul(f, ((-t[1] + lam * (t[0] - xq)) % p, yq))
                t = self.point_add(t, a)
        return self.f2_pow(f, self._final_exp)

    # -- raw group primitives -------------------------------------------------

    def _left_add(self, a, b):
        return self.point_add(a, b)

    _right_add = _left_add

    def _left_neg(self, a):
        return self.point_neg(a)

    _right_neg = _left_neg

    def _left_mul(self, a, k):
        return self.point_mul(a, k)

    _right_mul = _left_mul

    def _left_generator(self):
        return self.generator

    _right_generator = _left_generator

    def _left_identity(self):
        return None

    _right_identity = _left_identity

    def _encode_point(self, a: Point) -> bytes:
        if a is None:
            return bytes(self.left_len)
        return bytes([2 | (a[1] & 1)]) + a[0].to_bytes(self.coord_len, "big")

    _left_encode = _right_encode = _encode_point

    def _decode_point(self, data: bytes) -> Point:
        flag, x = data[0], int.from_bytes(data[1:], "big")
        if flag == 0:
            if x:
                raise DecodeError("point", "identity with nonzero payload")
            return None
        if flag not in (2, 3):
            raise DecodeError("point", f"bad flag byte {flag:#04x}")
        if x >= self.p:
            raise DecodeError("point", "x coordinate out of range")
        y = self._sqrt(x * x * x + x)
        if y is None:
            raise DecodeError("point", "not on curve")
        if y & 1 != flag & 1:
            y = self.p - y
        if y & 1 != flag & 1:
            # y == 0 has no odd root
            raise DecodeError("point", "no root with requested parity")
        pt = (x, y)
        if self.point_mul(pt, self.order) is not None:
            raise DecodeError("point", "not in the order-q subgroup")
        return pt

    _left_decode = _right_decode = _decode_point

    def _hash_right(self, message: bytes):
        p = self.p
        for counter in itertools.count():
            d = hashlib.sha256(message + counter.to_bytes(4, "big")).digest()
            x = int.from_bytes(d[:16], "big") % p
            y = self._sqrt(x * x * x + x)
            if not y:
                continue
            if d[16] & 1:
                y = p - y
            pt = self.point_mul((x, y), self.cofactor)
            if pt is not None:
                return pt
        raise AssertionError("unreachable")

    def _gt_mul(self, a, b):
        return self.f2_mul(a, b)

    def _gt_inv(self, a):
        return self.f2_inv(a)

    def _gt_exp(self, a, k):
        return self.f2_pow(a, k)

    def _gt_one(self):
        return (1, 0)

    def _gt_encode(self, a) -> bytes:
        return a[0].to_bytes(self.coord_len, "big") + a[1].to_bytes(self.coord_len, "big")

    def _gt_decode(self, data: bytes):
        n = self.coord_len
        v = (int.from_bytes(data[:n], "big"), int.from_bytes(data[n:], "big"))
        if v[0] >= self.p or v[1] >= self.p:
            raise DecodeError("target", "coordinate out of range")
        if self.f2_pow(v, self.order) != (1, 0):
            raise DecodeError("target", "not in the order-q subgroup")
        return v
