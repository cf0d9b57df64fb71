"""Bilinear group backend over BLS12-381.

Scalars are plain Python ints reduced mod ``ORDER``.  Group elements are the
point types of ``py_arkworks_bls12381``; this module is the only place that
touches the backend directly, apart from the multi-exponentiation helpers
re-exported below.

Canonical encodings (used on the wire and inside every hash):

* G1: 48-byte compressed point
* G2: 96-byte compressed point
* scalar: 32-byte big-endian integer in ``[0, ORDER)``
"""

from __future__ import annotations

import hashlib
import secrets
import struct
from dataclasses import dataclass, field
from functools import cached_property

from py_arkworks_bls12381 import GT, G1Point, G2Point, Scalar

__all__ = [
    "ORDER",
    "FIELD_MODULUS",
    "G1_BYTES",
    "G2_BYTES",
    "SCALAR_BYTES",
    "G1Point",
    "G2Point",
    "GT",
    "Params",
    "DecodeError",
    "setup",
    "pairing",
    "pairing_product_is_one",
    "gt_pow",
    "hash_to_g1",
    "hash_bytes_to_g1",
    "hash_to_scalar",
    "random_scalar",
    "g1_mul",
    "g2_mul",
    "g1_multiexp",
    "g2_multiexp",
    "g1_identity",
    "g2_identity",
    "is_identity",
    "encode_g1",
    "encode_g2",
    "encode_scalar",
    "decode_g1",
    "decode_g2",
    "decode_scalar",
]

ORDER = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001
FIELD_MODULUS = int(
    "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f624"
    "1eabfffeb153ffffb9feffffffffaaab",
    16,
)
# G1 = E(F_p)[ORDER]; multiplying any curve point by this lands in G1.
G1_COFACTOR = 0x396C8C005555E1568C00AAAB0000AAAB

G1_BYTES = 48
G2_BYTES = 96
SCALAR_BYTES = 32

SUPPORTED_SECURITY_LEVELS = (128,)
CURVE_NAME = "BLS12-381"

SETUP_SEED = b"thresholdcred/setup/v1"
TAG_H2G1 = b"COCONUT-H2G1"
TAG_SETUP = b"COCONUT-SETUP-H"


class DecodeError(ValueError):
    """A byte string is not the canonical encoding of a valid element."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _fr(x: int) -> Scalar:
    return Scalar.from_le_bytes((x % ORDER).to_bytes(SCALAR_BYTES, "little"))


_COFACTOR = _fr(G1_COFACTOR)
_G1 = G1Point()
_G2 = G2Point()


def random_scalar() -> int:
    """Uniform scalar in ``[1, ORDER)``."""
    return secrets.randbelow(ORDER - 1) + 1


def g1_mul(point: G1Point, x: int) -> G1Point:
    return point * _fr(x)


def g2_mul(point: G2Point, x: int) -> G2Point:
    return point * _fr(x)


def g1_multiexp(points, scalars) -> G1Point:
    if len(points) != len(scalars):
        raise ValueError("points and scalars differ in length")
    if not points:
        return G1Point.identity()
    return G1Point.multiexp_unchecked(list(points), [_fr(s) for s in scalars])


def g2_multiexp(points, scalars) -> G2Point:
    if len(points) != len(scalars):
        raise ValueError("points and scalars differ in length")
    if not points:
        return G2Point.identity()
    return G2Point.multiexp_unchecked(list(points), [_fr(s) for s in scalars])


def g1_identity() -> G1Point:
    return G1Point.identity()


def g2_identity() -> G2Point:
    return G2Point.identity()


_G1_ID = bytes(G1Point.identity().to_compressed_bytes())
_G2_ID = bytes(G2Point.identity().to_compressed_bytes())


def is_identity(point) -> bool:
    if isinstance(point, G1Point):
        return encode_g1(point) == _G1_ID
    return encode_g2(point) == _G2_ID


def pairing(a: G1Point, b: G2Point) -> GT:
    return GT.pairing(a, b)


def pairing_product_is_one(pairs) -> bool:
    """True iff the product of ``e(a, b)`` over ``pairs`` is the GT identity."""
    g1s, g2s = zip(*pairs)
    return GT.multi_pairing(list(g1s), list(g2s)) == GT.one()


def gt_pow(x: GT, e: int) -> GT:
    # the backend exposes only the group law on GT
    e %= ORDER
    result = GT.one()
    base = x
    while e:
        if e & 1:
            result = result * base
        base = base * base
        e >>= 1
    return result


# -- encodings ---------------------------------------------------------------


def encode_g1(point: G1Point) -> bytes:
    return bytes(point.to_compressed_bytes())


def encode_g2(point: G2Point) -> bytes:
    return bytes(point.to_compressed_bytes())


def encode_scalar(x: int) -> bytes:
    if not 0 <= x < ORDER:
        raise ValueError("scalar out of range")
    return x.to_bytes(SCALAR_BYTES, "big")


def _decode_point(cls, width: int, data: bytes):
    data = bytes(data)
    if len(data) != width:
        raise DecodeError("wrong-length", f"expected {width} bytes, got {len(data)}")
    try:
        point = cls.from_compressed_bytes(data)
    except (ValueError, RuntimeError) as exc:
        raise DecodeError("invalid-point", str(exc)) from None
    if bytes(point.to_compressed_bytes()) != data:
        raise DecodeError("invalid-point", "non-canonical point encoding")
    return point


def decode_g1(data: bytes) -> G1Point:
    """Decode a compressed G1 point, enforcing curve and subgroup membership."""
    return _decode_point(G1Point, G1_BYTES, data)


def decode_g2(data: bytes) -> G2Point:
    """Decode a compressed G2 point, enforcing curve and subgroup membership."""
    return _decode_point(G2Point, G2_BYTES, data)


def decode_scalar(data: bytes) -> int:
    if len(data) != SCALAR_BYTES:
        raise DecodeError("wrong-length", f"expected {SCALAR_BYTES} bytes, got {len(data)}")
    x = int.from_bytes(data, "big")
    if x >= ORDER:
        raise DecodeError("non-canonical-scalar", "scalar not reduced mod group order")
    return x


# -- hashing -----------------------------------------------------------------


def _frame(*parts: bytes) -> bytes:
    return b"".join(struct.pack(">I", len(p)) + p for p in parts)


def hash_bytes_to_g1(tag: bytes, data: bytes) -> G1Point:
    """Full-domain hash of ``data`` into G1 by try-and-increment.

    Each attempt hashes ``tag || data || counter`` with SHA-512 to a candidate
    x-coordinate and a sign bit.  The first candidate with a square
    right-hand side is lifted to the curve and multiplied by the G1
    cofactor.  The expected number of attempts is 2.
    """
    prefix = _frame(tag, data)
    for counter in range(1 << 16):
        digest = hashlib.sha512(prefix + struct.pack(">I", counter)).digest()
        x = int.from_bytes(digest, "big") % FIELD_MODULUS
        enc = bytearray(x.to_bytes(G1_BYTES, "big"))
        enc[0] |= 0x80 | (0x20 if digest[-1] & 1 else 0)
        try:
            candidate = G1Point.from_compressed_bytes_unchecked(bytes(enc))
        except (ValueError, RuntimeError):
            continue
        point = candidate * _COFACTOR
        if not is_identity(point):
            return point
    raise RuntimeError("hash_bytes_to_g1 exhausted its counter")  # pragma: no cover


def hash_to_g1(point: G1Point) -> G1Point:
    """Hash a G1 element to an independent G1 element (input: compressed encoding)."""
    return hash_bytes_to_g1(TAG_H2G1, encode_g1(point))


def hash_to_scalar(domain_tag: bytes, transcript: bytes) -> int:
    """Domain-separated hash to ``[0, ORDER)`` via 512-bit wide reduction."""
    return int.from_bytes(hashlib.sha512(_frame(domain_tag, transcript)).digest(), "big") % ORDER


# -- public parameters -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Params:
    """Public parameters shared by every party.

    ``hs`` holds the ``q`` extra G1 generators, derived by hashing so that
    everybody recomputes identical parameters without communication.
    """

    q: int
    security_level: int = 128
    g1: G1Point = field(default_factory=G1Point, repr=False)
    g2: G2Point = field(default_factory=G2Point, repr=False)
    hs: tuple = field(default=(), repr=False)

    @property
    def order(self) -> int:
        return ORDER

    @property
    def curve(self) -> str:
        return CURVE_NAME

    @cached_property
    def digest(self) -> bytes:
        h = hashlib.sha256()
        h.update(b"COCONUT-PARAMS")
        h.update(CURVE_NAME.encode())
        h.update(struct.pack(">HH", self.security_level, self.q))
        h.update(encode_g1(self.g1))
        h.update(encode_g2(self.g2))
        for hj in self.hs:
            h.update(encode_g1(hj))
        return h.digest()

    def __eq__(self, other):
        return isinstance(other, Params) and self.digest == other.digest

    def __hash__(self):
        return hash(self.digest)


def setup(security_level: int = 128, q: int = 1) -> Params:
    """Public parameters supporting credentials over ``q`` attributes."""
    if security_level not in SUPPORTED_SECURITY_LEVELS:
        raise ValueError(
            f"unsupported security level {security_level}; "
            f"supported: {SUPPORTED_SECURITY_LEVELS}"
        )
    if not isinstance(q, int) or q < 1:
        raise ValueError("q must be a positive integer")
    hs = tuple(
        hash_bytes_to_g1(TAG_SETUP, b"h_%d" % j + struct.pack(">I", j) + SETUP_SEED)
        for j in range(1, q + 1)
    )
    return Params(q=q, security_level=security_level, g1=_G1, g2=_G2, hs=hs)
