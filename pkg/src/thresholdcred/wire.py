"""Canonical binary encodings and the message envelope.

Every object travels as ``version (1 byte) || kind (1 byte) || payload``.
Payload layouts are listed in ``docs/wire-format.md``; all integers are
big-endian, scalars are 32 bytes, G1/G2 points are 48/96-byte compressed
encodings, and variable-length lists carry a ``u16`` count.

Decoding is strict: exact lengths, canonical scalars, curve and subgroup
checks on every point.  Each failure raises a :class:`WireError` subclass
with a distinct ``code``.
"""

from __future__ import annotations

import base64
import enum
import json
import struct
from dataclasses import dataclass

from .elgamal import ElGamalCiphertext
from .group import (
    G1_BYTES,
    G2_BYTES,
    SCALAR_BYTES,
    DecodeError,
    Params,
    decode_g1,
    decode_g2,
    decode_scalar,
    encode_g1,
    encode_g2,
    encode_scalar,
    is_identity,
)
from .nizk import IssuanceProof, PetitionShowProof, Predicate, ShowProof, SigmaProof
from .scheme import (
    AggregatedVerificationKey,
    AttributeVector,
    BlindedPartial,
    BlindSignRequest,
    Credential,
    SecretKeyShare,
    ShowMaterial,
    VerificationKeyShare,
)

VERSION = 1
HEADER_BYTES = 2


class Kind(enum.IntEnum):
    REQUEST = 1
    PARTIAL = 2
    SHOW = 3
    VK_SHARE = 4
    PARAMS_DIGEST = 5
    CREDENTIAL = 6
    PARAMS = 7
    SK_SHARE = 8
    AGG_VK = 9
    PARTIAL_SET = 10
    ATTRIBUTES = 11
    PETITION_PACKET = 12


class WireError(DecodeError):
    code = "malformed"

    def __init__(self, message: str):
        super().__init__(self.code, message)


class LengthError(WireError):
    code = "wrong-length"


class PointError(WireError):
    code = "invalid-point"


class ScalarError(WireError):
    code = "non-canonical-scalar"


class VersionError(WireError):
    code = "unknown-version"


class KindError(WireError):
    code = "unknown-kind"


class FormatError(WireError):
    code = "malformed"


_BY_CODE = {cls.code: cls for cls in (LengthError, PointError, ScalarError)}


@dataclass(frozen=True)
class ParamsDigest:
    value: bytes


@dataclass(frozen=True)
class PartialSet:
    """Unblinded partial credentials keyed by authority index."""

    items: tuple

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)


@dataclass(frozen=True)
class Envelope:
    version: int
    kind: Kind
    payload: bytes

    def to_bytes(self) -> bytes:
        return bytes([self.version, self.kind]) + self.payload

    @classmethod
    def parse(cls, data: bytes) -> "Envelope":
        data = bytes(data)
        if len(data) < HEADER_BYTES:
            raise LengthError("envelope shorter than its header")
        if data[0] != VERSION:
            raise VersionError(f"unsupported version {data[0]}")
        try:
            kind = Kind(data[1])
        except ValueError:
            raise KindError(f"unknown message kind {data[1]}") from None
        return cls(data[0], kind, data[2:])


# -- primitives ------------------------------------------------------------------------


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise LengthError("truncated payload")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def _guard(self, fn, n):
        try:
            return fn(self.take(n))
        except WireError:
            raise
        except DecodeError as exc:
            raise _BY_CODE.get(exc.code, FormatError)(str(exc)) from None

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def g1(self):
        return self._guard(decode_g1, G1_BYTES)

    def g2(self):
        return self._guard(decode_g2, G2_BYTES)

    def scalar(self) -> int:
        return self._guard(decode_scalar, SCALAR_BYTES)

    def blob(self) -> bytes:
        return self.take(self.u16())

    def finish(self):
        if self.pos != len(self.data):
            raise LengthError(f"{len(self.data) - self.pos} trailing bytes")


def _u16(n: int) -> bytes:
    return struct.pack(">H", n)


def _blob(b: bytes) -> bytes:
    return _u16(len(b)) + b


def _w_public(public_attrs) -> bytes:
    return _u16(len(public_attrs)) + b"".join(_u16(p) + encode_scalar(m) for p, m in public_attrs)


def _r_public(r: _Reader) -> tuple:
    items = tuple((r.u16(), r.scalar()) for _ in range(r.u16()))
    positions = [p for p, _ in items]
    if positions != sorted(set(positions)) or any(p == 0 for p in positions):
        raise FormatError("public attribute positions must be increasing and nonzero")
    return items


def _w_predicate(pred: Predicate) -> bytes:
    return pred.descriptor()


def _r_predicate(r: _Reader) -> Predicate:
    try:
        name = r.blob().decode("ascii")
    except UnicodeDecodeError:
        raise FormatError("predicate name is not ASCII") from None
    positions = tuple(r.u16() for _ in range(r.u16()))
    if list(positions) != sorted(set(positions)):
        raise FormatError("predicate positions must be increasing")
    try:
        return Predicate(name, positions)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _w_proof(proof: SigmaProof) -> bytes:
    return encode_scalar(proof.challenge) + _u16(len(proof.responses)) + b"".join(
        encode_scalar(x) for x in proof.responses
    )


def _r_proof(r: _Reader, cls):
    c = r.scalar()
    return cls(c, tuple(r.scalar() for _ in range(r.u16())))


def _r_credential(r: _Reader) -> Credential:
    return Credential(r.g1(), r.g1())


def _w_show(theta: ShowMaterial) -> bytes:
    return b"".join(
        [
            encode_g2(theta.kappa),
            encode_g1(theta.nu),
            theta.sigma_prime.to_bytes(),
            _w_public(theta.public_attrs),
            _w_predicate(theta.predicate),
            _w_proof(theta.pi_v),
        ]
    )


def _r_show(r: _Reader, proof_cls=ShowProof) -> ShowMaterial:
    kappa, nu, sigma = r.g2(), r.g1(), _r_credential(r)
    public = _r_public(r)
    pred = _r_predicate(r)
    return ShowMaterial(kappa, nu, sigma, _r_proof(r, proof_cls), public, pred)


# -- per-kind codecs -------------------------------------------------------------------


def _enc_params(p: Params) -> bytes:
    return _u16(p.security_level) + _u16(p.q) + encode_g1(p.g1) + encode_g2(p.g2) + b"".join(encode_g1(h) for h in p.hs)


def _dec_params(r: _Reader) -> Params:
    level, q = r.u16(), r.u16()
    if q == 0:
        raise FormatError("params with q = 0")
    g1, g2 = r.g1(), r.g2()
    hs = tuple(r.g1() for _ in range(q))
    if any(is_identity(g) for g in (g1, g2, *hs)):
        raise PointError("generator is the identity")
    return Params(q=q, security_level=level, g1=g1, g2=g2, hs=hs)


def _enc_sk(sk: SecretKeyShare) -> bytes:
    return _u16(sk.index) + encode_scalar(sk.x) + _u16(len(sk.y)) + b"".join(encode_scalar(y) for y in sk.y)


def _dec_sk(r: _Reader) -> SecretKeyShare:
    index, x = r.u16(), r.scalar()
    if index == 0:
        raise FormatError("authority index 0")
    return SecretKeyShare(index, x, tuple(r.scalar() for _ in range(r.u16())))


def _enc_vk(vk: VerificationKeyShare) -> bytes:
    return _u16(vk.index) + encode_g2(vk.alpha) + _u16(len(vk.beta)) + b"".join(encode_g2(b) for b in vk.beta)


def _dec_vk(r: _Reader) -> VerificationKeyShare:
    index, alpha = r.u16(), r.g2()
    if index == 0:
        raise FormatError("authority index 0")
    return VerificationKeyShare(index, alpha, tuple(r.g2() for _ in range(r.u16())))


def _enc_agg_vk(vk: AggregatedVerificationKey) -> bytes:
    # the share indices it was built from are bookkeeping, not part of the key
    return encode_g2(vk.alpha) + _u16(len(vk.beta)) + b"".join(encode_g2(b) for b in vk.beta)


def _dec_agg_vk(r: _Reader) -> AggregatedVerificationKey:
    alpha = r.g2()
    return AggregatedVerificationKey(alpha, tuple(r.g2() for _ in range(r.u16())))


def _enc_request(req: BlindSignRequest) -> bytes:
    return b"".join(
        [
            encode_g1(req.gamma),
            encode_g1(req.c_m),
            _u16(len(req.ciphertexts)),
            *(ct.to_bytes() for ct in req.ciphertexts),
            _w_public(req.public_attrs),
            _w_predicate(req.predicate),
            _w_proof(req.pi_s),
        ]
    )


def _dec_request(r: _Reader) -> BlindSignRequest:
    gamma, c_m = r.g1(), r.g1()
    cts = tuple(ElGamalCiphertext(r.g1(), r.g1()) for _ in range(r.u16()))
    public = _r_public(r)
    pred = _r_predicate(r)
    return BlindSignRequest(gamma, c_m, cts, _r_proof(r, IssuanceProof), public, pred)


def _dec_partial(r: _Reader) -> BlindedPartial:
    return BlindedPartial(r.g1(), r.g1(), r.g1())


def _enc_partial_set(ps: PartialSet) -> bytes:
    return _u16(len(ps.items)) + b"".join(_u16(i) + c.to_bytes() for i, c in ps.items)


def _dec_partial_set(r: _Reader) -> PartialSet:
    items = tuple((r.u16(), _r_credential(r)) for _ in range(r.u16()))
    indices = [i for i, _ in items]
    if len(set(indices)) != len(indices) or 0 in indices:
        raise FormatError("partial set indices must be distinct and nonzero")
    return PartialSet(items)


def _enc_attributes(a: AttributeVector) -> bytes:
    return (
        _u16(a.q)
        + b"".join(encode_scalar(m) for m in a.values)
        + _u16(len(a.public_positions))
        + b"".join(_u16(p) for p in a.public_positions)
    )


def _dec_attributes(r: _Reader) -> AttributeVector:
    q = r.u16()
    values = tuple(r.scalar() for _ in range(q))
    positions = tuple(r.u16() for _ in range(r.u16()))
    if list(positions) != sorted(set(positions)):
        raise FormatError("public positions must be increasing")
    try:
        return AttributeVector(values, positions)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _enc_packet(pkt) -> bytes:
    return b"".join(
        [
            _blob(pkt.petition_id),
            _blob(pkt.option.encode("utf-8")),
            _u16(pkt.key_position),
            encode_g1(pkt.zeta),
            _w_show(pkt.theta),
        ]
    )


def _dec_packet(r: _Reader):
    from .petition import SignaturePacket

    pid = r.blob()
    try:
        option = r.blob().decode("utf-8")
    except UnicodeDecodeError:
        raise FormatError("option is not UTF-8") from None
    key_position = r.u16()
    zeta = r.g1()
    return SignaturePacket(pid, option, key_position, zeta, _r_show(r, PetitionShowProof))


_DECODERS = {
    Kind.REQUEST: _dec_request,
    Kind.PARTIAL: _dec_partial,
    Kind.SHOW: _r_show,
    Kind.VK_SHARE: _dec_vk,
    Kind.PARAMS_DIGEST: lambda r: ParamsDigest(r.take(32)),
    Kind.CREDENTIAL: _r_credential,
    Kind.PARAMS: _dec_params,
    Kind.SK_SHARE: _dec_sk,
    Kind.AGG_VK: _dec_agg_vk,
    Kind.PARTIAL_SET: _dec_partial_set,
    Kind.ATTRIBUTES: _dec_attributes,
    Kind.PETITION_PACKET: _dec_packet,
}


def kind_of(obj) -> Kind:
    from .petition import SignaturePacket

    table = [
        (BlindSignRequest, Kind.REQUEST),
        (BlindedPartial, Kind.PARTIAL),
        (ShowMaterial, Kind.SHOW),
        (VerificationKeyShare, Kind.VK_SHARE),
        (ParamsDigest, Kind.PARAMS_DIGEST),
        (Credential, Kind.CREDENTIAL),
        (Params, Kind.PARAMS),
        (SecretKeyShare, Kind.SK_SHARE),
        (AggregatedVerificationKey, Kind.AGG_VK),
        (PartialSet, Kind.PARTIAL_SET),
        (AttributeVector, Kind.ATTRIBUTES),
        (SignaturePacket, Kind.PETITION_PACKET),
    ]
    for cls, kind in table:
        if isinstance(obj, cls):
            return kind
    raise TypeError(f"no wire encoding for {type(obj).__name__}")


def encode_payload(obj) -> bytes:
    kind = kind_of(obj)
    if kind is Kind.REQUEST:
        return _enc_request(obj)
    if kind is Kind.SHOW:
        return _w_show(obj)
    if kind is Kind.VK_SHARE:
        return _enc_vk(obj)
    if kind is Kind.PARAMS_DIGEST:
        if len(obj.value) != 32:
            raise ValueError("params digest must be 32 bytes")
        return obj.value
    if kind in (Kind.CREDENTIAL, Kind.PARTIAL):
        return obj.to_bytes()
    if kind is Kind.PARAMS:
        return _enc_params(obj)
    if kind is Kind.SK_SHARE:
        return _enc_sk(obj)
    if kind is Kind.AGG_VK:
        return _enc_agg_vk(obj)
    if kind is Kind.PARTIAL_SET:
        return _enc_partial_set(obj)
    if kind is Kind.ATTRIBUTES:
        return _enc_attributes(obj)
    return _enc_packet(obj)


def encode(obj) -> bytes:
    """Envelope-wrapped canonical encoding of ``obj``."""
    return Envelope(VERSION, kind_of(obj), encode_payload(obj)).to_bytes()


def decode(kind: Kind, data: bytes):
    """Decode an envelope that must carry ``kind``."""
    env = Envelope.parse(data)
    if env.kind != kind:
        raise KindError(f"expected {Kind(kind).name}, got {env.kind.name}")
    return _decode_payload(env)


def decode_any(data: bytes):
    return _decode_payload(Envelope.parse(data))


def _decode_payload(env: Envelope):
    r = _Reader(env.payload)
    obj = _DECODERS[env.kind](r)
    r.finish()
    return obj


# -- JSON transport -------------------------------------------------------------------


def to_json(obj, **extra) -> str:
    body = {"kind": kind_of(obj).name.lower(), "envelope": base64.b64encode(encode(obj)).decode("ascii")}
    body.update(extra)
    return json.dumps(body)


def envelope_from_json(text) -> bytes:
    body = json.loads(text) if isinstance(text, (str, bytes)) else text
    try:
        return base64.b64decode(body["envelope"], validate=True)
    except (KeyError, TypeError, ValueError):
        raise FormatError("JSON body lacks a base64 'envelope' field") from None


def from_json(kind: Kind, text):
    return decode(kind, envelope_from_json(text))
