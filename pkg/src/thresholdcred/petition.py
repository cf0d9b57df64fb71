"""Unlinkable petitions with double-sign prevention.

A petition is identified by a byte string; its generator ``g_s`` is the
hash of that id into G1.  A citizen holding a credential with a private
key attribute ``k`` signs by publishing ``zeta = g_s^k`` together with a
show proof tying ``zeta`` to the credential's ``k``.  ``zeta`` is the same
every time the same citizen signs the same petition, so the petition keeps
a spent set of ``zeta`` values and refuses repeats.

State is persisted as an append-only file of checksummed records::

    magic "TCPETIT1"
    record*  := u32 length || body || u32 crc32(body)
    body     := 0x01 definition | 0x02 signature packet envelope
"""

from __future__ import annotations

import logging
import os
import struct
import threading
import zlib
from collections import Counter
from dataclasses import dataclass, field

from . import nizk, wire
from .group import G1Point, Params, encode_g1, g1_mul, hash_bytes_to_g1, random_scalar
from .scheme import (
    AggregatedVerificationKey,
    AttributeVector,
    Credential,
    ShowMaterial,
    _kappa_private,
    _pairing_check,
    randomize,
)

log = logging.getLogger(__name__)

TAG_PETITION = b"COCONUT-PETITION-GS"
MAGIC = b"TCPETIT1"
_DEFINITION, _SIGNATURE = 1, 2

PROOF_INVALID = "proof-invalid"
DOUBLE_SIGN = "double-sign"


class PetitionStateError(Exception):
    pass


def petition_generator(petition_id: bytes) -> G1Point:
    return hash_bytes_to_g1(TAG_PETITION, petition_id)


@dataclass(frozen=True, eq=False)
class SignaturePacket:
    petition_id: bytes
    option: str
    key_position: int
    zeta: G1Point
    theta: ShowMaterial


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: str | None = None

    def __bool__(self):
        return self.accepted


def _binding(petition_id: bytes, option: str, s_prime: G1Point) -> bytes:
    opt = option.encode("utf-8")
    return encode_g1(s_prime) + struct.pack(">H", len(petition_id)) + petition_id + struct.pack(">H", len(opt)) + opt


@dataclass(eq=False)
class Petition:
    params: Params
    petition_id: bytes
    vk: AggregatedVerificationKey
    options: tuple
    path: str | None = None
    spent: set = field(default_factory=set, repr=False)
    records: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self._lock = threading.Lock()
        self.g_s = petition_generator(self.petition_id)

    # -- verification --------------------------------------------------------------

    def check(self, packet: SignaturePacket) -> bool:
        """Verify a packet's proofs without touching the spent set."""
        theta = packet.theta
        sigma = theta.sigma_prime
        if packet.petition_id != self.petition_id or packet.option not in self.options:
            return False
        try:
            ok = nizk.verify_petition_show(
                self.params, self.vk, theta.kappa, theta.nu, sigma.h, theta.public_attrs,
                self.g_s, packet.zeta, theta.pi_v,
                key_position=packet.key_position, predicate=theta.predicate,
                extra=_binding(self.petition_id, packet.option, sigma.s),
            )
        except nizk.ProofShapeError:
            return False
        return ok and _pairing_check(self.params, self.vk, sigma.h, sigma.s, theta.nu, theta.kappa, theta.public_attrs)

    def verify_and_record(self, packet: SignaturePacket) -> Verdict:
        if not self.check(packet):
            return Verdict(False, PROOF_INVALID)
        key = encode_g1(packet.zeta)
        with self._lock:
            if key in self.spent:
                return Verdict(False, DOUBLE_SIGN)
            if self.path is not None:
                _append(self.path, bytes([_SIGNATURE]) + wire.encode(packet))
            self.spent.add(key)
            self.records.append((key, packet))
        return Verdict(True)

    def tally(self) -> dict:
        with self._lock:
            counts = Counter(packet.option for _, packet in self.records)
        return {option: counts.get(option, 0) for option in self.options}

    # -- persistence -------------------------------------------------------------------

    def _definition(self) -> bytes:
        opts = [o.encode("utf-8") for o in self.options]
        return b"".join(
            [
                bytes([_DEFINITION]),
                self.params.digest,
                struct.pack(">H", len(self.petition_id)),
                self.petition_id,
                _blob32(wire.encode(self.vk)),
                struct.pack(">H", len(opts)),
                *(struct.pack(">H", len(o)) + o for o in opts),
            ]
        )

    def save(self, path: str) -> None:
        """Write the full state to ``path`` atomically and keep appending there."""
        with self._lock:
            tmp = path + ".tmp"
            with open(tmp, "wb") as f:
                f.write(MAGIC)
                f.write(_frame(self._definition()))
                for _, packet in self.records:
                    f.write(_frame(bytes([_SIGNATURE]) + wire.encode(packet)))
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, path)
            self.path = path

    @classmethod
    def load(cls, path: str, params: Params, verify: bool = False) -> "Petition":
        """Replay a state file.

        A torn final record (interrupted append) is dropped; corruption
        anywhere else raises :class:`PetitionStateError`.  With ``verify``
        every stored packet is re-checked.
        """
        with open(path, "rb") as f:
            data = f.read()
        if not data.startswith(MAGIC):
            raise PetitionStateError("not a petition state file")
        bodies = _read_records(data, len(MAGIC), path)
        if not bodies or bodies[0][0] != _DEFINITION:
            raise PetitionStateError("state file lacks a petition definition")
        petition = cls._from_definition(bodies[0][1:], params, path)
        for body in bodies[1:]:
            if body[0] != _SIGNATURE:
                raise PetitionStateError(f"unknown record type {body[0]}")
            packet = wire.decode(wire.Kind.PETITION_PACKET, body[1:])
            key = encode_g1(packet.zeta)
            if key in petition.spent or (verify and not petition.check(packet)):
                raise PetitionStateError("state file holds an invalid or duplicate record")
            petition.spent.add(key)
            petition.records.append((key, packet))
        return petition

    @classmethod
    def _from_definition(cls, body: bytes, params: Params, path: str) -> "Petition":
        r = wire._Reader(body)
        if r.take(32) != params.digest:
            raise PetitionStateError("petition was created under different params")
        pid = r.take(r.u16())
        vk = wire.decode(wire.Kind.AGG_VK, r.take(struct.unpack(">I", r.take(4))[0]))
        options = tuple(r.blob().decode("utf-8") for _ in range(r.u16()))
        r.finish()
        return cls(params, pid, vk, options, path=path)


def _blob32(b: bytes) -> bytes:
    return struct.pack(">I", len(b)) + b


def _frame(body: bytes) -> bytes:
    return struct.pack(">I", len(body)) + body + struct.pack(">I", zlib.crc32(body))


def _append(path: str, body: bytes) -> None:
    with open(path, "ab") as f:
        f.write(_frame(body))
        f.flush()
        os.fsync(f.fileno())


def _read_records(data: bytes, pos: int, path: str) -> list:
    bodies = []
    while pos < len(data):
        if pos + 4 > len(data):
            log.warning("dropping torn trailing record in %s", path)
            break
        (n,) = struct.unpack(">I", data[pos : pos + 4])
        end = pos + 4 + n + 4
        if end > len(data):
            log.warning("dropping torn trailing record in %s", path)
            break
        body = data[pos + 4 : pos + 4 + n]
        if struct.unpack(">I", data[end - 4 : end])[0] != zlib.crc32(body):
            if end == len(data):
                log.warning("dropping torn trailing record in %s", path)
                break
            raise PetitionStateError(f"corrupt record at offset {pos}")
        if not body:
            raise PetitionStateError(f"empty record at offset {pos}")
        bodies.append(body)
        pos = end
    return bodies


def petition_init(params: Params, petition_id: bytes, vk: AggregatedVerificationKey, options, path: str | None = None) -> Petition:
    """Create a petition; with ``path`` its state is persisted there."""
    options = tuple(options)
    if not options:
        raise ValueError("a petition needs at least one option")
    if len(set(options)) != len(options):
        raise ValueError("petition options must be distinct")
    if isinstance(petition_id, str):
        petition_id = petition_id.encode("utf-8")
    petition = Petition(params, bytes(petition_id), vk, options)
    if path is not None:
        with open(path, "wb") as f:
            f.write(MAGIC)
            f.write(_frame(petition._definition()))
            f.flush()
            os.fsync(f.fileno())
        petition.path = path
    return petition


def petition_sign(
    params: Params,
    petition: Petition,
    cred: Credential,
    attrs: AttributeVector,
    option: str,
    key_position: int = 1,
) -> SignaturePacket:
    """Sign ``petition`` for ``option`` with the private attribute at ``key_position`` as ``k``."""
    if key_position not in attrs.private_positions:
        raise ValueError("the key attribute must be private")
    vk = petition.vk
    k = attrs.values[key_position - 1]
    zeta = g1_mul(petition.g_s, k)
    sigma = randomize(cred)
    r = random_scalar()
    kappa = _kappa_private(params, vk, attrs, r)
    nu = g1_mul(sigma.h, r)
    predicate = attrs.default_predicate()
    proof = nizk.prove_petition_show(
        params, vk, kappa, nu, sigma.h, attrs.public, petition.g_s, zeta,
        key_position=key_position, private_values=attrs.private_values, r=r,
        predicate=predicate, extra=_binding(petition.petition_id, option, sigma.s),
    )
    theta = ShowMaterial(kappa, nu, sigma, proof, attrs.public, predicate)
    return SignaturePacket(petition.petition_id, option, key_position, zeta, theta)


def petition_verify_and_record(petition: Petition, packet: SignaturePacket) -> Verdict:
    return petition.verify_and_record(packet)
