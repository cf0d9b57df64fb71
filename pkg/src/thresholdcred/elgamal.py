"""Pedersen commitments over attribute vectors and exponent ElGamal in G1."""

from __future__ import annotations

from dataclasses import dataclass

from .group import (
    G1Point,
    Params,
    encode_g1,
    g1_mul,
    g1_multiexp,
    is_identity,
    random_scalar,
)


@dataclass(frozen=True)
class ElGamalKeyPair:
    d: int
    gamma: G1Point


@dataclass(frozen=True)
class ElGamalCiphertext:
    a: G1Point
    b: G1Point

    def to_bytes(self) -> bytes:
        return encode_g1(self.a) + encode_g1(self.b)

    def __eq__(self, other):
        return isinstance(other, ElGamalCiphertext) and self.to_bytes() == other.to_bytes()

    def __hash__(self):
        return hash(self.to_bytes())


def commit(params: Params, attributes, o: int) -> G1Point:
    """``g1^o * prod_j h_j^{m_j}`` over all ``q`` attributes."""
    attributes = list(attributes)
    if len(attributes) != params.q:
        raise ValueError(f"expected {params.q} attributes, got {len(attributes)}")
    return g1_multiexp([params.g1, *params.hs], [o, *attributes])


def elgamal_keygen(params: Params) -> ElGamalKeyPair:
    d = random_scalar()
    return ElGamalKeyPair(d, g1_mul(params.g1, d))


def elgamal_encrypt(params: Params, gamma: G1Point, h: G1Point, m: int, k: int | None = None):
    """Encrypt ``h^m`` under ``gamma``.

    Returns the ciphertext and the randomness ``k``, which the issuance proof
    needs as a witness.
    """
    if is_identity(h):
        raise ValueError("h must not be the identity")
    if k is None:
        k = random_scalar()
    a = g1_mul(params.g1, k)
    b = g1_multiexp([gamma, h], [k, m])
    return ElGamalCiphertext(a, b), k


def elgamal_decrypt(d: int, c: ElGamalCiphertext) -> G1Point:
    return c.b - g1_mul(c.a, d)
