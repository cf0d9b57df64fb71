"""Fiat-Shamir sigma proofs of knowledge of representation.

All three proofs used by the scheme are conjunctions of linear relations
``lhs = prod_i base_i^{w_i}`` in G1 or G2 over a shared witness vector, so
they are built on one small engine (:func:`_prove` / :func:`_verify`).
Responses have the form ``r_w = w_rand - c * w (mod p)``; the verifier
rebuilds each commitment as ``lhs^c * prod base_i^{r_i}`` and recomputes the
challenge.

Response order on the wire:

* issuance proof: ``d, o, m_1..m_q, k_1..k_q`` (private attributes only)
* show proof and petition proof: ``m_1..m_q, r`` (private attributes only)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable, Sequence

from .group import (
    ORDER,
    G1Point,
    Params,
    encode_g1,
    encode_g2,
    encode_scalar,
    g1_multiexp,
    g2_multiexp,
    hash_to_g1,
    hash_to_scalar,
    random_scalar,
)

TAG_PI_S = b"COCONUT-PI-S"
TAG_PI_V = b"COCONUT-PI-V"
TAG_PI_PET = b"COCONUT-PI-PET"


class ProofShapeError(ValueError):
    """Statement, witness or proof lengths do not fit together."""


@dataclass(frozen=True)
class SigmaProof:
    challenge: int
    responses: tuple

    def to_bytes(self) -> bytes:
        return encode_scalar(self.challenge) + b"".join(encode_scalar(r) for r in self.responses)


class IssuanceProof(SigmaProof):
    pass


class ShowProof(SigmaProof):
    pass


class PetitionShowProof(SigmaProof):
    pass


# -- predicates ----------------------------------------------------------------

_PREDICATE_CHECKS: dict[str, Callable[["Predicate", Sequence[int]], bool]] = {
    "true": lambda pred, public_positions: True,
    "reveal": lambda pred, public_positions: set(pred.positions) <= set(public_positions),
}


def register_predicate(name: str, check: Callable[["Predicate", Sequence[int]], bool]) -> None:
    """Add an application predicate; ``check`` sees the revealed positions."""
    _PREDICATE_CHECKS[name] = check


@dataclass(frozen=True)
class Predicate:
    """Application predicate slot carried by requests and shows.

    Its descriptor is hashed into every challenge, so a proof made for one
    predicate never verifies under another.
    """

    name: str = "true"
    positions: tuple = ()

    def __post_init__(self):
        if self.name not in _PREDICATE_CHECKS:
            raise ValueError(f"unknown predicate {self.name!r}")
        object.__setattr__(self, "positions", tuple(sorted(set(self.positions))))

    def descriptor(self) -> bytes:
        name = self.name.encode()
        return (
            struct.pack(">H", len(name))
            + name
            + struct.pack(">H", len(self.positions))
            + b"".join(struct.pack(">H", p) for p in self.positions)
        )

    def holds(self, public_attrs) -> bool:
        return _PREDICATE_CHECKS[self.name](self, [pos for pos, _ in public_attrs])


TRUE = Predicate()


def reveal(*positions: int) -> Predicate:
    """Predicate: each listed attribute position is publicly disclosed."""
    return Predicate("reveal", tuple(positions))


# -- engine ----------------------------------------------------------------------


def _enc(point) -> bytes:
    return encode_g1(point) if isinstance(point, G1Point) else encode_g2(point)


def _multiexp(points, scalars):
    if isinstance(points[0], G1Point):
        return g1_multiexp(points, scalars)
    return g2_multiexp(points, scalars)


def _challenge(tag: bytes, header: bytes, equations, commitments) -> int:
    parts = [header]
    for (lhs, terms), t in zip(equations, commitments):
        parts.append(_enc(lhs))
        parts.extend(_enc(base) for base, _ in terms)
        parts.append(_enc(t))
    return hash_to_scalar(tag, b"".join(parts))


def _prove(tag, header, equations, witnesses) -> tuple[int, tuple]:
    blinders = [random_scalar() for _ in witnesses]
    commitments = [
        _multiexp([base for base, _ in terms], [blinders[i] for _, i in terms])
        for _, terms in equations
    ]
    c = _challenge(tag, header, equations, commitments)
    responses = tuple((blinders[i] - c * w) % ORDER for i, w in enumerate(witnesses))
    return c, responses


def _verify(tag, header, equations, proof: SigmaProof, n_witnesses: int) -> bool:
    if len(proof.responses) != n_witnesses:
        return False
    if not 0 <= proof.challenge < ORDER or not all(0 <= r < ORDER for r in proof.responses):
        return False
    c = proof.challenge
    commitments = [
        _multiexp(
            [lhs] + [base for base, _ in terms],
            [c] + [proof.responses[i] for _, i in terms],
        )
        for lhs, terms in equations
    ]
    return _challenge(tag, header, equations, commitments) == c


def _encode_public(public_attrs) -> bytes:
    return struct.pack(">H", len(public_attrs)) + b"".join(
        struct.pack(">H", pos) + encode_scalar(m) for pos, m in public_attrs
    )


def private_positions(q: int, public_attrs) -> list[int]:
    public = {pos for pos, _ in public_attrs}
    return [j for j in range(1, q + 1) if j not in public]


def _check_public(q: int, public_attrs):
    positions = [pos for pos, _ in public_attrs]
    if len(set(positions)) != len(positions) or any(not 1 <= p <= q for p in positions):
        raise ProofShapeError("public attribute positions must be distinct and within 1..q")


# -- issuance proof --------------------------------------------------------------


def _issuance_statement(params, gamma, c_m, h, ciphertexts, public_attrs, predicate):
    _check_public(params.q, public_attrs)
    priv = private_positions(params.q, public_attrs)
    if len(ciphertexts) != len(priv):
        raise ProofShapeError(
            f"{len(ciphertexts)} ciphertexts for {len(priv)} private attributes"
        )
    n = len(priv)
    # witness layout: d, o, m_1..m_n, k_1..k_n
    i_d, i_o = 0, 1

    def i_m(j):
        return 2 + j

    def i_k(j):
        return 2 + n + j

    public_part = g1_multiexp([params.hs[pos - 1] for pos, _ in public_attrs], [m for _, m in public_attrs])
    equations = [
        (gamma, [(params.g1, i_d)]),
        (c_m - public_part, [(params.g1, i_o)] + [(params.hs[pos - 1], i_m(j)) for j, pos in enumerate(priv)]),
    ]
    for j, ct in enumerate(ciphertexts):
        equations.append((ct.a, [(params.g1, i_k(j))]))
        equations.append((ct.b, [(gamma, i_k(j)), (h, i_m(j))]))
    header = b"".join(
        [
            params.digest,
            encode_g1(gamma),
            encode_g1(c_m),
            encode_g1(h),
            struct.pack(">H", len(ciphertexts)),
            *(ct.to_bytes() for ct in ciphertexts),
            _encode_public(public_attrs),
            predicate.descriptor(),
        ]
    )
    return header, equations, 2 * n + 2


def prove_issuance(
    params: Params,
    gamma,
    c_m,
    h,
    ciphertexts,
    public_attrs,
    *,
    d: int,
    o: int,
    private_values,
    ks,
    predicate: Predicate = TRUE,
) -> IssuanceProof:
    """Prove knowledge of ``d``, ``o``, private attributes and ElGamal randomness.

    ``private_values`` and ``ks`` follow the increasing order of the private
    positions (positions not listed in ``public_attrs``).
    """
    public_attrs = tuple(public_attrs)
    header, equations, n_w = _issuance_statement(params, gamma, c_m, h, ciphertexts, public_attrs, predicate)
    private_values, ks = list(private_values), list(ks)
    if len(private_values) != len(ciphertexts) or len(ks) != len(ciphertexts):
        raise ProofShapeError("witness length does not match the statement")
    c, responses = _prove(TAG_PI_S, header, equations, [d, o, *private_values, *ks])
    return IssuanceProof(c, responses)


def verify_issuance(params: Params, gamma, c_m, h, ciphertexts, public_attrs, proof, predicate: Predicate = TRUE) -> bool:
    """Verify an issuance proof; ``h`` must be the hash of ``c_m``."""
    public_attrs = tuple(public_attrs)
    if encode_g1(h) != encode_g1(hash_to_g1(c_m)):
        return False
    if not predicate.holds(public_attrs):
        return False
    return _verify_issuance_core(params, gamma, c_m, h, ciphertexts, public_attrs, proof, predicate)


def _verify_issuance_core(params, gamma, c_m, h, ciphertexts, public_attrs, proof, predicate) -> bool:
    # caller has already recomputed h from c_m
    header, equations, n_w = _issuance_statement(params, gamma, c_m, h, tuple(ciphertexts), tuple(public_attrs), predicate)
    return _verify(TAG_PI_S, header, equations, proof, n_w)


# -- show proof ------------------------------------------------------------------


def _show_statement(params, vk, kappa, nu, h_prime, public_attrs, predicate, extra=b""):
    _check_public(params.q, public_attrs)
    if len(vk.beta) != params.q:
        raise ProofShapeError("verification key does not match params.q")
    priv = private_positions(params.q, public_attrs)
    n = len(priv)
    i_r = n
    equations = [
        (kappa - vk.alpha, [(vk.beta[pos - 1], j) for j, pos in enumerate(priv)] + [(params.g2, i_r)]),
        (nu, [(h_prime, i_r)]),
    ]
    header = b"".join(
        [
            params.digest,
            vk.digest,
            encode_g2(kappa),
            encode_g1(nu),
            encode_g1(h_prime),
            _encode_public(public_attrs),
            predicate.descriptor(),
            extra,
        ]
    )
    return header, equations, n + 1, priv


def prove_show(params, vk, kappa, nu, h_prime, public_attrs, *, private_values, r: int, predicate: Predicate = TRUE, extra: bytes = b"") -> ShowProof:
    """Prove ``kappa = alpha * prod_priv beta_j^{m_j} * g2^r`` and ``nu = h'^r``.

    ``extra`` is bound into the challenge verbatim (the show binds the
    re-randomized credential through it).
    """
    public_attrs = tuple(public_attrs)
    header, equations, n_w, _ = _show_statement(params, vk, kappa, nu, h_prime, public_attrs, predicate, extra)
    private_values = list(private_values)
    if len(private_values) != n_w - 1:
        raise ProofShapeError("witness length does not match the statement")
    c, responses = _prove(TAG_PI_V, header, equations, [*private_values, r])
    return ShowProof(c, responses)


def verify_show(params, vk, kappa, nu, h_prime, public_attrs, proof, predicate: Predicate = TRUE, extra: bytes = b"") -> bool:
    public_attrs = tuple(public_attrs)
    if not predicate.holds(public_attrs):
        return False
    header, equations, n_w, _ = _show_statement(params, vk, kappa, nu, h_prime, public_attrs, predicate, extra)
    return _verify(TAG_PI_V, header, equations, proof, n_w)


# -- petition proof --------------------------------------------------------------


def _petition_statement(params, vk, kappa, nu, h_prime, public_attrs, predicate, g_s, zeta, key_position, extra):
    header, equations, n_w, priv = _show_statement(params, vk, kappa, nu, h_prime, public_attrs, predicate, extra)
    if key_position not in priv:
        raise ProofShapeError("the key attribute must be private")
    equations = equations + [(zeta, [(g_s, priv.index(key_position))])]
    header += encode_g1(g_s) + encode_g1(zeta) + struct.pack(">H", key_position)
    return header, equations, n_w


def prove_petition_show(params, vk, kappa, nu, h_prime, public_attrs, g_s, zeta, *, key_position: int, private_values, r: int, predicate: Predicate = TRUE, extra: bytes = b"") -> PetitionShowProof:
    """Show proof extended with ``zeta = g_s^k`` for the private attribute at ``key_position``.

    The response for ``k`` is shared between the credential relation and the
    ``zeta`` relation, proving both use the same scalar.
    """
    public_attrs = tuple(public_attrs)
    header, equations, n_w = _petition_statement(
        params, vk, kappa, nu, h_prime, public_attrs, predicate, g_s, zeta, key_position, extra
    )
    private_values = list(private_values)
    if len(private_values) != n_w - 1:
        raise ProofShapeError("witness length does not match the statement")
    c, responses = _prove(TAG_PI_PET, header, equations, [*private_values, r])
    return PetitionShowProof(c, responses)


def verify_petition_show(params, vk, kappa, nu, h_prime, public_attrs, g_s, zeta, proof, *, key_position: int, predicate: Predicate = TRUE, extra: bytes = b"") -> bool:
    public_attrs = tuple(public_attrs)
    if not predicate.holds(public_attrs):
        return False
    try:
        header, equations, n_w = _petition_statement(
            params, vk, kappa, nu, h_prime, public_attrs, predicate, g_s, zeta, key_position, extra
        )
    except ProofShapeError:
        return False
    return _verify(TAG_PI_PET, header, equations, proof, n_w)
