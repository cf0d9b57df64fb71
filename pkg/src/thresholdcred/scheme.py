"""Threshold-issued, re-randomizable credentials with blind issuance.

Lifecycle::

    params = setup(128, q)
    sks, vks = ttp_keygen(params, t, n)
    vk = aggregate_keys(vks[:t])

    d, request = prepare_blind_sign(params, attrs)
    partials = [(sk.index, unblind(blind_sign(params, sk, request), d)) for sk in sks[:t]]
    cred = aggregate_credentials(partials)

    theta = prove_cred(params, vk, cred, attrs)
    assert verify_cred(params, vk, theta)
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from functools import cached_property

from . import nizk
from .elgamal import ElGamalCiphertext, commit, elgamal_decrypt, elgamal_encrypt, elgamal_keygen
from .group import (
    ORDER,
    G1Point,
    G2Point,
    Params,
    encode_g1,
    encode_g2,
    g1_mul,
    g1_multiexp,
    g2_mul,
    g2_multiexp,
    hash_to_g1,
    is_identity,
    pairing_product_is_one,
    random_scalar,
)
from .nizk import TRUE, IssuanceProof, Predicate, ShowProof, reveal

__all__ = [
    "SecretKeyShare",
    "VerificationKeyShare",
    "AggregatedVerificationKey",
    "MasterKey",
    "AttributeVector",
    "BlindSignRequest",
    "BlindedPartial",
    "Credential",
    "ShowMaterial",
    "IssuanceRejected",
    "ttp_keygen",
    "dealer_keygen",
    "lagrange_coefficients",
    "prepare_blind_sign",
    "blind_sign",
    "unblind",
    "aggregate_keys",
    "aggregate_credentials",
    "randomize",
    "prove_cred",
    "verify_cred",
    "verify_signature",
    "verify_partial",
    "issue_credential",
]


class IssuanceRejected(Exception):
    """An authority refused to sign; ``reason`` is machine readable."""

    def __init__(self, reason: str, message: str = ""):
        super().__init__(message or reason)
        self.reason = reason


# -- keys ----------------------------------------------------------------------


@dataclass(frozen=True)
class SecretKeyShare:
    index: int
    x: int
    y: tuple

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("authority index must be >= 1")

    def verification_key(self, params: Params) -> "VerificationKeyShare":
        return VerificationKeyShare(
            self.index, g2_mul(params.g2, self.x), tuple(g2_mul(params.g2, yj) for yj in self.y)
        )


@dataclass(frozen=True, eq=False)
class VerificationKeyShare:
    index: int
    alpha: G2Point
    beta: tuple

    def to_bytes(self) -> bytes:
        return struct.pack(">H", self.index) + encode_g2(self.alpha) + b"".join(encode_g2(b) for b in self.beta)

    def __eq__(self, other):
        return isinstance(other, VerificationKeyShare) and self.to_bytes() == other.to_bytes()

    def __hash__(self):
        return hash(self.to_bytes())


@dataclass(frozen=True, eq=False)
class AggregatedVerificationKey:
    alpha: G2Point
    beta: tuple
    indices: tuple = ()

    @cached_property
    def digest(self) -> bytes:
        # the key itself, not the share set it was built from
        h = hashlib.sha256(b"COCONUT-VK")
        h.update(encode_g2(self.alpha))
        for b in self.beta:
            h.update(encode_g2(b))
        return h.digest()

    def __eq__(self, other):
        return isinstance(other, AggregatedVerificationKey) and self.digest == other.digest

    def __hash__(self):
        return hash(self.digest)


@dataclass(frozen=True)
class MasterKey:
    """Dealer-side master secret ``(v(0), w_1(0)..w_q(0))``.

    Only :func:`dealer_keygen` hands this out; it exists so tests can compute
    ground-truth signatures.
    """

    x: int
    y: tuple

    def sign(self, h: G1Point, values) -> "Credential":
        """Direct signature ``(h, h^{x + sum y_j m_j})`` on a chosen ``h``."""
        values = list(values)
        if len(values) != len(self.y):
            raise ValueError("attribute count does not match the key")
        e = (self.x + sum(yj * m for yj, m in zip(self.y, values))) % ORDER
        return Credential(h, g1_mul(h, e))

    def verification_key(self, params: Params) -> AggregatedVerificationKey:
        return AggregatedVerificationKey(
            g2_mul(params.g2, self.x), tuple(g2_mul(params.g2, yj) for yj in self.y)
        )


def _poly_eval(coeffs, x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % ORDER
    return acc


def _deal(params: Params, t: int, n: int):
    if not 1 <= t <= n:
        raise ValueError(f"need 1 <= t <= n, got t={t}, n={n}")
    polys = [[random_scalar() for _ in range(t)] for _ in range(params.q + 1)]
    sks = [
        SecretKeyShare(i, _poly_eval(polys[0], i), tuple(_poly_eval(w, i) for w in polys[1:]))
        for i in range(1, n + 1)
    ]
    vks = [sk.verification_key(params) for sk in sks]
    master = MasterKey(polys[0][0], tuple(w[0] for w in polys[1:]))
    for p in polys:
        p.clear()
    return sks, vks, master


def ttp_keygen(params: Params, t: int, n: int):
    """Trusted-dealer ``t``-of-``n`` key generation.

    Returns ``(secret_shares, verification_shares)`` for authorities ``1..n``.
    The master secret is discarded.
    """
    sks, vks, master = _deal(params, t, n)
    del master
    return sks, vks


def dealer_keygen(params: Params, t: int, n: int):
    """Like :func:`ttp_keygen` but also returns the :class:`MasterKey`. Test use only."""
    return _deal(params, t, n)


def lagrange_coefficients(indices) -> list[int]:
    """Lagrange basis values at 0 for the given authority indices."""
    indices = [int(i) for i in indices]
    if len(set(indices)) != len(indices):
        raise ValueError("duplicate authority index")
    if any(i <= 0 for i in indices):
        raise ValueError("authority indices must be positive")
    coeffs = []
    for i in indices:
        num, den = 1, 1
        for j in indices:
            if j != i:
                num = num * (-j) % ORDER
                den = den * (i - j) % ORDER
        coeffs.append(num * pow(den, -1, ORDER) % ORDER)
    return coeffs


def aggregate_keys(shares) -> AggregatedVerificationKey:
    shares = list(shares)
    if not shares:
        raise ValueError("no verification key shares")
    q = len(shares[0].beta)
    if any(len(s.beta) != q for s in shares):
        raise ValueError("verification key shares disagree on q")
    indices = [s.index for s in shares]
    ls = lagrange_coefficients(indices)
    alpha = g2_multiexp([s.alpha for s in shares], ls)
    beta = tuple(g2_multiexp([s.beta[j] for s in shares], ls) for j in range(q))
    return AggregatedVerificationKey(alpha, beta, tuple(indices))


# -- attributes & messages -----------------------------------------------------------


@dataclass(frozen=True)
class AttributeVector:
    """The ``q`` attribute scalars plus which 1-based positions are public.

    Credentials meant for nullifier-style applications should carry at least
    one uniformly random private attribute (see :meth:`with_random_key`).
    """

    values: tuple
    public_positions: tuple = ()

    def __post_init__(self):
        values = tuple(int(m) % ORDER for m in self.values)
        pub = tuple(sorted(set(self.public_positions)))
        if not values:
            raise ValueError("at least one attribute is required")
        if any(not 1 <= p <= len(values) for p in pub):
            raise ValueError("public position out of range")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "public_positions", pub)

    @classmethod
    def with_random_key(cls, values=(), public_positions=()) -> "AttributeVector":
        """Prepend a random private key attribute at position 1."""
        return cls((random_scalar(), *values), tuple(p + 1 for p in public_positions))

    @property
    def q(self) -> int:
        return len(self.values)

    @property
    def private_positions(self) -> tuple:
        return tuple(j for j in range(1, self.q + 1) if j not in self.public_positions)

    @property
    def public(self) -> tuple:
        return tuple((p, self.values[p - 1]) for p in self.public_positions)

    @property
    def private(self) -> tuple:
        return tuple((p, self.values[p - 1]) for p in self.private_positions)

    @property
    def private_values(self) -> tuple:
        return tuple(m for _, m in self.private)

    def reveal(self, *positions: int) -> "AttributeVector":
        """Same values, with exactly ``positions`` public."""
        return AttributeVector(self.values, positions)

    def default_predicate(self) -> Predicate:
        return reveal(*self.public_positions) if self.public_positions else TRUE


@dataclass(frozen=True, eq=False)
class Credential:
    """Partial or consolidated credential: two G1 elements ``(h, s)``."""

    h: G1Point
    s: G1Point

    def to_bytes(self) -> bytes:
        return encode_g1(self.h) + encode_g1(self.s)

    def __eq__(self, other):
        return isinstance(other, Credential) and self.to_bytes() == other.to_bytes()

    def __hash__(self):
        return hash(self.to_bytes())


@dataclass(frozen=True, eq=False)
class BlindSignRequest:
    gamma: G1Point
    c_m: G1Point
    ciphertexts: tuple
    pi_s: IssuanceProof
    public_attrs: tuple = ()
    predicate: Predicate = TRUE

    @cached_property
    def h(self) -> G1Point:
        return hash_to_g1(self.c_m)


@dataclass(frozen=True, eq=False)
class BlindedPartial:
    """One authority's answer ``(h, c~)``, still encrypted under the user's key."""

    h: G1Point
    a: G1Point
    b: G1Point

    def to_bytes(self) -> bytes:
        return encode_g1(self.h) + encode_g1(self.a) + encode_g1(self.b)

    def __eq__(self, other):
        return isinstance(other, BlindedPartial) and self.to_bytes() == other.to_bytes()

    def __hash__(self):
        return hash(self.to_bytes())


@dataclass(frozen=True, eq=False)
class ShowMaterial:
    kappa: G2Point
    nu: G1Point
    sigma_prime: Credential
    pi_v: ShowProof
    public_attrs: tuple = ()
    predicate: Predicate = TRUE


# -- issuance ------------------------------------------------------------------


def prepare_blind_sign(params: Params, attrs: AttributeVector, predicate: Predicate | None = None):
    """Build a blind signature request.

    Returns ``(d, request)``; ``d`` is the ElGamal decryption key the user
    keeps to unblind the authorities' answers.
    """
    if attrs.q != params.q:
        raise ValueError(f"params support {params.q} attributes, got {attrs.q}")
    if predicate is None:
        predicate = attrs.default_predicate()
    if not predicate.holds(attrs.public):
        raise ValueError("attributes do not satisfy the predicate")
    keypair = elgamal_keygen(params)
    o = random_scalar()
    c_m = commit(params, attrs.values, o)
    h = hash_to_g1(c_m)
    ciphertexts, ks = [], []
    for m in attrs.private_values:
        ct, k = elgamal_encrypt(params, keypair.gamma, h, m)
        ciphertexts.append(ct)
        ks.append(k)
    proof = nizk.prove_issuance(
        params,
        keypair.gamma,
        c_m,
        h,
        ciphertexts,
        attrs.public,
        d=keypair.d,
        o=o,
        private_values=attrs.private_values,
        ks=ks,
        predicate=predicate,
    )
    request = BlindSignRequest(keypair.gamma, c_m, tuple(ciphertexts), proof, attrs.public, predicate)
    request.__dict__["h"] = h
    return keypair.d, request


def blind_sign(params: Params, sk: SecretKeyShare, request: BlindSignRequest, predicate: Predicate | None = None) -> BlindedPartial:
    """Sign a request without learning its private attributes.

    Raises :class:`IssuanceRejected` (reason ``"proof-invalid"``,
    ``"predicate-mismatch"`` or ``"malformed-request"``) instead of signing.
    """
    if predicate is not None and predicate != request.predicate:
        raise IssuanceRejected("predicate-mismatch", "request made for a different predicate")
    if len(sk.y) != params.q:
        raise ValueError("secret key share does not match params.q")
    h = hash_to_g1(request.c_m)
    try:
        ok = request.predicate.holds(request.public_attrs) and nizk._verify_issuance_core(
            params, request.gamma, request.c_m, h, request.ciphertexts,
            request.public_attrs, request.pi_s, request.predicate,
        )
    except nizk.ProofShapeError as exc:
        raise IssuanceRejected("malformed-request", str(exc)) from None
    if not ok:
        raise IssuanceRejected("proof-invalid", "issuance proof does not verify")
    priv = nizk.private_positions(params.q, request.public_attrs)
    y_priv = [sk.y[pos - 1] for pos in priv]
    e_h = (sk.x + sum(sk.y[pos - 1] * m for pos, m in request.public_attrs)) % ORDER
    a = g1_multiexp([ct.a for ct in request.ciphertexts], y_priv)
    b = g1_multiexp([h, *(ct.b for ct in request.ciphertexts)], [e_h, *y_priv])
    return BlindedPartial(h, a, b)


def unblind(partial: BlindedPartial, d: int) -> Credential:
    return Credential(partial.h, elgamal_decrypt(d, ElGamalCiphertext(partial.a, partial.b)))


def aggregate_credentials(partials) -> Credential:
    """Combine ``(index, partial credential)`` pairs by Lagrange interpolation in the exponent."""
    partials = list(partials)
    if not partials:
        raise ValueError("no partial credentials")
    h_bytes = encode_g1(partials[0][1].h)
    if any(encode_g1(c.h) != h_bytes for _, c in partials):
        raise ValueError("partial credentials disagree on h")
    ls = lagrange_coefficients([i for i, _ in partials])
    return Credential(partials[0][1].h, g1_multiexp([c.s for _, c in partials], ls))


def issue_credential(params: Params, sks, attrs: AttributeVector, predicate: Predicate | None = None) -> Credential:
    """Run the whole blind issuance against in-process authorities ``sks``."""
    d, request = prepare_blind_sign(params, attrs, predicate)
    partials = [(sk.index, unblind(blind_sign(params, sk, request), d)) for sk in sks]
    return aggregate_credentials(partials)


# -- showing -------------------------------------------------------------------------


def randomize(cred: Credential, r: int | None = None) -> Credential:
    if r is None:
        r = random_scalar()
    return Credential(g1_mul(cred.h, r), g1_mul(cred.s, r))


def _kappa_private(params, vk, attrs, r):
    priv = attrs.private
    return g2_multiexp(
        [vk.alpha, params.g2, *(vk.beta[p - 1] for p, _ in priv)],
        [1, r, *(m for _, m in priv)],
    )


def prove_cred(params: Params, vk: AggregatedVerificationKey, cred: Credential, attrs: AttributeVector, predicate: Predicate | None = None) -> ShowMaterial:
    """Produce an unlinkable show of ``cred``.

    The credential is always re-randomized first.  ``kappa`` covers only the
    private attributes; public ones travel in clear and are folded in by the
    verifier.
    """
    return _prove_cred_with(params, vk, cred, attrs, predicate, random_scalar(), random_scalar())


def _prove_cred_with(params, vk, cred, attrs, predicate, r_prime: int, r: int) -> ShowMaterial:
    if attrs.q != params.q:
        raise ValueError(f"params support {params.q} attributes, got {attrs.q}")
    if predicate is None:
        predicate = attrs.default_predicate()
    sigma = randomize(cred, r_prime)
    kappa = _kappa_private(params, vk, attrs, r)
    nu = g1_mul(sigma.h, r)
    pi_v = nizk.prove_show(
        params, vk, kappa, nu, sigma.h, attrs.public,
        private_values=attrs.private_values, r=r, predicate=predicate,
        extra=encode_g1(sigma.s),
    )
    return ShowMaterial(kappa, nu, sigma, pi_v, attrs.public, predicate)


def _pairing_check(params, vk, h_prime, s_prime, nu, kappa, public_attrs) -> bool:
    if is_identity(h_prime):
        return False
    kappa_full = kappa + g2_multiexp([vk.beta[p - 1] for p, _ in public_attrs], [m for _, m in public_attrs])
    return pairing_product_is_one([(h_prime, kappa_full), (-(s_prime + nu), params.g2)])


def verify_cred(params: Params, vk: AggregatedVerificationKey, theta: ShowMaterial, predicate: Predicate | None = None) -> bool:
    """Accept iff the show proof verifies, ``h' != 1`` and the pairing equation holds."""
    if predicate is not None and predicate != theta.predicate:
        return False
    sigma = theta.sigma_prime
    try:
        if is_identity(sigma.h):
            return False
        if not nizk.verify_show(
            params, vk, theta.kappa, theta.nu, sigma.h, theta.public_attrs, theta.pi_v,
            predicate=theta.predicate, extra=encode_g1(sigma.s),
        ):
            return False
    except nizk.ProofShapeError:
        return False
    return _pairing_check(params, vk, sigma.h, sigma.s, theta.nu, theta.kappa, theta.public_attrs)


def verify_signature(params: Params, alpha: G2Point, beta, values, cred: Credential) -> bool:
    """Check ``e(h, alpha * prod beta_j^{m_j}) = e(s, g2)`` with all attributes known."""
    values = list(values)
    if len(values) != len(beta) or is_identity(cred.h):
        return False
    lhs = g2_multiexp([alpha, *beta], [1, *values])
    return pairing_product_is_one([(cred.h, lhs), (-cred.s, params.g2)])


def verify_partial(params: Params, vk_share: VerificationKeyShare, attrs: AttributeVector, cred: Credential) -> bool:
    """Screen one authority's unblinded partial against its own key share."""
    return verify_signature(params, vk_share.alpha, vk_share.beta, attrs.values, cred)
