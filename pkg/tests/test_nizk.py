import dataclasses

import pytest

from thresholdcred import nizk, setup
from thresholdcred.elgamal import ElGamalCiphertext
from thresholdcred.group import ORDER, encode_g1, encode_scalar, g1_mul, hash_to_g1, random_scalar
from thresholdcred.nizk import IssuanceProof, Predicate, ShowProof, register_predicate, reveal
from thresholdcred.scheme import (
    AttributeVector,
    _prove_cred_with,
    aggregate_keys,
    dealer_keygen,
    prepare_blind_sign,
)

from conftest import issue

Q = 5


@pytest.fixture(scope="module")
def params5():
    return setup(128, Q)


def make_attrs(q_priv):
    values = [random_scalar() for _ in range(Q)]
    return AttributeVector(values, tuple(range(q_priv + 1, Q + 1)))


def check(params, request, proof=None, **overrides):
    fields = dict(
        gamma=request.gamma,
        c_m=request.c_m,
        h=hash_to_g1(request.c_m),
        ciphertexts=request.ciphertexts,
        public_attrs=request.public_attrs,
        proof=request.pi_s if proof is None else proof,
        predicate=request.predicate,
    )
    fields.update(overrides)
    return nizk.verify_issuance(params, **fields)


@pytest.mark.parametrize("q_priv", [0, 1, 3, 5])
def test_issuance_completeness(params5, q_priv):
    for _ in range(100):
        _, request = prepare_blind_sign(params5, make_attrs(q_priv))
        assert check(params5, request)
        assert len(request.pi_s.responses) == 2 + 2 * q_priv


@pytest.mark.parametrize("q_priv", [1, 3])
def test_issuance_tampering(params5, q_priv):
    _, req = prepare_blind_sign(params5, make_attrs(q_priv))
    _, other = prepare_blind_sign(params5, make_attrs(q_priv))
    p = req.pi_s
    ct0 = req.ciphertexts[0]
    # transplant onto a fresh statement
    assert not check(params5, other, proof=p)
    # zeroed / shifted responses
    for i in range(len(p.responses)):
        rs = list(p.responses)
        rs[i] = 0
        assert not check(params5, req, proof=IssuanceProof(p.challenge, tuple(rs)))
    assert not check(params5, req, proof=IssuanceProof((p.challenge + 1) % ORDER, p.responses))
    # mutated statement components
    assert not check(params5, req, gamma=g1_mul(req.gamma, 2))
    assert not check(params5, req, c_m=g1_mul(req.c_m, 2))
    bumped = ElGamalCiphertext(ct0.a, ct0.b + hash_to_g1(req.c_m))
    assert not check(params5, req, ciphertexts=(bumped, *req.ciphertexts[1:]))
    if q_priv > 1:
        swapped = (req.ciphertexts[1], req.ciphertexts[0], *req.ciphertexts[2:])
        assert not check(params5, req, ciphertexts=swapped)
    # h not derived from c_m
    assert not check(params5, req, h=g1_mul(hash_to_g1(req.c_m), 2))
    # public attribute changed after proving
    pos, m = req.public_attrs[0]
    pub = ((pos, m + 1), *req.public_attrs[1:])
    assert not check(params5, req, public_attrs=pub)


def test_issuance_shape_errors(params5):
    _, req = prepare_blind_sign(params5, make_attrs(3))
    short = IssuanceProof(req.pi_s.challenge, req.pi_s.responses[:-1])
    assert not check(params5, req, proof=short)
    out_of_range = IssuanceProof(req.pi_s.challenge, (ORDER, *req.pi_s.responses[1:]))
    assert not check(params5, req, proof=out_of_range)


def test_issuance_bit_flips(params5):
    _, req = prepare_blind_sign(params5, make_attrs(1))
    p = req.pi_s
    scalars = [p.challenge, *p.responses]
    # a bit in every byte of every scalar
    for idx in range(len(scalars)):
        for byte in range(32):
            bit = (idx * 7 + byte) % 8
            raw = bytearray(encode_scalar(scalars[idx]))
            raw[byte] ^= 1 << bit
            val = int.from_bytes(raw, "big")
            mutated = list(scalars)
            mutated[idx] = val
            proof = IssuanceProof(mutated[0], tuple(mutated[1:]))
            assert not check(params5, req, proof=proof)


def test_predicate_bound_into_challenge(params5):
    attrs = make_attrs(3)
    _, req = prepare_blind_sign(params5, attrs, reveal(4))
    assert check(params5, req)
    assert not check(params5, req, predicate=reveal(4, 5))
    assert not check(params5, req, predicate=nizk.TRUE)


def test_predicate_must_hold(params5):
    attrs = make_attrs(5)  # nothing public
    with pytest.raises(ValueError):
        prepare_blind_sign(params5, attrs, reveal(2))


def test_register_predicate(params5):
    register_predicate("at-least-two-public", lambda pred, pos: len(pos) >= 2)
    pred = Predicate("at-least-two-public")
    _, req = prepare_blind_sign(params5, make_attrs(3), pred)
    assert check(params5, req)
    with pytest.raises(ValueError):
        Predicate("never-registered")


def test_private_positions():
    assert nizk.private_positions(4, [(2, 9), (4, 1)]) == [1, 3]
    with pytest.raises(nizk.ProofShapeError):
        nizk._check_public(2, [(3, 1)])
    with pytest.raises(nizk.ProofShapeError):
        nizk._check_public(3, [(1, 1), (1, 2)])


@pytest.fixture(scope="module")
def show_setup(params5):
    sks, vks, master = dealer_keygen(params5, 2, 3)
    vk = aggregate_keys(vks[:2])
    attrs = make_attrs(3)
    cred = issue(params5, sks[:2], attrs)
    return vk, attrs, cred


def _show_ok(params, vk, theta, **kw):
    args = dict(
        kappa=theta.kappa, nu=theta.nu, h_prime=theta.sigma_prime.h,
        public_attrs=theta.public_attrs, proof=theta.pi_v, predicate=theta.predicate,
        extra=b"",
    )
    args.update(kw)
    return nizk.verify_show(params, vk, **args)


def test_show_proof_completeness_and_tamper(params5, show_setup):
    vk, attrs, cred = show_setup
    for _ in range(20):
        theta = _prove_cred_with(params5, vk, cred, attrs, None, random_scalar(), random_scalar())
        extra = encode_g1(theta.sigma_prime.s)
        assert _show_ok(params5, vk, theta, extra=extra)
        assert not _show_ok(params5, vk, theta, extra=extra + b"x")
        assert not _show_ok(params5, vk, theta, extra=extra, nu=g1_mul(theta.nu, 2))
        p = theta.pi_v
        assert not _show_ok(params5, vk, theta, extra=extra, proof=ShowProof((p.challenge + 1) % ORDER, p.responses))
        zeroed = ShowProof(p.challenge, (0, *p.responses[1:]))
        assert not _show_ok(params5, vk, theta, extra=extra, proof=zeroed)


def test_show_proof_shape(params5, show_setup):
    vk, attrs, cred = show_setup
    theta = _prove_cred_with(params5, vk, cred, attrs, None, 3, 5)
    short = dataclasses.replace(theta.pi_v, responses=theta.pi_v.responses[:-1])
    assert not _show_ok(params5, vk, theta, proof=short)
