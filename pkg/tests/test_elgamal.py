import pytest

from thresholdcred.elgamal import ElGamalCiphertext, commit, elgamal_decrypt, elgamal_encrypt, elgamal_keygen
from thresholdcred.group import ORDER, encode_g1, g1_identity, g1_mul, hash_to_g1, random_scalar


def test_commit_matches_direct_product(params3):
    ms, o = (5, 7, 9), 13
    expected = g1_mul(params3.g1, o)
    for h, m in zip(params3.hs, ms):
        expected = expected + g1_mul(h, m)
    assert encode_g1(commit(params3, ms, o)) == encode_g1(expected)


def test_commit_length_mismatch(params3):
    with pytest.raises(ValueError):
        commit(params3, (1, 2), 3)


def test_encrypt_decrypt(params1):
    kp = elgamal_keygen(params1)
    h = hash_to_g1(g1_mul(params1.g1, 99))
    for _ in range(20):
        m = random_scalar()
        ct, _ = elgamal_encrypt(params1, kp.gamma, h, m)
        assert encode_g1(elgamal_decrypt(kp.d, ct)) == encode_g1(g1_mul(h, m))


def test_homomorphism(params1):
    kp = elgamal_keygen(params1)
    h = hash_to_g1(g1_mul(params1.g1, 3))
    for _ in range(100):
        m1, m2, y = random_scalar(), random_scalar(), random_scalar()
        c1, _ = elgamal_encrypt(params1, kp.gamma, h, m1)
        c2, _ = elgamal_encrypt(params1, kp.gamma, h, m2)
        # (a1^y * a2, b1^y * b2) decrypts to h^(y*m1 + m2)
        a = g1_mul(c1.a, y) + c2.a
        b = g1_mul(c1.b, y) + c2.b
        got = elgamal_decrypt(kp.d, ElGamalCiphertext(a, b))
        assert encode_g1(got) == encode_g1(g1_mul(h, (y * m1 + m2) % ORDER))


def test_encrypt_rejects_identity_base(params1):
    kp = elgamal_keygen(params1)
    with pytest.raises(ValueError):
        elgamal_encrypt(params1, kp.gamma, g1_identity(), 1)


def test_fixed_randomness(params1):
    kp = elgamal_keygen(params1)
    h = hash_to_g1(params1.g1)
    ct, k = elgamal_encrypt(params1, kp.gamma, h, 4, k=6)
    assert k == 6
    assert encode_g1(ct.a) == encode_g1(g1_mul(params1.g1, 6))
    assert encode_g1(ct.b) == encode_g1(g1_mul(kp.gamma, 6) + g1_mul(h, 4))
