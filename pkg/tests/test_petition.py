import dataclasses
import threading

import pytest

from thresholdcred import setup
from thresholdcred.group import encode_g1, g1_mul
from thresholdcred.petition import (
    DOUBLE_SIGN,
    PROOF_INVALID,
    Petition,
    PetitionStateError,
    petition_generator,
    petition_init,
    petition_sign,
    petition_verify_and_record,
)
from thresholdcred.scheme import AttributeVector, aggregate_keys, issue_credential, ttp_keygen



@pytest.fixture(scope="module")
def world():
    params = setup(128, 2)
    sks, vks = ttp_keygen(params, 2, 3)
    vk = aggregate_keys(vks[:2])
    citizens = []
    for i in range(10):
        attrs = AttributeVector.with_random_key((1990 + i,), public_positions=())
        citizens.append((issue_credential(params, sks[1:], attrs), attrs))
    return params, vk, citizens


def test_generator_depends_on_id():
    assert encode_g1(petition_generator(b"a")) != encode_g1(petition_generator(b"b"))


def test_init_validation(world):
    params, vk, _ = world
    with pytest.raises(ValueError):
        petition_init(params, b"p", vk, [])
    with pytest.raises(ValueError):
        petition_init(params, b"p", vk, ["x", "x"])


def test_sign_tally_and_double_sign(world):
    params, vk, citizens = world
    options = ("yes", "no")
    petitions = [petition_init(params, f"petition-{j}".encode(), vk, options) for j in range(3)]
    expected = [dict.fromkeys(options, 0) for _ in petitions]
    for i, (cred, attrs) in enumerate(citizens):
        for j, pet in enumerate(petitions):
            option = options[(i + j) % 2]
            assert petition_verify_and_record(pet, petition_sign(params, pet, cred, attrs, option))
            expected[j][option] += 1
            again = petition_sign(params, pet, cred, attrs, options[(i + j + 1) % 2])
            verdict = petition_verify_and_record(pet, again)
            assert not verdict and verdict.reason == DOUBLE_SIGN
    assert [p.tally() for p in petitions] == expected


def test_zeta_differs_between_petitions(world):
    params, vk, citizens = world
    cred, attrs = citizens[0]
    a = petition_init(params, b"a", vk, ["x"])
    b = petition_init(params, b"b", vk, ["x"])
    za = petition_sign(params, a, cred, attrs, "x").zeta
    zb = petition_sign(params, b, cred, attrs, "x").zeta
    assert encode_g1(za) != encode_g1(zb)


def test_rebound_packet_rejected(world):
    params, vk, citizens = world
    cred, attrs = citizens[1]
    pet = petition_init(params, b"rebind", vk, ["yes", "no"])
    packet = petition_sign(params, pet, cred, attrs, "yes")
    switched = dataclasses.replace(packet, option="no")
    assert petition_verify_and_record(pet, switched).reason == PROOF_INVALID
    other = petition_init(params, b"other", vk, ["yes", "no"])
    assert not other.check(packet)
    fake_zeta = dataclasses.replace(packet, zeta=g1_mul(packet.zeta, 2))
    assert not pet.check(fake_zeta)
    assert pet.tally() == {"yes": 0, "no": 0}


def test_unknown_option(world):
    params, vk, citizens = world
    cred, attrs = citizens[2]
    pet = petition_init(params, b"opts", vk, ["yes"])
    packet = petition_sign(params, pet, cred, attrs, "maybe")
    assert not petition_verify_and_record(pet, packet)


def test_forged_credential_rejected(world):
    params, vk, citizens = world
    cred, attrs = citizens[3]
    pet = petition_init(params, b"forged", vk, ["yes"])
    bogus = dataclasses.replace(cred, s=g1_mul(cred.s, 2))
    assert petition_verify_and_record(pet, petition_sign(params, pet, bogus, attrs, "yes")).reason == PROOF_INVALID


def test_key_must_be_private(world):
    params, vk, citizens = world
    cred, attrs = citizens[4]
    pet = petition_init(params, b"pub", vk, ["yes"])
    with pytest.raises(ValueError):
        petition_sign(params, pet, cred, attrs.reveal(1), "yes")


def test_concurrent_duplicate(world):
    params, vk, citizens = world
    cred, attrs = citizens[5]
    pet = petition_init(params, b"race", vk, ["yes"])
    packets = [petition_sign(params, pet, cred, attrs, "yes") for _ in range(8)]
    barrier = threading.Barrier(len(packets))
    verdicts = []

    def submit(p):
        barrier.wait()
        verdicts.append(pet.verify_and_record(p))

    threads = [threading.Thread(target=submit, args=(p,)) for p in packets]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sum(v.accepted for v in verdicts) == 1
    assert all(v.reason == DOUBLE_SIGN for v in verdicts if not v)
    assert pet.tally() == {"yes": 1}


def test_persistence_roundtrip(world, tmp_path):
    params, vk, citizens = world
    path = str(tmp_path / "state.bin")
    pet = petition_init(params, b"persist", vk, ["a", "b"], path=path)
    for i, (cred, attrs) in enumerate(citizens[:4]):
        assert pet.verify_and_record(petition_sign(params, pet, cred, attrs, "ab"[i % 2]))
    loaded = Petition.load(path, params, verify=True)
    assert loaded.tally() == {"a": 2, "b": 2}
    cred, attrs = citizens[0]
    assert loaded.verify_and_record(petition_sign(params, loaded, cred, attrs, "a")).reason == DOUBLE_SIGN
    cred, attrs = citizens[6]
    assert loaded.verify_and_record(petition_sign(params, loaded, cred, attrs, "a"))
    assert Petition.load(path, params).tally() == {"a": 3, "b": 2}


def test_save_rewrites_state(world, tmp_path):
    params, vk, citizens = world
    pet = petition_init(params, b"mem", vk, ["a"])
    cred, attrs = citizens[7]
    pet.verify_and_record(petition_sign(params, pet, cred, attrs, "a"))
    path = str(tmp_path / "saved.bin")
    pet.save(path)
    assert Petition.load(path, params, verify=True).tally() == {"a": 1}


def test_torn_tail_and_corruption(world, tmp_path, caplog):
    params, vk, citizens = world
    path = tmp_path / "torn.bin"
    pet = petition_init(params, b"torn", vk, ["a"], path=str(path))
    for cred, attrs in citizens[:2]:
        pet.verify_and_record(petition_sign(params, pet, cred, attrs, "a"))
    data = path.read_bytes()
    path.write_bytes(data[:-10])
    assert Petition.load(str(path), params).tally() == {"a": 1}
    assert "torn" in caplog.text
    corrupt = bytearray(data)
    corrupt[len(b"TCPETIT1") + 10] ^= 0xFF
    path.write_bytes(bytes(corrupt))
    with pytest.raises(PetitionStateError):
        Petition.load(str(path), params)
    path.write_bytes(b"nope")
    with pytest.raises(PetitionStateError):
        Petition.load(str(path), params)


def test_load_rejects_other_params(world, tmp_path):
    params, vk, _ = world
    path = str(tmp_path / "p.bin")
    petition_init(params, b"x", vk, ["a"], path=path)
    with pytest.raises(PetitionStateError):
        Petition.load(path, setup(128, 3))
