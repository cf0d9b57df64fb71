"""One honest object of every wire kind, shared by the wire tests and the fuzz criterion."""

from thresholdcred import setup, wire
from thresholdcred.petition import petition_init, petition_sign
from thresholdcred.scheme import (
    AttributeVector,
    IssuanceRejected,
    aggregate_credentials,
    aggregate_keys,
    blind_sign,
    prepare_blind_sign,
    prove_cred,
    ttp_keygen,
    unblind,
    verify_cred,
    verify_partial,
    verify_signature,
)


def build_samples(q=3):
    params = setup(128, q)
    sks, vks = ttp_keygen(params, 2, 3)
    vk = aggregate_keys(vks[:2])
    attrs = AttributeVector.with_random_key(tuple(range(2, q + 1)), public_positions=(q - 1,))
    d, request = prepare_blind_sign(params, attrs)
    blinded = [blind_sign(params, sk, request) for sk in sks]
    partials = [(sk.index, unblind(b, d)) for sk, b in zip(sks, blinded)]
    cred = aggregate_credentials(partials[:2])
    theta = prove_cred(params, vk, cred, attrs)
    petition = petition_init(params, b"poll", vk, ["yes", "no"])
    packet = petition_sign(params, petition, cred, attrs, "yes")
    return {
        wire.Kind.REQUEST: request,
        wire.Kind.PARTIAL: blinded[0],
        wire.Kind.SHOW: theta,
        wire.Kind.VK_SHARE: vks[0],
        wire.Kind.PARAMS_DIGEST: wire.ParamsDigest(params.digest),
        wire.Kind.CREDENTIAL: cred,
        wire.Kind.PARAMS: params,
        wire.Kind.SK_SHARE: sks[0],
        wire.Kind.AGG_VK: vk,
        wire.Kind.PARTIAL_SET: wire.PartialSet(tuple(partials)),
        wire.Kind.ATTRIBUTES: attrs,
        wire.Kind.PETITION_PACKET: packet,
    }, dict(params=params, vk=vk, petition=petition, attrs=attrs, d=d, sk=sks[0], vk2=vks[1])


def accepts(kind, obj, samples, ctx):
    """Would a consumer act on this decoded object as if it were genuine?"""
    params, vk, attrs = ctx["params"], ctx["vk"], ctx["attrs"]
    K = wire.Kind
    if kind is K.REQUEST:
        try:
            blind_sign(params, ctx["sk"], obj)
            return True
        except (IssuanceRejected, ValueError):
            return False
    if kind is K.PARTIAL:
        return verify_partial(params, samples[K.VK_SHARE], attrs, unblind(obj, ctx["d"]))
    if kind is K.SHOW:
        return verify_cred(params, vk, obj)
    if kind is K.CREDENTIAL:
        return verify_signature(params, vk.alpha, vk.beta, attrs.values, obj)
    if kind is K.PARTIAL_SET:
        try:
            cred = aggregate_credentials(obj.items)
        except ValueError:
            return False
        return verify_signature(params, vk.alpha, vk.beta, attrs.values, cred)
    if kind is K.ATTRIBUTES:
        # public-position flags are the holder's disclosure choice, not signed data
        if len(obj.values) != params.q or obj.values == attrs.values:
            return False
        return verify_signature(params, vk.alpha, vk.beta, obj.values, samples[K.CREDENTIAL])
    if kind is K.PETITION_PACKET:
        return ctx["petition"].check(obj)
    if kind is K.VK_SHARE:
        try:
            joint = aggregate_keys([obj, ctx["vk2"]])
        except ValueError:
            return False
        return len(obj.beta) == params.q and verify_cred(params, joint, samples[K.SHOW])
    if kind is K.AGG_VK:
        return len(obj.beta) == params.q and verify_cred(params, obj, samples[K.SHOW])
    if kind is K.SK_SHARE:
        return len(obj.y) == params.q and obj.verification_key(params) == samples[K.VK_SHARE]
    if kind is K.PARAMS_DIGEST:
        return obj.value == params.digest
    return obj.digest == params.digest


def fuzz_inputs(honest: bytes, count: int, rng):
    """Random strings, truncations, extensions and bit flips of ``honest`` (never ``honest`` itself)."""
    n = len(honest)
    for i in range(count):
        mode = i % 4
        if mode == 0:
            yield rng.randbytes(rng.randrange(0, 2 * n + 2))
        elif mode == 1:
            yield honest[: rng.randrange(0, n)]
        elif mode == 2:
            yield honest + rng.randbytes(rng.randrange(1, 8))
        else:
            data = bytearray(honest)
            while data == honest:  # repeated flips can cancel out
                for _ in range(rng.choice((1, 1, 1, 2, 8))):
                    pos = rng.randrange(n)
                    data[pos] ^= 1 << rng.randrange(8)
            yield bytes(data)
