"""Threshold-issued anonymous credentials over BLS12-381."""

from .group import Params, setup, pairing, hash_to_g1, hash_to_scalar
from .nizk import Predicate, TRUE, reveal
from .scheme import (
    AggregatedVerificationKey,
    AttributeVector,
    BlindedPartial,
    BlindSignRequest,
    Credential,
    IssuanceRejected,
    SecretKeyShare,
    ShowMaterial,
    VerificationKeyShare,
    aggregate_credentials,
    aggregate_keys,
    blind_sign,
    issue_credential,
    lagrange_coefficients,
    prepare_blind_sign,
    prove_cred,
    randomize,
    ttp_keygen,
    unblind,
    verify_cred,
)

__version__ = "0.1.0"

__all__ = [
    "Params",
    "hash_to_scalar",
    "setup",
    "pairing",
    "hash_to_g1",
    "Predicate",
    "TRUE",
    "reveal",
    "AggregatedVerificationKey",
    "AttributeVector",
    "BlindedPartial",
    "BlindSignRequest",
    "Credential",
    "IssuanceRejected",
    "SecretKeyShare",
    "ShowMaterial",
    "VerificationKeyShare",
    "aggregate_credentials",
    "aggregate_keys",
    "blind_sign",
    "issue_credential",
    "lagrange_coefficients",
    "prepare_blind_sign",
    "prove_cred",
    "randomize",
    "ttp_keygen",
    "unblind",
    "verify_cred",
]
