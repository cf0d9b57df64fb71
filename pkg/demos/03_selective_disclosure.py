# # Showing a credential
#
# `prove_cred` re-randomizes the credential every time, so two shows of
# the same credential share no group elements. A show can reveal some
# positions and keep the rest hidden.

# %%
from thresholdcred import setup
from thresholdcred.group import encode_g1
from thresholdcred.scheme import (
    AttributeVector, aggregate_keys, issue_credential, prove_cred, ttp_keygen, verify_cred,
)

params = setup(128, 3)
sks, vks = ttp_keygen(params, 2, 3)
vk = aggregate_keys(vks[:2])
attrs = AttributeVector.with_random_key((21, 1))
cred = issue_credential(params, sks[:2], attrs)

# %%
age_only = attrs.reveal(2)
t1 = prove_cred(params, vk, cred, age_only)
t2 = prove_cred(params, vk, cred, age_only)
print("both verify:", verify_cred(params, vk, t1), verify_cred(params, vk, t2))
print("revealed:", t1.public_attrs)
print("h' differs between shows:", encode_g1(t1.sigma_prime.h) != encode_g1(t2.sigma_prime.h))

# %% [markdown]
# Lying about a revealed attribute fails.

# %%
liar = AttributeVector((attrs.values[0], 30, 1), (2,))
print("claimed age 30:", verify_cred(params, vk, prove_cred(params, vk, cred, liar)))

# %% [markdown]
# So does a credential aggregated from fewer than t partials.

# %%
from thresholdcred.scheme import aggregate_credentials, blind_sign, prepare_blind_sign, unblind

d, req = prepare_blind_sign(params, attrs)
lonely = aggregate_credentials([(1, unblind(blind_sign(params, sks[0], req), d))])
print("one of two partials:", verify_cred(params, vk, prove_cred(params, vk, lonely, attrs)))
