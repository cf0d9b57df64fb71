# # Threshold issuance with private attributes
#
# A dealer splits the signing key among 5 authorities, and any 3 of them
# can issue. The user hides two of the three attributes from them.

# %%
from thresholdcred import setup
from thresholdcred.scheme import (
    AttributeVector, aggregate_credentials, aggregate_keys, blind_sign,
    dealer_keygen, prepare_blind_sign, unblind,
)

params = setup(128, 3)
sks, vks, master = dealer_keygen(params, 3, 5)   # master kept only to check the result
vk = aggregate_keys(vks[:3])

# position 1 is a random secret key, 2 is private, 3 is public
attrs = AttributeVector.with_random_key((1990, 7), public_positions=(2,))
d, request = prepare_blind_sign(params, attrs)
print("ciphertexts sent:", len(request.ciphertexts), " public:", request.public_attrs)

# %% [markdown]
# Each authority checks the proof in the request and signs blindly. The
# user unblinds with the ElGamal key `d`.

# %%
partials = [(sk.index, unblind(blind_sign(params, sk, request), d)) for sk in sks]

# %% [markdown]
# Any 3 partials interpolate to the same credential. It matches the one
# the master key would have produced directly.

# %%
cred_a = aggregate_credentials([partials[0], partials[2], partials[4]])
cred_b = aggregate_credentials(partials[1:4])
print("subsets agree:", cred_a == cred_b)
print("matches dealer:", cred_a == master.sign(cred_a.h, attrs.values))
print("credential bytes:", len(cred_a.to_bytes()))
