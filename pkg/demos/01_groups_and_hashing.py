# # Groups, pairings and hashing into G1
#
# Everything sits on BLS12-381. `setup` fixes the generators, and the
# `h_j` used for attribute commitments come from a hash, so nobody knows
# their discrete logs.

# %%
from thresholdcred import setup, pairing, hash_to_g1
from thresholdcred.group import g1_mul, g2_mul, gt_pow, encode_g1, random_scalar

params = setup(128, 3)
print("q =", params.q, " digest", params.digest.hex()[:16], "...")

# %% [markdown]
# Bilinearity: e(g1^a, g2^b) == e(g1, g2)^(ab)

# %%
a, b = random_scalar(), random_scalar()
lhs = pairing(g1_mul(params.g1, a), g2_mul(params.g2, b))
rhs = gt_pow(pairing(params.g1, params.g2), a * b)
print("bilinear:", lhs == rhs)

# %% [markdown]
# Hashing a G1 element to another G1 element is deterministic, and
# different inputs land on different points.

# %%
p = g1_mul(params.g1, 42)
print(encode_g1(hash_to_g1(p)).hex()[:32])
print(encode_g1(hash_to_g1(p)) == encode_g1(hash_to_g1(p)))
print(encode_g1(hash_to_g1(p)) == encode_g1(hash_to_g1(g1_mul(params.g1, 43))))
