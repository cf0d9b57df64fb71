# # A petition with double-sign protection
#
# Citizens sign with `zeta = g_s^k`. Here `g_s` hashes the petition id and
# `k` is their secret key attribute. The same citizen always produces the
# same zeta for one petition, but the zetas of different petitions are
# unlinkable.

# %%
from thresholdcred import setup
from thresholdcred.petition import petition_init, petition_sign
from thresholdcred.scheme import AttributeVector, aggregate_keys, issue_credential, ttp_keygen

params = setup(128, 2)
sks, vks = ttp_keygen(params, 2, 3)
vk = aggregate_keys(vks[:2])

citizens = []
for district in (1, 1, 2):
    attrs = AttributeVector.with_random_key((district,))
    citizens.append((issue_credential(params, sks[:2], attrs), attrs))

petition = petition_init(params, b"more-bike-lanes", vk, ["yes", "no"])

# %%
for (cred, attrs), vote in zip(citizens, ["yes", "yes", "no"]):
    print(vote, petition.verify_and_record(petition_sign(params, petition, cred, attrs, vote)))

cred, attrs = citizens[0]
print("second try:", petition.verify_and_record(petition_sign(params, petition, cred, attrs, "no")))
print(petition.tally())
