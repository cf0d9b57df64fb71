# # Authorities as services
#
# Three authorities run HTTP servers on local ports, and a fourth never
# answers. The client fans the request out and stops once t = 2 checked
# partials are back.

# %%
import math
import threading
import time

from thresholdcred import setup
from thresholdcred.scheme import AttributeVector, aggregate_credentials, aggregate_keys, prepare_blind_sign, prove_cred, ttp_keygen, verify_cred
from thresholdcred.service import Authority, GatherPolicy, HttpEndpoint, LocalEndpoint, gather, make_server

params = setup(128, 1)
sks, vks = ttp_keygen(params, 2, 4)
vk = aggregate_keys(vks[:2])

servers = []
for sk in sks[:3]:
    server = make_server(Authority(params, sk))
    threading.Thread(target=server.serve_forever, daemon=True).start()
    servers.append(server)

endpoints = [HttpEndpoint(sk.index, f"http://127.0.0.1:{s.server_address[1]}") for sk, s in zip(sks, servers)]
endpoints.append(LocalEndpoint(Authority(params, sks[3]), delay=math.inf))

# %%
attrs = AttributeVector.with_random_key()
d, request = prepare_blind_sign(params, attrs)
start = time.perf_counter()
partials = gather(GatherPolicy(endpoints, threshold=2), params, request, d, attrs)
print(f"got partials from {[i for i, _ in partials]} in {1000 * (time.perf_counter() - start):.0f} ms")

cred = aggregate_credentials(partials)
print("valid:", verify_cred(params, vk, prove_cred(params, vk, cred, attrs)))

for s in servers:
    s.shutdown()
    s.server_close()
