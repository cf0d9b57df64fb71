"""On-disk key store written by ``thresholdcred keygen``.

Layout::

    DIR/store.json     manifest: params digest, t, n, q
    DIR/params.bin     PARAMS envelope
    DIR/sk-<i>.bin     SK_SHARE envelope per authority (plaintext!)
    DIR/vk-<i>.bin     VK_SHARE envelope per authority
    DIR/vk.bin         AGG_VK envelope

Every file is checked against the manifest's params digest when loaded.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from . import wire
from .group import Params
from .scheme import aggregate_keys, ttp_keygen

MANIFEST = "store.json"


class KeyStoreError(Exception):
    pass


def write_envelope(path: str, obj) -> None:
    with open(path, "wb") as f:
        f.write(wire.encode(obj))


def read_envelope(path: str, kind: wire.Kind):
    try:
        with open(path, "rb") as f:
            return wire.decode(kind, f.read())
    except OSError as exc:
        raise KeyStoreError(f"cannot read {path}: {exc.strerror}") from None


@dataclass
class KeyStore:
    root: str
    params: Params
    threshold: int
    authorities: int

    @classmethod
    def create(cls, root: str, params: Params, t: int, n: int) -> "KeyStore":
        sks, vks = ttp_keygen(params, t, n)
        os.makedirs(root, exist_ok=True)
        write_envelope(os.path.join(root, "params.bin"), params)
        for sk, vk in zip(sks, vks):
            write_envelope(os.path.join(root, f"sk-{sk.index}.bin"), sk)
            write_envelope(os.path.join(root, f"vk-{vk.index}.bin"), vk)
        write_envelope(os.path.join(root, "vk.bin"), aggregate_keys(vks[:t]))
        manifest = {
            "params_digest": params.digest.hex(),
            "threshold": t,
            "authorities": n,
            "attributes": params.q,
        }
        with open(os.path.join(root, MANIFEST), "w") as f:
            json.dump(manifest, f, indent=2)
        return cls(root, params, t, n)

    @classmethod
    def open(cls, root: str) -> "KeyStore":
        try:
            with open(os.path.join(root, MANIFEST)) as f:
                manifest = json.load(f)
        except (OSError, ValueError) as exc:
            raise KeyStoreError(f"no usable manifest in {root}: {exc}") from None
        params = read_envelope(os.path.join(root, "params.bin"), wire.Kind.PARAMS)
        if params.digest.hex() != manifest.get("params_digest"):
            raise KeyStoreError("params.bin does not match the store's params digest")
        return cls(root, params, int(manifest["threshold"]), int(manifest["authorities"]))

    def path(self, name: str) -> str:
        return os.path.join(self.root, name)

    def _checked(self, obj, what: str):
        if len(obj.y if hasattr(obj, "y") else obj.beta) != self.params.q:
            raise KeyStoreError(f"{what} was generated for different params (mixed-digest store)")
        return obj

    def secret_share(self, index: int):
        return self._checked(read_envelope(self.path(f"sk-{index}.bin"), wire.Kind.SK_SHARE), f"sk-{index}")

    def vk_share(self, index: int):
        vk = self._checked(read_envelope(self.path(f"vk-{index}.bin"), wire.Kind.VK_SHARE), f"vk-{index}")
        if vk.index != index:
            raise KeyStoreError(f"vk-{index}.bin holds the share of authority {vk.index}")
        return vk

    def vk_shares(self) -> dict:
        return {i: self.vk_share(i) for i in range(1, self.authorities + 1) if os.path.exists(self.path(f"vk-{i}.bin"))}

    def verification_key(self):
        return self._checked(read_envelope(self.path("vk.bin"), wire.Kind.AGG_VK), "vk")
