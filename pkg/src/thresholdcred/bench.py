"""Timing harness for the scheme's primitives (one private attribute by default)."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from .group import setup
from .scheme import (
    AttributeVector,
    aggregate_credentials,
    aggregate_keys,
    blind_sign,
    prepare_blind_sign,
    prove_cred,
    ttp_keygen,
    unblind,
    verify_cred,
)

OPS = ("prepare", "sign", "unblind", "aggcred", "prove", "verify")
CSV_HEADER = "op,iters,mean_ms,stddev_ms"


@dataclass(frozen=True)
class BenchResult:
    op: str
    iters: int
    mean_ms: float
    stddev_ms: float

    def csv_row(self) -> str:
        return f"{self.op},{self.iters},{self.mean_ms:.3f},{self.stddev_ms:.3f}"


def _fixture(q: int, t: int, n: int):
    params = setup(128, q)
    sks, vks = ttp_keygen(params, t, n)
    vk = aggregate_keys(vks[:t])
    attrs = AttributeVector.with_random_key([7] * (q - 1), public_positions=())
    d, request = prepare_blind_sign(params, attrs)
    blinded = [blind_sign(params, sk, request) for sk in sks[:t]]
    partials = [(sk.index, unblind(b, d)) for sk, b in zip(sks, blinded)]
    cred = aggregate_credentials(partials)
    theta = prove_cred(params, vk, cred, attrs)
    return {
        "prepare": lambda: prepare_blind_sign(params, attrs),
        "sign": lambda: blind_sign(params, sks[0], request),
        "unblind": lambda: unblind(blinded[0], d),
        "aggcred": lambda: aggregate_credentials(partials),
        "prove": lambda: prove_cred(params, vk, cred, attrs),
        "verify": lambda: verify_cred(params, vk, theta),
    }


def run_bench(op: str, iters: int, q: int = 1, t: int = 2, n: int = 2) -> BenchResult:
    """Time ``iters`` runs of ``op``; ``aggcred`` aggregates ``t`` partials."""
    if op not in OPS:
        raise ValueError(f"unknown op {op!r}; choose from {', '.join(OPS)}")
    if iters < 1:
        raise ValueError("iters must be positive")
    fn = _fixture(q, t, n)[op]
    fn()  # warm-up
    samples = []
    for _ in range(iters):
        start = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - start) * 1000.0)
    stddev = statistics.stdev(samples) if iters > 1 else 0.0
    return BenchResult(op, iters, statistics.fmean(samples), stddev)
