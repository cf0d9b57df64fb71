"""Command line front end.

Exit codes: 0 success, 1 cryptographic rejection (reason on stderr),
2 usage or configuration error, 3 bind failure (``serve``).
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import bench, wire
from .group import ORDER, hash_to_scalar, random_scalar, setup
from .keystore import KeyStore, KeyStoreError, read_envelope, write_envelope
from .petition import Petition, PetitionStateError, petition_init, petition_sign
from .scheme import (
    AttributeVector,
    IssuanceRejected,
    aggregate_credentials,
    aggregate_keys,
    blind_sign,
    prepare_blind_sign,
    prove_cred,
    unblind,
    verify_cred,
)
from .service import (
    EXIT_BAD_CONFIG,
    AuthorityConfig,
    ConfigError,
    GatherPolicy,
    HttpEndpoint,
    ThresholdUnreachable,
    gather,
    serve,
)

EXIT_REJECTED = 1


class UsageError(Exception):
    pass


class Rejected(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def parse_attribute(text: str) -> int:
    """``123`` / ``0x7b`` literal, ``str:<text>`` hashed to a scalar, or ``random``."""
    if text == "random":
        return random_scalar()
    if text.startswith("str:"):
        return hash_to_scalar(b"COCONUT-ATTR", text[4:].encode("utf-8"))
    try:
        value = int(text, 0)
    except ValueError:
        raise UsageError(f"cannot parse attribute {text!r}") from None
    if not 0 <= value < ORDER:
        raise UsageError(f"attribute {text!r} is out of range")
    return value


def _positions(items) -> tuple:
    return tuple(int(p) for p in items or ())


def _attrs_from_args(args, q: int) -> AttributeVector:
    values = [parse_attribute(v) for v in args.attr or []]
    if len(values) != q:
        raise UsageError(f"store holds keys for {q} attributes, got {len(values)} --attr values")
    try:
        return AttributeVector(tuple(values), _positions(args.public))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- subcommands --------------------------------------------------------------------


def cmd_keygen(args):
    if not 1 <= args.threshold <= args.authorities:
        raise UsageError(f"need 1 <= threshold <= authorities (got t={args.threshold}, n={args.authorities})")
    if args.attributes < 1:
        raise UsageError("--attributes must be >= 1")
    params = setup(128, args.attributes)
    KeyStore.create(args.out, params, args.threshold, args.authorities)
    print(f"wrote {args.authorities} secret shares, {args.authorities} verification shares to {args.out}")
    print("warning: secret key shares are stored in plaintext", file=sys.stderr)


def cmd_aggregate_keys(args):
    store = KeyStore.open(args.store)
    indices = _positions(args.indices) or tuple(range(1, store.threshold + 1))
    if len(indices) < store.threshold:
        raise UsageError(f"need at least {store.threshold} shares")
    vk = aggregate_keys([store.vk_share(i) for i in indices])
    write_envelope(args.out, vk)
    print(vk.digest.hex())


def cmd_serve(args):
    if args.config:
        config = AuthorityConfig.load(args.config)
    else:
        if not (args.store and args.index):
            raise UsageError("serve needs --config or --store with --index")
        config = AuthorityConfig(
            listen=args.listen,
            index=args.index,
            share_path=f"{args.store}/sk-{args.index}.bin",
            params_path=f"{args.store}/params.bin",
            max_requests_per_minute=args.max_requests_per_minute,
        )
    return serve(config)


def _write_issuance(args, partials, attrs):
    write_envelope(args.out, wire.PartialSet(tuple(partials)))
    write_envelope(args.attrs_out, attrs)
    print(f"wrote {len(partials)} partial credentials from authorities {','.join(str(i) for i, _ in partials)}")


def cmd_request(args):
    store = KeyStore.open(args.store)
    attrs = _attrs_from_args(args, store.params.q)
    endpoints = []
    for spec in args.authority:
        index, sep, url = spec.partition("=")
        if not sep or not index.isdigit():
            raise UsageError(f"--authority wants INDEX=URL, got {spec!r}")
        endpoints.append(HttpEndpoint(int(index), url))
    t = args.threshold or store.threshold
    try:
        policy = GatherPolicy(endpoints, t, request_timeout=args.timeout, deadline=args.deadline)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    d, request = prepare_blind_sign(store.params, attrs)
    try:
        partials = gather(policy, store.params, request, d, attrs, store.vk_shares())
    except ThresholdUnreachable as exc:
        print(str(exc), file=sys.stderr)
        raise Rejected(exc.reason) from None
    _write_issuance(args, partials, attrs)


def cmd_issue_local(args):
    store = KeyStore.open(args.store)
    attrs = _attrs_from_args(args, store.params.q)
    indices = _positions(args.indices) or tuple(range(1, store.authorities + 1))
    d, request = prepare_blind_sign(store.params, attrs)
    try:
        partials = [
            (i, unblind(blind_sign(store.params, store.secret_share(i), request), d)) for i in indices
        ]
    except IssuanceRejected as exc:
        raise Rejected(exc.reason) from None
    _write_issuance(args, partials, attrs)


def cmd_aggregate(args):
    partial_set = read_envelope(args.partials, wire.Kind.PARTIAL_SET)
    try:
        cred = aggregate_credentials(partial_set.items)
    except ValueError as exc:
        raise Rejected("inconsistent-partials") from exc
    write_envelope(args.out, cred)
    print(f"aggregated {len(partial_set)} partial credentials")


def cmd_show(args):
    store = KeyStore.open(args.store)
    vk = read_envelope(args.vk, wire.Kind.AGG_VK) if args.vk else store.verification_key()
    cred = read_envelope(args.cred, wire.Kind.CREDENTIAL)
    attrs = read_envelope(args.attrs, wire.Kind.ATTRIBUTES)
    try:
        attrs = attrs.reveal(*_positions(args.reveal))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_envelope(args.out, prove_cred(store.params, vk, cred, attrs))
    revealed = ",".join(str(p) for p in attrs.public_positions) or "none"
    print(f"wrote show material (revealed positions: {revealed})")


def cmd_verify(args):
    store = KeyStore.open(args.store)
    vk = read_envelope(args.vk, wire.Kind.AGG_VK) if args.vk else store.verification_key()
    try:
        theta = read_envelope(args.theta, wire.Kind.SHOW)
    except wire.WireError as exc:
        print("INVALID")
        raise Rejected(exc.code) from None
    if not verify_cred(store.params, vk, theta):
        print("INVALID")
        raise Rejected("show-invalid")
    shown = {pos for pos, _ in theta.public_attrs}
    if not set(_positions(args.require_reveal)) <= shown:
        print("INVALID")
        raise Rejected("missing-reveal")
    print("VALID")
    for pos, value in theta.public_attrs:
        print(f"revealed {pos} {value}")


def cmd_petition_init(args):
    store = KeyStore.open(args.store)
    vk = read_envelope(args.vk, wire.Kind.AGG_VK) if args.vk else store.verification_key()
    options = [o for o in (args.options or "").split(",") if o]
    try:
        petition = petition_init(store.params, args.id.encode("utf-8"), vk, options, path=args.state)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"petition {args.id!r} created with options {', '.join(petition.options)}")


def cmd_petition_sign(args):
    store = KeyStore.open(args.store)
    petition = Petition.load(args.state, store.params)
    cred = read_envelope(args.cred, wire.Kind.CREDENTIAL)
    attrs = read_envelope(args.attrs, wire.Kind.ATTRIBUTES).reveal()
    if args.option not in petition.options:
        raise UsageError(f"unknown option {args.option!r}")
    packet = petition_sign(store.params, petition, cred, attrs, args.option, key_position=args.key_position)
    write_envelope(args.out, packet)
    print("wrote signature packet")


def cmd_petition_record(args):
    store = KeyStore.open(args.store)
    petition = Petition.load(args.state, store.params)
    try:
        packet = read_envelope(args.packet, wire.Kind.PETITION_PACKET)
    except wire.WireError as exc:
        print("REJECTED")
        raise Rejected(exc.code) from None
    verdict = petition.verify_and_record(packet)
    if not verdict:
        print("REJECTED")
        raise Rejected(verdict.reason)
    print("ACCEPTED")


def cmd_petition_tally(args):
    store = KeyStore.open(args.store)
    petition = Petition.load(args.state, store.params, verify=args.reverify)
    for option, count in petition.tally().items():
        print(f"{option},{count}")


def cmd_bench(args):
    if args.iters < 1:
        raise UsageError("--iters must be positive")
    ops = bench.OPS if args.op == "all" else [args.op]
    rows = [bench.run_bench(op, args.iters, q=args.attributes) for op in ops]
    lines = [bench.CSV_HEADER] + [r.csv_row() for r in rows]
    if args.csv:
        with open(args.csv, "w") as f:
            f.write("\n".join(lines) + "\n")
    for r in rows:
        print(f"{r.op:8s} mean {r.mean_ms:9.3f} ms  stddev {r.stddev_ms:8.3f} ms  ({r.iters} iters)")


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thresholdcred", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def attr_args(p):
        p.add_argument("--attr", action="append", help="attribute value, in position order (repeatable)")
        p.add_argument("--public", type=int, action="append", help="1-based position sent in clear")
        p.add_argument("--out", required=True, help="partial credentials output")
        p.add_argument("--attrs-out", required=True, help="attribute vector output (keep private)")

    p = sub.add_parser("keygen", help="trusted-dealer key generation")
    p.add_argument("--threshold", "-t", type=int, required=True)
    p.add_argument("--authorities", "-n", type=int, required=True)
    p.add_argument("--attributes", "-q", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("aggregate-keys", help="aggregate verification key shares")
    p.add_argument("--store", required=True)
    p.add_argument("--indices", type=int, nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_aggregate_keys)

    p = sub.add_parser("serve", help="run one issuing authority")
    p.add_argument("--config")
    p.add_argument("--store")
    p.add_argument("--index", type=int)
    p.add_argument("--listen", default="127.0.0.1:8000")
    p.add_argument("--max-requests-per-minute", type=int)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("request", help="obtain partial credentials from running authorities")
    p.add_argument("--store", required=True)
    p.add_argument("--authority", action="append", required=True, metavar="INDEX=URL")
    p.add_argument("--threshold", type=int)
    p.add_argument("--timeout", type=float, default=5.0)
    p.add_argument("--deadline", type=float, default=10.0)
    attr_args(p)
    p.set_defaults(func=cmd_request)

    p = sub.add_parser("issue-local", help="issue with in-process authorities from the store (default: all n)")
    p.add_argument("--store", required=True)
    p.add_argument("--indices", type=int, nargs="+")
    attr_args(p)
    p.set_defaults(func=cmd_issue_local)

    p = sub.add_parser("aggregate", help="aggregate partial credentials")
    p.add_argument("--partials", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("show", help="produce show material for a credential")
    p.add_argument("--store", required=True)
    p.add_argument("--vk")
    p.add_argument("--cred", required=True)
    p.add_argument("--attrs", required=True)
    p.add_argument("--reveal", type=int, nargs="*", default=[])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("verify", help="verify show material")
    p.add_argument("--store", required=True)
    p.add_argument("--vk")
    p.add_argument("--theta", required=True)
    p.add_argument("--require-reveal", type=int, nargs="*")
    p.set_defaults(func=cmd_verify)

    pet = sub.add_parser("petition", help="petition application").add_subparsers(dest="petition_command", required=True)
    p = pet.add_parser("init")
    p.add_argument("--store", required=True)
    p.add_argument("--vk")
    p.add_argument("--id", required=True)
    p.add_argument("--options", required=True, help="comma separated")
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_petition_init)
    p = pet.add_parser("sign")
    p.add_argument("--store", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--cred", required=True)
    p.add_argument("--attrs", required=True)
    p.add_argument("--option", required=True)
    p.add_argument("--key-position", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_petition_sign)
    p = pet.add_parser("record")
    p.add_argument("--store", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--packet", required=True)
    p.set_defaults(func=cmd_petition_record)
    p = pet.add_parser("tally")
    p.add_argument("--store", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--reverify", action="store_true")
    p.set_defaults(func=cmd_petition_tally)

    p = sub.add_parser("bench", help="time the primitives")
    p.add_argument("--op", choices=[*bench.OPS, "all"], required=True)
    p.add_argument("--iters", type=int, required=True)
    p.add_argument("--attributes", type=int, default=1)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        code = args.func(args)
    except Rejected as exc:
        print(f"error: {exc.reason}", file=sys.stderr)
        return EXIT_REJECTED
    except (UsageError, KeyStoreError, ConfigError, PetitionStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except wire.WireError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
