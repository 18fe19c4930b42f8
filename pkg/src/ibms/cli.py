"""Command-line front end.

Files written by this tool are codec records in lowercase hex, one line.
Messages are raw bytes. Diagnostics go to stderr.

Exit codes:
    0  success
    1  verification failed (reason: signature)
    2  usage error
    3  decode error (reason: encoding / padding)
    4  protocol failure (simulation did not complete cleanly)
    5  bench counts differ from the expected formulas
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from typing import Optional, Sequence

from . import codec
from .core import (
    IdentityKey,
    MasterSecret,
    Signcryptext,
    SystemParams,
    extract,
    public_key,
    public_verify,
    setup,
    signcrypt,
    unsigncrypt,
)
from .errors import DecodeError, IBMSError, ParameterError, ProtocolError, Rejected
from .multi import MultiSigncryptext, mr_public_verify, mr_signcrypt, mr_unsigncrypt
from .pairing import BACKENDS, DEFAULT_BACKEND, measure
from .session import build_plan, parse_plan, run_session

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_DECODE = 3
EXIT_PROTOCOL = 4
EXIT_BENCH = 5


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"ibms: {msg}", file=sys.stderr)


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    with open(path, "wb") as fh:
        fh.write(data)


def _write_record(path: str, value) -> None:
    _write(path, (codec.encode(value).hex() + "\n").encode())


def _load(path: str, kind: Optional[int]):
    return codec.decode(kind, codec.from_text(_read(path)))


def _rng(args) -> Optional[random.Random]:
    return random.Random(args.seed) if args.seed is not None else None


# -- subcommands ----------------------------------------------------------------


def cmd_setup(args) -> int:
    params, msk = setup(args.backend, args.length, _rng(args))
    _write_record(args.params_out, params)
    _write_record(args.msk_out, msk)
    _err(f"wrote {args.params_out} and {args.msk_out} ({params.backend.name}, l={params.l})")
    return EXIT_OK


def cmd_extract(args) -> int:
    params: SystemParams = _load(args.params, codec.PARAMS)
    msk: MasterSecret = _load(args.msk, codec.MASTER_SECRET)
    key = extract(params, msk, args.identity.encode())
    _write_record(args.out, key)
    return EXIT_OK


def cmd_signcrypt(args) -> int:
    params: SystemParams = _load(args.params, codec.PARAMS)
    keys: list[IdentityKey] = [_load(p, codec.IDENTITY_KEY) for p in args.signer_key]
    if any(k.S is None for k in keys):
        raise UsageError("every --signer-key must hold a private key")
    if bool(args.receiver) == bool(args.receivers):
        raise UsageError("give exactly one of --receiver or --receivers")
    raw = _read(args.input)
    try:
        m = codec.pad_message(raw, params.l)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rng = _rng(args)
    if args.receiver:
        sigma = signcrypt(params, m, keys, public_key(params, args.receiver.encode()), rng)
    else:
        recv = [public_key(params, r.encode()) for r in args.receivers.split(",") if r]
        sigma = mr_signcrypt(params, m, keys, recv, rng)
    _write_record(args.out, codec.Sealed(len(raw), sigma))
    return EXIT_OK


def _load_sigma(path: str):
    """Return (sigma, unpadded length or None)."""
    value = _load(path, None)
    if isinstance(value, codec.Sealed):
        return value.sigma, value.msg_len
    if isinstance(value, (Signcryptext, MultiSigncryptext)):
        return value, None
    if isinstance(value, (IdentityKey, MasterSecret)):
        raise UsageError(f"{path} holds key material, not a signcryptext")
    raise UsageError(f"{path} is not a signcryptext")


def cmd_unsigncrypt(args) -> int:
    params: SystemParams = _load(args.params, codec.PARAMS)
    key: IdentityKey = _load(args.key, codec.IDENTITY_KEY)
    if key.S is None:
        raise UsageError("--key must hold a private key")
    try:
        sigma, msg_len = _load_sigma(args.input)
    except DecodeError as exc:
        raise Rejected("encoding", str(exc)) from None
    if isinstance(sigma, MultiSigncryptext):
        if key.identity not in sigma.L_star:
            raise UsageError("this key's identity is not a listed receiver")
        m = mr_unsigncrypt(params, sigma, key)
    else:
        m = unsigncrypt(params, sigma, key)
    if msg_len is not None:
        try:
            m = codec.unpad_message(m, msg_len)
        except DecodeError:
            raise Rejected("padding") from None
    _write(args.out, m)
    return EXIT_OK


def cmd_verify(args) -> int:
    params: SystemParams = _load(args.params, codec.PARAMS)
    raw = codec.from_text(_read(args.input))
    if codec.peek_kind(raw) in (codec.MASTER_SECRET, codec.IDENTITY_KEY):
        raise UsageError("verify takes no key material; pass a signcryptext")
    sigma, _ = _load_sigma(args.input)
    ok = mr_public_verify(params, sigma) if isinstance(sigma, MultiSigncryptext) else public_verify(params, sigma)
    if not ok:
        raise Rejected("signature")
    _err("signature valid")
    return EXIT_OK


def cmd_simulate(args) -> int:
    plan_text = parse_plan(_read(args.plan).decode())
    if args.params:
        params = _load(args.params, codec.PARAMS)
        if not args.msk:
            raise UsageError("--params needs --msk to issue session keys")
        msk = _load(args.msk, codec.MASTER_SECRET)
    else:
        params, msk = setup(plan_text.backend, plan_text.length, random.Random(plan_text.seed))
    outcome = run_session(params, build_plan(plan_text, params, msk))
    sys.stdout.write(outcome.to_text())
    return EXIT_OK if outcome.ok else EXIT_PROTOCOL


def expected_counts(n: int, n_recv: int) -> dict[str, tuple[int, int, int]]:
    """(muls, target exponentiations, pairings) for one full signcryption and one unsigncryption."""
    muls = 4 * n if n_recv == 1 else n * (3 + n_recv)
    return {"signcrypt": (muls, n, 0), "unsigncrypt": (1, 0, 4)}


def run_bench(n: int, n_recv: int, backend: str, length: int, rng: Optional[random.Random]):
    params, msk = setup(backend, length, rng)
    signers = [extract(params, msk, f"signer-{i:03d}".encode()) for i in range(n)]
    receivers = [extract(params, msk, f"receiver-{j:03d}".encode()) for j in range(n_recv)]
    rng = rng or random.Random()
    m = bytes(rng.randrange(256) for _ in range(length))
    results = {}
    t0 = time.perf_counter()
    with measure() as sc:
        if n_recv == 1:
            sigma = signcrypt(params, m, signers, receivers[0].public(), rng)
        else:
            sigma = mr_signcrypt(params, m, signers, [k.public() for k in receivers], rng)
    t1 = time.perf_counter()
    with measure() as uc:
        if n_recv == 1:
            out = unsigncrypt(params, sigma, receivers[0])
        else:
            out = mr_unsigncrypt(params, sigma, receivers[0])
    t2 = time.perf_counter()
    if out != m:
        raise ProtocolError("bench round trip did not recover the message")
    results["signcrypt"] = ((sc.muls, sc.gt_exps, sc.pairings), t1 - t0)
    results["unsigncrypt"] = ((uc.muls, uc.gt_exps, uc.pairings), t2 - t1)
    return params, results


def cmd_bench(args) -> int:
    n, n_recv = args.signers, args.receivers
    if n < 1 or n_recv < 1:
        raise UsageError("--signers and --receivers must be positive")
    params, results = run_bench(n, n_recv, args.backend, args.length, _rng(args))
    expected = expected_counts(n, n_recv)
    print(f"backend {params.backend.name}  signers {n}  receivers {n_recv}  l {params.l}")
    print(f"{'phase':<12}{'G1-muls':>9}{'Gt-exps':>9}{'pairings':>10}   expected      time")
    status = EXIT_OK
    for phase in ("signcrypt", "unsigncrypt"):
        got, secs = results[phase]
        want = expected[phase]
        mark = "ok" if got == want else "MISMATCH"
        if got != want:
            status = EXIT_BENCH
        print(f"{phase:<12}{got[0]:>9}{got[1]:>9}{got[2]:>10}   {'/'.join(map(str, want)):<12}{secs * 1e3:>7.1f} ms  {mark}")
    return status


# -- wiring ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ibms", description="Identity-based multi-signcryption")
    p.add_argument("--test-mode", action="store_true", help="allow deterministic --seed (never for real keys)")
    p.add_argument("--seed", type=int, help="seed the RNG; requires --test-mode")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("setup", help="PKG: create system parameters and master secret")
    s.add_argument("--backend", choices=sorted(BACKENDS), default=DEFAULT_BACKEND)
    s.add_argument("--length", type=int, default=32, help="message length l in bytes")
    s.add_argument("--params-out", default="params.ibms")
    s.add_argument("--msk-out", default="master.ibms")
    s.set_defaults(func=cmd_setup)

    s = sub.add_parser("extract", help="PKG: issue an identity's private key")
    s.add_argument("--params", required=True)
    s.add_argument("--msk", required=True)
    s.add_argument("--identity", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("signcrypt", help="run all signers locally and write a signcryptext")
    s.add_argument("--params", required=True)
    s.add_argument("--signer-key", action="append", required=True, metavar="KEY")
    s.add_argument("--receiver")
    s.add_argument("--receivers", help="comma-separated identities (multi-receiver)")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_signcrypt)

    s = sub.add_parser("unsigncrypt", help="verify and decrypt with a receiver key")
    s.add_argument("--params", required=True)
    s.add_argument("--key", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_unsigncrypt)

    s = sub.add_parser("verify", help="public signature check; no private key involved")
    s.add_argument("--params", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="run a scripted signer session with fault injection")
    s.add_argument("--plan", required=True)
    s.add_argument("--params")
    s.add_argument("--msk")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("bench", help="count group operations against the expected formulas")
    s.add_argument("--signers", type=int, required=True)
    s.add_argument("--receivers", type=int, default=1)
    s.add_argument("--backend", choices=sorted(BACKENDS), default=DEFAULT_BACKEND)
    s.add_argument("--length", type=int, default=32)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.seed is not None and not args.test_mode:
        _err("--seed is only accepted together with --test-mode")
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        _err(f"usage: {exc}")
        return EXIT_USAGE
    except Rejected as exc:
        _err(f"rejected (reason: {exc.reason})")
        return EXIT_VERIFY if exc.reason == "signature" else EXIT_DECODE
    except DecodeError as exc:
        _err(f"decode error (reason: encoding) in {exc}")
        return EXIT_DECODE
    except ProtocolError as exc:
        _err(f"protocol failure: {exc}")
        return EXIT_PROTOCOL
    except (ParameterError, OSError) as exc:
        _err(f"usage: {exc}")
        return EXIT_USAGE
    except IBMSError as exc:  # pragma: no cover
        _err(str(exc))
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
