"""In-process simulation of the signers' two broadcast rounds.

The channel is modelled as authenticated, reliable broadcast. Faults can be
injected per signer:

``drop-round1`` / ``drop-round2``
    the signer's message never arrives; the barrier times out.
``corrupt-Z``
    the signer's share becomes Z_i + Q_i; caught by partial verification.
``corrupt-U``
    the signer's U values are shifted by R; caught by the round-1 check.
``corrupt-Y``
    the signer's Y_i is multiplied by theta. Nothing public can catch this:
    sigma verifies but decrypts to garbage.
``delay-reorder``
    the signer's messages arrive last and every inbox is shuffled; the
    outcome must not change.

Everything is deterministic in ``plan.seed``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from . import codec
from .core import (
    IdentityKey,
    SignerSession,
    SystemParams,
    aggregate,
    check_round1,
    extract,
    public_verify,
    signer_round1,
    signer_round2,
    unsigncrypt,
    verify_partial,
)
from .errors import ParameterError, Rejected
from .multi import mr_aggregate, mr_public_verify, mr_signer_round1, mr_signer_round2, mr_unsigncrypt

FAULT_KINDS = ("drop-round1", "drop-round2", "corrupt-Z", "corrupt-Y", "corrupt-U", "delay-reorder")


@dataclass(frozen=True)
class Fault:
    target: bytes
    kind: str


@dataclass
class SessionPlan:
    signer_keys: Sequence[IdentityKey]
    receiver_keys: Sequence[IdentityKey]
    message: bytes
    seed: int = 0
    faults: Sequence[Fault] = ()
    #: None means "multi-receiver iff there is more than one receiver"
    multi: Optional[bool] = None
    check_round1: bool = True

    def __post_init__(self):
        ids = {k.identity for k in self.signer_keys}
        for f in self.faults:
            if f.kind not in FAULT_KINDS:
                raise ParameterError(f"unknown fault kind {f.kind!r}")
            if f.target not in ids:
                raise ParameterError(f"fault target {f.target!r} is not a signer")
        if not self.receiver_keys:
            raise ParameterError("plan has no receiver")
        if self.multi is None:
            self.multi = len(self.receiver_keys) > 1
        elif not self.multi and len(self.receiver_keys) != 1:
            raise ParameterError("single-receiver plan with several receivers")

    def faulty(self, kind: str) -> set[bytes]:
        return {f.target for f in self.faults if f.kind == kind}


@dataclass
class SessionOutcome:
    status: str  # ok | timeout | blamed | rejected | mismatch
    phase: str  # done | round1 | round2 | verify | decrypt
    culprits: tuple[bytes, ...] = ()
    sigma: object = None
    all_agree: Optional[bool] = None
    verified: Optional[bool] = None
    decrypted: dict = field(default_factory=dict)
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_text(self) -> str:
        def ids(xs):
            return ",".join(x.decode(errors="replace") for x in xs) or "-"

        def flag(v):
            return "-" if v is None else str(v).lower()

        lines = [
            f"status {self.status}",
            f"phase {self.phase}",
            f"culprits {ids(self.culprits)}",
            f"agree {flag(self.all_agree)}",
            f"verified {flag(self.verified)}",
        ]
        lines += [f"decrypt {k.decode(errors='replace')} {'match' if v else 'mismatch'}" for k, v in self.decrypted.items()]
        if self.sigma is not None:
            lines.append(f"sigma {codec.encode(self.sigma).hex()}")
        if self.detail:
            lines.append(f"detail {self.detail}")
        return "\n".join(lines) + "\n"


def _deliver(messages: dict, recipients, schedule: random.Random, late: set) -> dict:
    """Per-recipient inbox: on-time messages then late ones, shuffled when anything is late."""
    inboxes = {}
    for who in recipients:
        early = [m for s, m in messages.items() if s not in late]
        delayed = [m for s, m in messages.items() if s in late]
        if late:
            schedule.shuffle(early)
            schedule.shuffle(delayed)
        inboxes[who] = early + delayed
    return inboxes


def run_session(params: SystemParams, plan: SessionPlan) -> SessionOutcome:
    rng = random.Random(plan.seed)
    schedule = random.Random(f"{plan.seed}/schedule")
    multi = plan.multi
    keys = {k.identity: k for k in plan.signer_keys}
    signers = tuple(sorted(keys))
    receivers = sorted(plan.receiver_keys, key=lambda k: k.identity)
    receiver_pubs = [k.public() for k in receivers]
    pubs = [keys[i].public() for i in signers]
    late = plan.faulty("delay-reorder")

    sessions = {i: SignerSession(i, signers, [k.identity for k in receivers]) for i in signers}

    # round 1
    sent = {}
    for i in signers:
        if multi:
            msg = mr_signer_round1(params, sessions[i], receiver_pubs, rng)
        else:
            msg = signer_round1(params, sessions[i], receiver_pubs[0], rng)
        sent[i] = _tamper_round1(params, msg, i in plan.faulty("corrupt-Y"), i in plan.faulty("corrupt-U"), multi)
    dropped = plan.faulty("drop-round1")
    if dropped:
        return SessionOutcome("timeout", "round1", tuple(sorted(dropped)), detail="round-1 barrier never completed")
    inbox1 = _deliver(sent, signers, schedule, late)

    if plan.check_round1:
        bad = sorted(m.sender for m in inbox1[signers[0]] if not check_round1(params, m, receiver_pubs))
        if bad:
            return SessionOutcome("blamed", "round1", tuple(bad), detail="round-1 message inconsistent with X_i")

    # round 2
    shares, digests = {}, {}
    for i in signers:
        round2 = mr_signer_round2 if multi else signer_round2
        z, digests[i] = round2(params, sessions[i], inbox1[i], plan.message, pubs, keys[i])
        if i in plan.faulty("corrupt-Z"):
            z = type(z)(z.sender, z.Z_i + keys[i].Q)
        shares[i] = z
    dropped = plan.faulty("drop-round2")
    if dropped:
        return SessionOutcome("timeout", "round2", tuple(sorted(dropped)), detail="round-2 barrier never completed")
    inbox2 = _deliver(shares, signers, schedule, late)

    sigmas = {}
    for i in signers:
        if multi:
            sigmas[i] = mr_aggregate(params, digests[i], inbox2[i], session=sessions[i])
        else:
            sigmas[i] = aggregate(params, digests[i], inbox2[i], session=sessions[i])
    encodings = {codec.encode(s) for s in sigmas.values()}
    sigma = sigmas[signers[0]]
    agree = len(encodings) == 1

    verified = mr_public_verify(params, sigma) if multi else public_verify(params, sigma)
    if not verified:
        r1_by_sender = {m.sender: m for m in inbox1[signers[0]]}
        pub_by_id = {k.identity: k for k in pubs}
        culprits = tuple(
            z.sender
            for z in sorted(inbox2[signers[0]], key=lambda z: z.sender)
            if not verify_partial(params, z, digests[signers[0]], pub_by_id[z.sender], r1_by_sender[z.sender])
        )
        status = "blamed" if culprits else "rejected"
        return SessionOutcome(status, "round2" if culprits else "verify", culprits, sigma, agree, False)

    decrypted = {}
    for k in receivers:
        if k.S is None:
            continue
        try:
            out = mr_unsigncrypt(params, sigma, k) if multi else unsigncrypt(params, sigma, k)
        except Rejected:
            out = None
        decrypted[k.identity] = out == plan.message
    if not all(decrypted.values()):
        return SessionOutcome(
            "mismatch", "decrypt", (), sigma, agree, True, decrypted, "sigma verifies but does not decrypt to m"
        )
    return SessionOutcome("ok", "done", (), sigma, agree, True, decrypted)


def _tamper_round1(params, msg, corrupt_y: bool, corrupt_u: bool, multi: bool):
    if corrupt_y:
        msg = replace(msg, Y_i=msg.Y_i * params.theta)
    if corrupt_u:
        if multi:
            msg = replace(msg, U_slots=tuple(u + params.R for u in msg.U_slots))
        else:
            msg = replace(msg, U_i=msg.U_i + params.R)
    return msg


# -- text form ------------------------------------------------------------------


@dataclass
class PlanText:
    backend: str = "toy"
    length: int = 32
    seed: int = 0
    signers: list = field(default_factory=list)
    receivers: list = field(default_factory=list)
    message: bytes = b""
    faults: list = field(default_factory=list)
    multi: Optional[bool] = None


def parse_plan(text: str) -> PlanText:
    """Parse the line-oriented plan format::

        # comment
        backend toy            # or bls12-381
        length 32
        seed 7
        signer alice           # repeatable; "signers a b c" also works
        receiver dave          # repeatable
        multi yes              # optional; force the multi-receiver variant
        message text:hello     # or hex:68656c6c6f ; padded to length
        fault bob corrupt-Z    # repeatable
    """
    plan = PlanText()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if key == "backend":
                plan.backend = rest
            elif key == "length":
                plan.length = int(rest)
            elif key == "seed":
                plan.seed = int(rest)
            elif key in ("signer", "signers"):
                plan.signers += [s.encode() for s in rest.split()]
            elif key in ("receiver", "receivers"):
                plan.receivers += [s.encode() for s in rest.split()]
            elif key == "multi":
                plan.multi = rest.lower() in ("1", "yes", "true")
            elif key == "message":
                kind, _, payload = rest.partition(":")
                if kind == "text":
                    plan.message = payload.encode()
                elif kind == "hex":
                    plan.message = bytes.fromhex(payload)
                else:
                    raise ValueError("message must be text:... or hex:...")
            elif key == "fault":
                target, kind = rest.split()
                plan.faults.append(Fault(target.encode(), kind))
            else:
                raise ValueError(f"unknown directive {key!r}")
        except ValueError as exc:
            raise ParameterError(f"plan line {lineno}: {exc}") from None
    if not plan.signers or not plan.receivers:
        raise ParameterError("plan needs at least one signer and one receiver")
    return plan


def build_plan(text: PlanText, params: SystemParams, msk) -> SessionPlan:
    """Issue keys with the PKG's master secret and pad the message to params.l."""
    message = codec.pad_message(text.message, params.l)
    return SessionPlan(
        signer_keys=[extract(params, msk, i) for i in text.signers],
        receiver_keys=[extract(params, msk, i) for i in text.receivers],
        message=message,
        seed=text.seed,
        faults=text.faults,
        multi=text.multi,
    )
