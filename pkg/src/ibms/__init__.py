"""Identity-based multi-signcryption with public verifiability.

Several signers jointly signcrypt one message to one receiver (:mod:`ibms.core`)
or to several receivers (:mod:`ibms.multi`). Signcryption needs no pairing
evaluation, and anyone can check the aggregate signature without learning the
plaintext.
"""

from .core import (
    IdentityKey,
    MasterSecret,
    Phase,
    Round1Message,
    Round2Message,
    SessionDigest,
    SignerSession,
    Signcryptext,
    SystemParams,
    aggregate,
    extract,
    public_key,
    public_verify,
    setup,
    signcrypt,
    signer_round1,
    signer_round2,
    unsigncrypt,
    verify_partial,
)
from .errors import DecodeError, IBMSError, ParameterError, ProtocolError, Rejected
from .multi import (
    MultiRound1Message,
    MultiSigncryptext,
    mr_aggregate,
    mr_public_verify,
    mr_signcrypt,
    mr_signer_round1,
    mr_signer_round2,
    mr_unsigncrypt,
)
from .pairing import get_backend, measure

__version__ = "0.1.0"

__all__ = [
    "DecodeError",
    "IBMSError",
    "IdentityKey",
    "MasterSecret",
    "MultiRound1Message",
    "MultiSigncryptext",
    "ParameterError",
    "Phase",
    "ProtocolError",
    "Rejected",
    "Round1Message",
    "Round2Message",
    "SessionDigest",
    "SignerSession",
    "Signcryptext",
    "SystemParams",
    "aggregate",
    "extract",
    "get_backend",
    "measure",
    "mr_aggregate",
    "mr_public_verify",
    "mr_signcrypt",
    "mr_signer_round1",
    "mr_signer_round2",
    "mr_unsigncrypt",
    "public_key",
    "public_verify",
    "setup",
    "signcrypt",
    "signer_round1",
    "signer_round2",
    "unsigncrypt",
    "verify_partial",
]
