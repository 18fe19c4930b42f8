"""Exception hierarchy.

Malformed input, protocol misuse and failed verification are kept apart so
callers can tell a broken file from a forgery.
"""


class IBMSError(Exception):
    pass


class ParameterError(IBMSError, ValueError):
    """A caller-supplied argument is out of range (empty identity, wrong length, ...)."""


class ProtocolError(IBMSError):
    """Signer-session misuse: wrong phase, missing or duplicated messages."""


class DecodeError(IBMSError, ValueError):
    """Bytes could not be decoded into a well-formed value."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class Rejected(IBMSError):
    """Unsigncryption refused to release a plaintext.

    ``reason`` is ``"signature"`` when the aggregate signature check failed and
    ``"encoding"`` when the signcryptext could not be decoded.
    """

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(reason if not detail else f"{reason}: {detail}")
        self.reason = reason
