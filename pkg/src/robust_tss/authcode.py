"""Secret authentication: AMD tags, HMAC, and Encrypt-then-MAC.

The encoded secret is one bit-vector ``payload || tag``: the (possibly
encrypted) secret occupies the high bits and the MAC tag the low bits, so the
secret ``0x3F0`` with AMD tag ``0x1`` encodes to ``0x3F01``.
"""

from __future__ import annotations

import hashlib
import hmac as _hmac
from dataclasses import dataclass

from .gf2b import FieldSpec

__all__ = [
    "AmdParams",
    "AuthenticationError",
    "EncodedSecret",
    "EtmScheme",
    "MacKey",
    "amd_encode",
    "amd_tag",
    "amd_verify",
    "etm_decode",
    "etm_encode",
    "hmac_sign",
    "hmac_verify",
    "keystream",
]

_IPAD = 0x36
_OPAD = 0x5C


class AuthenticationError(Exception):
    """Tag mismatch: the encoded secret was manipulated or the key is wrong."""


@dataclass(frozen=True)
class MacKey:
    """A key as a bit-vector of ``bits`` bits (a PUF response, typically)."""

    value: int
    bits: int

    def __post_init__(self):
        if self.bits < 1 or not 0 <= self.value < (1 << self.bits):
            raise ValueError(f"{self.value:#x} does not fit in {self.bits} bits")

    def to_bytes(self) -> bytes:
        return self.value.to_bytes((self.bits + 7) // 8, "big")

    def amd_element(self, block_bits: int) -> int:
        """Low ``block_bits`` bits, used as the AMD field element."""
        return self.value & ((1 << block_bits) - 1)


@dataclass(frozen=True)
class AmdParams:
    block_bits: int
    block_count: int

    def __post_init__(self):
        if self.block_count < 1:
            raise ValueError("block_count must be >= 1")
        if self.block_count >= 1 << self.block_bits:
            raise ValueError("block_count must be < 2^block_bits")

    @property
    def field(self) -> FieldSpec:
        return FieldSpec.builtin(self.block_bits)

    @property
    def secret_bits(self) -> int:
        return self.block_bits * self.block_count

    @property
    def miss_bound(self) -> float:
        return self.block_count / 2**self.block_bits


@dataclass(frozen=True)
class EncodedSecret:
    payload: int
    payload_bits: int
    tag: int
    tag_bits: int

    def __post_init__(self):
        if not 0 <= self.payload < (1 << self.payload_bits):
            raise ValueError("payload wider than payload_bits")
        if not 0 <= self.tag < (1 << self.tag_bits):
            raise ValueError("tag wider than tag_bits")

    @property
    def width(self) -> int:
        return self.payload_bits + self.tag_bits

    @property
    def value(self) -> int:
        return (self.payload << self.tag_bits) | self.tag

    @classmethod
    def from_int(cls, value: int, payload_bits: int, tag_bits: int) -> "EncodedSecret":
        if value >> (payload_bits + tag_bits):
            raise ValueError("value wider than the declared layout")
        return cls(value >> tag_bits, payload_bits, value & ((1 << tag_bits) - 1), tag_bits)

    def hex(self) -> str:
        return f"0x{self.value:0{(self.width + 3) // 4}x}"


# ---------------------------------------------------------------------------
# AMD

def _amd_key(key, params: AmdParams) -> int:
    k = key.amd_element(params.block_bits) if isinstance(key, MacKey) else int(key)
    if k == 0:
        raise ValueError("AMD key must be nonzero")
    params.field.check(k)
    return k


def amd_tag(key: int, secret: int, params: AmdParams) -> int:
    """sum over i=1..g of S_{i-1} * K^i, with S_0 the most significant block."""
    b, g = params.block_bits, params.block_count
    if not 0 <= secret < (1 << (b * g)):
        raise ValueError(f"secret must be {b * g} bits")
    f = params.field
    mask = f.mask
    tag = 0
    kp = 1
    for i in range(1, g + 1):
        kp = f.mul(kp, key)
        block = (secret >> (b * (g - i))) & mask
        tag ^= f.mul(block, kp)
    return tag


def amd_encode(key, secret: int, params: AmdParams) -> EncodedSecret:
    k = _amd_key(key, params)
    return EncodedSecret(secret, params.secret_bits, amd_tag(k, secret, params), params.block_bits)


def amd_verify(key, encoded: EncodedSecret, params: AmdParams) -> bool:
    if encoded.payload_bits != params.secret_bits or encoded.tag_bits != params.block_bits:
        raise ValueError("encoded secret layout does not match AMD parameters")
    k = _amd_key(key, params)
    return amd_tag(k, encoded.payload, params) == encoded.tag


# ---------------------------------------------------------------------------
# HMAC

def hmac_sign(key: bytes, message: bytes, hash_name: str = "sha256") -> bytes:
    """H((K' xor opad) || H((K' xor ipad) || message))."""
    block = hashlib.new(hash_name).block_size
    if len(key) > block:
        key = hashlib.new(hash_name, key).digest()
    key = key.ljust(block, b"\x00")
    inner = hashlib.new(hash_name, bytes(k ^ _IPAD for k in key) + message).digest()
    return hashlib.new(hash_name, bytes(k ^ _OPAD for k in key) + inner).digest()


def hmac_verify(key: bytes, message: bytes, tag: bytes, hash_name: str = "sha256") -> bool:
    expected = hmac_sign(key, message, hash_name)
    return _hmac.compare_digest(expected[: len(tag)], tag) and len(tag) > 0


# ---------------------------------------------------------------------------
# Encrypt-then-MAC

def keystream(key: MacKey, nbits: int) -> int:
    """``nbits`` of SHA-256(key || counter) output."""
    nbytes = (nbits + 7) // 8
    out = b""
    counter = 0
    kb = key.to_bytes()
    while len(out) < nbytes:
        out += hashlib.sha256(kb + counter.to_bytes(4, "big")).digest()
        counter += 1
    return int.from_bytes(out[:nbytes], "big") & ((1 << nbits) - 1)


@dataclass(frozen=True)
class EtmScheme:
    """How a secret becomes ``ENC(K, S) || MAC(K, ENC(K, S))``.

    For ``mac="amd"`` the secret is ``block_count`` blocks of ``block_bits``
    and the tag one block. For ``mac="hmac"`` the secret width is
    ``secret_bits`` and the SHA-256 tag is truncated to ``tag_bits``.
    """

    mac: str = "amd"
    cipher: str = "null"
    block_bits: int = 4
    block_count: int = 3
    secret_bits: int | None = None
    tag_bits: int | None = None

    def __post_init__(self):
        if self.mac not in ("amd", "hmac"):
            raise ValueError(f"unknown mac {self.mac!r}")
        if self.cipher not in ("null", "keystream"):
            raise ValueError(f"unknown cipher {self.cipher!r}")
        if self.mac == "amd":
            AmdParams(self.block_bits, self.block_count)
        else:
            if self.secret_bits is None or self.secret_bits < 1:
                raise ValueError("hmac scheme needs secret_bits")
            if self.tag_bits is None or not 1 <= self.tag_bits <= 256:
                raise ValueError("hmac tag_bits must be in 1..256")

    @property
    def amd(self) -> AmdParams:
        return AmdParams(self.block_bits, self.block_count)

    @property
    def payload_bits(self) -> int:
        return self.block_bits * self.block_count if self.mac == "amd" else self.secret_bits

    @property
    def mac_bits(self) -> int:
        return self.block_bits if self.mac == "amd" else self.tag_bits

    @property
    def width(self) -> int:
        return self.payload_bits + self.mac_bits

    @property
    def miss_bound(self) -> float:
        if self.mac == "amd":
            return self.amd.miss_bound
        return 2.0 ** -self.tag_bits

    def to_header(self) -> dict:
        return {
            "mac": self.mac,
            "cipher": self.cipher,
            "g": self.block_count,
            "b": self.block_bits,
            "secret_bits": self.payload_bits,
            "tag_bits": self.mac_bits,
        }

    @classmethod
    def from_header(cls, doc: dict) -> "EtmScheme":
        if doc["mac"] == "amd":
            return cls("amd", doc["cipher"], int(doc["b"]), int(doc["g"]))
        return cls(
            "hmac", doc["cipher"], secret_bits=int(doc["secret_bits"]), tag_bits=int(doc["tag_bits"])
        )

    def key_usable(self, key: MacKey) -> bool:
        """AMD needs a nonzero field element; any HMAC key works."""
        return self.mac != "amd" or key.amd_element(self.block_bits) != 0

    def _mac(self, key: MacKey, payload: int) -> int:
        if self.mac == "amd":
            return amd_tag(_amd_key(key, self.amd), payload, self.amd)
        msg = payload.to_bytes((self.payload_bits + 7) // 8, "big")
        digest = int.from_bytes(hmac_sign(key.to_bytes(), msg), "big")
        return digest >> (256 - self.tag_bits)

    def _pad(self, key: MacKey) -> int:
        return keystream(key, self.payload_bits) if self.cipher == "keystream" else 0


def etm_encode(key: MacKey, secret: int, scheme: EtmScheme) -> EncodedSecret:
    if not 0 <= secret < (1 << scheme.payload_bits):
        raise ValueError(f"secret must fit in {scheme.payload_bits} bits")
    payload = secret ^ scheme._pad(key)
    return EncodedSecret(payload, scheme.payload_bits, scheme._mac(key, payload), scheme.mac_bits)


def etm_decode(key: MacKey, encoded, scheme: EtmScheme) -> int:
    """Verify, then decrypt. ``encoded`` may be an :class:`EncodedSecret` or an int.

    Raises :class:`AuthenticationError` on any mismatch, including bits set
    above the declared layout.
    """
    if not isinstance(encoded, EncodedSecret):
        value = int(encoded)
        if value >> scheme.width:
            raise AuthenticationError("encoded secret has bits beyond its layout")
        encoded = EncodedSecret.from_int(value, scheme.payload_bits, scheme.mac_bits)
    if encoded.payload_bits != scheme.payload_bits or encoded.tag_bits != scheme.mac_bits:
        raise ValueError("encoded secret layout does not match the scheme")
    if not scheme.key_usable(key):
        raise AuthenticationError("key is not usable for this MAC")
    n = (scheme.mac_bits + 7) // 8
    expected = scheme._mac(key, encoded.payload)
    if not _hmac.compare_digest(expected.to_bytes(n, "big"), encoded.tag.to_bytes(n, "big")):
        raise AuthenticationError("tag mismatch")
    return encoded.payload ^ scheme._pad(key)
