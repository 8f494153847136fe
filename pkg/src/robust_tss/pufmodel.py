"""Software PUF, CRP repository, and a repetition-code fuzzy extractor.

The device is modelled as a keyed pseudorandom function of the challenge:
``device_secret`` stands in for manufacturing variation. Reads can be noisy;
the fuzzy extractor (code-offset construction over a repetition code) turns
a noisy read back into the enrolled key.

Enrollment is a dealer-side action: it queries the device noiselessly,
derives a key plus helper data per challenge, keeps ``(challenge, key)`` in
the repository and hands the helper data to the client.
"""

from __future__ import annotations

import hashlib
import hmac
import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Mapping

import numpy as np

__all__ = [
    "ChallengeResponsePair",
    "CrpExhausted",
    "CrpRepository",
    "HelperData",
    "PufDevice",
    "crp_enroll",
    "fe_generate",
    "fe_reproduce",
    "majority_error_rate",
    "puf_noisy_response",
    "puf_response",
]


@dataclass(frozen=True)
class PufDevice:
    device_secret: bytes
    challenge_bits: int = 16
    response_bits: int = 80
    noise_rate: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.noise_rate < 1.0:
            raise ValueError("noise_rate must be in [0, 1)")

    @classmethod
    def from_seed(cls, seed: int, **kwargs) -> "PufDevice":
        rng = np.random.default_rng(seed)
        return cls(rng.bytes(32), **kwargs)


def puf_response(device: PufDevice, challenge) -> int:
    """Noiseless response bits for ``challenge``."""
    c = int(challenge)
    if not 0 <= c < (1 << device.challenge_bits):
        raise ValueError(f"challenge {c:#x} wider than {device.challenge_bits} bits")
    msg = c.to_bytes((device.challenge_bits + 7) // 8, "big")
    nbytes = (device.response_bits + 7) // 8
    out = b""
    counter = 0
    while len(out) < nbytes:
        out += hmac.new(device.device_secret, msg + counter.to_bytes(4, "big"), hashlib.sha256).digest()
        counter += 1
    return int.from_bytes(out[:nbytes], "big") & ((1 << device.response_bits) - 1)


def puf_noisy_response(device: PufDevice, challenge, rng: np.random.Generator) -> int:
    """A read with each bit flipped independently with probability ``noise_rate``."""
    r = puf_response(device, challenge)
    if device.noise_rate == 0.0:
        return r
    flips = rng.random(device.response_bits) < device.noise_rate
    mask = 0
    for k in np.flatnonzero(flips):
        mask |= 1 << int(k)
    return r ^ mask


# ---------------------------------------------------------------------------
# fuzzy extractor

@dataclass(frozen=True)
class HelperData:
    """Code offset ``response XOR Rep_r(key)``; repetition factor ``r`` is odd."""

    offset: int
    key_bits: int
    repetition: int = 5


def _rep_encode(key: int, key_bits: int, r: int) -> int:
    block = (1 << r) - 1
    out = 0
    for j in range(key_bits):
        if key >> j & 1:
            out |= block << (j * r)
    return out


def fe_generate(
    response: int,
    response_bits: int,
    rng: np.random.Generator | None = None,
    repetition: int = 5,
    key: int | None = None,
) -> tuple[int, HelperData]:
    """Derive ``(key, helper)`` from a noiseless response.

    The key is fresh randomness from ``rng`` unless pinned by ``key``.
    """
    if repetition < 1 or repetition % 2 == 0:
        raise ValueError("repetition factor must be odd")
    key_bits = response_bits // repetition
    if key_bits < 1:
        raise ValueError("response too short for this repetition factor")
    if key is None:
        if rng is None:
            raise ValueError("need rng or an explicit key")
        key = int.from_bytes(rng.bytes((key_bits + 7) // 8), "big") & ((1 << key_bits) - 1)
    if not 0 <= key < (1 << key_bits):
        raise ValueError(f"key wider than {key_bits} bits")
    used = (1 << (key_bits * repetition)) - 1
    offset = (response & used) ^ _rep_encode(key, key_bits, repetition)
    return key, HelperData(offset, key_bits, repetition)


def fe_reproduce(noisy_response: int, helper: HelperData) -> int:
    """Majority-decode each repetition block of ``noisy XOR offset``."""
    r = helper.repetition
    word = noisy_response ^ helper.offset
    block = (1 << r) - 1
    key = 0
    for j in range(helper.key_bits):
        if ((word >> (j * r)) & block).bit_count() > r // 2:
            key |= 1 << j
    return key


def majority_error_rate(p: float, r: int) -> float:
    """Probability that more than r//2 of r independent p-noisy copies flip."""
    from math import comb

    return sum(comb(r, k) * p**k * (1 - p) ** (r - k) for k in range(r // 2 + 1, r + 1))


# ---------------------------------------------------------------------------
# CRP repository

class CrpExhausted(LookupError):
    """No unused challenge-response pair is left for this client."""


@dataclass
class ChallengeResponsePair:
    challenge: int
    response: int
    used: bool = False


@dataclass
class CrpRepository:
    """Dealer-side store of enrolled pairs; each pair is drawn at most once."""

    pairs: dict[str, list[ChallengeResponsePair]] = dc_field(default_factory=dict)
    key_bits: dict[str, int] = dc_field(default_factory=dict)

    def add(self, client_id: str, challenge: int, response: int) -> None:
        entries = self.pairs.setdefault(client_id, [])
        if any(p.challenge == challenge for p in entries):
            raise ValueError(f"challenge {challenge:#x} already enrolled")
        entries.append(ChallengeResponsePair(challenge, response))

    def unused(self, client_id: str) -> int:
        return sum(not p.used for p in self.pairs.get(client_id, []))

    def draw(self, client_id: str) -> ChallengeResponsePair:
        for p in self.pairs.get(client_id, []):
            if not p.used:
                p.used = True
                return p
        raise CrpExhausted(f"no unused CRP for client {client_id!r}")

    def to_json(self, client_id: str) -> str:
        kb = self.key_bits.get(client_id, 16)
        digits = (kb + 3) // 4
        return json.dumps(
            {
                "client_id": client_id,
                "key_bits": kb,
                "pairs": [
                    {
                        "challenge_hex": hex(p.challenge),
                        "response_hex": f"0x{p.response:0{digits}x}",
                        "used": p.used,
                    }
                    for p in self.pairs.get(client_id, [])
                ],
            },
            indent=2,
        )

    def save(self, path, client_id: str) -> None:
        Path(path).write_text(self.to_json(client_id) + "\n")

    @classmethod
    def from_json(cls, text: str) -> "CrpRepository":
        doc = json.loads(text)
        cid = doc["client_id"]
        repo = cls()
        repo.key_bits[cid] = int(doc.get("key_bits", 16))
        repo.pairs[cid] = [
            ChallengeResponsePair(int(p["challenge_hex"], 16), int(p["response_hex"], 16), bool(p["used"]))
            for p in doc["pairs"]
        ]
        return repo

    @classmethod
    def load(cls, path) -> "CrpRepository":
        return cls.from_json(Path(path).read_text())


def crp_enroll(
    repo: CrpRepository,
    device: PufDevice,
    count: int,
    rng: np.random.Generator,
    client_id: str = "client",
    repetition: int = 5,
    pinned: Mapping[int, int] | None = None,
) -> dict[int, HelperData]:
    """Enroll ``count`` fresh random challenges (plus any ``pinned`` ones).

    ``pinned`` maps challenge -> key and forces those keys through the fuzzy
    extractor, so a known pair such as ``0xAAAA -> 0x0006`` survives any
    ``device_secret``. Pinned pairs are enrolled first and drawn first.

    Returns the helper data, which belongs to the client.
    """
    if count < 0 or (count == 0 and not pinned):
        raise ValueError("count must be >= 1")
    helpers: dict[int, HelperData] = {}
    taken = {p.challenge for p in repo.pairs.get(client_id, [])}
    todo: list[tuple[int, int | None]] = list((pinned or {}).items())
    while len(todo) < len(pinned or {}) + count:
        c = int.from_bytes(rng.bytes((device.challenge_bits + 7) // 8), "big")
        c &= (1 << device.challenge_bits) - 1
        if c in taken or c in (pinned or {}):
            continue
        taken.add(c)
        todo.append((c, None))
    for c, key in todo:
        w = puf_response(device, c)
        k, helper = fe_generate(w, device.response_bits, rng, repetition, key=key)
        repo.add(client_id, c, k)
        helpers[c] = helper
    repo.key_bits[client_id] = device.response_bits // repetition
    return helpers
