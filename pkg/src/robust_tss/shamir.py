"""Threshold sharing with the challenge as free coefficient and the encoded
secret as leading coefficient.

A dealing evaluates ``CHL + a1*x + ... + a_{t-2}*x^(t-2) + E*x^(t-1)`` at each
holder's public ID. Any ``t`` shares give back both ``E`` (leading
coefficient) and ``CHL`` (value at zero).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Sequence

import numpy as np

from .gf2b import FieldElement, FieldMismatchError, FieldSpec

__all__ = [
    "DealingParams",
    "Share",
    "deal",
    "read_share_file",
    "reconstruct_free",
    "reconstruct_leading",
    "write_share_file",
]


@dataclass(frozen=True)
class Share:
    id: FieldElement
    value: FieldElement

    def __post_init__(self):
        if self.id.field != self.value.field:
            raise FieldMismatchError("share id and value live in different fields")
        if self.id.value == 0:
            raise ValueError("share id 0 is reserved for the challenge")

    @property
    def field(self) -> FieldSpec:
        return self.id.field


@dataclass
class DealingParams:
    """Threshold, holder IDs and the middle coefficients a_1..a_{t-2}.

    ``seed`` records where random middle coefficients came from so a dealing
    can be replayed; it is ``None`` when the caller supplied them.
    """

    threshold: int
    ids: list[FieldElement]
    middle_coeffs: list[FieldElement] = dc_field(default_factory=list)
    seed: int | None = None

    def __post_init__(self):
        if self.threshold < 2:
            raise ValueError("threshold must be at least 2")
        if len(self.ids) < self.threshold:
            raise ValueError("threshold exceeds holders")
        _check_ids(self.ids)
        if len(self.middle_coeffs) != self.threshold - 2:
            raise ValueError(
                f"expected {self.threshold - 2} middle coefficients, "
                f"got {len(self.middle_coeffs)}"
            )

    @property
    def holder_count(self) -> int:
        return len(self.ids)

    @classmethod
    def random(
        cls,
        field: FieldSpec,
        holders: int,
        threshold: int,
        seed: int,
        ids: Sequence[int] | None = None,
    ) -> "DealingParams":
        """IDs ``1..n`` (unless given) and seeded random middle coefficients."""
        rng = np.random.default_rng(seed)
        if ids is None:
            ids = range(1, holders + 1)
        middle = [field.element(field.random(rng)) for _ in range(threshold - 2)]
        return cls(threshold, [field.element(i) for i in ids], middle, seed)


def _check_ids(ids: Sequence[FieldElement]) -> None:
    values = [i.value for i in ids]
    if 0 in values:
        raise ValueError("holder id 0 is forbidden")
    if len(set(values)) != len(values):
        raise ValueError("holder ids must be distinct")


def deal(encoded_secret: FieldElement, challenge: FieldElement, params: DealingParams) -> list[Share]:
    """Evaluate the dealing polynomial at every holder ID."""
    f = encoded_secret.field
    coeffs = [challenge, *params.middle_coeffs, encoded_secret]
    for c in coeffs + params.ids:
        if c.field != f:
            raise FieldMismatchError(f"{c.field!r} vs {f!r}")
    raw = [c.value for c in coeffs]
    return [Share(i, f.element(f.poly_eval(raw, i.value))) for i in params.ids]


def _lagrange_inputs(shares: Sequence[Share], threshold: int | None):
    if not shares:
        raise ValueError("no shares given")
    if threshold is not None and len(shares) != threshold:
        raise ValueError(f"need exactly {threshold} shares, got {len(shares)}")
    f = shares[0].field
    for s in shares:
        if s.field != f:
            raise FieldMismatchError("shares from different fields")
    _check_ids([s.id for s in shares])
    return f, [s.id.value for s in shares], [s.value.value for s in shares]


def _denominators(f: FieldSpec, xs: Sequence[int]) -> list[int]:
    out = []
    for i, xi in enumerate(xs):
        d = 1
        for j, xj in enumerate(xs):
            if j != i:
                d = f.mul(d, xi ^ xj)
        out.append(d)
    return out


def reconstruct_leading(shares: Sequence[Share], threshold: int | None = None) -> FieldElement:
    """Leading coefficient: sum of h_i / prod_{j!=i}(D_i + D_j)."""
    f, xs, ys = _lagrange_inputs(shares, threshold)
    acc = 0
    for y, d in zip(ys, _denominators(f, xs)):
        acc ^= f.div(y, d)
    return f.element(acc)


def reconstruct_free(shares: Sequence[Share], threshold: int | None = None) -> FieldElement:
    """Free coefficient: sum of h_i * prod_{j!=i} D_j / prod_{j!=i}(D_i + D_j)."""
    f, xs, ys = _lagrange_inputs(shares, threshold)
    acc = 0
    for i, (y, d) in enumerate(zip(ys, _denominators(f, xs))):
        num = y
        for j, xj in enumerate(xs):
            if j != i:
                num = f.mul(num, xj)
        acc ^= f.div(num, d)
    return f.element(acc)


# ---------------------------------------------------------------------------
# share files

def write_share_file(path, shares: Sequence[Share], threshold: int, header: dict | None = None) -> None:
    """Write shares as JSON. ``header`` carries scheme metadata (mac, cipher, g, b)."""
    f = shares[0].field
    doc = {
        "field_bits": f.width_bits,
        "reduction_poly_hex": hex(f.reduction_poly),
        "threshold": threshold,
    }
    if header:
        doc.update(header)
    doc["shares"] = [{"id_hex": s.id.hex(), "value_hex": s.value.hex()} for s in shares]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_share_file(path) -> tuple[list[Share], dict]:
    """Return the shares and the remaining header fields."""
    doc = json.loads(Path(path).read_text())
    f = FieldSpec(int(doc.pop("field_bits")), int(doc.pop("reduction_poly_hex"), 16))
    shares = [
        Share(f.element(f.parse_hex(s["id_hex"])), f.element(f.parse_hex(s["value_hex"])))
        for s in doc.pop("shares")
    ]
    doc["field"] = f
    return shares, doc
