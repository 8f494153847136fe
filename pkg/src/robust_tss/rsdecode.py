"""Share correction: treat n shares as a Reed-Solomon codeword and decode.

The shares of a dealing are evaluations of a degree ``t-1`` polynomial at the
holders' IDs, i.e. a codeword of an (n, t, n-t+1) RS code with arbitrary
evaluation points. Berlekamp-Welch corrects up to ``(n-t)//2`` of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .gf2b import FieldElement, FieldMismatchError, FieldSpec

__all__ = [
    "CodewordView",
    "CorrectionResult",
    "DecodeFailure",
    "berlekamp_welch",
    "correct_shares",
    "framing_demo",
    "solve_linear",
]


class DecodeFailure(Exception):
    """More corrupted shares than the code can correct."""


@dataclass(frozen=True)
class CodewordView:
    ids: tuple[FieldElement, ...]
    values: tuple[FieldElement, ...]
    dimension: int

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.ids) != len(self.values):
            raise ValueError("ids and values differ in length")
        if len(self.ids) < self.dimension:
            raise ValueError("fewer symbols than the code dimension")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        f = self.field
        for x in self.ids + self.values:
            if x.field != f:
                raise FieldMismatchError("codeword mixes fields")
        xs = [i.value for i in self.ids]
        if 0 in xs or len(set(xs)) != len(xs):
            raise ValueError("ids must be distinct and nonzero")

    @classmethod
    def from_shares(cls, shares, threshold: int) -> "CodewordView":
        return cls(tuple(s.id for s in shares), tuple(s.value for s in shares), threshold)

    @property
    def field(self) -> FieldSpec:
        return self.ids[0].field

    @property
    def length(self) -> int:
        return len(self.ids)

    @property
    def radius(self) -> int:
        return (self.length - self.dimension) // 2


@dataclass(frozen=True)
class CorrectionResult:
    corrected_values: tuple[FieldElement, ...]
    error_positions: frozenset[int]
    recovered_poly: tuple[FieldElement, ...]

    @property
    def leading(self) -> FieldElement:
        return self.recovered_poly[-1]

    @property
    def free(self) -> FieldElement:
        return self.recovered_poly[0]


def solve_linear(f: FieldSpec, rows: list[list[int]], rhs: list[int]) -> list[int] | None:
    """Gauss-Jordan elimination over GF(2^b).

    Returns one solution (free variables set to zero), or ``None`` if the
    system is inconsistent.
    """
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = f.inv(m[r][c])
        m[r] = [f.mul(v, inv) for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                factor = m[i][c]
                m[i] = [a ^ f.mul(factor, b) for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    if any(row[-1] for row in m[r:]):
        return None
    sol = [0] * ncols
    for i, c in enumerate(pivots):
        sol[c] = m[i][-1]
    return sol


def berlekamp_welch(f: FieldSpec, xs: Sequence[int], ys: Sequence[int], k: int, e: int) -> list[int] | None:
    """Try to decode assuming at most ``e`` errors; return k coefficients or None."""
    n = len(xs)
    rows, rhs = [], []
    for x, y in zip(xs, ys):
        powers = [1]
        for _ in range(max(k + e - 1, e)):
            powers.append(f.mul(powers[-1], x))
        row = powers[: k + e] + [f.mul(y, powers[j]) for j in range(e)]
        rows.append(row)
        rhs.append(f.mul(y, powers[e]))
    sol = solve_linear(f, rows, rhs)
    if sol is None:
        return None
    numer = sol[: k + e]
    locator = sol[k + e :] + [1]
    quot, rem = f.poly_divmod(numer, locator)
    if rem or len(quot) > k:
        return None
    quot = quot + [0] * (k - len(quot))
    wrong = sum(1 for x, y in zip(xs, ys) if f.poly_eval(quot, x) != y)
    if wrong > e or wrong > (n - k) // 2:
        return None
    return quot


def correct_shares(view: CodewordView) -> CorrectionResult:
    """Decode the submitted shares; raise :class:`DecodeFailure` beyond the radius.

    The assumed error count starts at ``(n-t)//2`` and decreases to zero
    until the key equation has a consistent solution.
    """
    f = view.field
    xs = [i.value for i in view.ids]
    ys = [v.value for v in view.values]
    k = view.dimension
    for e in range(view.radius, -1, -1):
        poly = berlekamp_welch(f, xs, ys, k, e)
        if poly is not None:
            corrected = [f.poly_eval(poly, x) for x in xs]
            errors = frozenset(i for i, (a, b) in enumerate(zip(corrected, ys)) if a != b)
            return CorrectionResult(
                tuple(f.element(v) for v in corrected),
                errors,
                tuple(f.element(c) for c in poly),
            )
    raise DecodeFailure(f"more than {view.radius} corrupted shares among {view.length}")


def framing_demo(view: CodewordView) -> CorrectionResult:
    """Run the plain decoder on a codeword an aligned coalition controls.

    When the cheaters all submit evaluations of one forged polynomial and the
    honest holders number at most ``(n-t)//2``, the decoder "corrects" the
    honest shares onto the forged polynomial and reports the honest holders
    as the errors. Nothing here detects that; only secret verification does.
    """
    return correct_shares(view)
