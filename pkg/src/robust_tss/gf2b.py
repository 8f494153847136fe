"""Binary extension field arithmetic GF(2^b).

Elements are polynomials over GF(2) packed into Python ints: bit ``k`` is the
coefficient of ``x**k``. Addition is XOR; multiplication is carry-less
shift-and-XOR with reduction by the field's degree-``b`` polynomial.
``mul_reference`` is that textbook path. ``mul`` uses log/exp tables up to
b=16 and a big-integer carry-less product above; both are tested against it.

Two layers are exposed:

* :class:`FieldSpec` works on plain ints and is what the heavy algorithms
  (interpolation, Berlekamp-Welch) use internally.
* :class:`FieldElement` wraps an int together with its field so that values
  from different fields cannot be mixed by accident.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "BUILTIN_POLYS",
    "FieldElement",
    "FieldMismatchError",
    "FieldSpec",
    "clmul",
    "clmul_fast",
    "find_irreducible",
    "gf_add",
    "gf_inv",
    "gf_mul",
    "is_irreducible",
    "poly_eval",
]

# Reduction polynomials, stored with the x^b term.
BUILTIN_POLYS = {
    3: 0b1011,  # x^3 + x + 1
    4: 0x13,  # x^4 + x + 1
    8: 0x11B,  # x^8 + x^4 + x^3 + x + 1
    16: 0x1002D,  # x^16 + x^5 + x^3 + x^2 + 1
    32: (1 << 32) | 0x8D,  # x^32 + x^7 + x^3 + x^2 + 1
    64: (1 << 64) | 0x1B,  # x^64 + x^4 + x^3 + x + 1
    128: (1 << 128) | 0x87,  # x^128 + x^7 + x^2 + x + 1
}

_TRIAL_DIVISION_LIMIT = 16
_TABLE_LIMIT = 16


class FieldMismatchError(ValueError):
    """Raised when elements of two different fields meet in one operation."""


# ---------------------------------------------------------------------------
# GF(2)[x] helpers on packed ints

def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials (no reduction)."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


# Spread each bit into its own byte, multiply as integers, keep each byte's
# parity. Byte slots cannot overflow while the shorter operand has < 256 bits.
_TO_SLOTS = bytes.maketrans(b"01", b"\x00\x01")
_SLOT_PARITY = bytes(ord("0") + (i & 1) for i in range(256))


def clmul_fast(a: int, b: int) -> int:
    """Carry-less product via one big-integer multiply; equals :func:`clmul`."""
    if not a or not b:
        return 0
    if min(a.bit_length(), b.bit_length()) > 255:
        return clmul(a, b)
    sa = format(a, "b").encode().translate(_TO_SLOTS)
    sb = format(b, "b").encode().translate(_TO_SLOTS)
    prod = int.from_bytes(sa, "big") * int.from_bytes(sb, "big")
    n = len(sa) + len(sb) - 1
    return int(prod.to_bytes(n, "big").translate(_SLOT_PARITY), 2)


def _gf2_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def _gf2_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _gf2_mod(a, b)
    return a


def _gf2_mulmod(a: int, b: int, m: int) -> int:
    return _gf2_mod(clmul(a, b), m)


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _irreducible_trial_division(poly: int) -> bool:
    deg = poly.bit_length() - 1
    for d in range(2, 1 << (deg // 2 + 1)):
        if _gf2_mod(poly, d) == 0:
            return False
    return True


def is_irreducible(poly: int) -> bool:
    """Rabin's irreducibility test for a GF(2)[x] polynomial packed in an int."""
    n = poly.bit_length() - 1
    if n < 1:
        return False

    def x_pow_2k(k: int) -> int:
        r = 0b10
        for _ in range(k):
            r = _gf2_mulmod(r, r, poly)
        return r

    if x_pow_2k(n) != _gf2_mod(0b10, poly):
        return False
    for q in _prime_factors(n):
        if _gf2_gcd(poly, x_pow_2k(n // q) ^ 0b10) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def find_irreducible(width_bits: int) -> int:
    """Lowest-weight irreducible of the given degree (trinomials, then pentanomials)."""
    top = 1 << width_bits
    for k in range(1, width_bits):
        p = top | (1 << k) | 1
        if is_irreducible(p):
            return p
    for k3 in range(3, width_bits):
        for k2 in range(2, k3):
            for k1 in range(1, k2):
                p = top | (1 << k3) | (1 << k2) | (1 << k1) | 1
                if is_irreducible(p):
                    return p
    raise ValueError(f"no trinomial or pentanomial of degree {width_bits}")


@lru_cache(maxsize=64)
def _checked_irreducible(poly: int) -> bool:
    return _irreducible_trial_division(poly)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """The field GF(2^width_bits) modulo ``reduction_poly``.

    For ``width_bits <= 16`` the polynomial is checked for irreducibility by
    trial division at construction; wider polynomials are trusted.
    """

    width_bits: int
    reduction_poly: int

    def __post_init__(self):
        if self.width_bits < 2:
            raise ValueError("width_bits must be >= 2")
        if self.reduction_poly.bit_length() - 1 != self.width_bits:
            raise ValueError(
                f"reduction polynomial {self.reduction_poly:#x} does not have "
                f"degree {self.width_bits}"
            )
        if self.width_bits <= _TRIAL_DIVISION_LIMIT and not _checked_irreducible(
            self.reduction_poly
        ):
            raise ValueError(f"{self.reduction_poly:#x} is reducible")

    @classmethod
    def builtin(cls, width_bits: int) -> "FieldSpec":
        """Field from the built-in table, falling back to a searched irreducible."""
        return _builtin_field(width_bits)

    # -- basic properties ---------------------------------------------------

    @property
    def order(self) -> int:
        return 1 << self.width_bits

    @property
    def mask(self) -> int:
        return self.order - 1

    @property
    def hex_digits(self) -> int:
        return (self.width_bits + 3) // 4

    def __repr__(self) -> str:
        return f"GF(2^{self.width_bits})/{self.reduction_poly:#x}"

    def check(self, value: int) -> int:
        if not 0 <= value < self.order:
            raise ValueError(f"{value:#x} is not a {self.width_bits}-bit value")
        return value

    def hex(self, value: int) -> str:
        return f"0x{value:0{self.hex_digits}x}"

    def parse_hex(self, text: str) -> int:
        return self.check(int(text, 16))

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def random(self, rng, nonzero: bool = False) -> int:
        """Uniform element drawn from a numpy ``Generator``."""
        nbytes = (self.width_bits + 7) // 8
        while True:
            v = int.from_bytes(rng.bytes(nbytes), "big") & self.mask
            if v or not nonzero:
                return v

    # -- arithmetic on ints -------------------------------------------------

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul_reference(self, a: int, b: int) -> int:
        """Shift-and-XOR multiply with per-step reduction."""
        top = self.order
        poly = self.reduction_poly
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a & top:
                a ^= poly
        return r

    @property
    def _tables(self):
        if self.width_bits > _TABLE_LIMIT:
            return None
        return _log_tables(self.width_bits, self.reduction_poly)

    def mul(self, a: int, b: int) -> int:
        tables = self._tables
        if tables is None:
            return self._reduce(clmul_fast(a, b))
        if a == 0 or b == 0:
            return 0
        exp, log = tables
        return exp[log[a] + log[b]]

    def _reduce(self, r: int) -> int:
        """Fold bits at and above x^b back down using x^b = low part of the poly."""
        w = self.width_bits
        low = self.reduction_poly ^ self.order
        mask = self.mask
        while r >> w:
            r = (r & mask) ^ clmul_fast(low, r >> w)
        return r

    def pow_reference(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self.mul_reference(r, a)
            a = self.mul_reference(a, a)
            e >>= 1
        return r

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^b)")
        tables = self._tables
        if tables is not None:
            exp, log = tables
            return exp[(self.order - 1 - log[a]) % (self.order - 1)]
        return self._inv_euclid(a)

    def _inv_euclid(self, a: int) -> int:
        """Extended Euclid in GF(2)[x]: find u with u*a = 1 mod the reduction poly."""
        self.check(a)
        r0, r1 = self.reduction_poly, a
        u0, u1 = 0, 1
        while r1 != 1:
            shift = r0.bit_length() - r1.bit_length()
            if shift < 0:
                r0, r1, u0, u1 = r1, r0, u1, u0
                continue
            r0 ^= r1 << shift
            u0 ^= u1 << shift
            if r0.bit_length() < r1.bit_length():
                r0, r1, u0, u1 = r1, r0, u1, u0
        return self._reduce(u1)

    def inv_reference(self, a: int) -> int:
        """a^(2^b - 2) by the reference multiply."""
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^b)")
        return self.pow_reference(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def poly_eval(self, coeffs: Sequence[int], x: int) -> int:
        """Horner evaluation; ``coeffs`` run from the free term to the leading one."""
        if not coeffs:
            raise ValueError("cannot evaluate an empty coefficient list")
        acc = 0
        for c in reversed(coeffs):
            acc = self.mul(acc, x) ^ c
        return acc

    # -- polynomials over the field (lists, free term first) ----------------

    def poly_mul(self, p: Sequence[int], q: Sequence[int]) -> list[int]:
        out = [0] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            if a:
                for j, b in enumerate(q):
                    out[i + j] ^= self.mul(a, b)
        return out

    def poly_divmod(self, num: Sequence[int], den: Sequence[int]) -> tuple[list[int], list[int]]:
        den = _trim(den)
        if not den:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(num)
        dd = len(den) - 1
        lead_inv = self.inv(den[-1])
        quot = [0] * max(len(rem) - dd, 1)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k]
            if c:
                f = self.mul(c, lead_inv)
                quot[k - dd] = f
                for i, d in enumerate(den):
                    rem[k - dd + i] ^= self.mul(f, d)
        return _trim(quot), _trim(rem[:dd] if dd else [])

    def interpolate(self, xs: Sequence[int], ys: Sequence[int]) -> list[int]:
        """Coefficients (free first) of the unique degree < len(xs) interpolant."""
        if len(xs) != len(ys):
            raise ValueError("xs and ys differ in length")
        if len(set(xs)) != len(xs):
            raise ValueError("interpolation points must be distinct")
        k = len(xs)
        out = [0] * k
        for i, (xi, yi) in enumerate(zip(xs, ys)):
            basis = [1]
            denom = 1
            for j, xj in enumerate(xs):
                if j != i:
                    basis = self.poly_mul(basis, [xj, 1])
                    denom = self.mul(denom, xi ^ xj)
            scale = self.div(yi, denom)
            for d, c in enumerate(basis):
                out[d] ^= self.mul(scale, c)
        return out


@lru_cache(maxsize=16)
def _log_tables(width_bits: int, poly: int):
    f = FieldSpec(width_bits, poly)
    group = f.order - 1
    factors = _prime_factors(group)
    gen = next(
        g for g in range(2, f.order) if all(f.pow_reference(g, group // q) != 1 for q in factors)
    )
    exp = [0] * (2 * group)
    log = [0] * f.order
    x = 1
    for i in range(group):
        exp[i] = x
        log[x] = i
        x = f.mul_reference(x, gen)
    exp[group:] = exp[:group]
    return exp, log


@lru_cache(maxsize=None)
def _builtin_field(width_bits: int) -> FieldSpec:
    poly = BUILTIN_POLYS.get(width_bits)
    if poly is None:
        poly = find_irreducible(width_bits)
    return FieldSpec(width_bits, poly)


def _trim(p: Iterable[int]) -> list[int]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldElement:
    """An element of a specific :class:`FieldSpec`."""

    value: int
    field: FieldSpec

    def __post_init__(self):
        self.field.check(self.value)

    def _other(self, other: "FieldElement") -> int:
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")
        return other.value

    def __add__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.value ^ v, self.field)

    __sub__ = __add__

    def __mul__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.field.mul(self.value, v), self.field)

    def __truediv__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElement(self.field.div(self.value, v), self.field)

    def __pow__(self, e: int):
        return FieldElement(self.field.pow(self.value, e), self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def hex(self) -> str:
        return self.field.hex(self.value)

    def __repr__(self) -> str:
        return f"FieldElement({self.hex()}, {self.field!r})"


def gf_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def gf_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def gf_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def poly_eval(coeffs: Sequence[FieldElement], x: FieldElement) -> FieldElement:
    """Evaluate ``coeffs[0] + coeffs[1]*x + ...`` at ``x``."""
    if not coeffs:
        raise ValueError("cannot evaluate an empty coefficient list")
    field = x.field
    for c in coeffs:
        if c.field != field:
            raise FieldMismatchError(f"{c.field!r} vs {field!r}")
    return FieldElement(field.poly_eval([c.value for c in coeffs], x.value), field)
