"""Independent reference computations used to freeze expected values.

Nothing here imports the package: arithmetic is long-hand polynomial
multiplication followed by long division, interpolation is by brute force.
"""

from collections import Counter
from itertools import combinations


def poly_mulmod(a, b, poly):
    """Schoolbook product over GF(2)[x], then long division by ``poly``."""
    prod = 0
    for i in range(b.bit_length()):
        if b >> i & 1:
            prod ^= a << i
    deg = poly.bit_length() - 1
    for k in range(prod.bit_length() - 1, deg - 1, -1):
        if prod >> k & 1:
            prod ^= poly << (k - deg)
    return prod


def poly_inv(a, poly):
    width = poly.bit_length() - 1
    for x in range(1, 1 << width):
        if poly_mulmod(a, x, poly) == 1:
            return x
    raise ZeroDivisionError


def horner(coeffs, x, poly):
    acc = 0
    for c in reversed(coeffs):
        acc = poly_mulmod(acc, x, poly) ^ c
    return acc


def trial_irreducible(poly):
    deg = poly.bit_length() - 1
    for d in range(2, 1 << (deg // 2 + 1)):
        r = poly
        dd = d.bit_length() - 1
        while r.bit_length() - 1 >= dd:
            r ^= d << (r.bit_length() - 1 - dd)
        if r == 0:
            return False
    return True


def find_reduction_polys(width, points, coeffs):
    """All monic degree-``width`` polynomials under which ``coeffs`` evaluates to
    ``points[x]`` at every x."""
    hits = []
    for low in range(1 << width):
        poly = (1 << width) | low
        if all(horner(coeffs, x, poly) == y for x, y in points.items()):
            hits.append(poly)
    return hits


def interpolate(xs, ys, poly):
    """Lagrange interpolation, coefficients free-first, by expanding basis polys."""
    k = len(xs)
    out = [0] * k
    for i in range(k):
        basis = [1]
        denom = 1
        for j in range(k):
            if j == i:
                continue
            nb = [0] * (len(basis) + 1)
            for d, c in enumerate(basis):
                nb[d] ^= poly_mulmod(c, xs[j], poly)
                nb[d + 1] ^= c
            basis = nb
            denom = poly_mulmod(denom, xs[i] ^ xs[j], poly)
        scale = poly_mulmod(ys[i], poly_inv(denom, poly), poly)
        for d, c in enumerate(basis):
            out[d] ^= poly_mulmod(scale, c, poly)
    return out


def majority_decode(xs, ys, t, poly):
    """Interpolate every t-subset, keep the polynomial agreeing with most points."""
    votes = Counter()
    for sub in combinations(range(len(xs)), t):
        coeffs = tuple(interpolate([xs[i] for i in sub], [ys[i] for i in sub], poly))
        votes[coeffs] += 1
    best, _ = votes.most_common(1)[0]
    agree = sum(horner(list(best), x, poly) == y for x, y in zip(xs, ys))
    return list(best), agree


def hamming(a, b):
    return bin(a ^ b).count("1")


class TableField:
    """Small GF(2^w) with product and inverse tables filled from ``poly_mulmod``.

    Only used to make brute-force oracles fast enough for exhaustive runs.
    """

    def __init__(self, poly):
        self.poly = poly
        self.order = 1 << (poly.bit_length() - 1)
        q = self.order
        self.mul = [[poly_mulmod(a, b, poly) for b in range(q)] for a in range(q)]
        self.inv = [0] * q
        for a in range(1, q):
            self.inv[a] = self.mul[a].index(1)
        self._basis = {}

    def horner(self, coeffs, x):
        acc = 0
        for c in reversed(coeffs):
            acc = self.mul[acc][x] ^ c
        return acc

    def basis(self, xs):
        """Lagrange basis polynomials for ``xs``, cached by node set."""
        key = tuple(xs)
        if key not in self._basis:
            k = len(xs)
            self._basis[key] = [interpolate(list(xs), [int(i == j) for j in range(k)], self.poly) for i in range(k)]
        return self._basis[key]

    def interpolate(self, xs, ys):
        out = [0] * len(xs)
        for y, b in zip(ys, self.basis(xs)):
            row = self.mul[y]
            for d, c in enumerate(b):
                out[d] ^= row[c]
        return out

    def majority_decode(self, xs, ys, t):
        """Same contract as the module-level ``majority_decode``."""
        votes = Counter()
        for sub in combinations(range(len(xs)), t):
            votes[tuple(self.interpolate([xs[i] for i in sub], [ys[i] for i in sub]))] += 1
        best, _ = votes.most_common(1)[0]
        agree = sum(self.horner(best, x) == y for x, y in zip(xs, ys))
        return list(best), agree
