"""
Correcting and mis-correcting shares
====================================

The share vector of a degree t-1 polynomial is a Reed-Solomon codeword, so up
to (n-t)/2 wrong shares can be located and repaired by Berlekamp-Welch. An
aligned coalition that is large enough can instead make the honest holders
look like the errors.
"""

from robust_tss import CodewordView, DecodeFailure, FieldSpec, correct_shares

f = FieldSpec.builtin(16)
golden = {1: 0xC0FE, 2: 0xFC04, 3: 0x9650, 4: 0x0FB4, 5: 0x65E0, 6: 0x591A, 7: 0x334E}


def view(values, t=3):
    ids = sorted(values)
    return CodewordView([f.element(i) for i in ids], [f.element(values[i]) for i in ids], t)


# Two forged shares: within the radius (7-3)//2 = 2
res = correct_shares(view(golden | {3: 0x2686, 4: 0xDBAF}))
print("error positions:", sorted(res.error_positions))
print("repaired E:", f.hex(res.leading.value))

# Four forged shares: beyond the radius, the decoder gives up
try:
    correct_shares(view(golden | {3: 0x2686, 4: 0xDBAF, 6: 0x9A2F, 7: 0x4695}))
except DecodeFailure as exc:
    print("decode failure:", exc)

# Framing: five holders submit points of one forged polynomial. The two
# honest holders now look like the errors.
forged = [0xAAAA, 0x1234, 0x9999]
values = {i: f.poly_eval(forged, i) for i in range(1, 8)}
values |= {6: golden[6], 7: golden[7]}
res = correct_shares(view(values))
print("blamed holders:", [i + 1 for i in sorted(res.error_positions)])
print("decoded E:", f.hex(res.leading.value), "(the forged one, rejected later by the MAC)")

# Privacy: two shares in GF(2^4) are consistent with exactly one polynomial per E
import numpy as np
from itertools import product

g = FieldSpec.builtin(4)
known = {1: 0x7, 2: 0xC}
counts = np.zeros(16, dtype=int)
for c0, c1, c2 in product(range(16), repeat=3):
    if all(g.poly_eval([c0, c1, c2], x) == y for x, y in known.items()):
        counts[c2] += 1
print("completions per candidate E:", counts)
