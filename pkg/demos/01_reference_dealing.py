"""
Dealing and retrieving a PUF-keyed secret
=========================================

Seven holders, threshold three, shares in GF(2^16). The 12-bit secret 0x3F0
is tagged with an AMD code keyed by a PUF response, then placed at the top
coefficient of the sharing polynomial; the PUF challenge sits at the bottom.
"""

from robust_tss import AmdParams, DealingParams, FieldSpec, deal, reconstruct_free, reconstruct_leading
from robust_tss.authcode import amd_tag

# The field: x^16 + x^5 + x^3 + x^2 + 1
f = FieldSpec.builtin(16)
print("reduction polynomial:", hex(f.reduction_poly))

# AMD tag over GF(2^4): the secret splits into g=3 blocks of b=4 bits
amd = AmdParams(4, 3)
key, secret = 0x6, 0x3F0
tag = amd_tag(key, secret, amd)
encoded = (secret << 4) | tag
print(f"tag {tag:#x}, encoded secret E = {encoded:#06x}")

# h(x) = CHL + a1 x + E x^2
e = f.element
params = DealingParams(3, [e(i) for i in range(1, 8)], [e(0x5555)])
shares = deal(e(encoded), e(0xAAAA), params)
for s in shares:
    print(f"  holder {s.id.value}: {f.hex(s.value.value)}")

# Any three shares give back both ends of the polynomial
subset = [shares[0], shares[1], shares[4]]
print("E   from holders 1,2,5:", f.hex(reconstruct_leading(subset).value))
print("CHL from holders 1,2,5:", f.hex(reconstruct_free(subset).value))

# Two shares are not enough: every E is still possible (see 02 for the full count)

# The same flow through the protocol layer, with an enrolled PUF client
from robust_tss import client_retrieve, dealer_distribute, reference_setup

dealer, client = reference_setup()
shares = dealer_distribute(dealer, 0x3F0, 7, 3, middle_coeffs=(0x5555,))
print("client recovers:", hex(client_retrieve(client, shares[:3])))
