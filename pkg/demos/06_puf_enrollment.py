"""
A simulated PUF and its challenge-response repository
=====================================================

The device is a keyed PRF with per-read bit noise. Enrollment stores
(challenge, key) pairs with the dealer and the helper data with the client,
which lets the noisy response be corrected back to the enrolled key.
"""

import numpy as np

from robust_tss import CrpRepository, PufDevice, crp_enroll, fe_reproduce
from robust_tss.pufmodel import majority_error_rate, puf_noisy_response, puf_response

device = PufDevice.from_seed(3, challenge_bits=16, response_bits=80, noise_rate=0.05)
other = PufDevice.from_seed(4, challenge_bits=16, response_bits=80, noise_rate=0.05)
c = 0x1234
diff = bin(puf_response(device, c) ^ puf_response(other, c)).count("1")
print(f"two devices, same challenge: {diff}/80 response bits differ")

rng = np.random.default_rng(0)
repo = CrpRepository()
helpers = crp_enroll(repo, device, 4, rng)
print(repo.to_json("client"))

pair = repo.draw("client")
noisy = puf_noisy_response(device, pair.challenge, rng)
key = fe_reproduce(noisy, helpers[pair.challenge])
print(f"noisy read corrected to {key:#06x}, enrolled {pair.response:#06x}")

for r in (3, 5, 7):
    q = majority_error_rate(0.05, r)
    print(f"repetition {r}: per-bit error {q:.2e}, 16-bit key error {1 - (1 - q) ** 16:.2e}")
