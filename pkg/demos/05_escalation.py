"""
Where does each coalition size stop the protocol?
=================================================

Seeded runs with n=7, t=3 and coalitions of every size c. Small coalitions
are corrected by the decoder, mid-sized ones are found by group testing, and
anything above n-t raises the alarm without ever releasing a wrong secret.
Shares live in GF(2^128) with a 32-bit AMD block, so the tag is strong.
"""

from collections import Counter, defaultdict

from robust_tss.attacksim import escalation_profile, expected_stage, stage_label
from robust_tss.protocol import simulation_setup

by_size = defaultdict(Counter)
wrong = 0
for c, strategy, secret, out in escalation_profile(simulation_setup, 160, 7, 3, seed=1):
    by_size[c][stage_label(out.terminating_stage)] += 1
    wrong += out.recovered_secret not in (None, secret)

print(" c  expected  observed")
for c in sorted(by_size):
    print(f"{c:>2}  {expected_stage(c, 7, 3):>8}  {dict(by_size[c])}")
print("wrong secrets returned:", wrong)

# The trace of one run, as JSON lines
from robust_tss.attacksim import AdversaryConfig
from robust_tss.protocol import run_full

dealer, client = simulation_setup(0)
adv = AdversaryConfig({2, 5, 7}, "forged-polynomial", 0xBAD, scheme=dealer.config.etm)
print(run_full(dealer, client, 0x600D, 7, 3, adv).trace_jsonl())
