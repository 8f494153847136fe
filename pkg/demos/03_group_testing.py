"""
Identifying cheaters by group testing
=====================================

Every t-subset of holders is a test: reconstruct, verify, pass or fail. A
cheater fails every test it joins, so its column of the weight vector
w = u^T M reaches C(n-1, t-1). The adaptive variant stops at the first
passing test and checks the rest one by one against that group.
"""

from robust_tss import build_plan, identify_adaptive, identify_full
from robust_tss.grouptest import run_plan

n, t = 7, 3
cheaters = {2, 3, 5, 6}  # zero-based: holders 3, 4, 6, 7

plan = build_plan(n, t)
print("tests:", plan.size, " column weight:", plan.column_weight)


def test(subset):
    return not cheaters.intersection(subset)


syndrome = run_plan(plan, test)
print("syndrome u:", syndrome)
print("w = u^T M :", list(map(int, plan.matrix.T @ [int(b) for b in syndrome.bits])))

full = identify_full(syndrome, plan)
print("full plan   ->", sorted(i + 1 for i in full.cheaters), f"({full.tests_run} tests)")

adaptive = identify_adaptive(test, n, t)
print("adaptive    ->", sorted(i + 1 for i in adaptive.cheaters),
      f"({adaptive.tests_run} tests, first pass after {adaptive.first_pass})")

# Six cheaters leave one honest holder: no test can pass
from robust_tss import Stage, reference_setup, run_full
from robust_tss.protocol import REFERENCE_MIDDLE
from robust_tss.shamir import Share

bad = {1: 1, 2: 2, 3: 0x2686, 4: 0xDBAF, 6: 0x9A2F, 7: 0x4695}


def adversary(shares, t):
    return [Share(s.id, s.value.field.element(bad[s.id.value])) if s.id.value in bad else s for s in shares]


for invite in (False, True):
    dealer, client = reference_setup()
    out = run_full(dealer, client, 0x3F0, 7, 3, adversary, middle_coeffs=REFERENCE_MIDDLE, invite=invite)
    secret = None if out.recovered_secret is None else hex(out.recovered_secret)
    print(f"invite={invite}: stage {out.terminating_stage.value}, secret {secret}, cheaters {sorted(out.cheaters)}")
