from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robust_tss.authcode import AmdParams, EncodedSecret, amd_encode, amd_verify
from robust_tss.pufmodel import (
    CrpExhausted,
    CrpRepository,
    HelperData,
    PufDevice,
    crp_enroll,
    fe_generate,
    fe_reproduce,
    majority_error_rate,
    puf_noisy_response,
    puf_response,
)

from oracles import hamming


def test_response_deterministic():
    dev = PufDevice.from_seed(4)
    assert puf_response(dev, 0x1234) == puf_response(dev, 0x1234)
    assert puf_response(dev, 0x1234) != puf_response(dev, 0x1235)


def test_response_width_checked():
    dev = PufDevice.from_seed(4)
    with pytest.raises(ValueError):
        puf_response(dev, 1 << 16)


def test_devices_differ_in_about_half_the_bits():
    bits = 80
    a, b = PufDevice.from_seed(1), PufDevice.from_seed(2)
    distances = [hamming(puf_response(a, c), puf_response(b, c)) for c in range(2000)]
    mean = np.mean(distances)
    sigma = (bits * 0.25 / len(distances)) ** 0.5
    assert abs(mean - bits / 2) <= 3 * sigma
    for d in distances[:200]:
        assert abs(d - bits / 2) <= 5 * (bits * 0.25) ** 0.5


def test_responses_balanced_across_challenges():
    dev = PufDevice.from_seed(9, response_bits=64)
    ones = sum(puf_response(dev, c).bit_count() for c in range(1000))
    n = 64 * 1000
    assert abs(ones - n / 2) <= 3 * (n * 0.25) ** 0.5


def test_noiseless_read_is_reference():
    dev = PufDevice.from_seed(3)
    assert puf_noisy_response(dev, 77, np.random.default_rng(0)) == puf_response(dev, 77)


def test_noise_rate_statistics():
    dev = PufDevice.from_seed(3, noise_rate=0.05)
    rng = np.random.default_rng(0)
    ref = puf_response(dev, 0x42)
    trials = 1000
    flips = sum(hamming(puf_noisy_response(dev, 0x42, rng), ref) for _ in range(trials))
    n = trials * dev.response_bits
    assert abs(flips / n - 0.05) <= 3 * (0.05 * 0.95 / n) ** 0.5


def test_noise_rate_validated():
    with pytest.raises(ValueError):
        PufDevice(b"x", noise_rate=1.0)


def test_fe_zero_noise_round_trip(rng):
    w = puf_response(PufDevice.from_seed(5), 9)
    key, helper = fe_generate(w, 80, rng)
    assert helper.key_bits == 16
    assert fe_reproduce(w, helper) == key


@settings(max_examples=100)
@given(st.integers(0, 0xFFFF), st.integers(0, 15), st.sets(st.integers(0, 4), max_size=2))
def test_fe_minority_flips_corrected(key, bit, flips):
    w = puf_response(PufDevice.from_seed(5), 9)
    k, helper = fe_generate(w, 80, key=key)
    noisy = w
    for f in flips:
        noisy ^= 1 << (bit * 5 + f)
    assert fe_reproduce(noisy, helper) == k == key


def test_fe_majority_flips_caught_by_mac():
    w = puf_response(PufDevice.from_seed(5), 9)
    key, helper = fe_generate(w, 80, key=0x0006)
    noisy = w ^ (0b111 << 5)  # three of five copies of key bit 1
    wrong = fe_reproduce(noisy, helper)
    assert wrong == 0x0004
    params = AmdParams(4, 3)
    enc = amd_encode(key & 0xF, 0x3F0, params)
    assert not amd_verify(wrong & 0xF, EncodedSecret.from_int(enc.value, 12, 4), params)


def test_fe_validation(rng):
    with pytest.raises(ValueError):
        fe_generate(0, 80, rng, repetition=4)
    with pytest.raises(ValueError):
        fe_generate(0, 4, rng, repetition=5)
    with pytest.raises(ValueError):
        fe_generate(0, 80)
    with pytest.raises(ValueError):
        fe_generate(0, 80, key=1 << 16)


def test_majority_error_rate_closed_form():
    p = 0.05
    expected = sum(comb(5, k) * p**k * (1 - p) ** (5 - k) for k in (3, 4, 5))
    assert majority_error_rate(p, 5) == pytest.approx(expected)
    # a 16-bit key fails with probability 1-(1-q)^16, just above 1e-2 at r=5
    q = majority_error_rate(0.05, 5)
    assert q == pytest.approx(1.158125e-3)
    assert 1 - (1 - q) ** 16 == pytest.approx(1.83699e-2, rel=1e-4)
    assert 16 * majority_error_rate(0.05, 7) < 1e-2


@pytest.mark.parametrize("r", [5, 7])
def test_fuzzy_extraction_failure_rate(r):
    dev = PufDevice.from_seed(8, response_bits=16 * r, noise_rate=0.05)
    rng = np.random.default_rng(r)
    key, helper = fe_generate(puf_response(dev, 1), dev.response_bits, rng, repetition=r)
    trials = 4000
    fails = sum(fe_reproduce(puf_noisy_response(dev, 1, rng), helper) != key for _ in range(trials))
    bound = 16 * majority_error_rate(0.05, r)
    assert fails / trials <= bound + 3 * (bound / trials) ** 0.5


def test_helper_offset_hides_response_bits():
    """Over random keys every offset bit is an unbiased coin."""
    w = puf_response(PufDevice.from_seed(5), 9)
    rng = np.random.default_rng(1)
    ones = np.zeros(80)
    trials = 2000
    for _ in range(trials):
        _, helper = fe_generate(w, 80, rng)
        ones += [(helper.offset >> j) & 1 for j in range(80)]
    assert np.all(np.abs(ones / trials - 0.5) <= 4 * (0.25 / trials) ** 0.5)


def test_enroll_and_draw(rng):
    repo = CrpRepository()
    dev = PufDevice.from_seed(1)
    helpers = crp_enroll(repo, dev, 10, rng)
    assert repo.unused("client") == 10
    assert len(helpers) == 10
    a, b = repo.draw("client"), repo.draw("client")
    assert a.challenge != b.challenge
    assert repo.unused("client") == 8
    for _ in range(8):
        repo.draw("client")
    with pytest.raises(CrpExhausted):
        repo.draw("client")


def test_dealer_and_client_derive_same_key(rng):
    repo = CrpRepository()
    dev = PufDevice.from_seed(1, noise_rate=0.02)
    helpers = crp_enroll(repo, dev, 20, rng)
    for pair in repo.pairs["client"]:
        noisy = puf_noisy_response(dev, pair.challenge, rng)
        assert fe_reproduce(noisy, helpers[pair.challenge]) == pair.response


def test_pinned_enrollment(rng):
    repo = CrpRepository()
    helpers = crp_enroll(repo, PufDevice.from_seed(77), 3, rng, pinned={0xAAAA: 0x0006})
    first = repo.draw("client")
    assert (first.challenge, first.response) == (0xAAAA, 0x0006)
    assert fe_reproduce(puf_response(PufDevice.from_seed(77), 0xAAAA), helpers[0xAAAA]) == 0x0006


def test_enroll_rejects_zero_count(rng):
    with pytest.raises(ValueError):
        crp_enroll(CrpRepository(), PufDevice.from_seed(1), 0, rng)


def test_repository_json_round_trip(rng):
    repo = CrpRepository()
    crp_enroll(repo, PufDevice.from_seed(1), 4, rng, client_id="board-7", pinned={0xAAAA: 6})
    repo.draw("board-7")
    back = CrpRepository.from_json(repo.to_json("board-7"))
    assert back.pairs == repo.pairs
    assert back.key_bits["board-7"] == 16
    assert '"response_hex": "0x0006"' in repo.to_json("board-7")


def test_helper_data_is_plain_value():
    assert HelperData(5, 16) == HelperData(5, 16, 5)
