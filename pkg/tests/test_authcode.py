import hmac as std_hmac

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robust_tss.authcode import (
    AmdParams,
    AuthenticationError,
    EncodedSecret,
    EtmScheme,
    MacKey,
    amd_encode,
    amd_tag,
    amd_verify,
    etm_decode,
    etm_encode,
    hmac_sign,
    hmac_verify,
)

from oracles import poly_mulmod

AMD43 = AmdParams(4, 3)
NULL_AMD = EtmScheme("amd", "null", 4, 3)
KS_AMD = EtmScheme("amd", "keystream", 4, 3)
KS_HMAC = EtmScheme("hmac", "keystream", secret_bits=64, tag_bits=64)


def oracle_tag(key, secret, b, g, poly):
    tag, kp = 0, 1
    for i in range(1, g + 1):
        kp = poly_mulmod(kp, key, poly)
        tag ^= poly_mulmod((secret >> (b * (g - i))) & ((1 << b) - 1), kp, poly)
    return tag


def test_amd_golden():
    enc = amd_encode(MacKey(0x6, 4), 0x3F0, AMD43)
    assert enc.tag == 0x1
    assert enc.value == 0x3F01
    assert enc.hex() == "0x3f01"
    assert amd_verify(MacKey(0x6, 4), EncodedSecret.from_int(0x3F01, 12, 4), AMD43)
    assert not amd_verify(MacKey(0x6, 4), EncodedSecret.from_int(0x3F00, 12, 4), AMD43)
    assert not amd_verify(MacKey(0x6, 4), EncodedSecret.from_int(0x5522, 12, 4), AMD43)


def test_amd_small_cases():
    assert amd_tag(0x6, 0, AMD43) == 0
    assert amd_tag(0x1, 0xAB, AmdParams(4, 2)) == 0x1


def test_amd_matches_oracle_exhaustively():
    for key in range(1, 16):
        for secret in range(1 << 12):
            expected = oracle_tag(key, secret, 4, 3, 0x13)
            assert amd_tag(key, secret, AMD43) == expected


@pytest.mark.parametrize("g", [1, 2, 3])
def test_amd_verify_of_encode_exhaustive(g):
    params = AmdParams(4, g)
    for key in range(1, 16):
        for secret in range(1 << (4 * g)):
            assert amd_verify(key, amd_encode(key, secret, params), params)


def test_amd_params_validation():
    with pytest.raises(ValueError):
        AmdParams(4, 0)
    with pytest.raises(ValueError):
        AmdParams(2, 4)
    with pytest.raises(ValueError, match="nonzero"):
        amd_encode(0, 0x3F0, AMD43)
    with pytest.raises(ValueError):
        amd_encode(6, 1 << 12, AMD43)
    with pytest.raises(ValueError):
        amd_verify(6, EncodedSecret.from_int(0x3F01, 8, 8), AMD43)
    assert AMD43.miss_bound == 3 / 16


@pytest.mark.parametrize("b", [2, 4, 8])
def test_amd_miss_rate_random_distortions(b):
    g = 3 if b > 2 else 2
    params = AmdParams(b, g)
    f = params.field
    rng = np.random.default_rng(b)
    trials = 4 * 2**b
    misses = 0
    for _ in range(trials):
        key = f.random(rng, nonzero=True)
        secret = int(rng.integers(0, 1 << (b * g)))
        enc = amd_encode(key, secret, params)
        delta = int(rng.integers(1, 1 << (b * (g + 1))))
        forged = EncodedSecret.from_int(enc.value ^ delta, b * g, b)
        misses += amd_verify(key, forged, params)
    bound = g / 2**b
    sigma = (bound * (1 - bound) / trials) ** 0.5
    assert misses / trials <= bound + 3 * sigma


def test_hmac_rfc4231_case1():
    tag = hmac_sign(b"\x0b" * 20, b"Hi There")
    assert tag.hex() == "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7"


@settings(max_examples=100)
@given(st.binary(max_size=200), st.binary(max_size=100), st.sampled_from(["sha256", "sha512", "sha1"]))
def test_hmac_matches_stdlib(key, msg, name):
    assert hmac_sign(key, msg, name) == std_hmac.new(key, msg, name).digest()
    assert hmac_verify(key, msg, hmac_sign(key, msg, name), name)


def test_hmac_bit_flip_rejected():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        key = rng.bytes(16)
        msg = bytearray(rng.bytes(12))
        tag = hmac_sign(key, bytes(msg))
        bit = int(rng.integers(0, 96))
        msg[bit // 8] ^= 1 << (bit % 8)
        assert not hmac_verify(key, bytes(msg), tag)


def test_hmac_empty_tag_rejected():
    assert not hmac_verify(b"k", b"m", b"")


def test_etm_null_amd_golden():
    key = MacKey(0x0006, 16)
    assert etm_encode(key, 0x3F0, NULL_AMD).value == 0x3F01
    assert etm_decode(key, 0x3F01, NULL_AMD) == 0x3F0
    with pytest.raises(AuthenticationError):
        etm_decode(key, 0x5522, NULL_AMD)


@pytest.mark.parametrize("scheme", [KS_AMD, KS_HMAC, EtmScheme("hmac", "null", secret_bits=12, tag_bits=4)])
@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_etm_round_trip(scheme, data):
    key = MacKey(data.draw(st.integers(1, 0xFFFF)), 16)
    if not scheme.key_usable(key):
        return
    secret = data.draw(st.integers(0, (1 << scheme.payload_bits) - 1))
    assert etm_decode(key, etm_encode(key, secret, scheme), scheme) == secret


def test_keystream_is_bijection_on_payloads():
    key = MacKey(0x1234, 16)
    payloads = {etm_encode(key, s, KS_AMD).payload for s in range(1 << 12)}
    assert len(payloads) == 1 << 12


def test_keystream_actually_encrypts():
    key = MacKey(0x1234, 16)
    assert etm_encode(key, 0x3F0, KS_AMD).payload != 0x3F0


@pytest.mark.parametrize("scheme", [KS_AMD, NULL_AMD])
def test_wrong_key_rejected_at_bound(scheme):
    rng = np.random.default_rng(3)
    trials, accepted = 2000, 0
    for _ in range(trials):
        k1, k2 = (MacKey(int(rng.integers(1, 1 << 16)), 16) for _ in range(2))
        if not (scheme.key_usable(k1) and scheme.key_usable(k2)) or k1.amd_element(4) == k2.amd_element(4):
            continue
        enc = etm_encode(k1, int(rng.integers(0, 1 << 12)), scheme)
        try:
            etm_decode(k2, enc, scheme)
            accepted += 1
        except AuthenticationError:
            pass
    bound = scheme.miss_bound
    assert accepted / trials <= bound + 3 * (bound * (1 - bound) / trials) ** 0.5


@pytest.mark.parametrize("scheme", [NULL_AMD, KS_HMAC])
def test_tampered_payload_rejected(scheme):
    rng = np.random.default_rng(11)
    key = MacKey(0xBEEF, 16)
    rejected = 0
    for _ in range(500):
        enc = etm_encode(key, int(rng.integers(0, 1 << min(scheme.payload_bits, 62))), scheme)
        bit = int(rng.integers(scheme.mac_bits, scheme.width))
        try:
            etm_decode(key, enc.value ^ (1 << bit), scheme)
        except AuthenticationError:
            rejected += 1
    assert rejected / 500 >= 1 - scheme.miss_bound - 0.05


def test_decode_rejects_oversize_and_zero_key():
    with pytest.raises(AuthenticationError):
        etm_decode(MacKey(6, 16), 0x13F01, NULL_AMD)
    with pytest.raises(AuthenticationError):
        etm_decode(MacKey(0x10, 16), 0x3F01, NULL_AMD)


def test_header_round_trip():
    for scheme in (NULL_AMD, KS_HMAC):
        assert EtmScheme.from_header(scheme.to_header()) == scheme
    assert NULL_AMD.to_header() == {
        "mac": "amd", "cipher": "null", "g": 3, "b": 4, "secret_bits": 12, "tag_bits": 4,
    }


def test_scheme_validation():
    with pytest.raises(ValueError):
        EtmScheme("cbc")
    with pytest.raises(ValueError):
        EtmScheme("amd", "aes")
    with pytest.raises(ValueError):
        EtmScheme("hmac")
    with pytest.raises(ValueError):
        etm_encode(MacKey(6, 16), 1 << 12, NULL_AMD)


def test_hmac_tag_truncation_is_prefix():
    key = MacKey(0xBEEF, 16)
    scheme = EtmScheme("hmac", "null", secret_bits=8, tag_bits=8)
    enc = etm_encode(key, 0x42, scheme)
    assert enc.tag == hmac_sign(key.to_bytes(), b"\x42")[0]
