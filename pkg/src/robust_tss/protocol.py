"""The four-stage retrieval protocol.

Stage 1 (dealer): draw a CRP ``(CHL, K)`` of the client's PUF, encode the
secret as ``E = EtM(K, S)``, and deal shares of ``CHL + a_1 x + ... + E x^(t-1)``.

Stage 2 (client): interpolate ``E`` and ``CHL`` from t shares, regenerate
``K`` from the client's own PUF, verify and decrypt.

Stage 3: on failure, Reed-Solomon-correct all n shares and verify again.

Stage 4: on failure, identify cheaters by group testing over t-subsets and
recover from an all-honest subset. If fewer than t holders are honest the
alarm is raised; optionally t invited honest holders extend the group.

Each stage runs only when the previous one failed.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from . import grouptest
from .authcode import AuthenticationError, EtmScheme, MacKey, etm_decode, etm_encode
from .gf2b import FieldSpec
from .pufmodel import (
    CrpRepository,
    HelperData,
    PufDevice,
    crp_enroll,
    fe_reproduce,
    puf_noisy_response,
)
from .rsdecode import CodewordView, CorrectionResult, DecodeFailure, correct_shares
from .shamir import DealingParams, Share, deal, reconstruct_free, reconstruct_leading

__all__ = [
    "CheatingDetected",
    "CheatingUnrecoverable",
    "Client",
    "Dealer",
    "Dealing",
    "ProtocolOutcome",
    "SchemeConfig",
    "Stage",
    "TraceRecord",
    "client_retrieve",
    "dealer_distribute",
    "issue_supplementary",
    "reference_setup",
    "run_full",
    "simulation_setup",
    "stage3_correct",
    "stage4_group_test",
]

Adversary = Callable[[list[Share], int], list[Share]]


class Stage(enum.Enum):
    RETRIEVAL = 2
    CORRECTION = 3
    GROUP_TESTING = 4
    INVITATION = "invitation"
    FAILED = "failed"


class CheatingDetected(Exception):
    """Verification failed at ``stage``; the caller escalates."""

    def __init__(self, stage: int, reason: str):
        super().__init__(f"stage {stage}: {reason}")
        self.stage = stage
        self.reason = reason


class CheatingUnrecoverable(CheatingDetected):
    """Fewer than t honest holders: cheating is certain, the secret is out of reach."""

    def __init__(self, result: grouptest.IdentificationResult):
        super().__init__(4, "no all-honest t-subset exists")
        self.result = result


@dataclass(frozen=True)
class TraceRecord:
    stage: int | str
    action: str
    subset: tuple[int, ...] | None = None
    passed: bool | None = None
    values: dict[str, str] | None = None

    def to_dict(self) -> dict:
        d = {"stage": self.stage, "action": self.action}
        if self.subset is not None:
            d["subset"] = list(self.subset)
        if self.passed is not None:
            d["pass"] = self.passed
        if self.values:
            d["values_hex"] = self.values
        return d


@dataclass(frozen=True)
class SchemeConfig:
    """Share field plus the EtM scheme; the encoded secret must fit the field."""

    field: FieldSpec
    etm: EtmScheme

    def __post_init__(self):
        if self.etm.width > self.field.width_bits:
            raise ValueError(
                f"encoded secret needs {self.etm.width} bits, field has {self.field.width_bits}"
            )


# ---------------------------------------------------------------------------
# dealer

@dataclass
class Dealing:
    params: DealingParams
    challenge: int
    encoded: int

    @property
    def coefficients(self) -> list[int]:
        return [self.challenge, *(c.value for c in self.params.middle_coeffs), self.encoded]


@dataclass
class Dealer:
    repo: CrpRepository
    config: SchemeConfig
    client_id: str = "client"
    seed: int = 0
    dealing: Dealing | None = None
    dealings_done: int = 0


def dealer_distribute(
    dealer: Dealer,
    secret: int,
    n: int,
    t: int,
    middle_coeffs: Sequence[int] | None = None,
    ids: Sequence[int] | None = None,
) -> list[Share]:
    """Draw a fresh CRP, EtM-encode ``secret`` under its response, deal n shares.

    Middle coefficients come from ``dealer.seed`` (advanced per dealing)
    unless given. CRPs whose response is unusable as a MAC key (a zero AMD
    element) are consumed and skipped.
    """
    cfg = dealer.config
    f = cfg.field
    key_bits = dealer.repo.key_bits.get(dealer.client_id, 16)
    while True:
        crp = dealer.repo.draw(dealer.client_id)
        key = MacKey(crp.response, key_bits)
        if cfg.etm.key_usable(key):
            break
    f.check(crp.challenge)
    encoded = etm_encode(key, secret, cfg.etm).value
    seed = dealer.seed + dealer.dealings_done
    if middle_coeffs is None:
        params = DealingParams.random(f, n, t, seed, ids)
    else:
        id_list = ids if ids is not None else range(1, n + 1)
        params = DealingParams(
            t, [f.element(i) for i in id_list], [f.element(a) for a in middle_coeffs]
        )
    if params.holder_count != n:
        raise ValueError("ids do not match n")
    dealer.dealings_done += 1
    dealer.dealing = Dealing(params, crp.challenge, encoded)
    return deal(f.element(encoded), f.element(crp.challenge), params)


def issue_supplementary(dealer: Dealer, ids: Sequence[int]) -> list[Share]:
    """Extra shares of the current dealing for invited holders."""
    if dealer.dealing is None:
        raise RuntimeError("nothing has been dealt")
    f = dealer.config.field
    known = {i.value for i in dealer.dealing.params.ids}
    if known & set(ids) or 0 in ids:
        raise ValueError("invited ids must be new and nonzero")
    coeffs = dealer.dealing.coefficients
    return [Share(f.element(i), f.element(f.poly_eval(coeffs, i))) for i in ids]


# ---------------------------------------------------------------------------
# client

@dataclass
class Client:
    device: PufDevice
    helpers: dict[int, HelperData]
    config: SchemeConfig
    rng: np.random.Generator = dc_field(default_factory=lambda: np.random.default_rng(0))
    _keys: dict[int, MacKey | None] = dc_field(default_factory=dict, repr=False)

    def derive_key(self, challenge: int) -> MacKey | None:
        """Regenerate K for a challenge from a (noisy) PUF read.

        One read per distinct challenge per retrieval; ``None`` when the
        challenge was never enrolled for this client.
        """
        if challenge not in self._keys:
            helper = self.helpers.get(challenge)
            if helper is None or challenge >> self.device.challenge_bits:
                self._keys[challenge] = None
            else:
                noisy = puf_noisy_response(self.device, challenge, self.rng)
                self._keys[challenge] = MacKey(fe_reproduce(noisy, helper), helper.key_bits)
        return self._keys[challenge]

    def forget_keys(self) -> None:
        self._keys.clear()

    def open(self, encoded: int, challenge: int) -> int:
        """Verify-then-decrypt; raises AuthenticationError."""
        key = self.derive_key(challenge)
        if key is None:
            raise AuthenticationError(f"challenge {challenge:#x} is not enrolled")
        return etm_decode(key, encoded, self.config.etm)


def _record(trace, *args, **kwargs):
    if trace is not None:
        trace.append(TraceRecord(*args, **kwargs))


def _open_subset(client: Client, shares: Sequence[Share]) -> tuple[int, int, int | None]:
    e = reconstruct_leading(shares).value
    chl = reconstruct_free(shares).value
    try:
        return e, chl, client.open(e, chl)
    except AuthenticationError:
        return e, chl, None


def client_retrieve(client: Client, shares: Sequence[Share], trace: list | None = None) -> int:
    """Stage 2 on exactly t shares. Raises CheatingDetected to escalate."""
    f = client.config.field
    e, chl, secret = _open_subset(client, shares)
    subset = tuple(s.id.value for s in shares)
    _record(trace, 2, "verify", subset, secret is not None, {"E": f.hex(e), "CHL": f.hex(chl)})
    if secret is None:
        raise CheatingDetected(2, "secret verification failed")
    return secret


def stage3_correct(
    client: Client, shares: Sequence[Share], t: int, trace: list | None = None
) -> tuple[int, CorrectionResult]:
    """Stage 3: RS-decode all shares, then verify the corrected polynomial."""
    f = client.config.field
    try:
        result = correct_shares(CodewordView.from_shares(shares, t))
    except DecodeFailure as exc:
        _record(trace, 3, "rs-decode", passed=False)
        raise CheatingDetected(3, str(exc)) from exc
    errors = tuple(shares[i].id.value for i in sorted(result.error_positions))
    _record(trace, 3, "rs-decode", errors, True)
    e, chl = result.leading.value, result.free.value
    try:
        secret = client.open(e, chl)
    except AuthenticationError as exc:
        _record(trace, 3, "verify", None, False, {"E": f.hex(e), "CHL": f.hex(chl)})
        raise CheatingDetected(3, "corrected secret failed verification") from exc
    _record(trace, 3, "verify", None, True, {"E": f.hex(e), "CHL": f.hex(chl)})
    return secret, result


def _subset_test(client: Client, shares: Sequence[Share], trace, stage):
    f = client.config.field

    def test_fn(subset: tuple[int, ...]) -> bool:
        e, chl, secret = _open_subset(client, [shares[i] for i in subset])
        ids = tuple(shares[i].id.value for i in subset)
        _record(trace, stage, "test", ids, secret is not None, {"E": f.hex(e), "CHL": f.hex(chl)})
        return secret is not None

    return test_fn


def stage4_group_test(
    client: Client, shares: Sequence[Share], t: int, trace: list | None = None
) -> tuple[grouptest.IdentificationResult, int]:
    """Stage 4: adaptive group testing over a snapshot of the shares.

    Returns the identification (holder indices into ``shares``) and the
    secret recovered from t honest shares. Raises CheatingUnrecoverable when
    no t-subset verifies.
    """
    snapshot = tuple(shares)
    n = len(snapshot)
    result = grouptest.identify_adaptive(_subset_test(client, snapshot, trace, 4), n, t)
    if not result.identified:
        _record(trace, 4, "alarm", passed=False)
        raise CheatingUnrecoverable(result)
    honest = sorted(result.honest)[:t]
    secret = client.open(
        reconstruct_leading([snapshot[i] for i in honest]).value,
        reconstruct_free([snapshot[i] for i in honest]).value,
    )
    return result, secret


# ---------------------------------------------------------------------------

@dataclass
class ProtocolOutcome:
    terminating_stage: Stage
    recovered_secret: int | None
    cheaters: frozenset[int]  # holder IDs
    trace: list[TraceRecord]
    identification: grouptest.IdentificationResult | None = None

    @property
    def alarm(self) -> bool:
        return self.terminating_stage is not Stage.RETRIEVAL

    def trace_jsonl(self) -> str:
        return "\n".join(json.dumps(r.to_dict()) for r in self.trace)


def run_full(
    dealer: Dealer,
    client: Client,
    secret: int,
    n: int,
    t: int,
    adversary: Adversary | None = None,
    stage2_ids: Sequence[int] | None = None,
    middle_coeffs: Sequence[int] | None = None,
    invite: bool = False,
) -> ProtocolOutcome:
    """Deal, let the adversary tamper, then escalate lazily through the stages.

    The adversary returns the submitted shares in arrival order; Stage 2 uses
    the first t arrivals unless ``stage2_ids`` names the participants. With
    ``invite`` the dealer issues shares to t fresh honest holders when Stage
    4 finds fewer than t honest ones.
    """
    trace: list[TraceRecord] = []
    client.forget_keys()
    issued = dealer_distribute(dealer, secret, n, t, middle_coeffs)
    _record(trace, 1, "deal", tuple(s.id.value for s in issued), values={
        "CHL": dealer.config.field.hex(dealer.dealing.challenge)
    })
    submitted = list(adversary(list(issued), t)) if adversary else list(issued)
    by_id = {s.id.value: s for s in submitted}
    snapshot = [by_id[k] for k in sorted(by_id)]

    if stage2_ids is not None:
        first = [by_id[i] for i in stage2_ids]
    else:
        first = submitted[:t]
    try:
        s = client_retrieve(client, first, trace)
        return ProtocolOutcome(Stage.RETRIEVAL, s, frozenset(), trace)
    except CheatingDetected:
        pass

    try:
        s, corr = stage3_correct(client, snapshot, t, trace)
        cheaters = frozenset(snapshot[i].id.value for i in corr.error_positions)
        return ProtocolOutcome(Stage.CORRECTION, s, cheaters, trace)
    except CheatingDetected:
        pass

    try:
        result, s = stage4_group_test(client, snapshot, t, trace)
        cheaters = frozenset(snapshot[i].id.value for i in result.cheaters)
        return ProtocolOutcome(Stage.GROUP_TESTING, s, cheaters, trace, result)
    except CheatingUnrecoverable as exc:
        if not invite:
            return ProtocolOutcome(Stage.FAILED, None, frozenset(), trace, exc.result)
        current = exc.result

    next_id = max(by_id) + 1
    invited = issue_supplementary(dealer, range(next_id, next_id + t))
    combined = snapshot + invited
    _record(trace, "invitation", "invite", tuple(s.id.value for s in invited))
    result = grouptest.invite_and_extend(
        current, range(n, n + t), _subset_test(client, combined, trace, "invitation")
    )
    honest = sorted(result.honest)[:t]
    s = client.open(
        reconstruct_leading([combined[i] for i in honest]).value,
        reconstruct_free([combined[i] for i in honest]).value,
    )
    cheaters = frozenset(combined[i].id.value for i in result.cheaters)
    return ProtocolOutcome(Stage.INVITATION, s, cheaters, trace, result)


# ---------------------------------------------------------------------------

REFERENCE_SECRET = 0x3F0
REFERENCE_CHALLENGE = 0xAAAA
REFERENCE_KEY = 0x0006
REFERENCE_MIDDLE = (0x5555,)
REFERENCE_SHARES = {
    1: 0xC0FE,
    2: 0xFC04,
    3: 0x9650,
    4: 0x0FB4,
    5: 0x65E0,
    6: 0x591A,
    7: 0x334E,
}


def reference_setup(
    device_seed: int = 1, extra_crps: int = 8, noise_rate: float = 0.0
) -> tuple[Dealer, Client]:
    """Seven holders, t=3, GF(2^16), null cipher, AMD over GF(2^4) with g=3.

    The client's first enrolled pair is pinned to CHL=0xAAAA -> K=0x0006.
    """
    cfg = SchemeConfig(FieldSpec.builtin(16), EtmScheme("amd", "null", 4, 3))
    device = PufDevice.from_seed(device_seed, challenge_bits=16, response_bits=80, noise_rate=noise_rate)
    repo = CrpRepository()
    rng = np.random.default_rng(device_seed)
    helpers = crp_enroll(repo, device, extra_crps, rng, pinned={REFERENCE_CHALLENGE: REFERENCE_KEY})
    dealer = Dealer(repo, cfg)
    client = Client(device, helpers, cfg, np.random.default_rng(device_seed + 1))
    return dealer, client


def simulation_setup(
    seed: int,
    field_bits: int = 128,
    etm: EtmScheme | None = None,
    crps: int = 4,
    noise_rate: float = 0.0,
    repetition: int = 5,
) -> tuple[Dealer, Client]:
    """A fresh enrolled dealer/client pair for simulations.

    Defaults to AMD with 32-bit blocks (g=3) in GF(2^128), where a forged
    secret slips through one verification with probability 3/2^32. The PUF
    response is sized so the fuzzy extractor yields a full-width MAC key.
    """
    etm = etm or EtmScheme("amd", "null", 32, 3)
    cfg = SchemeConfig(FieldSpec.builtin(field_bits), etm)
    key_bits = max(etm.mac_bits, 16)
    device = PufDevice.from_seed(
        seed,
        challenge_bits=min(field_bits, 64),
        response_bits=key_bits * repetition,
        noise_rate=noise_rate,
    )
    repo = CrpRepository()
    helpers = crp_enroll(repo, device, crps, np.random.default_rng([seed, 1]), repetition=repetition)
    return Dealer(repo, cfg, seed=seed), Client(device, helpers, cfg, np.random.default_rng([seed, 2]))
