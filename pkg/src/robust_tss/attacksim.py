"""Adversary strategies and experiments.

Strategies act on the shares held by compromised holders before they are
submitted to the client. Tampering with a share in transit is modelled the
same way, since the client only ever sees the share value.

Attackers know every public parameter and, with t or more compromised
shares, can interpolate ``E`` and ``CHL``. They do not have the client's PUF,
so a forged encoded secret is built under a key of their own choosing.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field as dc_field
from math import sqrt
from typing import Sequence

import numpy as np

from .authcode import AmdParams, EtmScheme, MacKey, amd_tag, etm_encode, keystream
from .gf2b import FieldSpec
from .protocol import Stage, run_full
from .shamir import DealingParams, Share, deal, reconstruct_free, reconstruct_leading

__all__ = [
    "STRATEGIES",
    "AdversaryConfig",
    "CoalitionReport",
    "ExperimentReport",
    "escalation_profile",
    "expected_stage",
    "forge_shares",
    "format_pmiss_table",
    "framing_attack",
    "measure_pmiss",
    "passive_collusion",
]

STRATEGIES = ("forged-polynomial", "random-distortion", "framing", "passive", "honest-replay")


@dataclass
class AdversaryConfig:
    """Which holders (by ID) are compromised and what they do.

    ``scheme`` is the public EtM scheme; forging strategies need it.
    ``cheaters_first`` makes compromised holders answer first, so they are
    always among the t holders used for plain retrieval.
    """

    compromised: frozenset[int]
    strategy: str = "forged-polynomial"
    forged_secret: int | None = None
    seed: int = 0
    scheme: EtmScheme | None = None
    cheaters_first: bool = True

    def __post_init__(self):
        self.compromised = frozenset(self.compromised)
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy in ("forged-polynomial", "framing"):
            if self.forged_secret is None or self.scheme is None:
                raise ValueError(f"{self.strategy} needs forged_secret and scheme")

    def __call__(self, shares: list[Share], t: int) -> list[Share]:
        """Submitted shares in arrival order."""
        if self.strategy in ("forged-polynomial", "framing"):
            out = forge_shares(self, shares, t)
        elif self.strategy == "random-distortion":
            out = _distort(self, shares)
        else:
            out = list(shares)
        if self.cheaters_first:
            out.sort(key=lambda s: (s.id.value not in self.compromised, s.id.value))
        return out


def _forged_encoded(config: AdversaryConfig, field: FieldSpec, rng) -> int:
    scheme = config.scheme
    key_bits = max(scheme.mac_bits, 8)
    while True:
        key = MacKey(int.from_bytes(rng.bytes((key_bits + 7) // 8), "big") % (1 << key_bits), key_bits)
        if scheme.key_usable(key):
            break
    return etm_encode(key, config.forged_secret, scheme).value


def forge_shares(config: AdversaryConfig, shares: Sequence[Share], t: int) -> list[Share]:
    """Replace compromised shares with evaluations of one forged polynomial.

    Its leading coefficient is the forged secret, EtM-encoded under an
    attacker-chosen key. If the coalition holds t or more shares it reuses the
    true challenge as free coefficient; otherwise the free term is random.
    """
    if not config.compromised:
        return list(shares)
    f = shares[0].field
    rng = np.random.default_rng([config.seed, 1])
    mine = [s for s in shares if s.id.value in config.compromised]
    if len(mine) >= t:
        chl = reconstruct_free(mine[:t]).value
    else:
        chl = f.random(rng)
    coeffs = [chl] + [f.random(rng) for _ in range(t - 2)] + [_forged_encoded(config, f, rng)]
    out = []
    for s in shares:
        if s.id.value in config.compromised:
            out.append(Share(s.id, f.element(f.poly_eval(coeffs, s.id.value))))
        else:
            out.append(s)
    return out


def framing_attack(config: AdversaryConfig, shares: Sequence[Share], t: int) -> list[Share]:
    """Aligned forgery by a coalition large enough that the honest holders fit
    inside the decoder's correction radius."""
    n = len(shares)
    if len(config.compromised) < n - (n - t) // 2:
        raise ValueError(f"framing needs at least {n - (n - t) // 2} compromised holders")
    return forge_shares(config, shares, t)


def _distort(config: AdversaryConfig, shares: Sequence[Share]) -> list[Share]:
    if not shares:
        return []
    f = shares[0].field
    rng = np.random.default_rng([config.seed, 2])
    out = []
    for s in shares:
        if s.id.value in config.compromised:
            out.append(Share(s.id, f.element(s.value.value ^ f.random(rng, nonzero=True))))
        else:
            out.append(s)
    return out


# ---------------------------------------------------------------------------

@dataclass
class CoalitionReport:
    coalition_size: int
    knows_encoded: bool
    encoded: int | None
    challenge: int | None
    secret_recoverable: bool
    secret_guess: int | None


def passive_collusion(
    shares: Sequence[Share], compromised: Sequence[int], t: int, scheme: EtmScheme, rng=None
) -> CoalitionReport:
    """What a curious coalition learns from its own shares.

    With t or more shares it interpolates ``E`` and ``CHL``. Under the null
    cipher the secret is the payload; under the keystream cipher it lacks the
    PUF response and can only guess, modelled as decrypting under a random key.
    """
    mine = [s for s in shares if s.id.value in set(compromised)]
    if len(mine) < t:
        return CoalitionReport(len(mine), False, None, None, False, None)
    e = reconstruct_leading(mine[:t]).value
    chl = reconstruct_free(mine[:t]).value
    payload = (e >> scheme.mac_bits) & ((1 << scheme.payload_bits) - 1)
    if scheme.cipher == "null":
        return CoalitionReport(len(mine), True, e, chl, True, payload)
    rng = rng if rng is not None else np.random.default_rng(0)
    guess_key = MacKey(int.from_bytes(rng.bytes(2), "big"), 16)
    guess = payload ^ keystream(guess_key, scheme.payload_bits)
    return CoalitionReport(len(mine), True, e, chl, False, guess)


# ---------------------------------------------------------------------------

@dataclass
class ExperimentReport:
    """``trials`` counts valid attacks only; zero distortions go to ``invalid_trials``."""

    trials: int
    misses: int
    theoretical_bound: float
    invalid_trials: int = 0
    block_bits: int | None = None
    block_count: int | None = None
    stage_counts: dict[str, int] = dc_field(default_factory=dict)

    @property
    def empirical_rate(self) -> float:
        return self.misses / self.trials if self.trials else 0.0

    @property
    def sigma(self) -> float:
        p = self.theoretical_bound
        return sqrt(p * (1 - p) / self.trials) if self.trials else 0.0

    def within_bound(self, k_sigma: float = 3.0) -> bool:
        return self.empirical_rate <= self.theoretical_bound + k_sigma * self.sigma

    def to_json(self) -> str:
        return json.dumps(
            {
                "b": self.block_bits,
                "g": self.block_count,
                "trials": self.trials,
                "invalid_trials": self.invalid_trials,
                "misses": self.misses,
                "empirical_rate": self.empirical_rate,
                "theoretical_bound": self.theoretical_bound,
                "stage_counts": self.stage_counts,
                "note": "channel tampering is modelled as share distortion",
            },
            sort_keys=True,
        )


def measure_pmiss(
    block_bits: int,
    block_count: int,
    trials: int | None = None,
    seed: int = 0,
    zero_distortion: bool = False,
) -> ExperimentReport:
    """Rate at which a coalition's manipulation of E passes AMD verification.

    Each trial deals a random AMD-encoded secret (t=3, n=3) over
    GF(2^((g+1)b)) under a random nonzero key. The coalition adds a random
    polynomial with zero free term to its shares, which shifts E by its
    leading coefficient and leaves CHL intact; the client verifies the
    reconstructed E. A zero shift is no attack and is counted as invalid.

    ``trials`` attacks are attempted, defaulting to 4 * 2^b (capped at 2^16).
    """
    if trials is None:
        trials = min(4 * 2**block_bits, 1 << 16)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    amd = AmdParams(block_bits, block_count)
    gf = amd.field
    width = (block_count + 1) * block_bits
    f = FieldSpec.builtin(width)
    t = 3
    misses = invalid = 0
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        key = gf.random(rng, nonzero=True)
        secret = int.from_bytes(rng.bytes((amd.secret_bits + 7) // 8), "big") & ((1 << amd.secret_bits) - 1)
        encoded = (secret << block_bits) | amd_tag(key, secret, amd)
        params = DealingParams(t, [f.element(d) for d in (1, 2, 3)], [f.element(f.random(rng))])
        shares = deal(f.element(encoded), f.element(f.random(rng)), params)
        delta = 0 if zero_distortion else f.random(rng)
        if delta == 0:
            invalid += 1
            continue
        shift = [0, f.random(rng), delta]
        forged = [Share(s.id, f.element(s.value.value ^ f.poly_eval(shift, s.id.value))) for s in shares]
        e = reconstruct_leading(forged).value
        if amd_tag(key, e >> block_bits, amd) == e & gf.mask:
            misses += 1
    return ExperimentReport(trials - invalid, misses, amd.miss_bound, invalid, block_bits, block_count)


def format_pmiss_table(reports: Sequence[ExperimentReport]) -> str:
    """Plain-text table: block size vs empirical and theoretical miss rate."""
    lines = [f"{'b':>4} {'g':>3} {'trials':>8} {'misses':>7} {'empirical':>11} {'bound g/2^b':>12}"]
    for r in reports:
        lines.append(
            f"{r.block_bits:>4} {r.block_count:>3} {r.trials:>8} {r.misses:>7} "
            f"{r.empirical_rate:>11.3e} {r.theoretical_bound:>12.3e}"
        )
    return "\n".join(lines)


# ---------------------------------------------------------------------------

def expected_stage(c: int, n: int, t: int) -> str:
    """Where an active coalition of size c should stop the protocol."""
    if c == 0:
        return "2"
    if c <= (n - t) // 2:
        return "<=3"
    if c <= n - t:
        return "4"
    return "alarm"


def escalation_profile(
    dealer_client_factory,
    runs: int,
    n: int,
    t: int,
    seed: int = 0,
    strategies: Sequence[str] = ("forged-polynomial", "random-distortion"),
):
    """Run seeded protocol instances with random coalitions of every size.

    ``dealer_client_factory(i)`` returns a fresh ``(dealer, client)`` pair.
    Yields ``(c, strategy, secret, outcome)`` per run.
    """
    for i in range(runs):
        rng = np.random.default_rng([seed, i])
        c = i % (n + 1)
        strategy = strategies[i % len(strategies)]
        dealer, client = dealer_client_factory(i)
        scheme = dealer.config.etm
        nbytes = (scheme.payload_bits + 7) // 8
        mask = (1 << scheme.payload_bits) - 1
        secret = int.from_bytes(rng.bytes(nbytes), "big") & mask
        flip = 0
        while not flip:
            flip = int.from_bytes(rng.bytes(nbytes), "big") & mask
        forged = secret ^ flip
        compromised = frozenset(int(x) + 1 for x in rng.choice(n, size=c, replace=False))
        adv = AdversaryConfig(compromised, strategy, forged, int(rng.integers(1 << 31)), scheme)
        yield c, strategy, secret, run_full(dealer, client, secret, n, t, adv)


def stage_label(stage: Stage) -> str:
    return {Stage.FAILED: "alarm"}.get(stage, str(stage.value))


def summarize(outcomes) -> Counter:
    return Counter(stage_label(o.terminating_stage) for *_, o in outcomes)
