"""Robust threshold secret sharing with PUF-keyed Encrypt-then-MAC,
Reed-Solomon share correction and group-testing cheater identification."""

from .authcode import (
    AmdParams,
    AuthenticationError,
    EncodedSecret,
    EtmScheme,
    MacKey,
    amd_encode,
    amd_verify,
    etm_decode,
    etm_encode,
    hmac_sign,
    hmac_verify,
)
from .gf2b import FieldElement, FieldSpec, gf_add, gf_inv, gf_mul, poly_eval
from .grouptest import build_plan, identify_adaptive, identify_full, invite_and_extend
from .protocol import (
    CheatingDetected,
    CheatingUnrecoverable,
    Client,
    Dealer,
    ProtocolOutcome,
    SchemeConfig,
    Stage,
    client_retrieve,
    dealer_distribute,
    reference_setup,
    run_full,
    simulation_setup,
    stage3_correct,
    stage4_group_test,
)
from .pufmodel import CrpRepository, PufDevice, crp_enroll, fe_generate, fe_reproduce
from .rsdecode import CodewordView, DecodeFailure, correct_shares
from .shamir import DealingParams, Share, deal, reconstruct_free, reconstruct_leading

__version__ = "0.1.0"

__all__ = [
    "amd_encode",
    "amd_verify",
    "AmdParams",
    "AuthenticationError",
    "build_plan",
    "CheatingDetected",
    "CheatingUnrecoverable",
    "Client",
    "client_retrieve",
    "CodewordView",
    "correct_shares",
    "crp_enroll",
    "CrpRepository",
    "deal",
    "Dealer",
    "dealer_distribute",
    "DealingParams",
    "DecodeFailure",
    "EncodedSecret",
    "etm_decode",
    "etm_encode",
    "EtmScheme",
    "fe_generate",
    "fe_reproduce",
    "FieldElement",
    "FieldSpec",
    "gf_add",
    "gf_inv",
    "gf_mul",
    "hmac_sign",
    "hmac_verify",
    "identify_adaptive",
    "identify_full",
    "invite_and_extend",
    "MacKey",
    "poly_eval",
    "ProtocolOutcome",
    "PufDevice",
    "reconstruct_free",
    "reconstruct_leading",
    "reference_setup",
    "run_full",
    "SchemeConfig",
    "Share",
    "simulation_setup",
    "Stage",
    "stage3_correct",
    "stage4_group_test",
]
