"""Command-line front end: crp-enroll, deal, reconstruct, pmiss, matrix.

Exit codes: 0 success, 2 usage/config error, 3 cheating detected and
corrected, 4 cheating detected and unrecoverable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .attacksim import measure_pmiss
from .authcode import EtmScheme
from .gf2b import FieldSpec
from .grouptest import build_plan
from .protocol import (
    CheatingDetected,
    CheatingUnrecoverable,
    Client,
    Dealer,
    SchemeConfig,
    client_retrieve,
    dealer_distribute,
    stage3_correct,
    stage4_group_test,
)
from .pufmodel import CrpExhausted, CrpRepository, HelperData, PufDevice, crp_enroll
from .shamir import read_share_file, write_share_file

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CORRECTED = 3
EXIT_UNRECOVERABLE = 4


class ConfigError(Exception):
    pass


def _hex(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex value: {text!r}")


def _pin(text: str) -> tuple[int, int]:
    try:
        c, k = text.split(":")
        return int(c, 16), int(k, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected CHL:K in hex, got {text!r}")


def _scheme(args) -> SchemeConfig:
    b = args.field_bits
    if args.mac == "amd":
        if b % (args.g + 1):
            raise ConfigError(f"--field-bits {b} is not divisible by g+1={args.g + 1}")
        etm = EtmScheme("amd", args.cipher, b // (args.g + 1), args.g)
    else:
        secret_bits = args.secret_bits or b // 2
        if secret_bits >= b:
            raise ConfigError("--secret-bits leaves no room for the tag")
        etm = EtmScheme("hmac", args.cipher, secret_bits=secret_bits, tag_bits=min(b - secret_bits, 256))
    return SchemeConfig(FieldSpec.builtin(b), etm)


# ---------------------------------------------------------------------------
# client state file

def save_client_state(path, device: PufDevice, helpers: dict[int, HelperData]) -> None:
    doc = {
        "device_secret_hex": device.device_secret.hex(),
        "challenge_bits": device.challenge_bits,
        "response_bits": device.response_bits,
        "noise_rate": device.noise_rate,
        "helpers": [
            {"challenge_hex": hex(c), "offset_hex": hex(h.offset), "key_bits": h.key_bits, "repetition": h.repetition}
            for c, h in helpers.items()
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_client_state(path) -> tuple[PufDevice, dict[int, HelperData]]:
    doc = json.loads(Path(path).read_text())
    device = PufDevice(
        bytes.fromhex(doc["device_secret_hex"]),
        int(doc["challenge_bits"]),
        int(doc["response_bits"]),
        float(doc["noise_rate"]),
    )
    helpers = {
        int(h["challenge_hex"], 16): HelperData(int(h["offset_hex"], 16), int(h["key_bits"]), int(h["repetition"]))
        for h in doc["helpers"]
    }
    return device, helpers


# ---------------------------------------------------------------------------
# commands

def cmd_crp_enroll(args) -> int:
    rng = np.random.default_rng(args.seed)
    device = PufDevice(rng.bytes(32), args.field_bits, args.field_bits * args.repetition, args.noise_rate)
    path = Path(args.crp_file)
    repo = CrpRepository.load(path) if path.exists() else CrpRepository()
    pinned = dict(args.pin or [])
    helpers = crp_enroll(repo, device, args.count, rng, args.client_id, args.repetition, pinned)
    repo.save(path, args.client_id)
    save_client_state(args.client_state, device, helpers)
    print(f"enrolled {len(helpers)} pairs for {args.client_id}", file=sys.stderr)
    return EXIT_OK


def cmd_deal(args) -> int:
    if args.holders < args.threshold:
        raise ConfigError("threshold exceeds holders")
    cfg = _scheme(args)
    repo = CrpRepository.load(args.crp_file)
    client_id = next(iter(repo.pairs))
    dealer = Dealer(repo, cfg, client_id, seed=args.seed)
    middle = args.middle if args.middle else None
    if middle is not None and len(middle) != args.threshold - 2:
        raise ConfigError(f"need {args.threshold - 2} --middle coefficients")
    try:
        shares = dealer_distribute(dealer, args.secret, args.holders, args.threshold, middle)
    except CrpExhausted as exc:
        raise ConfigError(str(exc))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = cfg.etm.to_header()
    for s in shares:
        write_share_file(out / f"share_{s.id.value}.json", [s], args.threshold, header)
    dealing = dealer.dealing
    (out / "dealer.json").write_text(
        json.dumps(
            {
                "client_id": client_id,
                "challenge_hex": cfg.field.hex(dealing.challenge),
                "seed": None if middle else dealing.params.seed,
                "threshold": args.threshold,
                "holders": args.holders,
                **header,
            },
            indent=2,
        )
        + "\n"
    )
    repo.save(args.crp_file, client_id)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    shares, header = [], None
    for p in args.shares:
        got, h = read_share_file(p)
        shares.extend(got)
        header = header or h
    t = int(header["threshold"])
    if len(shares) < t:
        raise ConfigError(f"need at least {t} shares, got {len(shares)}")
    cfg = SchemeConfig(header["field"], EtmScheme.from_header(header))
    device, helpers = load_client_state(args.client_state)
    client = Client(device, helpers, cfg, np.random.default_rng(args.seed))
    digits = (cfg.etm.payload_bits + 3) // 4

    try:
        secret = client_retrieve(client, shares[:t])
        print(f"0x{secret:0{digits}x}")
        return EXIT_OK
    except CheatingDetected:
        pass
    shares = sorted(shares, key=lambda s: s.id.value)
    try:
        secret, corr = stage3_correct(client, shares, t)
        cheaters = sorted(shares[i].id.value for i in corr.error_positions)
    except CheatingDetected:
        try:
            result, secret = stage4_group_test(client, shares, t)
        except CheatingUnrecoverable:
            print("cheating detected; fewer than t honest holders", file=sys.stderr)
            return EXIT_UNRECOVERABLE
        cheaters = sorted(shares[i].id.value for i in result.cheaters)
    print(f"0x{secret:0{digits}x}")
    print("cheaters: " + " ".join(str(c) for c in cheaters), file=sys.stderr)
    return EXIT_CORRECTED


def cmd_pmiss(args) -> int:
    if args.trials is not None and args.trials < 1:
        raise ConfigError("trials must be >= 1")
    report = measure_pmiss(args.block_bits, args.g, args.trials, args.seed)
    print(report.to_json())
    return EXIT_OK


def cmd_matrix(args) -> int:
    try:
        plan = build_plan(args.holders, args.threshold)
    except ValueError as exc:
        raise ConfigError(str(exc))
    print(plan.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-tss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def scheme_flags(p):
        p.add_argument("--field-bits", type=int, default=16)
        p.add_argument("--threshold", type=int, default=3)
        p.add_argument("--holders", type=int, default=7)
        p.add_argument("--mac", choices=("amd", "hmac"), default="amd")
        p.add_argument("--cipher", choices=("null", "keystream"), default="null")
        p.add_argument("--g", type=int, default=3, help="AMD block count")
        p.add_argument("--secret-bits", type=int, default=None, help="HMAC secret width")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("crp-enroll", help="enroll a simulated client PUF")
    p.add_argument("--crp-file", required=True)
    p.add_argument("--client-state", required=True)
    p.add_argument("--client-id", default="client")
    p.add_argument("--count", type=int, default=16)
    p.add_argument("--pin", type=_pin, action="append", help="force CHL:K (hex)")
    p.add_argument("--field-bits", type=int, default=16)
    p.add_argument("--repetition", type=int, default=5)
    p.add_argument("--noise-rate", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_crp_enroll)

    p = sub.add_parser("deal", help="encode and share a secret")
    p.add_argument("secret", type=_hex)
    scheme_flags(p)
    p.add_argument("--crp-file", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--middle", type=_hex, action="append", help="middle coefficient (hex)")
    p.set_defaults(func=cmd_deal)

    p = sub.add_parser("reconstruct", help="retrieve a secret from share files")
    p.add_argument("shares", nargs="+")
    p.add_argument("--client-state", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("pmiss", help="measure the AMD mis-detection rate")
    p.add_argument("--block-bits", type=int, default=4)
    p.add_argument("--g", type=int, default=3)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_pmiss)

    p = sub.add_parser("matrix", help="dump the group-testing plan as JSON")
    p.add_argument("--holders", type=int, default=7)
    p.add_argument("--threshold", type=int, default=3)
    p.set_defaults(func=cmd_matrix)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
