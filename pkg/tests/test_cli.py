import json
import subprocess
import sys

import pytest

from robust_tss.cli import main

from conftest import GOLDEN_SHARES


@pytest.fixture
def enrolled(tmp_path):
    crp, state = tmp_path / "crp.json", tmp_path / "client.json"
    rc = main(["crp-enroll", "--crp-file", str(crp), "--client-state", str(state), "--count", "4", "--pin", "aaaa:0006"])
    assert rc == 0
    return tmp_path, crp, state


@pytest.fixture
def golden_dir(enrolled):
    tmp, crp, state = enrolled
    out = tmp / "shares"
    assert main(["deal", "3f0", "--crp-file", str(crp), "--out-dir", str(out), "--middle", "5555"]) == 0
    return out, state


def files(out, ids):
    return [str(out / f"share_{i}.json") for i in ids]


def tamper(out, i, value):
    p = out / f"share_{i}.json"
    doc = json.loads(p.read_text())
    doc["shares"][0]["value_hex"] = f"0x{value:04x}"
    p.write_text(json.dumps(doc))


def test_deal_writes_golden_shares(golden_dir):
    out, _ = golden_dir
    for i, v in GOLDEN_SHARES.items():
        doc = json.loads((out / f"share_{i}.json").read_text())
        assert doc["shares"] == [{"id_hex": f"0x{i:04x}", "value_hex": f"0x{v:04x}"}]
        assert doc["field_bits"] == 16 and doc["threshold"] == 3 and doc["mac"] == "amd"
    dealer = json.loads((out / "dealer.json").read_text())
    assert dealer["challenge_hex"] == "0xaaaa"
    assert "value_hex" not in json.dumps(dealer)


def test_deal_consumes_crp(golden_dir, enrolled):
    _, crp, _ = enrolled
    pairs = json.loads(crp.read_text())["pairs"]
    assert pairs[0]["challenge_hex"] == "0xaaaa" and pairs[0]["used"]
    assert sum(p["used"] for p in pairs) == 1


def test_reconstruct_honest(golden_dir, capsys):
    out, state = golden_dir
    assert main(["reconstruct", *files(out, [1, 2, 5]), "--client-state", str(state)]) == 0
    assert capsys.readouterr().out.strip() == "0x3f0"


def test_reconstruct_two_forged(golden_dir, capsys):
    out, state = golden_dir
    tamper(out, 3, 0x2686)
    tamper(out, 4, 0xDBAF)
    rc = main(["reconstruct", *files(out, [2, 3, 4, 1, 5, 6, 7]), "--client-state", str(state)])
    captured = capsys.readouterr()
    assert rc == 3
    assert captured.out.strip() == "0x3f0"
    assert "cheaters: 3 4" in captured.err


def test_reconstruct_four_forged(golden_dir, capsys):
    out, state = golden_dir
    for i, v in {3: 0x2686, 4: 0xDBAF, 6: 0x9A2F, 7: 0x4695}.items():
        tamper(out, i, v)
    rc = main(["reconstruct", *files(out, [2, 3, 4, 1, 5, 6, 7]), "--client-state", str(state)])
    captured = capsys.readouterr()
    assert rc == 3
    assert captured.out.strip() == "0x3f0"
    assert "cheaters: 3 4 6 7" in captured.err


def test_reconstruct_unrecoverable(golden_dir, capsys):
    out, state = golden_dir
    for i in (1, 3, 4, 6, 7):
        tamper(out, i, 0x1234 + i)
    rc = main(["reconstruct", *files(out, range(1, 8)), "--client-state", str(state)])
    assert rc == 4
    assert capsys.readouterr().out == ""


def test_reconstruct_too_few_shares(golden_dir):
    out, state = golden_dir
    assert main(["reconstruct", *files(out, [1, 2]), "--client-state", str(state)]) == 2


def test_deal_errors(enrolled, capsys):
    tmp, crp, _ = enrolled
    with pytest.raises(SystemExit) as exc:
        main(["deal", "--crp-file", str(crp), "--out-dir", str(tmp)])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err
    rc = main(["deal", "3f0", "--crp-file", str(crp), "--out-dir", str(tmp), "--holders", "2"])
    assert rc == 2
    assert "threshold exceeds holders" in capsys.readouterr().err
    assert main(["deal", "3f0", "--crp-file", str(crp), "--out-dir", str(tmp), "--g", "2"]) == 2


def test_deal_hmac_keystream_round_trip(enrolled, capsys):
    tmp, crp, state = enrolled
    out = tmp / "hmac"
    rc = main(["deal", "5a", "--crp-file", str(crp), "--out-dir", str(out), "--mac", "hmac", "--cipher", "keystream", "--secret-bits", "8"])
    assert rc == 0
    assert main(["reconstruct", *files(out, [7, 2, 4]), "--client-state", str(state)]) == 0
    assert capsys.readouterr().out.strip() == "0x5a"


def test_pmiss(capsys):
    assert main(["pmiss", "--block-bits", "4", "--g", "3", "--trials", "64", "--seed", "1"]) == 0
    first = capsys.readouterr().out
    assert json.loads(first)["theoretical_bound"] == 0.1875
    main(["pmiss", "--block-bits", "4", "--g", "3", "--trials", "64", "--seed", "1"])
    assert capsys.readouterr().out == first
    assert main(["pmiss", "--trials", "0"]) == 2


def test_matrix(capsys):
    assert main(["matrix", "--holders", "4", "--threshold", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc == {"n": 4, "t": 2, "rows": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]}
    assert main(["matrix", "--holders", "2", "--threshold", "3"]) == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "robust_tss.cli", "matrix", "--holders", "3", "--threshold", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"] == [[0, 1, 2]]
