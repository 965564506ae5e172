import json
import subprocess
import sys

import pytest

from setpairs.cli import main

from .conftest import COMPLEMENTS_4


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate(capsys, write_json, sp7, k4):
    code, out, _ = run(capsys, "validate", write_json(sp7.to_json()))
    assert (code, out.strip()) == (0, "valid (n=7, k=4, m=3, ℓ=4)")
    code, out, _ = run(capsys, "validate", write_json(k4.to_json()))
    assert (code, out.strip()) == (2, "property (ii) failed, witness {1,2,3,4}")


def test_validate_property_i(capsys, write_json):
    code, out, _ = run(capsys, "validate", "--json", write_json({"n": 4, "sets": [[1, 2, 3], [1, 2, 4]]}))
    assert code == 2
    assert json.loads(out) == {"valid": False, "error": "PropertyIFailed", "witness": {"vertex": 1}}


def test_io_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert run(capsys, "validate", str(bad))[0] == 1
    assert run(capsys, "validate", str(tmp_path / "missing.json"))[0] == 1
    shape = tmp_path / "shape.json"
    shape.write_text('{"n": 3}')
    assert run(capsys, "certify", str(shape))[0] == 1


def test_certify_sp7(capsys, write_json, sp7):
    code, out, _ = run(capsys, "certify", "--json", write_json(sp7.to_json()))
    doc = json.loads(out)
    assert code == 0
    assert doc["bounds"]["h"] == 4
    assert (doc["bounds"]["main"], doc["bounds"]["conjecture"]) == (29, 10)
    assert doc["bounds"]["main_ok"] and doc["bounds"]["conjecture_ok"]
    assert "meta" not in doc


def test_certify_is_byte_deterministic(capsys, write_json, sp7):
    path = write_json(sp7.to_json())
    assert run(capsys, "certify", "--json", path)[1] == run(capsys, "certify", "--json", path)[1]


def test_certify_out_of_scope(capsys, write_json, six_three):
    code, out, _ = run(capsys, "certify", write_json(six_three.to_json()))
    assert code == 0
    assert "ℓ<4: out-of-scope case; arithmetic bounds only" in out


def test_certify_invalid(capsys, write_json, k4):
    assert run(capsys, "certify", write_json(k4.to_json()))[0] == 2


def test_certify_check_round_trip(capsys, write_json, sp7, tmp_path):
    cert_path = str(tmp_path / "cert.json")
    assert run(capsys, "certify", "--json", "--timing", "-o", cert_path, write_json(sp7.to_json()))[0] == 0
    doc = json.loads(open(cert_path).read())
    assert "elapsed_seconds" in doc["meta"]
    assert run(capsys, "certify", "--check", cert_path)[0] == 0
    doc["pairs"][2]["anchor"] = 7
    code, out, _ = run(capsys, "certify", "--check", write_json(doc, "tampered.json"))
    assert code == 3
    assert "rejected" in out


def test_certify_finding_exit(capsys, write_json, searched_systems):
    from setpairs.certificate import certify
    from setpairs.decomposition import Policy

    fam = next(f for f in searched_systems if certify(f, Policy(min_stage_size=2)).status == "finding")
    assert run(capsys, "certify", "--min-stage-size", "2", write_json(fam.to_json()))[0] == 3


def test_decompose_and_pairs(capsys, write_json, sp7):
    path = write_json(sp7.to_json())
    code, out, _ = run(capsys, "decompose", "--json", path)
    assert code == 0 and json.loads(out)["G"] == [5, 6, 7]
    code, out, _ = run(capsys, "pairs", "--json", path)
    assert code == 0 and [p["anchor"] for p in json.loads(out)] == [5, 5, 6, 7]
    code, out, _ = run(capsys, "pairs", path)
    assert "set 1 stage 0: pair {2,5} anchor 5" in out


def test_decompose_out_of_scope(capsys, write_json, six_three):
    assert run(capsys, "decompose", write_json(six_three.to_json()))[0] == 2


def test_skew_verify(capsys, write_json):
    code, out, _ = run(capsys, "skew-verify", write_json(COMPLEMENTS_4))
    assert code == 0 and "h=6 = bound 6 (tight)" in out
    bad = {"r": 2, "s": 2, "pairs": [{"a": [1, 2], "b": [2, 3]}]}
    code, out, _ = run(capsys, "skew-verify", write_json(bad))
    assert code == 2 and "witness i=1" in out
    sizes = {"r": 2, "s": 2, "pairs": [{"a": [1, 2], "b": [3]}]}
    assert run(capsys, "skew-verify", write_json(sizes))[0] == 2


def test_search_sp7(capsys):
    code, out, _ = run(capsys, "search", "--n", "7", "--m", "3", "--ell-min", "4")
    lines = [json.loads(l) for l in out.splitlines()]
    assert code == 0
    assert len(lines) == 2
    assert lines[-1]["summary"]["best_n"] == 7
    assert lines[-1]["summary"]["exhausted"]


def test_search_empty(capsys):
    code, out, _ = run(capsys, "search", "--n", "4", "--m", "1")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 1
    assert json.loads(lines[0])["summary"]["found"] == 0


def test_search_flag_errors(capsys):
    code, _, err = run(capsys, "search", "--n", "70")
    assert code == 1 and "UniverseTooLarge" in err
    assert run(capsys, "search", "--n", "7", "--m", "0")[0] == 1
    assert run(capsys, "search", "--n", "7", "--ell-min", "1")[0] == 1
    assert run(capsys, "search", "--n", "7", "--budget-seconds", "-1")[0] == 1
    assert run(capsys, "search")[0] == 1


def test_search_budget_exit(capsys):
    assert run(capsys, "search", "--n", "11", "--m", "3", "--budget-seconds", "0.05")[0] == 4


def test_search_sample(capsys, tmp_path):
    out_path = tmp_path / "s.jsonl"
    code, _, _ = run(capsys, "search", "--n", "8", "--m", "3", "--sample", "50", "--seed", "5", "-o", str(out_path))
    assert code == 0
    first = out_path.read_text()
    run(capsys, "search", "--n", "8", "--m", "3", "--sample", "50", "--seed", "5", "-o", str(out_path))
    assert out_path.read_text() == first


@pytest.mark.parametrize("m, expected", [(3, "conjecture 10, main 29, tuza 43/4"), (1, "conjecture 3, main 9, tuza 11/4")])
def test_bound(capsys, m, expected):
    code, out, _ = run(capsys, "bound", "--m", str(m))
    assert (code, out.strip()) == (0, expected)


def test_bound_rejects_zero(capsys):
    assert run(capsys, "bound", "--m", "0")[0] == 1


def test_unknown_command(capsys):
    assert run(capsys, "frobnicate")[0] == 1


def test_console_entry_point(write_json, sp7):
    proc = subprocess.run(
        [sys.executable, "-m", "setpairs.cli", "validate", write_json(sp7.to_json())],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "valid (n=7, k=4, m=3, ℓ=4)"
