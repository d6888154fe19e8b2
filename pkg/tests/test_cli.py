import json

from abelsup.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_enumerate_psl_3_4(capsys):
    code, out, _ = run(capsys, "enumerate", "--family", "psl", "-n", "3", "-q", "4", "--format", "json")
    assert code == EXIT_OK
    obj = json.loads(out)
    assert obj["d"] == 3 and obj["out_order"] == 12
    assert not obj["abelian"]


def test_enumerate_psl_2_8_cyclic(capsys):
    code, out, _ = run(capsys, "enumerate", "--family", "psl", "-n", "2", "-q", "8", "--format", "json")
    obj = json.loads(out)
    assert obj["out_order"] == 3 and obj["abelian"]
    assert len(obj["maximal_abelian"]) == 1 and obj["maximal_abelian"][0]["cyclic"]


def test_enumerate_human(capsys):
    code, out, _ = run(capsys, "enumerate", "--family", "psl", "-n", "2", "-q", "9")
    assert code == EXIT_OK
    assert "|Out| = 4" in out


def test_certify_and_replay(capsys, tmp_path):
    code, out, _ = run(capsys, "certify", "--family", "psl", "-n", "2", "-q", "9", "--t", "0", "--format", "json")
    assert code == EXIT_OK
    cert = json.loads(out)
    assert cert["verdict"] == "PASS"
    good = tmp_path / "good.json"
    good.write_text(json.dumps(cert))
    assert run(capsys, "certify", "--replay", str(good))[0] == EXIT_OK
    cert["q"] = 25
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cert))
    code, out, _ = run(capsys, "certify", "--replay", str(bad))
    assert code == EXIT_FAIL and "FAIL" in out


def test_replay_missing_file(capsys, tmp_path):
    assert run(capsys, "certify", "--replay", str(tmp_path / "nope.json"))[0] == EXIT_USAGE


def test_construct_expression(capsys):
    code, out, _ = run(capsys, "construct", "--family", "dn_odd", "-n", "3", "-q", "9", "--t", "d,f*t")
    assert code == EXIT_OK
    assert "dn_odd-d_phitau" in out


def test_certify_fixed_rank_default_n(capsys):
    code, out, _ = run(capsys, "certify", "--family", "e6", "-q", "13", "--t", "d", "--prefer", "chevalley")
    assert code == EXIT_OK and "chevalley-e6_case1" in out


def test_usage_errors(capsys):
    assert run(capsys, "enumerate", "--family", "g2", "-n", "2", "-q", "4")[0] == EXIT_USAGE
    assert run(capsys, "enumerate", "--family", "psl", "-n", "2", "-q", "6")[0] == EXIT_USAGE
    assert run(capsys, "enumerate", "--family", "psl", "-q", "4")[0] == EXIT_USAGE
    assert run(capsys, "enumerate", "--family", "psl", "-n", "2", "-q", "4096",
                "--field-table-bound", "1000")[0] == EXIT_USAGE
    assert run(capsys, "sweep", "--jobs", "0")[0] == EXIT_USAGE
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys, "certify", "--family", "psl", "-n", "3", "-q", "4", "--t", "99")[0] == EXIT_USAGE


def test_empty_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "psl", "--q-list", "", "--format", "json")
    assert code == EXIT_OK
    obj = json.loads(out)
    assert obj["cells"] == [] and obj["totals"]["certificates"] == 0


def test_sweep_parallel_matches_serial(capsys):
    args = ("sweep", "--family", "psl,psu", "--max-n", "3", "--q-list", "4,5", "--format", "json")
    code1, serial, _ = run(capsys, *args)
    code2, parallel, _ = run(capsys, *args, "--jobs", "3")
    assert code1 == code2 == EXIT_OK
    assert serial == parallel


def test_sweep_human(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "psl", "--max-n", "2", "--q-list", "4,9")
    assert code == EXIT_OK
    assert out.strip().splitlines()[-1].startswith("totals:")
