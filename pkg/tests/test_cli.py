import json
import subprocess
import sys

import pytest

from compjac.cli import RunManifest, main


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_betti_json(capsys, tmp_path):
    code, out = _run(capsys, "betti", "-p", "3", "-q", "4", "--json", "--cache-dir", str(tmp_path))
    assert code == 0
    payload = json.loads(out)
    assert payload["results"][0]["betti"] == [1, 1, 2, 1]
    assert payload["manifest"]["presentation_hashes"]


def test_grm_text_mentions_both_series(capsys):
    code, out = _run(capsys, "grm", "-p", "3", "-q", "4")
    assert code == 0
    assert "holds" in out
    assert "1 + 2t + t^2 + t^3" in out
    assert "betti: [1, 1, 2, 1]" in out


def test_reruns_are_byte_identical_and_cached(capsys, tmp_path):
    argv = ["hilbert", "-p", "2,3", "-q", "5", "--json", "--cache-dir", str(tmp_path)]
    _, first = _run(capsys, *argv)
    stored = list((tmp_path / "results").glob("*.json"))
    assert len(stored) == 1
    _, second = _run(capsys, *argv)
    assert first == second
    key = json.loads(first)["manifest"]["key"]
    assert stored[0].stem == key


def test_flags_before_subcommand(capsys):
    _, before = _run(capsys, "--json", "dyck", "-p", "2", "-q", "3")
    _, after = _run(capsys, "dyck", "-p", "2", "-q", "3", "--json")
    assert before == after
    assert json.loads(before)["results"][0]["dyck"] == [1, 1]


def test_jobs_do_not_change_output(capsys):
    _, serial = _run(capsys, "dyck", "-p", "2,3", "-q", "5,7", "--json")
    _, parallel = _run(capsys, "dyck", "-p", "2,3", "-q", "5,7", "--json", "--jobs", "2")
    assert serial != "" and json.loads(serial)["results"] == json.loads(parallel)["results"]


def test_csv_projection(capsys):
    _, out = _run(capsys, "modules", "-p", "2", "-q", "3", "--csv")
    lines = out.strip().splitlines()
    assert lines[0] == "p,q,adjoined,shift,p_basis"
    assert len(lines) == 3


def test_toric_exit_code(capsys):
    code, out = _run(capsys, "toric", "--gens", "3,4,5")
    assert code == 0 and "holds" in out


def test_timing_only_on_request(capsys):
    _, plain = _run(capsys, "sp-points", "-p", "2", "-q", "3", "--json")
    _, timed = _run(capsys, "sp-points", "-p", "2", "-q", "3", "--json", "--timing")
    assert "wall_clock_s" not in plain and "wall_clock_s" in timed


def test_out_file(capsys, tmp_path):
    target = tmp_path / "dyck.json"
    _run(capsys, "dyck", "-p", "3", "-q", "4", "--json", "--out", str(target))
    payload = json.loads(target.read_text())
    assert payload["results"][0]["dyck"] == [1, 1, 2, 1]
    assert payload["manifest"]["outputs"] == [str(target)]


def test_non_coprime_is_usage_error():
    with pytest.raises(SystemExit):
        main(["betti", "-p", "2", "-q", "4"])


def test_manifest_key_ignores_outputs():
    a = RunManifest("betti", {"p": [3], "q": [4]})
    b = RunManifest("betti", {"p": [3], "q": [4]}, outputs=["x.json"])
    assert a.key() == b.key()
    assert a.key() != RunManifest("betti", {"p": [3], "q": [5]}).key()


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "compjac", "dyck", "-p", "2", "-q", "3"],
                         capture_output=True, text=True, check=True).stdout
    assert out.strip() == "(2,3) dyck=[1, 1]"


def test_module_error_surfaces_verbatim(capsys):
    code = main(["planar", "--family", "4,2q,s", "-q", "3", "-s", "7", "--convention", "paper"])
    err = capsys.readouterr().err
    assert code == 3
    assert "SupportError" in err and "no point" in err
