import json
import subprocess
import sys

import numpy as np
import pytest

from apnlab.cli import main
from apnlab.field_core import FieldSpec
from apnlab.scan import bench_walsh, bent_scan, cyclotomic_leaders

BENT_EXPONENTS_8 = list(range(15, 241, 15))


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


# --- scan and bench ---------------------------------------------------------------------

def test_cyclotomic_leaders_partition():
    groups = cyclotomic_leaders(8)
    flat = sorted(i for orbit in groups.values() for i in orbit)
    assert flat == list(range(1, 255))
    assert groups[15] == [15, 30, 60, 120, 135, 195, 225, 240]


def test_bent_scan_small():
    r = bent_scan(4, 8)
    assert r.skipped_odd == [5, 7]
    assert r.bent_exponents(4) == [] and r.bent_exponents(6) == []
    assert r.bent_exponents(8) == BENT_EXPONENTS_8
    assert all(rec.sign_ok and rec.chi_zero_sign == "PLUS" for rec in r.records)


def test_bent_scan_methods_agree():
    for method in ("naive", "classes"):
        r = bent_scan(6, 8, method=method, dedup=False)
        assert r.bent_exponents(8) == BENT_EXPONENTS_8


def test_bent_scan_caps():
    with pytest.raises(ValueError):
        bent_scan(16, 16)
    with pytest.raises(ValueError):
        bent_scan(4, 4, method="bogus")


def test_bench_rows_agree():
    rows = bench_walsh(8, [15, 7], repeat=1)
    assert all(r.equal for r in rows)
    cls = [r for r in rows if r.method == "classes"]
    assert [r.evaluations for r in cls] == [18, 256]


# --- CLI ------------------------------------------------------------------------------------

def test_field_info(capsys):
    code, out = run(capsys, "field", "info", "--n", "8")
    info = json.loads(out)
    assert code == 0 and info["poly"] == "11b" and info["primitive"] == "3"
    f = FieldSpec(8)
    assert f.rel_trace_half(int(info["omega"], 16)) == 1


def test_field_info_bad_poly(capsys):
    code, _ = run(capsys, "field", "info", "--n", "4", "--poly", "15")
    assert code == 2


def test_walsh_monomial(capsys):
    code, out = run(capsys, "walsh", "monomial", "--n", "8", "--i", "15", "--method", "classes")
    d = json.loads(out)
    assert code == 0 and d["bent"] and d["evaluations"] == 18 and d["chi_zero"] == 16
    code, out = run(capsys, "walsh", "monomial", "--n", "6", "--i", "5", "--a", "2", "--method", "naive", "--values")
    d = json.loads(out)
    assert len(d["values"]) == 64 and d["parseval"]


def test_bent_scan_cli_json_and_csv(capsys, tmp_path):
    out_json = tmp_path / "scan.json"
    code, _ = run(capsys, "bent-scan", "--k-min", "4", "--k-max", "8", "-o", str(out_json))
    d = json.loads(out_json.read_text())
    assert code == 0
    assert sorted(r["i"] for r in d["records"]) == BENT_EXPONENTS_8
    code, out = run(capsys, "bent-scan", "--k-min", "8", "--k-max", "8", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0].startswith("k,i,a,bent") and len(lines) == 17


def test_bent_scan_cap_exit(capsys):
    code, _ = run(capsys, "bent-scan", "--k-min", "16", "--k-max", "16")
    assert code == 2


def test_apn_check_monomial(capsys):
    code, out = run(capsys, "apn", "check", "--monomial", "3", "--n", "7")
    assert code == 0 and json.loads(out)["differential_uniformity"] == 2
    code, out = run(capsys, "apn", "check", "--monomial", "2", "--n", "5")
    assert code == 0 and json.loads(out)["differential_uniformity"] == 32


def test_apn_check_sbox(capsys, tmp_path):
    f = FieldSpec(5)
    table = f.pow_vec(f.elements(), 3)
    p = tmp_path / "sbox.txt"
    p.write_text("\n".join(f"{v:x}" for v in table))
    code, out = run(capsys, "apn", "check", "--sbox", str(p))
    assert code == 0 and json.loads(out)["is_apn"]
    bad = tmp_path / "bad.txt"
    bad.write_text("1\n2\n3\n")
    assert run(capsys, "apn", "check", "--sbox", str(bad))[0] == 2
    assert run(capsys, "apn", "check", "--sbox", str(tmp_path / "missing.txt"))[0] == 2


def test_family_build_exit_codes(capsys, tmp_path):
    code, out = run(capsys, "family", "build", "--name", "A_FAUX", "--n", "8", "--i", "2")
    d = json.loads(out)
    assert code == 3 and d["reason"] == "VACUOUS" and d["verdict"] == "HYPOTHESIS_FAIL"
    code, out = run(capsys, "family", "build", "--name", "B", "--n", "6", "--s", "1", "--b", "2", "--c", "2")
    assert code == 0 and json.loads(out)["uniformity"] == 2
    code, _ = run(capsys, "family", "build", "--name", "B", "--n", "6", "--s", "1", "--b", "1", "--c", "2")
    assert code == 3
    code, _ = run(capsys, "family", "build", "--name", "B", "--n", "8", "--s", "1", "--b", "2", "--c", "2")
    assert code == 2


def test_family_build_d_with_isomorphism(capsys):
    code, out = run(capsys, "family", "build", "--name", "D", "--n", "6", "--i", "1", "--c", "5", "--t", "3",
                    "--L", "dual")
    d = json.loads(out)
    assert d["params"]["L"]["kind"] == "dual"
    assert code in (0, 3)
    assert d["diagnostics"]["biconditional_holds"]


def test_family_search_and_verify(capsys, tmp_path):
    certs = tmp_path / "c.json"
    code, _ = run(capsys, "family", "search", "--name", "C", "--n", "6", "--budget", "3", "-o", str(certs))
    assert code == 0 and len(json.loads(certs.read_text())) == 3
    code, out = run(capsys, "family", "verify", "--cert", str(certs))
    assert code == 0 and all(r["reproduced"] for r in json.loads(out))
    data = json.loads(certs.read_text())
    data[1]["table_hash"] = "0" * 64
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert run(capsys, "family", "verify", "--cert", str(bad))[0] == 1
    bad.write_text("{not json")
    assert run(capsys, "family", "verify", "--cert", str(bad))[0] == 2


def test_family_search_vacuous_exit(capsys):
    code, out = run(capsys, "family", "search", "--name", "A_FAUX", "--n", "8", "--include-failures")
    assert code == 3 and all(c["reason"] == "VACUOUS" for c in json.loads(out))


def test_search_output_independent_of_workers(capsys):
    _, a = run(capsys, "family", "search", "--name", "B", "--n", "6", "--budget", "4")
    _, b = run(capsys, "family", "search", "--name", "B", "--n", "6", "--budget", "4", "--workers", "3")
    assert a == b
    assert run(capsys, "family", "search", "--name", "B", "--n", "6", "--workers", "0")[0] == 2


def test_bench_walsh_cli(capsys):
    code, out = run(capsys, "bench", "walsh", "--n", "8", "--i", "15,7", "--repeat", "1")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "n,i,method,evaluations,seconds,equal"
    assert all(line.endswith(",1") for line in lines[1:])


def test_env_var_lifts_cap(capsys, monkeypatch):
    monkeypatch.setenv("TOOL_MAX_N", "17")
    from apnlab.limits import check_exhaustive
    check_exhaustive(17)
    monkeypatch.delenv("TOOL_MAX_N")
    with pytest.raises(ValueError):
        check_exhaustive(17)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "apnlab", "field", "info", "--n", "4"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["poly"] == "13"


def test_apn_check_identity_sbox(capsys, tmp_path):
    p = tmp_path / "id.txt"
    p.write_text("\n".join(f"{v:x}" for v in range(16)))
    code, out = run(capsys, "apn", "check", "--sbox", str(p))
    d = json.loads(out)
    assert code == 0 and d["differential_uniformity"] == 16 and not d["is_apn"]
