import json
import subprocess
import sys

import pytest
import sympy

from scs_lab.cli import main, golden_diff, load_golden, cn_table_data
from scs_lab.sympoly import monomial_sym, m_expand


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_coeffs_json(capsys):
    code, out, _ = run(capsys, "coeffs", "--order", "4", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["a"][1] == {"q": "-1/4", "sqrt2": 1, "sqrtpi": 0, "pi": 0}
    assert len(data["b"]) == 4


def test_coeffs_csv(capsys, tmp_path):
    path = tmp_path / "c.csv"
    code, _, _ = run(capsys, "coeffs", "--order", "3", "--csv", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "k,a,b" and len(lines) == 4


def test_cn_table_matches_golden(capsys):
    code, out, _ = run(capsys, "cn-table", "--d", "3", "--n", "5", "--json")
    assert code == 0
    assert json.loads(out)["golden_diff"] == []


def test_cn_table_tampered_golden(capsys, tmp_path):
    gold = load_golden("cn_d3.json")
    gold["B"]["4"][1][1] = "1/2048"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(gold))
    code, out, _ = run(capsys, "cn-table", "--golden", str(path))
    assert code == 1
    assert "/B/4[1][1]: '1/4096' != '1/2048'" in out


def test_golden_diff_paths():
    assert golden_diff({"a": [1, 2]}, {"a": [1, 3]}) == ["/a[1]: 2 != 3"]
    assert golden_diff({"a": 1}, {"b": 1}) == ["/b: missing"]
    assert golden_diff({"a": 1, "extra": 0}, {"a": 1}) == []


def test_golden_power_expansions():
    gold = load_golden("cn_d3.json")["power_expansions"]
    m1 = monomial_sym((1,), 3)
    for key, terms in gold.items():
        k = int(key.split("^")[1])
        got = {lam.label(): int(c.q) for lam, c in m_expand(m1 ** k)}
        assert got == dict(terms)


def test_golden_factorizations():
    gold = load_golden("cn_d3.json")
    x = sympy.symbols("x1:4")
    B5 = dict(cn_table_data(3, 5)["B"]["5"])

    def msym(label):
        parts = tuple(int(ch) for ch in label[1:])
        terms = monomial_sym(parts, 3).terms
        return sum(sympy.prod(xi ** e for xi, e in zip(x, mono)) for mono in terms)

    lhs = sum(-32768 * sympy.Rational(q) * msym(l) for l, q in B5.items()) - 399 * sum(x) ** 5
    facts = list(gold["factorizations"].values())
    assert sympy.expand(lhs - sympy.sympify(facts[0])) == 0
    assert str(sympy.factor(lhs)) == str(sympy.factor(sympy.sympify(facts[0])))
    assert sympy.expand(msym("m21") + 2 * msym("m111") - sympy.sympify(facts[1])) == 0


def test_verify_kod_exit_codes(capsys):
    assert run(capsys, "verify-kod")[0] == 0
    code, out, _ = run(capsys, "verify-kod", "--tamper")
    assert code == 1
    assert "INVALID" in out


def test_uniqueness_thresholds(capsys):
    code, out, _ = run(capsys, "uniqueness", "--d", "3", "--source", "v", "--thresholds")
    assert code == 0
    assert "b1**2/(2*b0)" in out


def test_uniqueness_needs_input(capsys):
    code, _, err = run(capsys, "uniqueness", "--d", "3")
    assert code == 2 and "error" in err


@pytest.mark.parametrize("argv", [["nope"], ["coeffs", "--order", "x"], ["birkhoff", "--samples", "0"],
                                  ["convolve", "--t", "1,a"]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_cf_liouville_too_deep(capsys):
    code, _, err = run(capsys, "cf", "--alpha", "liouville:3", "--depth", "12")
    assert code == 2 and "digits" in err


def test_cf_golden(capsys):
    code, out, _ = run(capsys, "cf", "--alpha", "golden", "--depth", "15", "--json")
    assert code == 0
    assert json.loads(out)["quotients"] == ["1"] * 15


def test_json_is_byte_identical():
    argv = [sys.executable, "-m", "scs_lab.cli", "birkhoff", "--alpha", "golden", "--k", "6",
            "--samples", "2000", "--seed", "11", "--json"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)
