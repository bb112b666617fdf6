from __future__ import annotations

import csv
import io
import json
import math

import pytest

from ranksyz.estimator import (BUILTIN, EstimatorError, ParamSet, asymptotics, choose_d, estimate,
                               ks_complexity_bits, load_params, monomial_count, oj_complexity_bits,
                               oj_variable_count, security_table, table_to_csv, table_to_json)


def _pascal_row(n):
    row = [1]
    for _ in range(n):
        row = [a + b for a, b in zip([0] + row, row + [0])]
    return row


def test_monomial_count_against_pascal():
    for nv in (0, 1, 5, 40):
        row = _pascal_row(nv)
        for d in range(0, 8):
            assert monomial_count(nv, d) == sum(row[: d + 1])


def test_variable_count():
    # (m - r)(r - 1) support unknowns plus (n - 1) r coefficient unknowns
    assert oj_variable_count(79, 94, 5) == 74 * 4 + 93 * 5


def test_bits_formula():
    m, n, k, r = 79, 94, 47, 5
    N = sum(math.comb(oj_variable_count(m, n, r), i) for i in range(r + 1))
    assert oj_complexity_bits(m, n, k, r, r) == pytest.approx(2.807 * math.log2(N))
    assert oj_complexity_bits(m, n, k, r, r, omega=2.0) == pytest.approx(2 * math.log2(N))


def test_loidreau_row():
    e = estimate(BUILTIN[0])
    assert (round(e.bits_r, 1), round(e.bits_r1, 1)) == (96.3, 117.1)
    assert e.d == 4 and e.bold_column == "d=r"


def test_bold_at_r_plus_1_for_underdetermined():
    e = estimate(next(p for p in BUILTIN if p.name == "ROLLO-I-256"))
    assert e.d == 8 and e.bold_column == "d=r+1" and e.bits == e.bits_r1


def test_choose_d_and_degree_options():
    p = ParamSet("x", 14, 18, 12, 2)  # intermediate regime
    assert choose_d(*p.tuple) == 3
    assert "intermediate" in estimate(p).notes[0]
    assert estimate(p, d="r").d == 2
    assert estimate(p, d="r+2").d == 4
    assert estimate(p, d=6).d == 6
    with pytest.raises(EstimatorError):
        estimate(p, d="r+5")


def test_ks_bound_above_oj():
    for p in BUILTIN:
        assert ks_complexity_bits(*p.tuple) > estimate(p).bits


@pytest.mark.parametrize("omega", [1.5, 3.5])
def test_omega_range(omega):
    with pytest.raises(EstimatorError):
        oj_complexity_bits(10, 10, 5, 2, 2, omega)


def test_param_validation():
    with pytest.raises(EstimatorError):
        ParamSet("bad", 10, 10, 5, 0)
    with pytest.raises(EstimatorError):
        ParamSet("bad", 5, 10, 5, 6)


def test_csv_and_json_outputs():
    rows = security_table()
    text = table_to_csv(rows)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert len(parsed) == 13
    assert parsed[1]["name"] == "ROLLO-I-128" and parsed[1]["bits"] == "114.9"
    js = json.loads(table_to_json(rows))
    assert len(js) == 13 and js[0]["claimed"] == 256


def test_load_params(tmp_path):
    f = tmp_path / "p.json"
    f.write_text(json.dumps([{"name": "a", "m": 20, "n": 20, "k": 10, "r": 3}]))
    (p,) = load_params(str(f))
    assert p.tuple == (20, 20, 10, 3)
    f.write_text(json.dumps([{"m": 1}]))
    with pytest.raises(EstimatorError):
        load_params(str(f))


def test_asymptotics_ordering():
    a = asymptotics(1000, 5)
    assert a["oj"] < a["kipnis_shamir"] < a["combinatorial"]
    assert a["oj"] == pytest.approx(1.5 * 2.807 * 5 * math.log2(1000))
