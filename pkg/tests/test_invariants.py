import json
from fractions import Fraction

import pytest

from cs3.errors import NotInGroup, OutOfScope, UnknownExample
from cs3.exact import PiRational
from cs3.invariants import (
    EXAMPLES,
    OUT_OF_SCOPE,
    berger_lorentz_example,
    cs_invariant_algebraic,
    cs_invariant_numeric,
    embedded_levi_civita_s3,
    flat_extension_verify,
    is_obstructed,
    mod_one,
    normalization_so4,
    obstruction_verdict,
    route_pair,
    rp3_example,
    run_example,
    s3_round_example,
    section_change_case,
    zero_connection_example,
)
from cs3.lie import CS_SCALE, standard_decomposition
from cs3.poly import PolyMatrixMap, Polynomial, constant_map, double_cover, s3_section


@pytest.mark.parametrize("lam, expected", [("1/2", Fraction(41, 16)), ("1", 5), ("2", 26), ("-1", 5)])
def test_berger_lorentz_algebraic(lam, expected):
    report = cs_invariant_algebraic(berger_lorentz_example(Fraction(lam)))
    assert report.value == expected and isinstance(report.value, Fraction)
    assert report.passed


def test_rp3_and_zero_algebraic():
    assert cs_invariant_algebraic(rp3_example()).value == Fraction(1, 2)
    assert cs_invariant_algebraic(zero_connection_example()).value == 0


@pytest.mark.parametrize("spec", [berger_lorentz_example(Fraction(1, 2)), rp3_example(), s3_round_example()],
                         ids=lambda s: s.name)
def test_route_agreement(spec):
    alg, num = route_pair(spec, nodes=32)
    assert abs(float(alg.value) - num.value) <= 1e-6
    assert num.passed and alg.passed


def test_numeric_examples():
    assert abs(cs_invariant_numeric(s3_section()).value - 1) <= 1e-6
    const = constant_map(4, 4, ideal="sphere")
    assert abs(cs_invariant_numeric(const).value) <= 1e-12
    assert abs(cs_invariant_numeric(double_cover(conjugate=True)).value - 2) <= 1e-4
    assert abs(cs_invariant_numeric(double_cover()).value + 2) <= 1e-4


def test_numeric_rejects_map_outside_group():
    x = Polynomial.variables(4)
    m = [[x[0] * 2 if i == j else Polynomial.constant(4, 0) for j in range(2)] for i in range(2)]
    with pytest.raises(NotInGroup):
        cs_invariant_numeric(PolyMatrixMap(m, "orthogonal", "sphere"))


def test_normalization_pair_and_linearity():
    first, second = normalization_so4()
    assert first == 1 and abs(second - 1) <= 1e-6
    first2, second2 = normalization_so4(CS_SCALE * 2)
    assert first2 == 2 and abs(second2 - 2) <= 1e-6


@pytest.mark.parametrize("case, delta", [("double-cover", 2), ("identity", 1), ("constant", 0)])
def test_section_changes(case, delta):
    report = section_change_case(case)
    assert abs(report.value - delta) <= 1e-4
    assert report.passed


def test_identity_section_change_keeps_mod_one():
    report = section_change_case("identity")
    assert abs(report.details["c_after"] - 1.5) <= 1e-4
    assert report.details["mod_one_unchanged"]


def test_flat_extension_so4_and_sl4():
    theta = embedded_levi_civita_s3()
    so4 = flat_extension_verify(s3_section(), standard_decomposition("so4", "so3"), theta)
    assert so4.max_deviation <= 1e-10 and so4.bracket_condition and so4.blind
    sl4 = flat_extension_verify(s3_section(), standard_decomposition("sl4", "sl3"), theta)
    assert sl4.max_deviation <= 1e-10 and sl4.bracket_condition and sl4.blind
    assert sl4.max_r_component <= 1e-12
    assert so4.points == 200


def test_flat_extension_detects_wrong_expected_form():
    theta = embedded_levi_civita_s3()
    wrong = [[f * 2 for f in row] for row in theta]
    rep = flat_extension_verify(s3_section(), standard_decomposition("so4", "so3"), wrong)
    assert rep.max_deviation > 0.1


def test_verdicts():
    assert is_obstructed(obstruction_verdict(5, "lorentz_22"))
    assert not is_obstructed(obstruction_verdict(5, "lorentz_31"))
    assert is_obstructed(obstruction_verdict(Fraction(1, 2), "equiaffine"))
    assert "no global equiaffine immersion" in obstruction_verdict(Fraction(1, 2), "equiaffine")
    assert is_obstructed(obstruction_verdict(Fraction(41, 16), "lorentz_31"))
    assert not is_obstructed(obstruction_verdict(1.0000000001, "riemannian"))
    assert not is_obstructed(obstruction_verdict(0, "lorentz_22"))
    with pytest.raises(ValueError):
        obstruction_verdict(1, "hyperbolic")


def test_mod_one():
    assert mod_one(Fraction(41, 16)) == Fraction(9, 16)
    assert mod_one(Fraction(-1, 2)) == Fraction(1, 2)
    assert mod_one(2.9999999999) == 0.0
    assert abs(mod_one(0.25) - 0.25) < 1e-15
    assert mod_one(-0.75) == 0.25


def test_registry_errors():
    for name in OUT_OF_SCOPE:
        with pytest.raises(OutOfScope, match="out of scope"):
            run_example(name)
    with pytest.raises(UnknownExample):
        run_example("no-such-example")
    with pytest.raises(UnknownExample):
        run_example("section-change:bogus")
    assert "rp3-equiaffine" in EXAMPLES


def test_report_json_schema():
    reports = run_example("rp3-equiaffine")
    payload = json.loads(json.dumps([r.to_json() for r in reports]))
    keys = {"name", "value", "route", "error_estimate", "mod_one", "verdicts", "paper_expected", "pass"}
    for item in payload:
        assert keys <= set(item)
    assert payload[0]["exact"] == "1/2"
    assert payload[1]["orientation_sign"] == -1
