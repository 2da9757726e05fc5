"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run standalone with ``python tests/test_acceptance.py`` or under pytest.
"""

import itertools
import time
from fractions import Fraction

import pytest

from cs3.connections import berger_lorentz_metric, berger_lorentz_printed, gamma_equal, levi_civita_coframe
from cs3.invariants import (
    berger_lorentz_example,
    cs_invariant_algebraic,
    embedded_levi_civita_s3,
    flat_extension_verify,
    is_obstructed,
    normalization_so4,
    rp3_example,
    section_change_case,
)
from cs3.lie import perp_bracket_component, sl4_perp_matrix, sl4_perp_parts, standard_decomposition
from cs3.poly import s3_section
from cs3.suites import IDENTITIES, blindness_suite, cs_identity_check, identity_check, volume_checks


def _report(number, title, ok, detail, capsys=None):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


def criterion_1(capsys=None):
    start = time.perf_counter()
    first, second = normalization_so4(nodes=32)
    elapsed = time.perf_counter() - start
    ok = first == 1 and isinstance(first, Fraction) and abs(second - 1) <= 1e-6 and elapsed < 30
    return _report(1, "normalization", ok,
                   f"algebraic={first} quadrature={second!r} |err|={abs(second - 1):.2e} time={elapsed:.2f}s", capsys)


def criterion_2(capsys=None):
    s3, so3 = volume_checks(nodes=32)
    ok = s3.passed and so3.passed
    return _report(2, "volume constants", ok,
                   f"S3 rel.err={s3.residual:.2e} (<=1e-8), SO3 rel.err={so3.residual:.2e} (<=1e-6)", capsys)


def criterion_3(capsys=None):
    values, matches = [], []
    for lam, expected in ((Fraction(1, 2), Fraction(41, 16)), (Fraction(1), Fraction(5)), (Fraction(2), Fraction(26))):
        got = cs_invariant_algebraic(berger_lorentz_example(lam)).value
        values.append(got == expected)
        matches.append(gamma_equal(levi_civita_coframe(berger_lorentz_metric(lam)), berger_lorentz_printed(lam)))
    got = [str(cs_invariant_algebraic(berger_lorentz_example(Fraction(s))).value) for s in ("1/2", "1", "2")]
    ok = all(values) and all(matches)
    return _report(3, "Berger-Lorentz family", ok, f"c = {got}; printed matrices match: {matches}", capsys)


def criterion_4(capsys=None):
    report = cs_invariant_algebraic(rp3_example())
    verdicts = dict(v.split(": ", 1) for v in report.verdicts)
    ok = (report.value == Fraction(1, 2) and is_obstructed(verdicts["equiaffine"])
          and is_obstructed(verdicts["riemannian"]))
    return _report(4, "RP^3", ok, f"c = {report.value}; verdicts: {sorted(verdicts.values())}", capsys)


def criterion_5(capsys=None):
    flt = blindness_suite(trials=50, seed=0, exact=False)
    exa = blindness_suite(trials=50, seed=0, exact=True)
    ok = flt.passed and flt.residual <= 1e-12 and exa.passed and exa.residual == 0
    return _report(5, "blindness identity", ok,
                   f"float max residual={flt.residual:.2e}, rational max residual={exa.residual}", capsys)


def criterion_6(capsys=None):
    results = [identity_check(n, trials=100, seed=i, exact=False) for i, n in enumerate(IDENTITIES)]
    results += cs_identity_check(trials=100, seed=0, exact=False)
    worst = max(r.residual for r in results)
    ok = all(r.passed for r in results) and worst <= 1e-12
    failed = [r.name for r in results if not r.passed]
    return _report(6, "algebraic identity suite", ok,
                   f"{len(results)} identities x 100 trials, max residual={worst:.2e}, failed={failed}", capsys)


def criterion_7(capsys=None):
    double = section_change_case("double-cover")
    ident = section_change_case("identity")
    ok = (abs(double.value - 2) <= 1e-4 and abs(ident.value - 1) <= 1e-4
          and ident.details["mod_one_unchanged"])
    return _report(7, "section-change integrality", ok,
                   f"double-cover delta={double.value:.12f}, identity delta={ident.value:.12f}, "
                   f"RP^3 c: {ident.details['c_before']} -> {ident.details['c_after']:.12f}", capsys)


def criterion_8(capsys=None):
    theta = embedded_levi_civita_s3()
    so4 = flat_extension_verify(s3_section(), standard_decomposition("so4", "so3"), theta, points=200)
    sl4 = flat_extension_verify(s3_section(), standard_decomposition("sl4", "sl3"), theta, points=200)
    ok = (so4.max_deviation <= 1e-10 and so4.bracket_condition and sl4.bracket_condition
          and sl4.max_r_component <= 1e-10)
    return _report(8, "flat-extension verification", ok,
                   f"max deviation={so4.max_deviation:.2e}, bracket residual so4/so3={so4.bracket_residual:.2e}, "
                   f"sl4/sl3={sl4.bracket_residual:.2e}, R-component={sl4.max_r_component:.2e}", capsys)


def _perp_grid():
    units = [[Fraction(int(i == k)) for i in range(3)] for k in range(3)]
    zero = [Fraction(0)] * 3
    grid = [(Fraction(1), zero, zero)]
    grid += [(Fraction(0), u, zero) for u in units]
    grid += [(Fraction(0), zero, u) for u in units]
    grid += [(Fraction(-2), units[0], units[1])]
    return grid


def criterion_9(capsys=None):
    d = standard_decomposition("sl4", "sl3")
    mismatches, count = 0, 0
    for (a1, x1, z1), (a2, x2, z2) in itertools.product(_perp_grid(), repeat=2):
        v1 = d.ambient.coordinates(sl4_perp_matrix(a1, x1, z1))
        v2 = d.ambient.coordinates(sl4_perp_matrix(a2, x2, z2))
        _, perp = perp_bracket_component(d, v1, v2)
        a, x, z = sl4_perp_parts(d.ambient.matrix(perp))
        zx = sum(p * q for p, q in zip(z1, x2)) - sum(p * q for p, q in zip(z2, x1))
        ex = [Fraction(4, 3) * (-a1 * p + a2 * q) for p, q in zip(x2, x1)]
        ez = [Fraction(4, 3) * (a1 * p - a2 * q) for p, q in zip(z2, z1)]
        count += 1
        if not (a == zx and list(x) == ex and list(z) == ez):
            mismatches += 1
    ok = mismatches == 0
    return _report(9, "perp bracket formula", ok, f"{count} basis pairs, {mismatches} mismatches (exact)", capsys)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i + 1}" for i in range(len(CRITERIA))])
def test_acceptance(criterion, capsys):
    assert criterion(capsys)


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    raise SystemExit(0 if all(results) else 1)
