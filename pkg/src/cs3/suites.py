"""Property suites: graded identities, blindness, normalization, worked examples.

Each check returns a CheckResult; the CLI prints them and the tests assert on them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from cs3.coframe import (
    ValuedForm,
    blindness_check,
    bracket,
    chern_simons,
    chern_simons_alt,
    curvature,
    differential,
    group_complex,
    maurer_cartan_form,
    pairing,
    su2_complex,
)
from cs3.errors import CS3Error
from cs3.lie import CS_SCALE, get_algebra, standard_decomposition
from cs3.poly import s3_left_invariant_forms, so3_left_invariant_forms
from cs3.quadrature import DEFAULT_NODES, S3_CHART, SO3_CHART, integrate_threeform

IDENTITY_TOL = 1e-12


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float = 0.0
    trials: int = 1
    detail: str = ""

    def to_json(self):
        return {"name": self.name, "pass": bool(self.passed), "residual": float(self.residual),
                "trials": self.trials, "detail": self.detail}


def random_form(rng, complex_, algebra, degree, exact=True, density=0.7) -> ValuedForm:
    """Random constant-coefficient form; small integers when exact, normals otherwise."""
    coeffs = {}
    for idx in itertools.combinations(range(complex_.rank), degree):
        if degree and rng.random() > density:
            continue
        if exact:
            vec = np.array([Fraction(int(v)) for v in rng.integers(-3, 4, algebra.dim)], dtype=object)
        else:
            vec = rng.standard_normal(algebra.dim).astype(object)
        coeffs[idx] = vec
    return ValuedForm(degree, complex_.rank, algebra, coeffs)


def _sign(k):
    return -1 if k % 2 else 1


# identity name -> (number of forms, residual builder taking (forms, degrees, form, complex))
def _sym(f, deg, B, C):
    (w, t), (p, q) = f, deg
    return pairing(w, t, B) - pairing(t, w, B) * _sign(p * q)


def _antisym(f, deg, B, C):
    (w, t), (p, q) = f, deg
    return bracket(w, t) - bracket(t, w) * _sign(p * q + 1)


def _leibniz_pairing(f, deg, B, C):
    (w, t), (p, _) = f, deg
    lhs = differential(pairing(w, t, B), C)
    return lhs - pairing(differential(w, C), t, B) - pairing(w, differential(t, C), B) * _sign(p)


def _leibniz_bracket(f, deg, B, C):
    (w, t), (p, _) = f, deg
    lhs = differential(bracket(w, t), C)
    return lhs - bracket(differential(w, C), t) - bracket(w, differential(t, C)) * _sign(p)


def _invariance(f, deg, B, C):
    w, tau, t = f
    return pairing(w, bracket(tau, t), B) - pairing(bracket(w, tau), t, B)


def _jacobi(f, deg, B, C):
    (w, tau, t), (p, r, _) = f, deg
    return bracket(w, bracket(tau, t)) - bracket(bracket(w, tau), t) - bracket(tau, bracket(w, t)) * _sign(p * r)


IDENTITIES = {
    "pairing-graded-symmetry": (2, 0, _sym),
    "bracket-graded-antisymmetry": (2, 0, _antisym),
    "leibniz-pairing": (2, 1, _leibniz_pairing),
    "leibniz-bracket": (2, 1, _leibniz_bracket),
    "pairing-invariance": (3, 0, _invariance),
    "graded-jacobi": (3, 0, _jacobi),
}

# (complex, value algebra) pairs cycled through the trials; so4 gives rank 6
IDENTITY_SETTINGS = (("so4", "so3"), ("su2", "so21"), ("so4", "sl3"), ("so3", "su2"))


def _degrees(rng, count, rank, slack):
    while True:
        degs = tuple(int(d) for d in rng.integers(0, 3, count))
        if sum(degs) + slack <= rank and any(degs):
            return degs


def identity_check(name, trials=100, seed=0, exact=True) -> CheckResult:
    count, slack, builder = IDENTITIES[name]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(trials):
        cname, aname = IDENTITY_SETTINGS[trial % len(IDENTITY_SETTINGS)]
        C, g = group_complex(cname), get_algebra(aname)
        B = g.trace_form()
        degs = _degrees(rng, count, C.rank, slack)
        forms = [random_form(rng, C, g, d, exact) for d in degs]
        worst = max(worst, builder(forms, degs, B, C).max_abs())
    return CheckResult(name, worst <= IDENTITY_TOL, worst, trials)


def cs_identity_check(trials=100, seed=0, exact=True):
    """CS two ways, dCS = <Theta, Theta> (rank-6 so4 complex), and flat forms closed."""
    rng = np.random.default_rng(seed)
    C = group_complex("so4")
    results = []
    worst_alt = worst_d = 0.0
    for trial in range(trials):
        g = get_algebra(("so3", "sl3", "so21")[trial % 3])
        B = g.trace_form()
        theta = random_form(rng, C, g, 1, exact)
        cs = chern_simons(theta, B, C)
        worst_alt = max(worst_alt, (cs - chern_simons_alt(theta, B, C)).max_abs())
        big = curvature(theta, C)
        worst_d = max(worst_d, (differential(cs, C) - pairing(big, big, B)).max_abs())
    results.append(CheckResult("cs-two-expressions", worst_alt <= IDENTITY_TOL, worst_alt, trials))
    results.append(CheckResult("dcs-equals-curvature-square", worst_d <= IDENTITY_TOL, worst_d, trials))
    flat = 0.0
    for name in ("so3", "su2", "so4", "so21"):
        g = get_algebra(name)
        C2 = group_complex(name)
        mu = maurer_cartan_form(C2, g)
        flat = max(flat, curvature(mu, C2).max_abs(),
                   differential(chern_simons(mu, g.trace_form(), C2), C2).max_abs()
                   if C2.rank > 3 else 0.0)
    results.append(CheckResult("flat-forms-closed-cs", flat <= IDENTITY_TOL, flat, 4))
    return results


def blindness_suite(trials=50, seed=0, exact=False) -> CheckResult:
    """Random so(4)-valued 1-forms over the su(2) complex against the (so4, so3) split."""
    rng = np.random.default_rng(seed)
    D = standard_decomposition("so4", "so3")
    C = su2_complex()
    worst = 0.0
    for _ in range(trials):
        theta = random_form(rng, C, D.ambient, 1, exact, density=1.0)
        worst = max(worst, blindness_check(theta, D, D.form, C).max_abs())
    name = "blindness-exact" if exact else "blindness-float"
    return CheckResult(name, worst == 0 if exact else worst <= IDENTITY_TOL, worst, trials)


def identity_suite(trials=100, seed=0, exact=True):
    results = [identity_check(n, trials, seed + i, exact) for i, n in enumerate(IDENTITIES)]
    results += cs_identity_check(trials, seed, exact)
    results.append(blindness_suite(50, seed, exact=False))
    results.append(blindness_suite(50, seed, exact=True))
    return results


def volume_checks(nodes=DEFAULT_NODES):
    """int_S3 xi^rho^kappa = 2 pi^2 and int_SO3 w1^w2^psi = 8 pi^2."""
    xi, rho, kappa = s3_left_invariant_forms()
    w1, w2, psi = so3_left_invariant_forms()
    s3 = integrate_threeform(xi ^ rho ^ kappa, S3_CHART, nodes=nodes)
    so3 = integrate_threeform(w1 ^ w2 ^ psi, SO3_CHART, nodes=nodes)
    r1 = abs(s3 - 2 * math.pi**2) / (2 * math.pi**2)
    r2 = abs(so3 - 8 * math.pi**2) / (8 * math.pi**2)
    return [CheckResult("volume-s3", r1 <= 1e-8, r1, detail=f"{s3!r}"),
            CheckResult("volume-so3", r2 <= 1e-6, r2, detail=f"{so3!r}")]


def normalization_suite(nodes=DEFAULT_NODES):
    from cs3.invariants import normalization_so4

    first, second = normalization_so4(nodes=nodes)
    return [CheckResult("normalization-so3-inclusion", first == 1, abs(float(first) - 1),
                        detail=str(first)),
            CheckResult("normalization-s3-section", abs(second - 1) <= 1e-6, abs(second - 1),
                        detail=repr(second))]


def examples_suite(nodes=DEFAULT_NODES, levels=3):
    from cs3.invariants import EXAMPLES, run_example

    results = []
    for name in EXAMPLES:
        names = [f"berger-lorentz:{lam}" for lam in ("1/2", "1", "2")] if name == "berger-lorentz" else [name]
        for n in names:
            try:
                reports = run_example(n, nodes=nodes, levels=levels)
            except CS3Error as exc:
                results.append(CheckResult(n, False, detail=str(exc)))
                continue
            for r in reports:
                err = 0.0 if r.paper_expected is None else abs(float(r.value) - float(r.paper_expected))
                results.append(CheckResult(f"{r.name}[{r.route}]", r.passed, err, detail=str(r.value)))
    return results


SUITES = ("identities", "normalization", "examples", "all")


def run_suite(name, trials=100, seed=0, nodes=DEFAULT_NODES, levels=3):
    if name == "identities":
        return identity_suite(trials, seed)
    if name == "normalization":
        return normalization_suite(nodes)
    if name == "examples":
        return volume_checks(nodes) + examples_suite(nodes, levels)
    if name == "all":
        return (identity_suite(trials, seed) + normalization_suite(nodes)
                + volume_checks(nodes) + examples_suite(nodes, levels))
    raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
