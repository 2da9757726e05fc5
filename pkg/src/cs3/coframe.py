"""Constant-coefficient (left-invariant) forms over a global coframe.

A form is stored sparsely as ``{multi_index: coefficient_vector}`` with
strictly increasing multi-indices. Scalar forms use vectors of length one.
The structure-constant differential is ``d w^k = -1/2 f[i,j,k] w^i ^ w^j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from cs3.errors import AlgebraMismatch, DegreeOverflow, PreconditionViolated
from cs3.exact import FLOAT_TOL, array_is_zero, exact_array, max_abs
from cs3.lie import BilinearForm, LieAlgebra, OrthogonalDecomposition, get_algebra


def merge_indices(a: tuple, b: tuple):
    """Return ``(sign, merged)`` for w^a ^ w^b, or ``(0, None)`` on repetition."""
    if set(a) & set(b):
        return 0, None
    seq = list(a) + list(b)
    inversions = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return (-1) ** inversions, tuple(sorted(seq))


def _canonical(index):
    index = tuple(index)
    if len(set(index)) < len(index):
        return 0, None
    sign, merged = merge_indices((), index)
    return sign, merged


class CoframeComplex:
    """Exterior algebra on ``rank`` coframe generators with a structure-constant d."""

    def __init__(self, frame_structure, labels=None, name=""):
        f = np.asarray(frame_structure, dtype=object)
        n = f.shape[0]
        if f.shape != (n, n, n):
            raise ValueError("frame_structure must have shape (n, n, n)")
        if not array_is_zero(f + np.transpose(f, (1, 0, 2))):
            raise ValueError("frame_structure must be antisymmetric in its first two slots")
        self.rank = n
        self.frame_structure = f
        self.labels = tuple(labels) if labels else tuple(f"e{i + 1}" for i in range(n))
        self.name = name
        self._dgen = []
        for k in range(n):
            terms = {}
            for i, j in itertools.combinations(range(n), 2):
                if f[i, j, k] != 0:
                    terms[(i, j)] = -f[i, j, k]
            self._dgen.append(terms)
        self._dcache = {}
        for k in range(n):
            if self._d_monomial_dd(k):
                raise ValueError(f"d(d({self.labels[k]})) != 0: structure constants violate Jacobi")

    @classmethod
    def from_algebra(cls, algebra: LieAlgebra, labels=None):
        return cls(algebra.structure_constants, labels, name=algebra.name)

    def d_monomial(self, index: tuple) -> dict:
        """d(w^index) as a dict multi-index -> scalar."""
        if index in self._dcache:
            return self._dcache[index]
        out = {}
        for r, k in enumerate(index):
            before, after = index[:r], index[r + 1:]
            for pair, coeff in self._dgen[k].items():
                s1, m1 = merge_indices(before, pair)
                if not s1:
                    continue
                s2, m2 = merge_indices(m1, after)
                if not s2:
                    continue
                out[m2] = out.get(m2, 0) + (-1) ** r * s1 * s2 * coeff
        out = {k: v for k, v in out.items() if v != 0}
        self._dcache[index] = out
        return out

    def _d_monomial_dd(self, k) -> bool:
        total = {}
        for pair, coeff in self._dgen[k].items():
            for idx, c in self.d_monomial(pair).items():
                total[idx] = total.get(idx, 0) + coeff * c
        return not all(v == 0 or abs(v) <= FLOAT_TOL for v in total.values())

    def generator(self, k, algebra=None, vector=None) -> "ValuedForm":
        if algebra is None:
            vec = exact_array([1])
        else:
            vec = exact_array(vector)
        return ValuedForm(1, self.rank, algebra, {(k,): vec})

    def volume(self) -> "ValuedForm":
        return ValuedForm(self.rank, self.rank, None, {tuple(range(self.rank)): exact_array([1])})


@dataclass(frozen=True, eq=False)
class ValuedForm:
    """A constant-coefficient form; ``algebra=None`` means scalar-valued.

    Scalar forms carry ``pi_power`` so that coefficients stay rational when a
    pairing is scaled by ``q * pi**k``.
    """

    degree: int
    rank: int
    algebra: LieAlgebra | None
    coeffs: dict = field(default_factory=dict)
    pi_power: int = 0

    def __post_init__(self):
        dim = self.value_dim
        clean = {}
        for idx, vec in self.coeffs.items():
            sign, key = _canonical(idx)
            if not sign:
                continue
            if len(key) != self.degree:
                raise ValueError(f"multi-index {idx} does not have length {self.degree}")
            if key and key[-1] >= self.rank:
                raise ValueError(f"multi-index {idx} exceeds rank {self.rank}")
            vec = np.asarray(vec, dtype=object).reshape(-1)
            if vec.shape[0] != dim:
                raise ValueError(f"coefficient has length {vec.shape[0]}, expected {dim}")
            vec = sign * vec
            if key in clean:
                vec = clean[key] + vec
            clean[key] = vec
        clean = {k: v for k, v in clean.items() if any(x != 0 for x in v)}
        object.__setattr__(self, "coeffs", clean)

    @property
    def value_dim(self) -> int:
        return 1 if self.algebra is None else self.algebra.dim

    @property
    def is_scalar(self) -> bool:
        return self.algebra is None

    @classmethod
    def zero(cls, degree, rank, algebra=None, pi_power=0):
        return cls(degree, rank, algebra, {}, pi_power)

    def _check_compatible(self, other):
        if self.degree != other.degree or self.rank != other.rank:
            raise ValueError("forms differ in degree or rank")
        if self.algebra is not other.algebra:
            raise AlgebraMismatch("forms take values in different algebras")

    def _pi(self, other):
        if not self.coeffs:
            return other.pi_power
        if not other.coeffs or self.pi_power == other.pi_power:
            return self.pi_power
        raise ValueError("cannot add forms with different powers of pi")

    def __add__(self, other):
        self._check_compatible(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return ValuedForm(self.degree, self.rank, self.algebra, out, self._pi(other))

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return ValuedForm(
            self.degree, self.rank, self.algebra,
            {k: v * scalar for k, v in self.coeffs.items()}, self.pi_power,
        )

    __rmul__ = __mul__

    def map_values(self, matrix, algebra=None) -> "ValuedForm":
        """Apply a linear map to every coefficient vector."""
        target = self.algebra if algebra is None else algebra
        return ValuedForm(
            self.degree, self.rank, target,
            {k: np.asarray(matrix, dtype=object).dot(v) for k, v in self.coeffs.items()},
            self.pi_power,
        )

    def coefficient(self, index):
        sign, key = _canonical(index)
        if not sign or key not in self.coeffs:
            return np.zeros(self.value_dim, dtype=object) + Fraction(0)
        return sign * self.coeffs[key]

    def max_abs(self) -> float:
        return max((max_abs(v) for v in self.coeffs.values()), default=0.0)

    def is_zero(self, tol=0.0) -> bool:
        return self.max_abs() <= tol

    def to_float(self) -> "ValuedForm":
        return ValuedForm(
            self.degree, self.rank, self.algebra,
            {k: v.astype(float).astype(object) for k, v in self.coeffs.items()}, self.pi_power,
        )


def _combine(a: ValuedForm, b: ValuedForm, op, algebra, pi_power) -> ValuedForm:
    degree = a.degree + b.degree
    if degree > a.rank:
        raise DegreeOverflow(f"degree {a.degree} + {b.degree} exceeds rank {a.rank}")
    if a.rank != b.rank:
        raise ValueError("forms live on complexes of different rank")
    out = {}
    for ia, va in a.coeffs.items():
        for ib, vb in b.coeffs.items():
            sign, key = merge_indices(ia, ib)
            if not sign:
                continue
            val = sign * op(va, vb)
            out[key] = out[key] + val if key in out else val
    return ValuedForm(degree, a.rank, algebra, out, pi_power)


def wedge(a: ValuedForm, b: ValuedForm) -> ValuedForm:
    """Wedge of a scalar form with any form."""
    if not a.is_scalar:
        raise AlgebraMismatch("left factor of wedge must be scalar-valued")
    return _combine(a, b, lambda x, y: x[0] * y, b.algebra, a.pi_power + b.pi_power)


def unit(rank) -> ValuedForm:
    return ValuedForm(0, rank, None, {(): exact_array([1])})


def pairing(a: ValuedForm, b: ValuedForm, form: BilinearForm) -> ValuedForm:
    """<a, b>: <alpha (x) X, beta (x) Y> = <X, Y> alpha ^ beta."""
    if a.algebra is not b.algebra or a.algebra is not form.algebra:
        raise AlgebraMismatch("pairing needs both forms valued in the form's algebra")
    g = form.matrix
    q = form.scale.q

    def op(x, y):
        return np.array([q * x.dot(g).dot(y)], dtype=object)

    return _combine(a, b, op, None, form.scale.pi_power)


def bracket(a: ValuedForm, b: ValuedForm) -> ValuedForm:
    """[alpha (x) X, beta (x) Y] = alpha ^ beta (x) [X, Y]."""
    if a.algebra is None or a.algebra is not b.algebra:
        raise AlgebraMismatch("bracket needs both forms valued in the same algebra")
    return _combine(a, b, a.algebra.bracket, a.algebra, 0)


def differential(a: ValuedForm, complex_: CoframeComplex) -> ValuedForm:
    if a.rank != complex_.rank:
        raise ValueError("form and complex differ in rank")
    out = {}
    for idx, vec in a.coeffs.items():
        for key, c in complex_.d_monomial(idx).items():
            val = c * vec
            out[key] = out[key] + val if key in out else val
    # top-degree input yields the empty (zero) form of degree rank + 1
    return ValuedForm(a.degree + 1, a.rank, a.algebra, out, a.pi_power)


def curvature(theta: ValuedForm, complex_: CoframeComplex) -> ValuedForm:
    """d theta + 1/2 [theta, theta]."""
    if theta.degree != 1:
        raise ValueError("curvature is defined for 1-forms")
    return differential(theta, complex_) + bracket(theta, theta) * Fraction(1, 2)


def chern_simons(theta: ValuedForm, form: BilinearForm, complex_: CoframeComplex) -> ValuedForm:
    """<theta, d theta> + 1/3 <theta, [theta, theta]>."""
    if theta.degree != 1:
        raise ValueError("Chern-Simons form is defined for 1-forms")
    if complex_.rank < 3:
        raise DegreeOverflow("Chern-Simons form needs rank >= 3")
    first = pairing(theta, differential(theta, complex_), form)
    second = pairing(theta, bracket(theta, theta), form) * Fraction(1, 3)
    return first + second


def chern_simons_alt(theta: ValuedForm, form: BilinearForm, complex_: CoframeComplex) -> ValuedForm:
    """<theta, Theta> - 1/6 <theta, [theta, theta]>; equals :func:`chern_simons`."""
    big = pairing(theta, curvature(theta, complex_), form)
    return big - pairing(theta, bracket(theta, theta), form) * Fraction(1, 6)


def decompose_form(theta: ValuedForm, decomp: OrthogonalDecomposition):
    if theta.algebra is not decomp.ambient:
        raise AlgebraMismatch("form is not valued in the ambient algebra")
    return theta.map_values(decomp.projector_top), theta.map_values(decomp.projector_perp)


def blindness_check(theta: ValuedForm, decomp: OrthogonalDecomposition,
                    form: BilinearForm, complex_: CoframeComplex, tol=FLOAT_TOL) -> ValuedForm:
    """Residual CS(theta) - CS(theta_top) - <theta_perp, Theta_perp>.

    Raises PreconditionViolated when [theta_perp, theta_perp] leaves the
    subalgebra; ``pair`` on the exception is the offending coframe pair.
    """
    top, perp = decompose_form(theta, decomp)
    sq = bracket(perp, perp).map_values(decomp.projector_perp)
    for idx, vec in sq.coeffs.items():
        if not array_is_zero(vec, tol):
            raise PreconditionViolated(
                f"[theta_perp, theta_perp] has a perp component on {idx}", pair=idx
            )
    big = curvature(theta, complex_).map_values(decomp.projector_perp)
    return chern_simons(theta, form, complex_) - chern_simons(top, form, complex_) - pairing(perp, big, form)


def maurer_cartan_form(complex_: CoframeComplex, algebra: LieAlgebra) -> ValuedForm:
    """sum_i w^i (x) E_i for the complex built from ``algebra``."""
    eye = exact_array(np.eye(algebra.dim, dtype=int))
    return ValuedForm(1, complex_.rank, algebra, {(i,): eye[i] for i in range(algebra.dim)})


def one_form(complex_: CoframeComplex, algebra: LieAlgebra | None, matrix) -> ValuedForm:
    """1-form from a ``rank x value_dim`` coefficient array (row i: coefficient of w^i)."""
    matrix = np.asarray(matrix, dtype=object)
    return ValuedForm(1, complex_.rank, algebra, {(i,): matrix[i] for i in range(complex_.rank)})


def top_coefficient(form: ValuedForm):
    """Coefficient of a scalar top-degree form on w^0 ^ ... ^ w^{n-1}."""
    if not form.is_scalar or form.degree != form.rank:
        raise ValueError("expected a scalar top-degree form")
    return form.coefficient(tuple(range(form.rank)))[0]


# -- built-in complexes --------------------------------------------------------

@lru_cache(maxsize=None)
def su2_complex() -> CoframeComplex:
    """Left-invariant coframe (xi, rho, kappa) of SU(2) = S^3."""
    return CoframeComplex.from_algebra(get_algebra("su2"), ("xi", "rho", "kappa"))


@lru_cache(maxsize=None)
def so3_complex() -> CoframeComplex:
    """Left-invariant coframe (omega1, omega2, psi) of SO(3)."""
    return CoframeComplex.from_algebra(get_algebra("so3"), ("omega1", "omega2", "psi"))


@lru_cache(maxsize=None)
def group_complex(name: str) -> CoframeComplex:
    if name == "su2":
        return su2_complex()
    if name == "so3":
        return so3_complex()
    return CoframeComplex.from_algebra(get_algebra(name))


# -- text serialization --------------------------------------------------------

def dump_form(form: ValuedForm) -> str:
    value = "scalar" if form.algebra is None else form.algebra.name
    lines = [f"form degree={form.degree} rank={form.rank} value={value} pi_power={form.pi_power}"]
    for idx in sorted(form.coeffs):
        vec = " ".join(str(v) for v in form.coeffs[idx])
        lines.append(f"{' '.join(str(i) for i in idx) or '-'} : {vec}")
    return "\n".join(lines) + "\n"


def _parse_number(tok):
    if any(c in tok for c in ".en") and "/" not in tok:
        return float(tok)
    return Fraction(tok)


def load_form(text: str) -> ValuedForm:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    header = dict(tok.split("=") for tok in lines[0].split()[1:])
    algebra = None if header["value"] == "scalar" else get_algebra(header["value"])
    coeffs = {}
    for ln in lines[1:]:
        lhs, rhs = ln.split(":")
        idx = () if lhs.strip() == "-" else tuple(int(t) for t in lhs.split())
        coeffs[idx] = np.array([_parse_number(t) for t in rhs.split()], dtype=object)
    return ValuedForm(int(header["degree"]), int(header["rank"]), algebra, coeffs,
                      int(header["pi_power"]))
