"""Exact exterior calculus on R^N with polynomial coefficients.

Polynomials are dicts from exponent tuples to Fractions. Forms are dicts from
strictly increasing index tuples (into dx_1..dx_N) to Polynomials.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from numbers import Number

import numpy as np

from cs3.coframe import merge_indices
from cs3.errors import NotInGroup
from cs3.exact import PiRational


class Polynomial:
    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars: int, terms=None):
        self.num_vars = num_vars
        clean = {}
        for exps, c in (terms or {}).items():
            if c == 0:
                continue
            exps = tuple(exps)
            if len(exps) != num_vars:
                raise ValueError("exponent tuple has wrong length")
            clean[exps] = Fraction(c) if isinstance(c, int) else c
        self.terms = clean

    @classmethod
    def constant(cls, num_vars, c):
        return cls(num_vars, {(0,) * num_vars: c})

    @classmethod
    def variable(cls, num_vars, i):
        exps = [0] * num_vars
        exps[i] = 1
        return cls(num_vars, {tuple(exps): Fraction(1)})

    @classmethod
    def variables(cls, num_vars):
        return [cls.variable(num_vars, i) for i in range(num_vars)]

    def _promote(self, other):
        if isinstance(other, Polynomial):
            if other.num_vars != self.num_vars:
                raise ValueError("polynomials in different numbers of variables")
            return other
        return Polynomial.constant(self.num_vars, other)

    def __add__(self, other):
        other = self._promote(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Polynomial(self.num_vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.num_vars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._promote(other))

    def __rsub__(self, other):
        return self._promote(other) - self

    def __mul__(self, other):
        if isinstance(other, Number):
            return Polynomial(self.num_vars, {k: v * other for k, v in self.terms.items()})
        other = self._promote(other)
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return Polynomial(self.num_vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = Polynomial.constant(self.num_vars, 1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Number):
            other = Polynomial.constant(self.num_vars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.num_vars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def derivative(self, i: int) -> "Polynomial":
        out = {}
        for k, v in self.terms.items():
            if k[i]:
                nk = list(k)
                nk[i] -= 1
                out[tuple(nk)] = out.get(tuple(nk), 0) + v * k[i]
        return Polynomial(self.num_vars, out)

    def evaluate(self, points) -> np.ndarray:
        """Evaluate at an array of points with last axis of length num_vars."""
        points = np.asarray(points, dtype=float)
        shape = points.shape[:-1]
        if not self.terms:
            return np.zeros(shape)
        top = max(max(k) for k in self.terms)
        powers = [[np.ones(shape)] for _ in range(self.num_vars)]
        for i in range(self.num_vars):
            for _ in range(top):
                powers[i].append(powers[i][-1] * points[..., i])
        total = np.zeros(shape)
        for k in sorted(self.terms):
            term = np.full(shape, float(self.terms[k]))
            for i, e in enumerate(k):
                if e:
                    term = term * powers[i][e]
            total = total + term
        return total

    def substitute(self, polys) -> "Polynomial":
        """Compose with a polynomial map: x_i -> polys[i]."""
        if len(polys) != self.num_vars:
            raise ValueError("need one polynomial per variable")
        m = polys[0].num_vars
        cache = {}

        def power(i, e):
            if (i, e) not in cache:
                cache[(i, e)] = polys[i] ** e
            return cache[(i, e)]

        total = Polynomial(m)
        for k, v in self.terms.items():
            term = Polynomial.constant(m, v)
            for i, e in enumerate(k):
                if e:
                    term = term * power(i, e)
            total = total + term
        return total

    def reduce_sphere(self) -> "Polynomial":
        """Remainder modulo x1^2+x2^2+x3^2+x4^2-1 via x4^2 -> 1 - x1^2 - x2^2 - x3^2."""
        if self.num_vars != 4:
            raise ValueError("sphere reduction needs four variables")
        out = {}
        stack = list(self.terms.items())
        while stack:
            k, v = stack.pop()
            if k[3] < 2:
                out[k] = out.get(k, 0) + v
                continue
            base = (k[0], k[1], k[2], k[3] - 2)
            stack.append((base, v))
            for i in range(3):
                nk = list(base)
                nk[i] += 2
                stack.append((tuple(nk), -v))
        return Polynomial(4, out)

    def dump(self, names=None) -> str:
        names = names or [f"x{i + 1}" for i in range(self.num_vars)]
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, k) if e
            )
            c = self.terms[k]
            if not mono:
                parts.append(f"{c}")
            else:
                parts.append(mono if c == 1 else f"-{mono}" if c == -1 else f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Polynomial({self.dump()})"


class PolyForm:
    """A differential form on R^N with Polynomial coefficients."""

    __slots__ = ("num_vars", "degree", "coeffs", "pi_power")

    def __init__(self, num_vars: int, degree: int, coeffs=None, pi_power: int = 0):
        self.num_vars = num_vars
        self.degree = degree
        self.pi_power = pi_power
        clean = {}
        for idx, p in (coeffs or {}).items():
            sign, key = merge_indices((), tuple(idx))
            if not sign:
                continue
            if len(key) != degree:
                raise ValueError(f"index {idx} does not have length {degree}")
            p = p if isinstance(p, Polynomial) else Polynomial.constant(num_vars, p)
            p = p * sign if sign < 0 else p
            clean[key] = clean[key] + p if key in clean else p
        self.coeffs = {k: v for k, v in clean.items() if not v.is_zero()}

    @classmethod
    def zero(cls, num_vars, degree, pi_power=0):
        return cls(num_vars, degree, {}, pi_power)

    @classmethod
    def function(cls, p: Polynomial):
        return cls(p.num_vars, 0, {(): p})

    @classmethod
    def one_form(cls, components):
        """sum_i components[i] dx_i."""
        n = len(components)
        return cls(n, 1, {(i,): (c if isinstance(c, Polynomial) else Polynomial.constant(n, c))
                          for i, c in enumerate(components)})

    def _pi(self, other):
        if not self.coeffs:
            return other.pi_power
        if not other.coeffs or self.pi_power == other.pi_power:
            return self.pi_power
        raise ValueError("cannot add forms with different powers of pi")

    def __add__(self, other):
        if self.degree != other.degree or self.num_vars != other.num_vars:
            raise ValueError("forms differ in degree or ambient dimension")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return PolyForm(self.num_vars, self.degree, out, self._pi(other))

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Multiply by a number or a Polynomial (0-form)."""
        return PolyForm(self.num_vars, self.degree,
                        {k: v * other for k, v in self.coeffs.items()}, self.pi_power)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        return (self.num_vars == other.num_vars and self.degree == other.degree
                and self.coeffs == other.coeffs
                and (not self.coeffs or self.pi_power == other.pi_power))

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.coeffs

    def wedge(self, other: "PolyForm") -> "PolyForm":
        if self.degree + other.degree > self.num_vars:
            return PolyForm.zero(self.num_vars, self.degree + other.degree)
        out = {}
        for i1, p1 in self.coeffs.items():
            for i2, p2 in other.coeffs.items():
                sign, key = merge_indices(i1, i2)
                if not sign:
                    continue
                val = p1 * p2 if sign > 0 else -(p1 * p2)
                out[key] = out[key] + val if key in out else val
        return PolyForm(self.num_vars, self.degree + other.degree, out,
                        self.pi_power + other.pi_power)

    def __xor__(self, other):
        return self.wedge(other)

    def d(self) -> "PolyForm":
        out = {}
        for idx, p in self.coeffs.items():
            for i in range(self.num_vars):
                dp = p.derivative(i)
                if dp.is_zero():
                    continue
                sign, key = merge_indices((i,), idx)
                if not sign:
                    continue
                val = dp if sign > 0 else -dp
                out[key] = out[key] + val if key in out else val
        return PolyForm(self.num_vars, self.degree + 1, out, self.pi_power)

    def pullback(self, phi) -> "PolyForm":
        """Pull back along x -> phi(x), phi a list of num_vars Polynomials."""
        if len(phi) != self.num_vars:
            raise ValueError("map must supply one polynomial per ambient variable")
        m = phi[0].num_vars
        dphi = [exterior_derivative_poly(PolyForm.function(p)) for p in phi]
        total = PolyForm.zero(m, self.degree, self.pi_power)
        for idx, p in self.coeffs.items():
            term = PolyForm.function(p.substitute(phi))
            for i in idx:
                term = term.wedge(dphi[i])
            term.pi_power = self.pi_power
            total = total + term
        return total

    def interior_radial(self) -> "PolyForm":
        """Contraction with the radial field sum_i x_i d/dx_i."""
        xs = Polynomial.variables(self.num_vars)
        out = {}
        for idx, p in self.coeffs.items():
            for s, i in enumerate(idx):
                key = idx[:s] + idx[s + 1:]
                val = p * xs[i] * (-1) ** s
                out[key] = out[key] + val if key in out else val
        return PolyForm(self.num_vars, self.degree - 1, out, self.pi_power)

    def map_coefficients(self, fn) -> "PolyForm":
        return PolyForm(self.num_vars, self.degree,
                        {k: fn(v) for k, v in self.coeffs.items()}, self.pi_power)

    def evaluate(self, points, tangents) -> np.ndarray:
        """Value on tangent vectors: ``tangents[..., :, a]`` is the a-th vector."""
        points = np.asarray(points, dtype=float)
        tangents = np.asarray(tangents, dtype=float)
        shape = points.shape[:-1]
        total = np.zeros(shape)
        for idx in sorted(self.coeffs):
            c = self.coeffs[idx].evaluate(points)
            if self.degree == 0:
                total = total + c
                continue
            minor = tangents[..., list(idx), :]
            total = total + c * np.linalg.det(minor)
        return total

    def dump(self, names=None) -> str:
        lines = [f"polyform vars={self.num_vars} degree={self.degree} pi_power={self.pi_power}"]
        for idx in sorted(self.coeffs):
            basis = "^".join(f"dx{i + 1}" for i in idx) or "1"
            lines.append(f"{basis} : {self.coeffs[idx].dump(names)}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return self.dump().strip()


def exterior_derivative_poly(f: PolyForm) -> PolyForm:
    return f.d()


def reduce_mod_sphere(f: PolyForm) -> PolyForm:
    """Canonical coefficients modulo |x|^2 = 1 (function ideal only)."""
    return f.map_coefficients(Polynomial.reduce_sphere)


def radial_one_form(num_vars: int) -> PolyForm:
    """nu = sum_i x_i dx_i = d(|x|^2)/2."""
    return PolyForm.one_form(Polynomial.variables(num_vars))


def tangential_part(f: PolyForm) -> PolyForm:
    """iota_r(nu ^ f); agrees with f on the unit sphere and kills nu."""
    return radial_one_form(f.num_vars).wedge(f).interior_radial()


def sphere_normal_form(f: PolyForm) -> PolyForm:
    """Canonical representative of the restriction of f to S^3."""
    return reduce_mod_sphere(tangential_part(f))


def equal_on_sphere(a: PolyForm, b: PolyForm) -> bool:
    return sphere_normal_form(a - b).is_zero()


# -- matrices of forms -----------------------------------------------------------

def matrix_wedge(a, b):
    """(a ^ b)_ij = sum_k a_ik ^ b_kj for square matrices of PolyForms."""
    n = len(a)
    return [[_sum([a[i][k].wedge(b[k][j]) for k in range(n)]) for j in range(n)]
            for i in range(n)]


def _sum(forms):
    total = forms[0]
    for f in forms[1:]:
        total = total + f
    return total


def _poly_matmul(a, b):
    n = len(a)
    return [[_sum_poly([a[i][k] * b[k][j] for k in range(n)]) for j in range(n)] for i in range(n)]


def _sum_poly(polys):
    total = polys[0]
    for p in polys[1:]:
        total = total + p
    return total


def poly_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = Polynomial(m[0][0].num_vars)
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * poly_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def adjugate(m):
    n = len(m)
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            c = poly_det(minor) if n > 1 else Polynomial.constant(m[0][0].num_vars, 1)
            adj[j][i] = c if (i + j) % 2 == 0 else -c
    return adj


class PolyMatrixMap:
    """A polynomial map R^N -> m x m matrices, meant to land in a matrix group.

    ``ideal`` declares where group membership holds: ``None`` (identically),
    ``"sphere"`` (modulo |x|^2 - 1, N = 4) or ``"so3"`` (on rotation matrices
    of R^9, checked at sample points).
    """

    def __init__(self, entries, inverse_mode="orthogonal", ideal=None, name=""):
        self.entries = [[e if isinstance(e, Polynomial) else None for e in row] for row in entries]
        if any(e is None for row in self.entries for e in row):
            raise TypeError("entries must be Polynomials")
        self.size = len(entries)
        self.num_vars = entries[0][0].num_vars
        if inverse_mode not in ("orthogonal", "unimodular"):
            raise ValueError(f"unknown inverse mode {inverse_mode!r}")
        self.inverse_mode = inverse_mode
        self.ideal = ideal
        self.name = name

    def _reduce(self, p: Polynomial) -> Polynomial:
        return p.reduce_sphere() if self.ideal == "sphere" else p

    def inverse(self):
        if self.inverse_mode == "orthogonal":
            return [[self.entries[j][i] for j in range(self.size)] for i in range(self.size)]
        return adjugate(self.entries)

    def defect(self):
        """Polynomials that must vanish (modulo the ideal) for group membership."""
        if self.inverse_mode == "orthogonal":
            prod = _poly_matmul(self.entries, self.inverse())
            return [prod[i][j] - (1 if i == j else 0) for i in range(self.size) for j in range(self.size)]
        return [poly_det(self.entries) - 1]

    def validate(self, samples=64, tol=1e-12, seed=0):
        defect = self.defect()
        if self.ideal == "so3":
            pts = random_rotations(samples, seed).reshape(samples, 9)
            worst = max(float(np.max(np.abs(p.evaluate(pts)))) for p in defect)
            if worst > tol:
                raise NotInGroup(f"{self.name or 'map'} leaves the group (defect {worst:.3g})")
            return self
        for p in defect:
            if not self._reduce(p).is_zero():
                raise NotInGroup(f"{self.name or 'map'} leaves the group: defect {p.dump()}")
        return self

    def evaluate(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        out = np.empty(points.shape[:-1] + (self.size, self.size))
        for i in range(self.size):
            for j in range(self.size):
                out[..., i, j] = self.entries[i][j].evaluate(points)
        return out


def random_rotations(count, seed=0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    q = rng.normal(size=(count, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    return quaternion_rotation_numeric(q)


def quaternion_rotation_numeric(q) -> np.ndarray:
    a, b, c, d = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack([
        np.stack([a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)], -1),
        np.stack([2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)], -1),
        np.stack([2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d], -1),
    ], -2)


def mc_pullback(sigma: PolyMatrixMap, validate=True):
    """sigma^{-1} d sigma as a matrix of polynomial 1-forms."""
    if validate:
        sigma.validate()
    inv = sigma.inverse()
    dsig = [[PolyForm.function(e).d() for e in row] for row in sigma.entries]
    n = sigma.size
    return [[_sum([dsig[k][j] * inv[i][k] for k in range(n)]) for j in range(n)] for i in range(n)]


def trace_cs_poly(theta, scale=PiRational(1)) -> PolyForm:
    """tr(theta ^ d theta + 2/3 theta ^ theta ^ theta), times ``scale``."""
    if not isinstance(scale, PiRational):
        scale = PiRational(scale)
    n = len(theta)
    num_vars = theta[0][0].num_vars
    dtheta = [[f.d() for f in row] for row in theta]
    total = PolyForm.zero(num_vars, 3)
    for i in range(n):
        for j in range(n):
            total = total + theta[i][j].wedge(dtheta[j][i])
    sq = matrix_wedge(theta, theta)
    cube = PolyForm.zero(num_vars, 3)
    for i in range(n):
        for k in range(n):
            cube = cube + sq[i][k].wedge(theta[k][i])
    total = (total + cube * Fraction(2, 3)) * scale.q
    total.pi_power = scale.pi_power
    return total


def gauge_transform(theta, h: PolyMatrixMap):
    """h^{-1} theta h + h^{-1} dh (the pullback along a changed section)."""
    inv = h.inverse()
    n = h.size
    conj = [[_sum([_sum([theta[k][l] * (inv[i][k] * h.entries[l][j]) for l in range(n)])
                   for k in range(n)]) for j in range(n)] for i in range(n)]
    mc = mc_pullback(h, validate=False)
    return [[conj[i][j] + mc[i][j] for j in range(n)] for i in range(n)]


def evaluate_matrix_form(theta, points, tangents) -> np.ndarray:
    """Values of a matrix of 1-forms on each tangent vector: shape (..., k, n, n)."""
    k = np.asarray(tangents).shape[-1]
    n = len(theta)
    shape = np.asarray(points).shape[:-1]
    out = np.zeros(shape + (k, n, n))
    for a in range(k):
        t = np.asarray(tangents)[..., :, a:a + 1]
        for i in range(n):
            for j in range(n):
                out[..., a, i, j] = theta[i][j].evaluate(points, t)
    return out


class PointwiseTraceCS:
    """tr(theta ^ d theta + 2/3 theta^3) evaluated numerically at points.

    Avoids expanding the symbolic cubic term for large ambient dimensions.
    """

    def __init__(self, theta, scale=PiRational(1)):
        self.theta = theta
        self.dtheta = [[f.d() for f in row] for row in theta]
        self.scale = scale if isinstance(scale, PiRational) else PiRational(scale)
        self.pi_power = self.scale.pi_power
        self.degree = 3

    def evaluate(self, points, tangents) -> np.ndarray:
        tangents = np.asarray(tangents, dtype=float)
        a = evaluate_matrix_form(self.theta, points, tangents)
        a1, a2, a3 = a[..., 0, :, :], a[..., 1, :, :], a[..., 2, :, :]
        n = len(self.theta)
        shape = np.asarray(points).shape[:-1]
        b = {}
        for p, q in ((0, 1), (0, 2), (1, 2)):
            pair = tangents[..., :, [p, q]]
            m = np.zeros(shape + (n, n))
            for i in range(n):
                for j in range(n):
                    m[..., i, j] = self.dtheta[i][j].evaluate(points, pair)
            b[(p, q)] = m

        def tr(x):
            return np.trace(x, axis1=-2, axis2=-1)

        first = tr(a1 @ b[(1, 2)]) - tr(a2 @ b[(0, 2)]) + tr(a3 @ b[(0, 1)])
        cube = 3.0 * (tr(a1 @ a2 @ a3) - tr(a1 @ a3 @ a2))
        return float(self.scale.q) * (first + (2.0 / 3.0) * cube)


# -- named maps and forms ------------------------------------------------------

def s3_left_invariant_forms():
    """(xi, rho, kappa) on R^4."""
    x1, x2, x3, x4 = Polynomial.variables(4)
    xi = PolyForm.one_form([-x3, x4, x1, -x2])
    rho = PolyForm.one_form([-x4, -x3, x2, x1])
    kappa = PolyForm.one_form([x2, -x1, x4, -x3])
    return xi, rho, kappa


def s3_section() -> PolyMatrixMap:
    """Quaternionic section S^3 -> SO(4) whose first column is x."""
    x1, x2, x3, x4 = Polynomial.variables(4)
    rows = [
        [x1, -x2, -x3, -x4],
        [x2, x1, x4, -x3],
        [x3, -x4, x1, x2],
        [x4, x3, -x2, x1],
    ]
    return PolyMatrixMap(rows, "orthogonal", "sphere", name="sigma")


def double_cover(conjugate=False) -> PolyMatrixMap:
    """S^3 -> SO(3), unit quaternion to rotation (quadratic entries)."""
    a, b, c, d = Polynomial.variables(4)
    if conjugate:
        b, c, d = -b, -c, -d
    rows = [
        [a * a + b * b - c * c - d * d, (b * c - a * d) * 2, (b * d + a * c) * 2],
        [(b * c + a * d) * 2, a * a - b * b + c * c - d * d, (c * d - a * b) * 2],
        [(b * d - a * c) * 2, (c * d + a * b) * 2, a * a - b * b - c * c + d * d],
    ]
    return PolyMatrixMap(rows, "orthogonal", "sphere", name="double_cover")


def so3_identity() -> PolyMatrixMap:
    """The inclusion SO(3) -> SO(3) on R^9 (row-major entries)."""
    xs = Polynomial.variables(9)
    rows = [[xs[3 * i + j] for j in range(3)] for i in range(3)]
    return PolyMatrixMap(rows, "orthogonal", "so3", name="so3_identity")


def constant_map(size, num_vars, matrix=None, inverse_mode="orthogonal", ideal=None) -> PolyMatrixMap:
    matrix = np.eye(size, dtype=int) if matrix is None else matrix
    rows = [[Polynomial.constant(num_vars, Fraction(matrix[i][j])) for j in range(size)]
            for i in range(size)]
    return PolyMatrixMap(rows, inverse_mode, ideal, name="constant")


def so3_left_invariant_forms():
    """(omega1, omega2, psi) on R^9 from R^T dR."""
    mu = mc_pullback(so3_identity(), validate=False)
    return mu[1][0], mu[2][0], mu[2][1]


def forms_from_coframe(gamma, coframe):
    """Matrix of 1-forms sum_k gamma[i, j, k] coframe[k]."""
    gamma = np.asarray(gamma, dtype=object)
    n = gamma.shape[0]
    num_vars = coframe[0].num_vars
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            f = PolyForm.zero(num_vars, 1)
            for k, w in enumerate(coframe):
                if gamma[i, j, k] != 0:
                    f = f + w * gamma[i, j, k]
            row.append(f)
        out.append(row)
    return out


def zero_matrix_form(size, num_vars):
    return [[PolyForm.zero(num_vars, 1) for _ in range(size)] for _ in range(size)]
