"""Matrix Lie algebras, invariant bilinear forms and orthogonal splittings.

Structure constants are stored as ``c[i, j, k]`` meaning
``[E_i, E_j] = sum_k c[i, j, k] E_k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from cs3.errors import (
    DegenerateRestriction,
    DependentBasis,
    NotClosed,
    NotInAlgebra,
)
from cs3.exact import (
    FLOAT_TOL,
    PiRational,
    all_exact,
    array_is_zero,
    det,
    exact_array,
    inverse,
    rref,
    solve,
)

CS_SCALE = PiRational(Fraction(1, 16), -2)


def _flatten(basis):
    return np.stack([np.asarray(b, dtype=object).reshape(-1) for b in basis], axis=1)


def commutator(a, b):
    return a.dot(b) - b.dot(a)


def structure_constants_from_matrices(basis) -> np.ndarray:
    """Compute ``c[i, j, k]`` from a list of square matrices.

    Exact when every entry is an int or Fraction; otherwise solved in floats
    with residual tolerance 1e-12.
    """
    basis = [exact_array(b) for b in basis]
    d = len(basis)
    cols = _flatten(basis)
    exact = all_exact(cols)
    if len(rref(cols)[1]) < d:
        raise DependentBasis(f"basis of {d} matrices has lower rank")
    c = np.zeros((d, d, d), dtype=object)
    c[...] = Fraction(0) if exact else 0.0
    for i, j in itertools.combinations(range(d), 2):
        target = commutator(basis[i], basis[j]).reshape(-1)
        coeffs = solve(cols, target)
        if coeffs is None:
            raise NotClosed(f"[E{i}, E{j}] is not in the span of the basis")
        if not exact:
            resid = cols.dot(coeffs) - target
            if not array_is_zero(resid):
                raise NotClosed(f"[E{i}, E{j}] residual exceeds tolerance")
        c[i, j, :] = coeffs
        c[j, i, :] = -coeffs
    return c


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A matrix Lie algebra with a fixed basis.

    ``trace_scale`` rescales ``tr(XY)`` for realified complex algebras, where
    the trace form of the complex matrices is half the real trace.
    """

    name: str
    basis: tuple
    structure_constants: np.ndarray = field(repr=False)
    trace_scale: Fraction = Fraction(1)

    @classmethod
    def from_matrices(cls, name, basis, trace_scale=Fraction(1)):
        basis = tuple(exact_array(b) for b in basis)
        c = structure_constants_from_matrices(basis)
        return cls(name, basis, c, Fraction(trace_scale))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def matrix_size(self) -> int:
        return self.basis[0].shape[0]

    @property
    def is_exact(self) -> bool:
        return all_exact(self.structure_constants)

    def bracket(self, x, y):
        """Bracket of two coordinate vectors."""
        x = np.asarray(x, dtype=object)
        y = np.asarray(y, dtype=object)
        out = np.zeros(self.dim, dtype=object)
        if not (x.any() and y.any()):
            return out + Fraction(0)
        for i, j, k, c in self._nonzero_constants:
            xi, yj = x[i], y[j]
            if xi and yj:
                out[k] += c * xi * yj
        return out

    @property
    def _nonzero_constants(self):
        cached = self.__dict__.get("_sparse")
        if cached is None:
            c = self.structure_constants
            cached = [(i, j, k, c[i, j, k]) for i, j, k in zip(*np.nonzero(c != 0))]
            object.__setattr__(self, "_sparse", cached)
        return cached

    def matrix(self, coords):
        out = self.basis[0] * 0
        for ci, b in zip(coords, self.basis):
            out = out + ci * b
        return out

    @property
    def _coordinate_solver(self):
        cached = self.__dict__.get("_solver")
        if cached is None:
            cols = _flatten(self.basis)
            _, rows = rref(cols.T)
            sub = cols[rows, :]
            cached = (rows, inverse(sub), cols)
            object.__setattr__(self, "_solver", cached)
        return cached

    def coordinates(self, matrix, check=True):
        """Coordinates of ``matrix`` in the basis; NotInAlgebra if it is outside."""
        rows, inv, cols = self._coordinate_solver
        v = np.asarray(matrix, dtype=object).reshape(-1)
        coords = inv.dot(v[rows])
        if check and not array_is_zero(cols.dot(coords) - v):
            raise NotInAlgebra(f"matrix is not in {self.name}")
        return coords

    def jacobi_residual(self):
        """Max |Jacobi residual| over all index quadruples."""
        c = self.structure_constants
        # J[i,j,k,l] = sum_m c[i,j,m] c[m,k,l] + cyclic(i,j,k)
        t = np.tensordot(c, c, axes=(2, 0))
        j = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
        return max(abs(float(v)) for v in j.reshape(-1))

    def trace_gram(self):
        d = self.dim
        g = np.empty((d, d), dtype=object)
        for i in range(d):
            for j in range(d):
                g[i, j] = self.trace_scale * np.trace(self.basis[i].dot(self.basis[j]))
        return g

    def trace_form(self, scale=PiRational(1)) -> "BilinearForm":
        if not isinstance(scale, PiRational):
            scale = PiRational(scale)
        return BilinearForm(self, self.trace_gram(), scale)


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """``<x, y> = scale * x^T matrix y`` with the scale kept as ``q * pi**k``."""

    algebra: LieAlgebra
    matrix: np.ndarray = field(repr=False)
    scale: PiRational = PiRational(1)

    def pair(self, x, y):
        """Pairing of coordinate vectors, rational part only (see ``scale.pi_power``)."""
        x = np.asarray(x, dtype=object)
        y = np.asarray(y, dtype=object)
        return self.scale.q * x.dot(self.matrix).dot(y)

    def is_symmetric(self) -> bool:
        return array_is_zero(self.matrix - self.matrix.T)

    def scaled(self, factor) -> "BilinearForm":
        return BilinearForm(self.algebra, self.matrix, self.scale * factor)


def check_ad_invariance(form: BilinearForm, tol=FLOAT_TOL) -> bool:
    """True iff <[Z,X],Y> + <X,[Z,Y]> = 0 on all basis triples."""
    c = form.algebra.structure_constants
    g = form.matrix
    # r[z, x, y] = sum_k c[z,x,k] g[k,y] + sum_k g[x,k] c[z,y,k]
    first = np.tensordot(c, g, axes=(2, 0))
    second = np.transpose(np.tensordot(c, g, axes=(2, 1)), (0, 2, 1))
    return array_is_zero(first + second, tol)


@dataclass(frozen=True, eq=False)
class OrthogonalDecomposition:
    """Splitting ambient = sub + sub^perp with respect to an invariant form.

    ``embedding`` is the ambient_dim x sub_dim matrix sending sub coordinates
    to ambient coordinates. Projectors act on ambient coordinates.
    """

    ambient: LieAlgebra
    sub: LieAlgebra
    embedding: np.ndarray = field(repr=False)
    form: BilinearForm
    projector_top: np.ndarray = field(repr=False)
    projector_perp: np.ndarray = field(repr=False)
    perp_basis: np.ndarray = field(repr=False)

    @property
    def sub_form(self) -> BilinearForm:
        e = self.embedding
        return BilinearForm(self.sub, e.T.dot(self.form.matrix).dot(e), self.form.scale)

    def top(self, v):
        return self.projector_top.dot(np.asarray(v, dtype=object))

    def perp(self, v):
        return self.projector_perp.dot(np.asarray(v, dtype=object))

    def to_sub(self, v):
        """Sub coordinates of an ambient vector lying in the subalgebra."""
        e = self.embedding
        gram = e.T.dot(self.form.matrix).dot(e)
        return inverse(gram).dot(e.T).dot(self.form.matrix).dot(np.asarray(v, dtype=object))


def block_embedding(sub: LieAlgebra, ambient: LieAlgebra) -> np.ndarray:
    """Embed sub matrices as the lower-right block of ambient matrices."""
    m, big = sub.matrix_size, ambient.matrix_size
    cols = []
    for b in sub.basis:
        full = exact_array(np.zeros((big, big), dtype=int))
        full[big - m:, big - m:] = b
        cols.append(ambient.coordinates(full))
    return np.stack(cols, axis=1)


def orthogonal_decomposition(ambient: LieAlgebra, sub: LieAlgebra, embedding, form: BilinearForm):
    embedding = np.asarray(embedding, dtype=object)
    for i, j in itertools.combinations(range(sub.dim), 2):
        lhs = embedding.dot(sub.bracket(_unit(sub.dim, i), _unit(sub.dim, j)))
        rhs = ambient.bracket(embedding[:, i], embedding[:, j])
        if not array_is_zero(lhs - rhs):
            raise NotClosed(f"embedding does not preserve [E{i}, E{j}]")
    g = form.matrix
    restricted = embedding.T.dot(g).dot(embedding)
    if det(restricted) == 0 or (not all_exact(restricted) and abs(float(det(restricted))) <= FLOAT_TOL):
        raise DegenerateRestriction("restriction of the form to the subalgebra is singular")
    top = embedding.dot(inverse(restricted)).dot(embedding.T).dot(g)
    eye = exact_array(np.eye(ambient.dim, dtype=int))
    perp = eye - top
    red, pivots = rref(perp)
    perp_basis = perp[:, pivots] if pivots else np.zeros((ambient.dim, 0), dtype=object)
    return OrthogonalDecomposition(ambient, sub, embedding, form, top, perp, perp_basis)


def _unit(n, i):
    v = exact_array(np.zeros(n, dtype=int))
    v[i] = Fraction(1)
    return v


def is_symmetric_pair(decomp: OrthogonalDecomposition, tol=FLOAT_TOL) -> bool:
    """True iff [perp, perp] lies in the subalgebra."""
    basis = decomp.perp_basis
    for i, j in itertools.combinations(range(basis.shape[1]), 2):
        w = decomp.ambient.bracket(basis[:, i], basis[:, j])
        if not array_is_zero(decomp.perp(w), tol):
            return False
    return True


def perp_bracket_component(decomp: OrthogonalDecomposition, v1, v2):
    """Split [v1, v2] of two perp vectors into (sub part, perp part)."""
    w = decomp.ambient.bracket(v1, v2)
    return decomp.top(w), decomp.perp(w)


def maurer_cartan_cs_tensor(algebra: LieAlgebra, form: BilinearForm) -> np.ndarray:
    """``T[a,b,c] = -(1/6) <E_a, [E_b, E_c]>`` (rational part of the scale).

    The Chern-Simons 3-form of the Maurer-Cartan form has coefficient
    ``6 * T[a,b,c]`` on ``w^a ^ w^b ^ w^c`` for a < b < c, times
    ``pi**form.scale.pi_power``.
    """
    c = algebra.structure_constants
    g = form.matrix
    # <E_a, [E_b,E_c]> = sum_k g[a,k] c[b,c,k]
    inner = np.tensordot(g, c, axes=(1, 2))
    return -Fraction(1, 6) * form.scale.q * inner


# -- sl(4) / sl(3) block coordinates -----------------------------------------

def sl4_perp_matrix(a, x, z):
    """The sl(4) matrix [[a, Z], [X, -a/3 I]] orthogonal to the embedded sl(3)."""
    m = exact_array(np.zeros((4, 4), dtype=int))
    m[0, 0] = a
    m[0, 1:] = list(z)
    m[1:, 0] = list(x)
    for i in range(1, 4):
        m[i, i] = -Fraction(a) / 3 if not isinstance(a, float) else -a / 3
    return m


def sl4_perp_parts(matrix):
    """Read (a, X, Z) off an sl(4) matrix in the perp of sl(3)."""
    matrix = np.asarray(matrix, dtype=object)
    return matrix[0, 0], matrix[1:, 0].copy(), matrix[0, 1:].copy()


# -- registry ------------------------------------------------------------------

def _e(n, i, j):
    m = exact_array(np.zeros((n, n), dtype=int))
    m[i, j] = Fraction(1)
    return m


def _antisym_pairs(n):
    # (1,0),(2,0),...,(n-1,0),(2,1),... ; for n=3 this is the order (w1, w2, psi)
    return [(i, j) for j in range(n) for i in range(j + 1, n)]


def _so_basis(n, eta=None):
    eta_m = exact_array(np.diag(eta if eta is not None else [1] * n))
    return [eta_m.dot(_e(n, i, j) - _e(n, j, i)) for i, j in _antisym_pairs(n)]


def _sl_basis(n):
    basis = [_e(n, i, j) for i in range(n) for j in range(n) if i != j]
    basis += [_e(n, i, i) - _e(n, i + 1, i + 1) for i in range(n - 1)]
    return basis


def _realify(rows):
    """Real 2n x 2n matrix of a complex n x n matrix given as (re, im) pairs."""
    n = len(rows)
    m = exact_array(np.zeros((2 * n, 2 * n), dtype=int))
    for i in range(n):
        for j in range(n):
            re, im = rows[i][j]
            m[2 * i, 2 * j] = Fraction(re)
            m[2 * i, 2 * j + 1] = Fraction(-im)
            m[2 * i + 1, 2 * j] = Fraction(im)
            m[2 * i + 1, 2 * j + 1] = Fraction(re)
    return m


def _su2_basis():
    # mu_SU(2) = xi*E_xi + rho*E_rho + kappa*E_kappa with
    # mu = [[-i kappa, -xi + i rho], [xi + i rho, i kappa]]
    e_xi = _realify([[(0, 0), (-1, 0)], [(1, 0), (0, 0)]])
    e_rho = _realify([[(0, 0), (0, 1)], [(0, 1), (0, 0)]])
    e_kappa = _realify([[(0, -1), (0, 0)], [(0, 0), (0, 1)]])
    return [e_xi, e_rho, e_kappa]


_REGISTRY = {
    "so3": lambda: LieAlgebra.from_matrices("so3", _so_basis(3)),
    "so4": lambda: LieAlgebra.from_matrices("so4", _so_basis(4)),
    "su2": lambda: LieAlgebra.from_matrices("su2", _su2_basis(), Fraction(1, 2)),
    "sl3": lambda: LieAlgebra.from_matrices("sl3", _sl_basis(3)),
    "sl4": lambda: LieAlgebra.from_matrices("sl4", _sl_basis(4)),
    "so21": lambda: LieAlgebra.from_matrices("so21", _so_basis(3, [1, 1, -1])),
    "so31": lambda: LieAlgebra.from_matrices("so31", _so_basis(4, [1, 1, 1, -1])),
    "so22": lambda: LieAlgebra.from_matrices("so22", _so_basis(4, [-1, 1, 1, -1])),
}

METRIC_SIGNS = {
    "so3": (1, 1, 1),
    "so4": (1, 1, 1, 1),
    "so21": (1, 1, -1),
    "so31": (1, 1, 1, -1),
    "so22": (-1, 1, 1, -1),
}


def algebra_names():
    return sorted(_REGISTRY)


@lru_cache(maxsize=None)
def get_algebra(name: str) -> LieAlgebra:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown algebra {name!r}; known: {', '.join(algebra_names())}") from None


@lru_cache(maxsize=None)
def standard_decomposition(ambient: str, sub: str, scale=CS_SCALE) -> OrthogonalDecomposition:
    """Block decomposition of a registered pair under the scaled trace form."""
    big, small = get_algebra(ambient), get_algebra(sub)
    return orthogonal_decomposition(big, small, block_embedding(small, big), big.trace_form(scale))
