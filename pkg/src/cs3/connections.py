"""Levi-Civita connection forms of constant metrics on a coframe.

The metric ``gram`` is written in the coframe ``w``. An orthonormal coframe
``e^i = frame[i, k] w^k`` with ``frame^T eta frame = gram`` fixes the gauge;
connection entries ``theta^i_j`` are reported as 1-forms in the original
coframe ``w`` so printed matrices compare directly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from cs3.coframe import CoframeComplex, ValuedForm, so3_complex, su2_complex
from cs3.errors import SingularSystem
from cs3.exact import FLOAT_TOL, array_is_zero, exact_array, max_abs, solve
from cs3.lie import LieAlgebra


def _exact_sqrt(x):
    if isinstance(x, Fraction) and x >= 0:
        n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if n * n == x.numerator and d * d == x.denominator:
            return Fraction(n, d)
    return math.sqrt(float(x))


@dataclass(frozen=True, eq=False)
class MetricSpec:
    complex: CoframeComplex
    gram: np.ndarray = field(repr=False)
    signature: tuple
    frame: np.ndarray = field(repr=False)

    @classmethod
    def diagonal(cls, complex_, diag, frame_scales=None):
        """Diagonal metric sum_k diag[k] (w^k)^2.

        ``frame_scales`` picks the orthonormal coframe e^k = s_k w^k (signs
        matter for the gauge); defaults to sqrt|diag[k]|.
        """
        diag = [Fraction(d) if not isinstance(d, float) else d for d in diag]
        if any(d == 0 for d in diag):
            raise ValueError("metric is singular")
        if frame_scales is None:
            frame_scales = [_exact_sqrt(abs(d)) for d in diag]
        for d, s in zip(diag, frame_scales):
            if abs(float(s * s) - abs(float(d))) > FLOAT_TOL * max(1.0, abs(float(d))):
                raise ValueError("frame scale does not square to the metric coefficient")
        n = len(diag)
        gram = exact_array(np.diag(diag).astype(object))
        frame = exact_array(np.diag(list(frame_scales)).astype(object))
        signs = tuple(1 if d > 0 else -1 for d in diag)
        return cls(complex_, gram, (signs.count(1), signs.count(-1)), frame)

    @classmethod
    def with_frame(cls, complex_, frame, eta):
        """Metric frame^T diag(eta) frame for an explicit orthonormal coframe."""
        frame = exact_array(frame)
        eta_m = exact_array(np.diag(eta))
        gram = frame.T.dot(eta_m).dot(frame)
        return cls(complex_, gram, (list(eta).count(1), list(eta).count(-1)), frame)

    @property
    def eta(self) -> tuple:
        """Signs of the orthonormal coframe, read from frame and gram."""
        f = self.frame
        inv = np.linalg.inv(f.astype(float))
        eta = inv.T @ self.gram.astype(float) @ inv
        return tuple(int(round(v)) for v in np.diag(eta))

    def check(self):
        eta = np.diag(self.eta)
        resid = self.frame.astype(float).T @ eta @ self.frame.astype(float) - self.gram.astype(float)
        if np.max(np.abs(resid)) > 1e-12:
            raise ValueError("frame is not orthonormal for the metric")
        signs = self.eta
        if (signs.count(1), signs.count(-1)) != tuple(self.signature):
            raise ValueError("signature does not match the metric")
        return self


@dataclass(frozen=True, eq=False)
class ConnectionMatrix:
    """theta^i_j = sum_k gamma[i, j, k] w^k in the orthonormal gauge."""

    gamma: np.ndarray
    eta: tuple
    metric: MetricSpec | None = None

    def lowered(self) -> np.ndarray:
        """theta_ij = eta_i theta^i_j."""
        eta = np.array(self.eta, dtype=object)
        return eta[:, None, None] * self.gamma

    def entry(self, i, j):
        return self.gamma[i, j]

    def to_valued_form(self, complex_: CoframeComplex, algebra: LieAlgebra) -> ValuedForm:
        """As an ``algebra``-valued 1-form (the matrix theta(d/dw^k) must lie in it)."""
        coeffs = {}
        for k in range(self.gamma.shape[2]):
            coeffs[(k,)] = algebra.coordinates(self.gamma[:, :, k])
        return ValuedForm(1, complex_.rank, algebra, coeffs)


def _torsion_system(metric: MetricSpec):
    """Linear system for the lowered antisymmetric connection coefficients.

    Unknown (p, k) for pair p=(i<j) is the coefficient of w^k in theta_ij.
    Equations: coefficient of w^a ^ w^b (a<b) in de^i + theta^i_j ^ e^j.
    """
    c = metric.complex
    n = c.rank
    f = c.frame_structure
    a_mat = metric.frame
    eta = metric.eta
    pairs = list(itertools.combinations(range(n), 2))
    unknowns = [(p, k) for p in pairs for k in range(n)]
    col = {u: t for t, u in enumerate(unknowns)}
    rows, rhs = [], []
    for i in range(n):
        for a, b in itertools.combinations(range(n), 2):
            row = [Fraction(0)] * len(unknowns)
            const = sum((a_mat[i, k] * -f[a, b, k] for k in range(n)), Fraction(0))
            for j in range(n):
                if i == j:
                    continue
                p, sgn = ((i, j), 1) if i < j else ((j, i), -1)
                # Gamma^i_{j k} = eta_i * sgn * u[p, k]
                coef = eta[i] * sgn
                row[col[(p, a)]] += coef * a_mat[j, b]
                row[col[(p, b)]] -= coef * a_mat[j, a]
            rows.append(row)
            rhs.append(-const)
    return unknowns, np.array(rows, dtype=object), np.array(rhs, dtype=object)


def levi_civita_coframe(metric: MetricSpec, ordering=None) -> ConnectionMatrix:
    """Unique torsion-free, metric-compatible connection in the orthonormal gauge.

    ``ordering`` optionally permutes the unknowns before solving.
    """
    metric.check()
    unknowns, m, rhs = _torsion_system(metric)
    perm = list(range(len(unknowns))) if ordering is None else list(ordering)
    try:
        sol_perm = solve(m[:, perm], rhs)
    except ValueError as exc:
        raise SingularSystem(str(exc)) from exc
    if sol_perm is None:
        raise SingularSystem("torsion equations are inconsistent")
    sol = np.empty(len(unknowns), dtype=object)
    sol[perm] = sol_perm
    n = metric.complex.rank
    eta = metric.eta
    gamma = np.empty((n, n, n), dtype=object)
    gamma[...] = Fraction(0)
    for t, ((i, j), k) in enumerate(unknowns):
        gamma[i, j, k] = eta[i] * sol[t]
        gamma[j, i, k] = -eta[j] * sol[t]
    return ConnectionMatrix(gamma, eta, metric)


def verify_connection(conn: ConnectionMatrix, metric: MetricSpec):
    """(max torsion residual, max antisymmetry residual of the lowered matrix)."""
    c = metric.complex
    n = c.rank
    f = c.frame_structure
    a_mat = metric.frame
    g = conn.gamma
    torsion = 0.0
    for i in range(n):
        for a, b in itertools.combinations(range(n), 2):
            val = sum(a_mat[i, k] * -f[a, b, k] for k in range(n))
            for j in range(n):
                val += g[i, j, a] * a_mat[j, b] - g[i, j, b] * a_mat[j, a]
            torsion = max(torsion, abs(float(val)))
    low = conn.lowered()
    antisym = max_abs(low + np.transpose(low, (1, 0, 2)))
    return torsion, antisym


# -- named metrics -------------------------------------------------------------

def berger_lorentz_metric(lam) -> MetricSpec:
    """xi^2 + rho^2 - lam^2 kappa^2 on SU(2), gauge (xi, rho, lam kappa)."""
    lam = Fraction(lam) if not isinstance(lam, float) else lam
    if lam == 0:
        raise ValueError("lambda must be non-zero")
    return MetricSpec.diagonal(su2_complex(), [1, 1, -lam * lam], frame_scales=[1, 1, lam])


def round_s3_metric() -> MetricSpec:
    """Unit round metric xi^2 + rho^2 + kappa^2 on SU(2) = S^3."""
    return MetricSpec.diagonal(su2_complex(), [1, 1, 1])


def rp3_metric() -> MetricSpec:
    """(omega1^2 + omega2^2 + psi^2)/4 on SO(3) = RP^3, gauge (omega1, omega2, psi)/2."""
    q = Fraction(1, 4)
    return MetricSpec.diagonal(so3_complex(), [q, q, q])


def berger_lorentz_printed(lam) -> ConnectionMatrix:
    """The Levi-Civita matrix of the Berger-Lorentz metric as printed (basis xi, rho, kappa)."""
    lam = Fraction(lam) if not isinstance(lam, float) else lam
    g = np.empty((3, 3, 3), dtype=object)
    g[...] = Fraction(0)
    xi, rho, kappa = 0, 1, 2
    g[0, 1, kappa] = -(lam * lam + 2)
    g[1, 0, kappa] = lam * lam + 2
    g[0, 2, rho] = -lam
    g[2, 0, rho] = -lam
    g[1, 2, xi] = lam
    g[2, 1, xi] = lam
    return ConnectionMatrix(g, (1, 1, -1), berger_lorentz_metric(lam))


def rp3_printed() -> ConnectionMatrix:
    """(1/2) [[0, -psi, w2], [psi, 0, -w1], [-w2, w1, 0]] in basis (w1, w2, psi)."""
    h = Fraction(1, 2)
    g = np.empty((3, 3, 3), dtype=object)
    g[...] = Fraction(0)
    w1, w2, psi = 0, 1, 2
    g[0, 1, psi], g[1, 0, psi] = -h, h
    g[0, 2, w2], g[2, 0, w2] = h, -h
    g[1, 2, w1], g[2, 1, w1] = -h, h
    return ConnectionMatrix(g, (1, 1, 1), rp3_metric())


def gamma_equal(a: ConnectionMatrix, b: ConnectionMatrix, tol=0.0) -> bool:
    return array_is_zero(a.gamma - b.gamma, tol) if tol else all(
        x == y for x, y in zip(a.gamma.reshape(-1), b.gamma.reshape(-1))
    )
