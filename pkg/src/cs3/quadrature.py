"""Tensor-product Gauss-Legendre integration of 3-forms over S^3 and SO(3).

Each manifold is covered (up to measure zero) by one angular chart with
hand-coded tangent maps. Orientations:

* S^3: the inward orientation, i.e. the volume form iota(-r) dx1^dx2^dx3^dx4,
  for which xi ^ rho ^ kappa is positive.
* SO(3): the orientation of omega1 ^ omega2 ^ psi (left-invariant coframe read
  off R^T dR).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from cs3.errors import EvaluationError, NonConvergent

DEFAULT_NODES = 32


@dataclass(frozen=True)
class Chart:
    name: str
    param_domain: tuple  # ((lo, hi),) * 3, radians
    embedding: Callable  # params (M, 3) -> (M, N)
    tangent_basis: Callable  # params (M, 3) -> (M, N, 3)
    orientation_sign: int
    manifold: str

    def sample(self, count, seed=0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        lo = np.array([a for a, _ in self.param_domain])
        hi = np.array([b for _, b in self.param_domain])
        return lo + (hi - lo) * rng.random((count, 3))

    def embedding_defect(self, count=1000, seed=0) -> float:
        """Max distance from the target manifold over random parameter samples."""
        x = self.embedding(self.sample(count, seed))
        if self.manifold == "S3":
            return float(np.max(np.abs(np.linalg.norm(x, axis=1) - 1.0)))
        r = x.reshape(-1, 3, 3)
        ortho = np.einsum("mki,mkj->mij", r, r) - np.eye(3)
        return float(max(np.max(np.abs(ortho)), np.max(np.abs(np.linalg.det(r) - 1.0))))


def _s3_embedding(p):
    chi, th, ph = p[:, 0], p[:, 1], p[:, 2]
    sc, st = np.sin(chi), np.sin(th)
    return np.stack([np.cos(chi), sc * np.cos(th), sc * st * np.cos(ph), sc * st * np.sin(ph)], axis=1)


def _s3_tangents(p):
    chi, th, ph = p[:, 0], p[:, 1], p[:, 2]
    sc, cc = np.sin(chi), np.cos(chi)
    st, ct = np.sin(th), np.cos(th)
    sp, cp = np.sin(ph), np.cos(ph)
    z = np.zeros_like(chi)
    d_chi = np.stack([-sc, cc * ct, cc * st * cp, cc * st * sp], axis=1)
    d_th = np.stack([z, -sc * st, sc * ct * cp, sc * ct * sp], axis=1)
    d_ph = np.stack([z, z, -sc * st * sp, sc * st * cp], axis=1)
    return np.stack([d_chi, d_th, d_ph], axis=2)


def _rz(a):
    c, s = np.cos(a), np.sin(a)
    z, o = np.zeros_like(a), np.ones_like(a)
    return np.stack([np.stack([c, -s, z], -1), np.stack([s, c, z], -1), np.stack([z, z, o], -1)], -2)


def _drz(a):
    c, s = np.cos(a), np.sin(a)
    z = np.zeros_like(a)
    return np.stack([np.stack([-s, -c, z], -1), np.stack([c, -s, z], -1), np.stack([z, z, z], -1)], -2)


def _ry(b):
    c, s = np.cos(b), np.sin(b)
    z, o = np.zeros_like(b), np.ones_like(b)
    return np.stack([np.stack([c, z, s], -1), np.stack([z, o, z], -1), np.stack([-s, z, c], -1)], -2)


def _dry(b):
    c, s = np.cos(b), np.sin(b)
    z = np.zeros_like(b)
    return np.stack([np.stack([-s, z, c], -1), np.stack([z, z, z], -1), np.stack([-c, z, -s], -1)], -2)


def _so3_embedding(p):
    r = _rz(p[:, 0]) @ _ry(p[:, 1]) @ _rz(p[:, 2])
    return r.reshape(-1, 9)


def _so3_tangents(p):
    a, b, g = p[:, 0], p[:, 1], p[:, 2]
    ra, rb, rg = _rz(a), _ry(b), _rz(g)
    da = _drz(a) @ rb @ rg
    db = ra @ _dry(b) @ rg
    dg = ra @ rb @ _drz(g)
    return np.stack([da.reshape(-1, 9), db.reshape(-1, 9), dg.reshape(-1, 9)], axis=2)


S3_CHART = Chart(
    name="s3-hyperspherical",
    param_domain=((0.0, math.pi), (0.0, math.pi), (0.0, 2 * math.pi)),
    embedding=_s3_embedding,
    tangent_basis=_s3_tangents,
    # det[x, d_chi, d_theta, d_phi] = sin^2(chi) sin(theta) > 0, so the
    # coordinate orientation is outward and the inward one is its negative
    orientation_sign=-1,
    manifold="S3",
)

SO3_CHART = Chart(
    name="so3-euler-zyz",
    param_domain=((0.0, 2 * math.pi), (0.0, math.pi), (0.0, 2 * math.pi)),
    embedding=_so3_embedding,
    tangent_basis=_so3_tangents,
    # (omega1 ^ omega2 ^ psi)(d_alpha, d_beta, d_gamma) = -sin(beta)
    orientation_sign=-1,
    manifold="SO3",
)

CHARTS = {"S3": S3_CHART, "SO3": SO3_CHART}


@dataclass(frozen=True)
class QuadratureRule:
    nodes: int
    points: np.ndarray
    weights: np.ndarray

    @classmethod
    def for_chart(cls, chart: Chart, nodes: int = DEFAULT_NODES):
        x, w = np.polynomial.legendre.leggauss(nodes)
        axes, wts = [], []
        for lo, hi in chart.param_domain:
            half = 0.5 * (hi - lo)
            axes.append(lo + half * (x + 1.0))
            wts.append(half * w)
        grids = np.meshgrid(*axes, indexing="ij")
        wgrid = np.einsum("i,j,k->ijk", *wts)
        points = np.stack([g.reshape(-1) for g in grids], axis=1)
        return cls(nodes, points, wgrid.reshape(-1))

    @property
    def volume(self) -> float:
        return float(np.sum(self.weights))


def integrate_threeform(form, chart: Chart, rule: QuadratureRule | None = None,
                        nodes: int = DEFAULT_NODES) -> float:
    """orientation_sign * sum_p w_p * form(embed(p))(d_u, d_v, d_w), times pi**pi_power.

    ``form`` is anything with ``evaluate(points, tangents)`` and a
    ``pi_power`` attribute (PolyForm, PointwiseTraceCS).
    """
    if rule is None:
        rule = QuadratureRule.for_chart(chart, nodes)
    x = chart.embedding(rule.points)
    t = chart.tangent_basis(rule.points)
    try:
        values = np.asarray(form.evaluate(x, t), dtype=float)
    except Exception as exc:  # noqa: BLE001 - re-raised with context
        raise EvaluationError(f"integrand failed on chart {chart.name}: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise EvaluationError(f"integrand is not finite on chart {chart.name}")
    # numpy reduces contiguous float arrays by pairwise summation
    total = chart.orientation_sign * float(np.sum(rule.weights * values))
    return total * math.pi ** getattr(form, "pi_power", 0)


def grid_refinement_estimate(form, chart: Chart, levels=(8, 16, 32)):
    """Integrate on successively finer grids.

    Returns ``(finest value, |last difference|)``. Raises NonConvergent when
    the last difference exceeds the previous one above the round-off floor.
    """
    levels = tuple(levels)
    if len(levels) < 2:
        raise ValueError("need at least two refinement levels")
    values = [integrate_threeform(form, chart, nodes=n) for n in levels]
    diffs = [abs(b - a) for a, b in zip(values, values[1:])]
    floor = 64 * np.finfo(float).eps * max(1.0, abs(values[-1]))
    if len(diffs) >= 2 and diffs[-1] > diffs[-2] and diffs[-1] > floor:
        raise NonConvergent(f"refinement differences grew: {diffs}")
    return values[-1], diffs[-1]


def levels_from(nodes: int, count: int):
    """Node counts nodes/2^(count-1), ..., nodes/2, nodes (each at least 2)."""
    return tuple(max(2, nodes >> (count - 1 - i)) for i in range(count))
