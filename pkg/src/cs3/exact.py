"""Exact rational helpers: numbers of the form q * pi**k and small dense linear
algebra over Fractions (with a float fallback)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class PiRational:
    """The real number ``q * pi**pi_power`` with ``q`` kept exact when rational."""

    q: Fraction | float
    pi_power: int = 0

    def __post_init__(self):
        if isinstance(self.q, Rational):
            object.__setattr__(self, "q", Fraction(self.q))

    @property
    def is_exact(self) -> bool:
        return isinstance(self.q, Fraction)

    @property
    def is_rational(self) -> bool:
        return self.is_exact and (self.pi_power == 0 or self.q == 0)

    def __float__(self) -> float:
        return float(self.q) * math.pi**self.pi_power

    def __mul__(self, other):
        if isinstance(other, PiRational):
            return PiRational(self.q * other.q, self.pi_power + other.pi_power)
        return PiRational(self.q * other, self.pi_power)

    __rmul__ = __mul__

    def __neg__(self):
        return PiRational(-self.q, self.pi_power)

    def value(self):
        """Exact Fraction when rational, otherwise a float."""
        if self.is_rational:
            return self.q
        return float(self)

    def __str__(self):
        if self.pi_power == 0 or self.q == 0:
            return str(self.q)
        return f"{self.q}*pi^{self.pi_power}"


def is_exact_number(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def exact_array(values) -> np.ndarray:
    """Object array of Fractions (ints promoted); floats are left untouched."""
    arr = np.array(values, dtype=object)
    flat = arr.reshape(-1)
    for i, v in enumerate(flat):
        if isinstance(v, (int, np.integer)):
            flat[i] = Fraction(int(v))
    return flat.reshape(arr.shape)


def all_exact(arr) -> bool:
    arr = np.asarray(arr)
    if arr.dtype != object:
        return False
    return all(isinstance(v, Fraction) for v in arr.reshape(-1))


def is_zero(x, tol=FLOAT_TOL) -> bool:
    if isinstance(x, Fraction):
        return x == 0
    return abs(x) <= tol


def array_is_zero(arr, tol=FLOAT_TOL) -> bool:
    return all(is_zero(v, tol) for v in np.asarray(arr).reshape(-1))


def max_abs(arr) -> float:
    arr = np.asarray(arr).reshape(-1)
    if arr.size == 0:
        return 0.0
    return max(abs(float(v)) for v in arr)


def rref(matrix, tol=FLOAT_TOL):
    """Reduced row echelon form. Returns ``(R, pivot_columns)``.

    Exact for Fraction entries; float entries use partial pivoting with an
    absolute tolerance.
    """
    a = np.array(matrix, dtype=object).copy()
    rows, cols = a.shape
    exact = all_exact(a)
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        if exact:
            candidates = [i for i in range(r, rows) if a[i, c] != 0]
            if not candidates:
                continue
            p = candidates[0]
        else:
            p = max(range(r, rows), key=lambda i: abs(a[i, c]))
            if abs(a[p, c]) <= tol:
                continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = a[r] / a[r, c]
        for i in range(rows):
            if i != r and not (a[i, c] == 0):
                a[i] = a[i] - a[i, c] * a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(matrix, tol=FLOAT_TOL) -> int:
    return len(rref(matrix, tol)[1])


def solve(a, b, tol=FLOAT_TOL):
    """Solve ``a @ x = b`` for a consistent (possibly overdetermined) system.

    Returns ``None`` when the system is inconsistent; raises ValueError when
    the solution is not unique.
    """
    a = np.array(a, dtype=object)
    b = np.array(b, dtype=object)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    n = a.shape[1]
    aug = np.concatenate([a, b], axis=1)
    red, pivots = rref(aug, tol)
    if any(p >= n for p in pivots):
        return None
    if len(pivots) < n:
        raise ValueError("solution is not unique")
    x = red[:n, n:]
    return x[:, 0] if vector else x


def inverse(a, tol=FLOAT_TOL):
    a = np.array(a, dtype=object)
    n = a.shape[0]
    eye = exact_array(np.eye(n, dtype=int)) if all_exact(a) else np.eye(n).astype(object)
    red, pivots = rref(np.concatenate([a, eye], axis=1), tol)
    if pivots[:n] != list(range(n)) or any(p >= n for p in pivots):
        raise ZeroDivisionError("matrix is singular")
    return red[:, n:]


def det(a):
    """Determinant by fraction-preserving elimination."""
    a = np.array(a, dtype=object).copy()
    n = a.shape[0]
    exact = all_exact(a)
    result = Fraction(1) if exact else 1.0
    for c in range(n):
        if exact:
            p = next((i for i in range(c, n) if a[i, c] != 0), None)
        else:
            p = max(range(c, n), key=lambda i: abs(a[i, c]))
            p = None if a[p, c] == 0 else p
        if p is None:
            return Fraction(0) if exact else 0.0
        if p != c:
            a[[c, p]] = a[[p, c]]
            result = -result
        result = result * a[c, c]
        for i in range(c + 1, n):
            if a[i, c] != 0:
                a[i] = a[i] - (a[i, c] / a[c, c]) * a[c]
    return result


def to_float(arr) -> np.ndarray:
    return np.asarray(arr, dtype=object).astype(float)
