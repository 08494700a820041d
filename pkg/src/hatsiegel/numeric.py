"""Small dense matrix kernel shared by every other module.

Floating comparisons go through :class:`Tolerance`; integer routines
(Pfaffian, Smith normal form) work on Python ints and are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm


class DomainError(ValueError):
    """Input lies outside the domain of an operation."""


class NumericError(ArithmeticError):
    """A numerical step failed (singular denominator, overflow...)."""


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be strictly positive")

    def close(self, a, b) -> bool:
        """Combined test ``|a-b| <= abs_tol + rel_tol*max(|a|,|b|)``, elementwise-all."""
        a = np.asarray(a)
        b = np.asarray(b)
        bound = self.abs_tol + self.rel_tol * np.maximum(np.abs(a), np.abs(b))
        return bool(np.all(np.abs(a - b) <= bound))


DEFAULT_TOL = Tolerance()

I2 = np.eye(2)
I4 = np.eye(4)
J4 = np.block([[np.zeros((2, 2)), I2], [-I2, np.zeros((2, 2))]])
q2 = np.array([[0.0, 1.0], [1.0, 0.0]])
Q4 = np.block([[q2, np.zeros((2, 2))], [np.zeros((2, 2)), q2]])


def as_matrix(m, shape: tuple[int, int] | None = None, dtype=complex) -> np.ndarray:
    try:
        arr = np.asarray(m, dtype=dtype)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"not a numeric matrix: {exc}") from exc
    if arr.ndim != 2 or (shape is not None and arr.shape != shape):
        raise DomainError(f"expected matrix of shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix has non-finite entries")
    return arr


def det2(m) -> complex:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def inv2(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Inverse of a 2x2 matrix via the adjugate; raises when ``|det| <= abs_tol``."""
    d = det2(m)
    if abs(d) <= tol.abs_tol:
        raise NumericError(f"singular 2x2 matrix (det={d!r})")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / d


def is_hermitian_pd(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Hermitian within ``tol`` and both leading principal minors above ``abs_tol``."""
    m = as_matrix(m, (2, 2))
    if not tol.close(m, m.conj().T):
        return False
    return m[0, 0].real > tol.abs_tol and det2(m).real > tol.abs_tol


def is_symplectic(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = np.asarray(m)
    return m.shape == (4, 4) and tol.close(m.T @ J4 @ m, J4)


# -- exact integer routines -------------------------------------------------

def as_int_alt4(e) -> list[list[int]]:
    """Validate a 4x4 integral antisymmetric matrix and return it as nested ints."""
    arr = np.asarray(e)
    if arr.shape != (4, 4):
        raise DomainError(f"expected 4x4, got {arr.shape}")
    out = []
    for row in arr.tolist():
        ints = []
        for v in row:
            if isinstance(v, float) and not v.is_integer():
                raise DomainError(f"non-integral entry {v!r}")
            ints.append(int(v))
        out.append(ints)
    for i in range(4):
        for j in range(4):
            if out[i][j] != -out[j][i]:
                raise DomainError("matrix is not antisymmetric")
    return out


def pfaffian4(e) -> int:
    """Pfaffian ``e12 e34 - e13 e24 + e14 e23`` of an integral alternating 4x4 matrix."""
    a = as_int_alt4(e)
    return a[0][1] * a[2][3] - a[0][2] * a[1][3] + a[0][3] * a[1][2]


def int_det(a: list[list[int]]) -> int:
    """Exact determinant by cofactor expansion (fine for n <= 4)."""
    n = len(a)
    if n == 1:
        return a[0][0]
    total = 0
    for j in range(n):
        if a[0][j]:
            minor = [row[:j] + row[j + 1:] for row in a[1:]]
            total += (-1) ** j * a[0][j] * int_det(minor)
    return total


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(a) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Smith normal form ``U @ a @ V = diag(d)`` with ``d1 | d2 | ...`` and d >= 0.

    Works on square integer matrices of any small size; U and V are
    unimodular. Everything is exact Python-int arithmetic.
    """
    m = [[int(v) for v in row] for row in np.asarray(a).tolist()]
    n = len(m)
    U = _identity(n)
    V = _identity(n)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (m, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row_dst += k*row_src
        m[dst] = [x + k * y for x, y in zip(m[dst], m[src])]
        U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, k):
        for M in (m, V):
            for row in M:
                row[dst] += k * row[src]

    for t in range(n):
        while True:
            entries = [(abs(m[i][j]), i, j) for i in range(t, n) for j in range(t, n) if m[i][j]]
            if not entries:
                break
            _, pi, pj = min(entries)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = m[t][t]
            dirty = False
            for i in range(t + 1, n):
                if m[i][t]:
                    add_row(t, i, -(m[i][t] // p))
                    dirty = dirty or m[i][t] != 0
            for j in range(t + 1, n):
                if m[t][j]:
                    add_col(t, j, -(m[t][j] // p))
                    dirty = dirty or m[t][j] != 0
            if dirty:
                continue
            bad = [(i, j) for i in range(t + 1, n) for j in range(t + 1, n) if m[i][j] % p]
            if not bad:
                break
            add_row(bad[0][0], t, 1)
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            U[t] = [-x for x in U[t]]

    return [m[i][i] for i in range(n)], U, V


def smith_normal_form4(e):
    """Smith normal form of a 4x4 integral alternating matrix."""
    return smith_normal_form(as_int_alt4(e))


# -- matrix exponential -----------------------------------------------------

def mat_exp(x, max_norm: float = 700.0) -> np.ndarray:
    """Matrix exponential (scipy's Pade scaling-and-squaring).

    Raises :class:`DomainError` when the 1-norm of ``x`` exceeds ``max_norm``,
    beyond which the entries of the result overflow double precision.
    """
    real = np.isrealobj(np.asarray(x))
    x = as_matrix(x, dtype=float if real else complex)
    if np.linalg.norm(x, 1) > max_norm:
        raise DomainError("matrix norm too large for exp")
    return expm(x)
