"""Riemann forms, semi-characters and automorphic factors on A_Ω = C²/L_Ω.

Hermitian forms are linear in the first argument and conjugate-linear in
the second: ``H(u, w) = u @ h @ conj(w)``. Lattice points are given by
their integer coordinates in the basis ``e1 = (tau, z), e2 = (z, tau),
e3 = (1, 0), e4 = (0, 1)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .halfspace import HatPoint
from .numeric import DEFAULT_TOL, DomainError, Tolerance, as_matrix, is_hermitian_pd, pfaffian4


class FormKind(str, Enum):
    OMEGA = "omega"
    TAU = "tau"
    STAR = "star"
    CUSTOM = "custom"


@dataclass(frozen=True)
class LatticeBasis:
    omega: HatPoint

    @property
    def vectors(self) -> np.ndarray:
        """Rows e1..e4 as complex 2-vectors."""
        t, z = self.omega.tau, self.omega.z
        return np.array([[t, z], [z, t], [1, 0], [0, 1]], dtype=complex)

    def period_matrix(self) -> np.ndarray:
        """Real 4x4 matrix whose rows are the basis vectors in (Re, Re, Im, Im) coordinates."""
        e = self.vectors
        return np.hstack([e.real, e.imag])

    def point(self, n) -> np.ndarray:
        """Lattice vector with integer coordinates ``n``."""
        return np.asarray(n, dtype=float) @ self.vectors

    def real_coords(self, a) -> np.ndarray:
        """Real coordinates of ``a`` in C² with respect to e1..e4."""
        a = np.asarray(a, dtype=complex)
        return np.linalg.solve(self.period_matrix().T, np.concatenate([a.real, a.imag]))


def hermitian(h: np.ndarray, u, w) -> complex:
    return complex(np.asarray(u) @ h @ np.conj(np.asarray(w)))


@dataclass(frozen=True, eq=False)
class RiemannFormSpec:
    h: np.ndarray
    lattice: LatticeBasis
    kind: FormKind = FormKind.CUSTOM

    def __post_init__(self):
        h = as_matrix(self.h, (2, 2))
        if not DEFAULT_TOL.close(h, h.conj().T):
            raise DomainError("coefficient matrix is not Hermitian")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "kind", FormKind(self.kind))

    @classmethod
    def omega(cls, pt: HatPoint) -> RiemannFormSpec:
        return cls(np.eye(2, dtype=complex), LatticeBasis(pt), FormKind.OMEGA)

    @classmethod
    def tau(cls, pt: HatPoint) -> RiemannFormSpec:
        return cls(np.eye(2, dtype=complex) / pt.y, LatticeBasis(pt), FormKind.TAU)

    @classmethod
    def star(cls, pt: HatPoint) -> RiemannFormSpec:
        return cls(np.array([[2, 1], [1, 2]], dtype=complex), LatticeBasis(pt), FormKind.STAR)

    @classmethod
    def of_kind(cls, kind, pt: HatPoint, h=None) -> RiemannFormSpec:
        kind = FormKind(kind)
        if kind is FormKind.CUSTOM:
            if h is None:
                raise DomainError("custom kind needs an explicit coefficient matrix")
            return cls(h, LatticeBasis(pt), kind)
        return {FormKind.OMEGA: cls.omega, FormKind.TAU: cls.tau, FormKind.STAR: cls.star}[kind](pt)

    def __call__(self, u, w) -> complex:
        return hermitian(self.h, u, w)

    def __add__(self, other: RiemannFormSpec) -> RiemannFormSpec:
        if self.lattice != other.lattice:
            raise DomainError("forms live on different lattices")
        return RiemannFormSpec(self.h + other.h, self.lattice)

    def E(self, u, w) -> float:
        return self(u, w).imag


def gram_matrices(spec: RiemannFormSpec) -> tuple[np.ndarray, np.ndarray]:
    """``S[i,j] = Re H(e_i, e_j)`` and ``E[i,j] = Im H(e_i, e_j)``."""
    e = spec.lattice.vectors
    g = e @ spec.h @ e.conj().T
    return g.real.copy(), g.imag.copy()


@dataclass
class RiemannCheck:
    ok: bool
    nondegenerate: bool
    integral: bool
    positive_definite: bool
    reasons: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def is_riemann_form(spec: RiemannFormSpec, tol: Tolerance = DEFAULT_TOL) -> RiemannCheck:
    reasons = []
    nondeg = abs(np.linalg.det(spec.h)) > tol.abs_tol
    if not nondeg:
        reasons.append("H is degenerate")
    _, E = gram_matrices(spec)
    integral = bool(np.all(np.abs(E - np.round(E)) <= tol.abs_tol + tol.rel_tol * np.abs(E)))
    if not integral:
        reasons.append("Im H is not integral on the lattice")
    return RiemannCheck(nondeg and integral, nondeg, integral, is_hermitian_pd(spec.h, tol), reasons)


def integral_e(spec: RiemannFormSpec, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """E as an exact integer matrix; raises if it is not integral."""
    _, E = gram_matrices(spec)
    rounded = np.round(E)
    if np.any(np.abs(E - rounded) > tol.abs_tol + tol.rel_tol * np.abs(E)):
        raise DomainError("Im H is not integral on the lattice")
    return rounded.astype(np.int64)


def section_dimension(spec: RiemannFormSpec, tol: Tolerance = DEFAULT_TOL) -> int:
    """dim H⁰(A, L(H, χ)) = |Pf E| for a positive definite Riemann form."""
    if not is_hermitian_pd(spec.h, tol):
        raise DomainError("H is not positive definite")
    return abs(pfaffian4(integral_e(spec, tol)))


# -- semi-characters -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SemiCharacter:
    """Semi-character for an integral alternating form, fixed by its basis values.

    ``chi(sum n_i e_i) = prod chi(e_i)^{n_i} * exp(i pi sum_{i<j} n_i n_j E_ij)``
    """

    base_values: np.ndarray
    e_form: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.base_values, dtype=complex)
        if vals.shape != (4,) or np.any(np.abs(np.abs(vals) - 1) > 1e-12):
            raise DomainError("base values must be four unit-modulus numbers")
        e = np.asarray(self.e_form)
        if e.shape != (4, 4) or np.any(e != np.round(e)) or np.any(e != -e.T):
            raise DomainError("E must be integral and alternating")
        object.__setattr__(self, "base_values", vals)
        object.__setattr__(self, "e_form", e.astype(np.int64))

    def phase_exponent(self, n) -> int:
        """The integer ``sum_{i<j} n_i n_j E_ij`` (the sign part of chi)."""
        n = [int(k) for k in n]
        e = self.e_form
        return sum(n[i] * n[j] * int(e[i, j]) for i in range(4) for j in range(i + 1, 4))

    def __call__(self, n) -> complex:
        n = [int(k) for k in n]
        sign = -1 if self.phase_exponent(n) % 2 else 1
        val = complex(sign)
        for b, k in zip(self.base_values, n):
            if b != 1:
                val *= b**k
        return val

    def __mul__(self, other: SemiCharacter) -> SemiCharacter:
        return SemiCharacter(self.base_values * other.base_values, self.e_form + other.e_form)

    def twisted(self, values) -> SemiCharacter:
        """Multiply by the character with the given values on e1..e4."""
        return SemiCharacter(self.base_values * np.asarray(values, dtype=complex), self.e_form)


def canonical_semicharacter(e_form) -> SemiCharacter:
    """The semi-character equal to 1 on each basis vector."""
    return SemiCharacter(np.ones(4, dtype=complex), e_form)


def semicharacter_for(spec: RiemannFormSpec) -> SemiCharacter:
    return canonical_semicharacter(integral_e(spec))


def semicharacter_law_defect(chi: SemiCharacter, n, m) -> int:
    """Integer obstruction to ``chi(n+m) = chi(n) chi(m) exp(i pi E(n,m))`` holding
    exactly, computed on the sign exponents (0 means the law holds)."""
    n = [int(k) for k in n]
    m = [int(k) for k in m]
    s = [a + b for a, b in zip(n, m)]
    e_nm = sum(n[i] * int(chi.e_form[i, j]) * m[j] for i in range(4) for j in range(4))
    return (chi.phase_exponent(s) - chi.phase_exponent(n) - chi.phase_exponent(m) - e_nm) % 2


def _box(bound: int) -> np.ndarray:
    r = np.arange(-bound, bound + 1)
    return np.stack(np.meshgrid(r, r, r, r, indexing="ij"), -1).reshape(-1, 4)


def semicharacter_law_box(chi: SemiCharacter, bound: int = 3) -> tuple[int, float]:
    """Exhaustive check of the semi-character law on ``|n_i|, |m_i| <= bound``.

    Returns the number of pairs whose integer sign exponents violate the law
    and the largest ``|χ(n+m) - χ(n)χ(m)exp(iπE(n,m))|`` over all pairs.
    Vectorised; the box of bound 3 has 7⁸ ≈ 5.8 million pairs.
    """
    n = _box(bound)
    e = chi.e_form
    upper = np.triu(e, 1)

    def expo(v):
        return np.einsum("...i,ij,...j->...", v, upper, v)

    pn = expo(n)
    logb = np.angle(chi.base_values) / math.pi
    bn = n @ logb
    failures, worst = 0, 0.0
    for row in range(0, len(n), 256):
        a = n[row:row + 256, None, :]
        s = a + n[None, :, :]
        e_nm = np.einsum("...i,ij,...j->...", a, e, n[None, :, :])
        defect = (expo(s) - pn[row:row + 256, None] - pn[None, :] - e_nm) % 2
        failures += int(np.count_nonzero(defect))
        # base part is a character, so only its rounding error can show up here
        phase = (s @ logb) - bn[row:row + 256, None] - bn[None, :]
        worst = max(worst, float(np.abs(np.expm1(1j * math.pi * phase)).max()))
    return failures, worst


def factor_parts(spec: RiemannFormSpec, chi, alpha, zpt) -> tuple[complex, complex]:
    """``(χ(α), π H(z, α) + π/2 H(α, α))``, so that ``J = χ(α) exp(exponent)``."""
    a = spec.lattice.point(alpha)
    zpt = np.asarray(zpt, dtype=complex)
    return chi(alpha), math.pi * spec(zpt, a) + math.pi / 2 * spec(a, a)


def automorphic_factor(spec: RiemannFormSpec, chi, alpha, zpt) -> complex:
    """``J(α, z) = χ(α) exp(π H(z, α) + π/2 H(α, α))``."""
    c, expo = factor_parts(spec, chi, alpha, zpt)
    return c * cmath.exp(expo)


def factor_cocycle_residual(spec: RiemannFormSpec, chi, trials: int = 500,
                            seed: int = 0, bound: int = 3, zscale: float = 1.0) -> float:
    """Max relative error of ``J(α+β, z) = J(α, β+z) J(β, z)`` over random triples.

    The two sides are compared as a ratio assembled from the χ values and
    the exponents, so large lattice vectors do not overflow.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    lat = spec.lattice
    for _ in range(trials):
        al = rng.integers(-bound, bound + 1, 4)
        be = rng.integers(-bound, bound + 1, 4)
        z = (rng.uniform(-zscale, zscale, 2) + 1j * rng.uniform(-zscale, zscale, 2))
        c0, x0 = factor_parts(spec, chi, al + be, z)
        c1, x1 = factor_parts(spec, chi, al, lat.point(be) + z)
        c2, x2 = factor_parts(spec, chi, be, z)
        ratio = c0 / (c1 * c2) * cmath.exp(x0 - x1 - x2)
        worst = max(worst, abs(ratio - 1))
    return worst


def kind_omega_formula(pt: HatPoint) -> float:
    return pt.y**2 - pt.v**2


def kind_star_formula(pt: HatPoint) -> float:
    return 3 * (pt.y**2 - pt.v**2)


class CorruptedSemiCharacter:
    """Negative control: ``chi`` with its value flipped on every point whose
    k-th coordinate is nonzero. This is not a semi-character, so the cocycle
    identity for the resulting factor fails."""

    def __init__(self, chi: SemiCharacter, k: int):
        self.chi = chi
        self.k = k
        self.e_form = chi.e_form

    def __call__(self, n) -> complex:
        val = self.chi(n)
        return -val if int(n[self.k]) != 0 else val
