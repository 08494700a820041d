"""Dual torus, Poincaré bundle, translations, K(F), curvature and Hodge numbers.

A point ℓ of the conjugate dual is stored as a complex 2-vector ``c`` with
``ℓ(z) = c1 conj(z1) + c2 conj(z2)``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .numeric import DomainError, smith_normal_form4
from .polarization import (
    LatticeBasis,
    RiemannFormSpec,
    SemiCharacter,
    automorphic_factor,
    integral_e,
    section_dimension,
)


@dataclass(frozen=True, eq=False)
class DualPoint:
    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        if c.shape != (2,) or not np.all(np.isfinite(c)):
            raise DomainError("dual point needs a finite complex 2-vector")
        object.__setattr__(self, "c", c)

    def __call__(self, zpt) -> complex:
        return complex(self.c @ np.conj(np.asarray(zpt, dtype=complex)))

    def __add__(self, other: DualPoint) -> DualPoint:
        return DualPoint(self.c + other.c)

    def __neg__(self) -> DualPoint:
        return DualPoint(-self.c)

    def in_dual_lattice(self, lat: LatticeBasis, tol: float = 1e-9) -> bool:
        vals = np.array([self(e).imag for e in lat.vectors])
        return bool(np.all(np.abs(vals - np.round(vals)) <= tol))


def dual_basis(lat: LatticeBasis) -> list[DualPoint]:
    """ℓ1..ℓ4 with ``Im ℓi(ej) = δij``.

    Writing ``c = p + i q``, ``Im ℓ(e) = q.Re(e) - p.Im(e)``, which is a real
    4x4 linear system in ``(p, q)``.
    """
    e = lat.vectors
    system = np.hstack([-e.imag, e.real])
    if abs(np.linalg.det(system)) < 1e-14:
        raise DomainError("period matrix is singular")
    sol = np.linalg.solve(system, np.eye(4))
    return [DualPoint(sol[:2, i] + 1j * sol[2:, i]) for i in range(4)]


def dual_point(lat: LatticeBasis, n) -> DualPoint:
    """The point ``sum n_i ℓ_i`` of the dual lattice."""
    basis = dual_basis(lat)
    return DualPoint(sum(int(k) * b.c for k, b in zip(n, basis)))


def pairing_matrix(lat: LatticeBasis, duals: list[DualPoint]) -> np.ndarray:
    return np.array([[d(e).imag for e in lat.vectors] for d in duals])


# -- Poincaré bundle on A x Â ----------------------------------------------------

def poincare_hermitian(z1, l1: DualPoint, z2, l2: DualPoint) -> complex:
    """``H((z1, ℓ1), (z2, ℓ2)) = ℓ1(z2) + conj(ℓ2(z1))``."""
    return l1(z2) + np.conj(l2(z1))


def poincare_semicharacter(lat: LatticeBasis, alpha, ell: DualPoint) -> complex:
    """``χ(α, ℓ) = exp(-i π Im ℓ(α))`` for α given by integer coordinates."""
    a = lat.point(alpha)
    return cmath.exp(-1j * math.pi * ell(a).imag)


def poincare_factor(lat: LatticeBasis, alpha, ellhat: DualPoint, zpt, ell: DualPoint,
                    check: bool = True) -> complex:
    """Automorphic factor of the Poincaré bundle at ((α, ℓ̂), (z, ℓ))."""
    if check and not ellhat.in_dual_lattice(lat):
        raise DomainError("ellhat is not in the dual lattice")
    a = lat.point(alpha)
    zpt = np.asarray(zpt, dtype=complex)
    expo = (math.pi * poincare_hermitian(zpt, ell, a, ellhat)
            + math.pi / 2 * poincare_hermitian(a, ellhat, a, ellhat))
    return poincare_semicharacter(lat, alpha, ellhat) * cmath.exp(expo)


def poincare_E(lat: LatticeBasis, alpha, l1: DualPoint, beta, l2: DualPoint) -> float:
    a, b = lat.point(alpha), lat.point(beta)
    return poincare_hermitian(a, l1, b, l2).imag


def poincare_semicharacter_residual(lat: LatticeBasis, trials: int = 300, seed: int = 0,
                                    bound: int = 3) -> float:
    """Max of ``|χ(x+y) - χ(x)χ(y)exp(iπE(x,y))|`` over random pairs in L x L̂."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        al, be = rng.integers(-bound, bound + 1, (2, 4))
        l1 = dual_point(lat, rng.integers(-bound, bound + 1, 4))
        l2 = dual_point(lat, rng.integers(-bound, bound + 1, 4))
        lhs = poincare_semicharacter(lat, al + be, l1 + l2)
        rhs = (poincare_semicharacter(lat, al, l1) * poincare_semicharacter(lat, be, l2)
               * cmath.exp(1j * math.pi * poincare_E(lat, al, l1, be, l2)))
        worst = max(worst, abs(lhs - rhs))
    return worst


def poincare_cocycle_residual(lat: LatticeBasis, trials: int = 300, seed: int = 0,
                              bound: int = 2) -> float:
    """Max relative error of the cocycle identity on the product lattice L x L̂."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        al, be = rng.integers(-bound, bound + 1, (2, 4))
        la = dual_point(lat, rng.integers(-bound, bound + 1, 4))
        lb = dual_point(lat, rng.integers(-bound, bound + 1, 4))
        z = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.5, 0.5, 2)
        ell = DualPoint(rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.5, 0.5, 2))
        lhs = poincare_factor(lat, al + be, la + lb, z, ell, check=False)
        rhs = (poincare_factor(lat, al, la, z + lat.point(be), ell + lb, check=False)
               * poincare_factor(lat, be, lb, z, ell, check=False))
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
    return worst


def poincare_restriction_residual(lat: LatticeBasis, trials: int = 100, seed: int = 0) -> float:
    """Deviation from 1 of the factor restricted to {e} x Â and to A x {ê}."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    zero4 = np.zeros(4, dtype=int)
    origin = DualPoint(np.zeros(2))
    for _ in range(trials):
        lh = dual_point(lat, rng.integers(-3, 4, 4))
        ell = DualPoint(rng.normal(size=2) + 1j * rng.normal(size=2))
        worst = max(worst, abs(poincare_factor(lat, zero4, lh, np.zeros(2), ell) - 1))
        al = rng.integers(-3, 4, 4)
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        worst = max(worst, abs(poincare_factor(lat, al, origin, z, origin) - 1))
    return worst


def fiber_triviality_residual(lat: LatticeBasis, ell: DualPoint, alpha, zpt) -> float:
    """Relative residual of ``h(z+α) J_ℓ(α, z) = exp(2πi Im ℓ(α)) h(z)``.

    Here ``J_ℓ(α, z) = exp(π ℓ(α))`` and ``h(z) = exp(-π conj(ℓ(z)))``.
    """
    a = lat.point(alpha)
    zpt = np.asarray(zpt, dtype=complex)

    def h(w):
        return cmath.exp(-math.pi * np.conj(ell(w)))

    lhs = h(zpt + a) * cmath.exp(math.pi * ell(a))
    rhs = cmath.exp(2j * math.pi * ell(a).imag) * h(zpt)
    return abs(lhs - rhs) / abs(rhs)


def fiber_character(lat: LatticeBasis, ell: DualPoint, alpha) -> complex:
    """``exp(2πi Im ℓ(α))``; equal to 1 for ℓ in the dual lattice."""
    return cmath.exp(2j * math.pi * ell(lat.point(alpha)).imag)


# -- translations ------------------------------------------------------------------

def translate_factor(spec: RiemannFormSpec, chi: SemiCharacter, a, alpha, zpt) -> complex:
    """Factor of the pulled-back bundle: ``J(α, z + a)``."""
    return automorphic_factor(spec, chi, alpha, np.asarray(zpt, dtype=complex) + np.asarray(a, dtype=complex))


@dataclass(frozen=True, eq=False)
class TranslationCharacter:
    """Character ``α ↦ exp(2πi E(a, α))``, stored by its real exponents on e1..e4."""

    exponents: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.exponents)

    def __call__(self, n) -> complex:
        return cmath.exp(2j * math.pi * float(np.asarray(n, dtype=float) @ self.exponents))

    def __mul__(self, other: TranslationCharacter) -> TranslationCharacter:
        return TranslationCharacter(self.exponents + other.exponents)

    def is_trivial(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.exponents - np.round(self.exponents)) <= tol))


def translation_character(spec: RiemannFormSpec, a) -> TranslationCharacter:
    """φ_F at the point ``a``, as the degree-0 character ``exp(2πi E(a, ·))``."""
    a = np.asarray(a, dtype=complex)
    return TranslationCharacter(np.array([spec.E(a, e) for e in spec.lattice.vectors]))


def translation_coboundary(spec: RiemannFormSpec, a, zpt) -> complex:
    """``g(z) = exp(-π H(z, a))``; carries ``J(·, z+a)`` to ``J(·, z) φ(a)(·)``."""
    return cmath.exp(-math.pi * spec(np.asarray(zpt, dtype=complex), np.asarray(a, dtype=complex)))


def translation_equivalence_residual(spec: RiemannFormSpec, chi: SemiCharacter, a, alpha, zpt) -> float:
    """Residual of ``g(z+α) J(α, z+a) = g(z) J(α, z) φ_a(α)``."""
    lat = spec.lattice
    zpt = np.asarray(zpt, dtype=complex)
    lhs = translation_coboundary(spec, a, zpt + lat.point(alpha)) * translate_factor(spec, chi, a, alpha, zpt)
    rhs = (translation_coboundary(spec, a, zpt) * automorphic_factor(spec, chi, alpha, zpt)
           * translation_character(spec, a)(alpha))
    return abs(lhs - rhs) / abs(rhs)


@dataclass(frozen=True)
class KernelGroup:
    divisors: tuple[int, ...]
    order: int

    @property
    def structure(self) -> tuple[int, ...]:
        """Orders of the nontrivial cyclic factors of K(F) (each appearing as Z/d)."""
        return tuple(d for d in self.divisors if d > 1)


def kernel_subgroup(spec: RiemannFormSpec) -> KernelGroup:
    """K(F) ≅ Z⁴ E^-1 / Z⁴ from the Smith normal form of E."""
    e = integral_e(spec)
    divisors, _, _ = smith_normal_form4(e)
    if 0 in divisors:
        raise DomainError("E is degenerate; K(F) is not finite")
    section_dimension(spec)  # positive definiteness check
    return KernelGroup(tuple(divisors), math.prod(divisors))


def kernel_points(spec: RiemannFormSpec) -> list[np.ndarray]:
    """Coordinates in [0,1)⁴ (w.r.t. e1..e4) of the points of K(F).

    These are the x with ``x E`` integral. From ``U E V = D`` one gets
    ``x = (k / d) U`` with ``0 <= k_i < d_i``.
    """
    divisors, U, _ = smith_normal_form4(integral_e(spec))
    if 0 in divisors:
        raise DomainError("E is degenerate; K(F) is not finite")
    U = np.array(U, dtype=float)
    d = np.array(divisors, dtype=float)
    pts = []
    for k in itertools.product(*(range(di) for di in divisors)):
        x = (np.array(k) / d) @ U
        pts.append(x - np.floor(x + 1e-12))
    return pts


def square_theorem_residual(spec: RiemannFormSpec, chi: SemiCharacter, a, b,
                            trials: int = 100, seed: int = 0) -> float:
    """Factor-level check of the theorem of the square.

    Returns the max of: the multiplicativity defect of the translation
    characters, the deviation of ``J(α,z+a+b)J(α,z) / (J(α,z+a)J(α,z+b))``
    from 1, and the coboundary residual for a, b and a+b.
    """
    rng = np.random.default_rng(seed)
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ca, cb, cab = translation_character(spec, a), translation_character(spec, b), translation_character(spec, a + b)
    worst = float(np.abs(cab.exponents - (ca * cb).exponents).max())
    for _ in range(trials):
        alpha = rng.integers(-2, 3, 4)
        z = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.5, 0.5, 2)
        lhs = translate_factor(spec, chi, a + b, alpha, z) * automorphic_factor(spec, chi, alpha, z)
        rhs = translate_factor(spec, chi, a, alpha, z) * translate_factor(spec, chi, b, alpha, z)
        worst = max(worst, abs(lhs / rhs - 1))
        for shift in (a, b, a + b):
            worst = max(worst, translation_equivalence_residual(spec, chi, shift, alpha, z))
    return worst


# -- Chern class and curvature ------------------------------------------------------

def chern_form_from_factor(factor, lat: LatticeBasis, zpt=None, h: float = 1e-6) -> np.ndarray:
    """Alternating form recovered from an automorphic factor ``factor(n, z)``.

    With ``D_β log J_α`` the derivative of ``log J(α, ·)`` along β (a central
    difference, so no branch of log is needed),
    ``E(α, β) = -Im(D_β log J_α - D_α log J_β) / (2π)``.
    """
    z0 = np.array([0.1 + 0.2j, -0.2 + 0.05j]) if zpt is None else np.asarray(zpt, dtype=complex)
    basis = np.eye(4, dtype=int)
    vecs = lat.vectors

    def dlog(n, direction):
        f0 = factor(n, z0)
        return (factor(n, z0 + h * direction) - factor(n, z0 - h * direction)) / (2 * h * f0)

    out = np.zeros((4, 4))
    for i in range(4):
        for j in range(4):
            out[i, j] = -(dlog(basis[i], vecs[j]) - dlog(basis[j], vecs[i])).imag / (2 * math.pi)
    return out


@dataclass(frozen=True)
class Curvature:
    matrix: np.ndarray
    constancy_residual: float


def curvature_matrix(spec: RiemannFormSpec, points: int = 10, seed: int = 0, h: float = 1e-3) -> Curvature:
    """Coefficients ``c_ij`` of the curvature ``sum c_ij dz_i ∧ dz̄_j``.

    The bundle carries the weight ``exp(-π H(z, z))``; the curvature is
    ``-∂∂̄ log(weight) = π h``. Constancy is checked by finite differences of
    ``∂_i ∂̄_j`` applied to ``π H(z, z)`` at random points.
    """
    rng = np.random.default_rng(seed)
    c = math.pi * spec.h

    def phi(z):
        return math.pi * spec(z, z).real

    worst = 0.0
    for _ in range(points):
        z0 = rng.normal(size=2) + 1j * rng.normal(size=2)
        est = np.zeros((2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                ei, ej = np.eye(2)[i], np.eye(2)[j]
                # ∂_i ∂̄_j = 1/4 (∂x_i - i ∂y_i)(∂x_j + i ∂y_j)
                dxx = _mixed(phi, z0, ei, ej, h)
                dxy = _mixed(phi, z0, ei, 1j * ej, h)
                dyx = _mixed(phi, z0, 1j * ei, ej, h)
                dyy = _mixed(phi, z0, 1j * ei, 1j * ej, h)
                est[i, j] = (dxx + 1j * dxy - 1j * dyx + dyy) / 4
        worst = max(worst, float(np.abs(est - c).max()))
    return Curvature(c, worst)


def _mixed(f, z0, d1, d2, h):
    return (f(z0 + h * d1 + h * d2) - f(z0 + h * d1 - h * d2)
            - f(z0 - h * d1 + h * d2) + f(z0 - h * d1 - h * d2)) / (4 * h * h)


def hodge_numbers() -> dict[str, object]:
    """``h^{p,q} = C(2,p) C(2,q)`` and Betti numbers ``b_k = C(4,k)`` of an abelian surface."""
    table = [[comb(2, p) * comb(2, q) for q in range(3)] for p in range(3)]
    betti = [comb(4, k) for k in range(5)]
    return {"hodge": table, "betti": betti}
