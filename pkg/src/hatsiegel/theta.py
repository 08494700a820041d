"""Truncated Riemann theta series on C² x Ĥ₂ and its functional equations.

    theta(z; Ω) = sum_{n in Z²} exp(i pi n Ω n^t + 2 pi i n.z)

The series is summed over the box ``|n1|, |n2| <= radius``; the tail
outside the box is bounded through the smallest eigenvalue of Im Ω.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .halfspace import HatPoint
from .numeric import DomainError
from .polarization import (
    LatticeBasis,
    RiemannFormSpec,
    SemiCharacter,
    automorphic_factor,
    semicharacter_for,
)

THETA_NULL_SHIFT = np.array([0.1, 0.07j])


@dataclass(frozen=True)
class ThetaTruncation:
    radius: int
    tail_bound: float = math.nan

    def __post_init__(self):
        if self.radius < 1:
            raise DomainError("radius must be at least 1")


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    radius: int
    tail_bound: float
    accurate: bool


def tail_bound(omega: HatPoint, zpt, radius: int) -> float:
    """Bound on ``sum |term|`` over lattice points outside the box of ``radius``.

    Uses ``|term| <= exp(-pi lam |n|² + 2 pi |n| s)`` with ``lam`` the smallest
    eigenvalue of Im Ω and ``s = |Im z|``; the ``8k`` points of max-norm ``k``
    have Euclidean norm in ``[k, sqrt(2) k]``.
    """
    lam = omega.y - abs(omega.v)
    s = float(np.linalg.norm(np.imag(np.asarray(zpt, dtype=complex))))
    total = 0.0
    k = radius + 1
    while True:
        r = min(max(s / lam, k), math.sqrt(2) * k)
        expo = -math.pi * lam * r * r + 2 * math.pi * r * s + math.log(8 * k)
        if expo > 700:
            return math.inf
        term = math.exp(expo)
        total += term
        if k > s / lam + 2 and term < 1e-18 * max(total, 1e-300):
            break
        if term == 0.0 and k > s / lam:
            break
        k += 1
    return total


def radius_for(omega: HatPoint, zpt, target: float = 1e-12, max_radius: int = 200) -> int:
    """Smallest radius whose tail bound is at most ``target``."""
    for radius in range(1, max_radius + 1):
        if tail_bound(omega, zpt, radius) <= target:
            return radius
    raise DomainError("no radius up to max_radius reaches the requested accuracy")


def theta_series(omega: HatPoint, zpt, trunc: ThetaTruncation | int | None = None,
                 target: float = 1e-12) -> ThetaValue:
    """Truncated theta sum with its tail bound.

    ``accurate`` is False when the bound exceeds ``target``; the value is
    still returned so callers can decide.
    """
    zpt = np.asarray(zpt, dtype=complex)
    if trunc is None:
        radius = radius_for(omega, zpt, target)
    else:
        radius = trunc.radius if isinstance(trunc, ThetaTruncation) else int(trunc)
    n = np.arange(-radius, radius + 1)
    n1, n2 = np.meshgrid(n, n, indexing="ij")
    quad = omega.tau * (n1 * n1 + n2 * n2) + 2 * omega.z * n1 * n2
    expo = 1j * math.pi * quad + 2j * math.pi * (n1 * zpt[0] + n2 * zpt[1])
    value = complex(np.exp(expo).sum())
    bound = tail_bound(omega, zpt, radius)
    return ThetaValue(value, radius, bound, bound <= target)


def _theta(omega, zpt, radius=None):
    return theta_series(omega, zpt, radius).value


def jacobi_theta3(q: float, radius: int = 30) -> float:
    """One-dimensional ``sum_n q^{n²}``, used as an independent oracle."""
    return math.fsum(q ** (k * k) for k in range(-radius, radius + 1))


def jacobi_theta3_product(q: float, terms: int = 60) -> float:
    """``prod_{n>=1} (1 - q^{2n})(1 + q^{2n-1})²``, the triple-product form of ``sum q^{n²}``."""
    if not 0 <= q < 1:
        raise DomainError("nome must lie in [0, 1)")
    out = 1.0
    for n in range(1, terms + 1):
        out *= (1 - q ** (2 * n)) * (1 + q ** (2 * n - 1)) ** 2
    return out


def classical_factor(omega: HatPoint, zpt, m) -> complex:
    """``exp(-i pi m Ω m^t - 2 pi i m.z)``, the multiplier for the shift ``m Ω + k``."""
    m = np.asarray(m, dtype=float)
    om = omega.matrix()
    return cmath.exp(-1j * math.pi * (m @ om @ m) - 2j * math.pi * (m @ np.asarray(zpt, dtype=complex)))


def _shift(omega: HatPoint, m, k) -> np.ndarray:
    return np.asarray(m, dtype=float) @ omega.matrix() + np.asarray(k, dtype=float)


def _avoid_null(fn, zpt):
    """Evaluate ``fn`` at ``zpt`` or, near a theta-null, at up to 3 shifted points."""
    z = np.asarray(zpt, dtype=complex)
    for _ in range(4):
        res = fn(z)
        if res is not None:
            return res
        z = z + THETA_NULL_SHIFT
    return None


@dataclass(frozen=True)
class QPResult:
    residual: float
    conclusive: bool
    radius: int
    tail_bound: float


def quasi_periodicity_residual(omega: HatPoint, zpt, m, k, target: float = 1e-12) -> QPResult:
    """``|theta(z + mΩ + k) - factor * theta(z)| / (|factor * theta(z)| + 1e-10)``."""
    shift = _shift(omega, m, k)

    def attempt(z):
        radius = max(radius_for(omega, z, target), radius_for(omega, z + shift, target))
        base = theta_series(omega, z, radius)
        if abs(base.value) < 1e-6:
            return None
        moved = theta_series(omega, z + shift, radius)
        expected = classical_factor(omega, z, m) * base.value
        res = abs(moved.value - expected) / (abs(expected) + 1e-10)
        return QPResult(res, True, radius, max(base.tail_bound, moved.tail_bound))

    out = _avoid_null(attempt, zpt)
    return out if out is not None else QPResult(math.nan, False, 0, math.nan)


# -- principal polarization bridge --------------------------------------------

def principal_spec(omega: HatPoint) -> RiemannFormSpec:
    """The principal form ``H = (Im Ω)^-1`` on L_Ω, valid for every Ω in Ĥ₂."""
    return RiemannFormSpec(np.linalg.inv(omega.matrix().imag), LatticeBasis(omega))


def _check_principal(spec: RiemannFormSpec):
    y = spec.lattice.omega.matrix().imag
    if not np.allclose(spec.h, np.linalg.inv(y), atol=1e-12):
        raise DomainError("bridge needs the principal form H = (Im Ω)^-1")


def normalized_theta(spec: RiemannFormSpec, zpt, radius=None) -> complex:
    """``exp(pi/2 B(z, z)) theta(z)`` with ``B(z, w) = z (Im Ω)^-1 w^t``.

    B is the symmetric C-bilinear form equal to H on real vectors, so this
    function satisfies the functional equation with the factor built from H.
    """
    _check_principal(spec)
    zpt = np.asarray(zpt, dtype=complex)
    b = zpt @ spec.h @ zpt
    return cmath.exp(math.pi / 2 * b) * _theta(spec.lattice.omega, zpt, radius)


# fixed point, away from theta-nulls, where the twist character is measured
TWIST_FIT_POINT = np.array([0.123 + 0.057j, -0.231 + 0.031j])


def fit_twist(spec: RiemannFormSpec, chi: SemiCharacter) -> np.ndarray:
    """Values on e1..e4 of the character relating the classical multiplier to χ."""
    lat = spec.lattice
    z0 = TWIST_FIT_POINT
    radius = max(radius_for(lat.omega, z0 + v) for v in lat.vectors)
    base = normalized_theta(spec, z0, radius)
    out = []
    for i in range(4):
        n = np.eye(4, dtype=int)[i]
        ratio = normalized_theta(spec, z0 + lat.vectors[i], radius) / (
            automorphic_factor(spec, chi, n, z0) * base)
        out.append(ratio / abs(ratio))
    return np.array(out)


@dataclass(frozen=True)
class BridgeResult:
    residual: float
    twist: np.ndarray
    conclusive: bool


def principal_bridge_residual(omega: HatPoint, zpt, alpha, spec: RiemannFormSpec | None = None,
                              chi: SemiCharacter | None = None) -> BridgeResult:
    """Relative residual of ``θ̃(z+α) = J(α, z) θ̃(z)`` for the principal form.

    The twist character is fitted on the basis first and applied to χ.
    """
    spec = principal_spec(omega) if spec is None else spec
    chi = semicharacter_for(spec) if chi is None else chi
    twist = fit_twist(spec, chi)
    chi_t = chi.twisted(twist)
    a = spec.lattice.point(alpha)

    def attempt(z):
        radius = max(radius_for(omega, z), radius_for(omega, z + a))
        base = normalized_theta(spec, z, radius)
        if abs(_theta(omega, z, radius)) < 1e-6:
            return None
        expected = automorphic_factor(spec, chi_t, alpha, z) * base
        moved = normalized_theta(spec, z + a, radius)
        return BridgeResult(abs(moved - expected) / abs(expected), twist, True)

    out = _avoid_null(attempt, zpt)
    return out if out is not None else BridgeResult(math.nan, twist, False)
