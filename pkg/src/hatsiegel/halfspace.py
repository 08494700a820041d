"""The domains Ĥ₂ ⊂ ℍ₂ and D̂₂ ⊂ 𝔻₂, the symplectic action and the Cayley maps.

A point of Ĥ₂ is a symmetric matrix ``[[tau, z], [z, tau]]`` with
``Im tau > |Im z|``. It is stored as the pair ``(tau, z)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numeric import (
    DEFAULT_TOL,
    I2,
    DomainError,
    NumericError,
    Tolerance,
    as_matrix,
    det2,
    inv2,
    is_symplectic,
    q2,
)


@dataclass(frozen=True)
class HatPoint:
    tau: complex
    z: complex

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "z", complex(self.z))
        if not (np.isfinite(self.tau) and np.isfinite(self.z)):
            raise DomainError("non-finite coordinates")
        if self.tau.imag - abs(self.z.imag) <= DEFAULT_TOL.abs_tol:
            raise DomainError(f"not in Ĥ₂: Im tau={self.tau.imag}, Im z={self.z.imag}")

    @property
    def x(self) -> float:
        return self.tau.real

    @property
    def y(self) -> float:
        return self.tau.imag

    @property
    def u(self) -> float:
        return self.z.real

    @property
    def v(self) -> float:
        return self.z.imag

    @property
    def plus(self) -> complex:
        """``tau + z``, the coordinate moved by the first SL(2,R) factor."""
        return self.tau + self.z

    @property
    def minus(self) -> complex:
        return self.tau - self.z

    def matrix(self) -> np.ndarray:
        return np.array([[self.tau, self.z], [self.z, self.tau]])

    @classmethod
    def from_matrix(cls, omega, tol: Tolerance = DEFAULT_TOL) -> HatPoint:
        if not in_hat_h2(omega, tol):
            raise DomainError("matrix is not a point of Ĥ₂")
        omega = np.asarray(omega, dtype=complex)
        return cls((omega[0, 0] + omega[1, 1]) / 2, (omega[0, 1] + omega[1, 0]) / 2)

    @classmethod
    def from_real(cls, x, y, u, v) -> HatPoint:
        return cls(complex(x, y), complex(u, v))


ORIGIN = HatPoint(1j, 0)


def in_hat_h2(omega, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Membership test for Ĥ₂; malformed input gives ``False``."""
    try:
        omega = as_matrix(omega, (2, 2))
    except DomainError:
        return False
    if not (tol.close(omega[0, 1], omega[1, 0]) and tol.close(omega[0, 0], omega[1, 1])):
        return False
    tau, z = omega[0, 0], omega[0, 1]
    return tau.imag - abs(z.imag) > tol.abs_tol


def in_siegel(omega, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Membership in ℍ₂ (symmetric, positive-definite imaginary part)."""
    try:
        omega = as_matrix(omega, (2, 2))
    except DomainError:
        return False
    y = omega.imag
    return tol.close(omega, omega.T) and y[0, 0] > tol.abs_tol and det2(y) > tol.abs_tol


def _omega(pt) -> np.ndarray:
    return pt.matrix() if isinstance(pt, HatPoint) else as_matrix(pt, (2, 2))


def symplectic_act(m, omega, tol: Tolerance = DEFAULT_TOL, check: bool = True):
    """``(A Ω + B)(C Ω + D)^-1``.

    Returns a :class:`HatPoint` when given one (the image of Ĥ₂ under an
    element of Ĝ stays in Ĥ₂), otherwise a 2x2 complex matrix.
    """
    m = as_matrix(m, (4, 4), dtype=float)
    if check and not is_symplectic(m, tol):
        raise DomainError("matrix is not symplectic")
    om = _omega(omega)
    a, b, c, d = m[:2, :2], m[:2, 2:], m[2:, :2], m[2:, 2:]
    out = (a @ om + b) @ inv2(c @ om + d, tol)
    if isinstance(omega, HatPoint):
        return HatPoint.from_matrix(out, Tolerance(tol.abs_tol, max(tol.rel_tol, 1e-8)))
    return out


# -- bounded model ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiskPoint:
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", as_matrix(self.w, (2, 2)))


def in_disk(w, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``w`` symmetric with ``I - w conj(w)`` positive definite."""
    w = w.w if isinstance(w, DiskPoint) else as_matrix(w, (2, 2))
    if not tol.close(w, w.T):
        return False
    m = I2 - w @ w.conj()
    m = (m + m.conj().T) / 2
    return bool(np.linalg.eigvalsh(m).min() > tol.abs_tol)


def in_hat_disk(w, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Points of D̂₂: ``q w = w q`` on top of the 𝔻₂ conditions."""
    w = w.w if isinstance(w, DiskPoint) else as_matrix(w, (2, 2))
    return in_disk(w, tol) and tol.close(q2 @ w, w @ q2)


def cayley_to_disk(omega, tol: Tolerance = DEFAULT_TOL) -> DiskPoint:
    """Ψ(Ω) = (Ω - i)(Ω + i)^-1."""
    om = _omega(omega)
    return DiskPoint((om - 1j * I2) @ inv2(om + 1j * I2, tol))


def cayley_to_halfspace(w, tol: Tolerance = DEFAULT_TOL):
    """Φ(W) = i(I + W)(I - W)^-1; a HatPoint when the image lies in Ĥ₂."""
    w = w.w if isinstance(w, DiskPoint) else as_matrix(w, (2, 2))
    try:
        inv = inv2(I2 - w, tol)
    except NumericError as exc:
        raise DomainError("I - W is singular (boundary point)") from exc
    om = 1j * (I2 + w) @ inv
    if in_hat_h2(om, Tolerance(tol.abs_tol, 1e-8)):
        return HatPoint.from_matrix(om, Tolerance(tol.abs_tol, 1e-8))
    return om


_T = np.block([[I2, I2], [1j * I2, -1j * I2]]) / np.sqrt(2)
_T_INV = np.linalg.inv(_T)


def conjugate_by_T(m) -> np.ndarray:
    """``T^-1 M T = [[alpha, beta], [conj(beta), conj(alpha)]]`` in closed form."""
    m = as_matrix(m, (4, 4), dtype=float)
    a, b, c, d = m[:2, :2], m[:2, 2:], m[2:, :2], m[2:, 2:]
    alpha = ((a + d) + 1j * (b - c)) / 2
    beta = ((a - d) - 1j * (b + c)) / 2
    return np.block([[alpha, beta], [beta.conj(), alpha.conj()]])


def cayley_matrix() -> np.ndarray:
    return _T.copy()


def in_g_star(h, tol: Tolerance = DEFAULT_TOL) -> bool:
    """The identities ``tα ᾱ - tβ̄ β = I`` and ``tα β̄ = tβ̄ α`` plus the block shape."""
    h = as_matrix(h, (4, 4))
    alpha, beta = h[:2, :2], h[:2, 2:]
    return (
        tol.close(h[2:, :2], beta.conj())
        and tol.close(h[2:, 2:], alpha.conj())
        and tol.close(alpha.T @ alpha.conj() - beta.conj().T @ beta, I2)
        and tol.close(alpha.T @ beta.conj(), beta.conj().T @ alpha)
    )


def disk_act(h, w, tol: Tolerance = DEFAULT_TOL) -> DiskPoint:
    """``(αW + β)(β̄W + ᾱ)^-1``."""
    h = as_matrix(h, (4, 4))
    w = w.w if isinstance(w, DiskPoint) else as_matrix(w, (2, 2))
    alpha, beta = h[:2, :2], h[:2, 2:]
    try:
        den = inv2(beta.conj() @ w + alpha.conj(), tol)
    except NumericError as exc:
        raise NumericError("singular denominator: input outside the domain") from exc
    return DiskPoint((alpha @ w + beta) @ den)


def harish_chandra_point(h, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``β ᾱ^-1``, the image of the origin."""
    h = as_matrix(h, (4, 4))
    return h[:2, 2:] @ inv2(h[:2, :2].conj(), tol)


def random_hat_point(rng: np.random.Generator, im_range=(0.2, 4.0), re_scale=2.0) -> HatPoint:
    """Random point of Ĥ₂ with ``Im tau`` in ``im_range`` and ``|Im z| < 0.9 Im tau``."""
    y = rng.uniform(*im_range)
    v = rng.uniform(-0.9, 0.9) * y
    return HatPoint.from_real(rng.uniform(-re_scale, re_scale), y, rng.uniform(-re_scale, re_scale), v)
