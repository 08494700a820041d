"""Invariant metric, distance, geodesics, volume and Laplacian on Ĥ₂.

In the coordinates ``w1 = tau + z`` and ``w2 = tau - z`` the metric
splits as the sum of two Poincaré metrics ``|dw|²/(Im w)²``, which is
what every closed form below rests on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .halfspace import HatPoint
from .numeric import DomainError


@dataclass(frozen=True)
class MetricAtPoint:
    """Coefficients of ds² in the real coordinates (x, y, u, v)."""

    g_xx: float
    g_yy: float
    g_uu: float
    g_vv: float
    g_xu: float
    g_yv: float

    def tensor(self) -> np.ndarray:
        """Symmetric 4x4 matrix, ordered (x, y, u, v)."""
        a, b = self.g_xx, self.g_xu
        return np.array([
            [a, 0, b, 0],
            [0, a, 0, b],
            [b, 0, a, 0],
            [0, b, 0, a],
        ])


def metric_at(pt: HatPoint) -> MetricAtPoint:
    y, v = pt.y, pt.v
    den = (y * y - v * v) ** 2
    a = 2 * (y * y + v * v) / den
    b = -4 * y * v / den
    return MetricAtPoint(a, a, a, a, b, b)


def hyperbolic_distance(w1: complex, w2: complex) -> float:
    """Poincaré distance in the upper half plane, in a cancellation-free form."""
    return 2 * math.asinh(abs(w1 - w2) / (2 * math.sqrt(w1.imag * w2.imag)))


@dataclass(frozen=True)
class DistanceBreakdown:
    A: float
    B: float
    lam: float
    mu: float
    rho: float
    log_lam: float
    log_mu: float


def _ratio(p: complex, q: complex) -> float:
    return (p.imag**2 + q.imag**2 + (p.real - q.real) ** 2) / (p.imag * q.imag)


def distance(p1: HatPoint, p2: HatPoint) -> DistanceBreakdown:
    """Closed-form distance with its intermediate quantities A, B, λ, μ.

    ``log λ`` and ``log μ`` are taken from the asinh form of the
    hyperbolic distance rather than from ``log((A + sqrt(A²-4))/2)``;
    the two agree, the former keeps full precision near A = 2.
    """
    A = _ratio(p1.plus, p2.plus)
    B = _ratio(p1.minus, p2.minus)
    log_lam = hyperbolic_distance(p1.plus, p2.plus)
    log_mu = hyperbolic_distance(p1.minus, p2.minus)
    return DistanceBreakdown(A, B, math.exp(log_lam), math.exp(log_mu),
                             math.hypot(log_lam, log_mu), log_lam, log_mu)


def _geodesic_factor(start: complex, end: complex, log_l: float, t: float) -> complex:
    """Point at fraction ``t`` of the hyperbolic geodesic from ``start`` to ``end``.

    This is ``x + y R`` with R the closed form in which
    ``(λ^{2t} - 1) c(λ)`` is written as ``expm1(2t log λ) / expm1(2 log λ)``;
    for a stationary factor (λ = 1) it is ``start`` itself.
    """
    if log_l == 0.0:
        return start
    x, y = start.real, start.imag
    u, v = end.real, end.imag
    lam = math.exp(log_l)
    k = math.expm1(2 * t * log_l) / math.expm1(2 * log_l)
    r = (lam * (u - x) * k + 1j * v * math.exp(t * log_l)) / ((lam * y - v) * k + v)
    return x + y * r


def geodesic_point(p1: HatPoint, p2: HatPoint, s: float, tol: float = 1e-12) -> HatPoint:
    """γ(s) on the geodesic from ``p1`` to ``p2`` parametrised by arc length."""
    d = distance(p1, p2)
    s0 = d.rho
    if s0 == 0.0:
        raise DomainError("geodesic needs two distinct points")
    if not (-tol <= s <= s0 * (1 + tol) + tol):
        raise DomainError(f"s={s} outside [0, {s0}]")
    if s <= 0:
        return p1
    t = min(s / s0, 1.0)
    w1 = _geodesic_factor(p1.plus, p2.plus, d.log_lam, t)
    w2 = _geodesic_factor(p1.minus, p2.minus, d.log_mu, t)
    return HatPoint((w1 + w2) / 2, (w1 - w2) / 2)


def geodesic_samples(p1: HatPoint, p2: HatPoint, n: int) -> list[HatPoint]:
    s0 = distance(p1, p2).rho
    return [geodesic_point(p1, p2, s0 * k / (n - 1)) for k in range(n)]


def curve_length(curve: Callable[[float], HatPoint], a: float, b: float,
                 panels: int = 10_000, h: float = 1e-6) -> float:
    """Length of a curve by composite Simpson over ``sqrt(g(γ', γ'))``.

    The tangent is a central finite difference of ``curve`` (one-sided at the ends).
    """
    if panels % 2:
        panels += 1

    def coords(p: HatPoint):
        return np.array([p.x, p.y, p.u, p.v])

    def speed(s):
        lo, hi = max(a, s - h), min(b, s + h)
        tangent = (coords(curve(hi)) - coords(curve(lo))) / (hi - lo)
        g = metric_at(curve(s)).tensor()
        return math.sqrt(max(tangent @ g @ tangent, 0.0))

    ss = np.linspace(a, b, panels + 1)
    vals = np.array([speed(s) for s in ss])
    w = np.ones(panels + 1)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return float((b - a) / (3 * panels) * (w @ vals))


def geodesic_arc_length(p1: HatPoint, p2: HatPoint, panels: int = 10_000) -> float:
    s0 = distance(p1, p2).rho
    return curve_length(lambda s: geodesic_point(p1, p2, s), 0.0, s0, panels)


def volume_density(pt: HatPoint) -> float:
    """Invariant volume density ``4 / ((y+v)²(y-v)²)`` w.r.t. dx dy du dv."""
    y, v = pt.y, pt.v
    if y - abs(v) <= 0:
        raise DomainError("point outside Ĥ₂")
    return 4.0 / ((y + v) ** 2 * (y - v) ** 2)


def real_jacobian(f: Callable[[HatPoint], HatPoint], pt: HatPoint, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of a self-map of Ĥ₂ in (x, y, u, v)."""
    base = np.array([pt.x, pt.y, pt.u, pt.v])
    jac = np.empty((4, 4))
    for k in range(4):
        step = np.zeros(4)
        step[k] = h
        hi = f(HatPoint.from_real(*(base + step)))
        lo = f(HatPoint.from_real(*(base - step)))
        jac[:, k] = (np.array([hi.x, hi.y, hi.u, hi.v]) - np.array([lo.x, lo.y, lo.u, lo.v])) / (2 * h)
    return jac


def volume_change_residual(f: Callable[[HatPoint], HatPoint], pt: HatPoint, h: float = 1e-5) -> float:
    """Relative residual of ``density(f(p)) |det Df(p)| = density(p)``."""
    lhs = volume_density(f(pt)) * abs(np.linalg.det(real_jacobian(f, pt, h)))
    rhs = volume_density(pt)
    return abs(lhs - rhs) / rhs


# -- Laplacian -------------------------------------------------------------------

def _second_derivatives(f, pt: HatPoint, h: float) -> dict[str, float]:
    base = np.array([pt.x, pt.y, pt.u, pt.v])

    def at(*offsets):
        step = np.zeros(4)
        for idx, sgn in offsets:
            step[idx] += sgn * h
        return f(HatPoint.from_real(*(base + step)))

    f0 = at()
    d = {}
    for name, k in (("xx", 0), ("yy", 1), ("uu", 2), ("vv", 3)):
        d[name] = (at((k, 1)) - 2 * f0 + at((k, -1))) / h**2
    for name, i, j in (("xu", 0, 2), ("yv", 1, 3)):
        d[name] = (at((i, 1), (j, 1)) - at((i, 1), (j, -1)) - at((i, -1), (j, 1))
                   + at((i, -1), (j, -1))) / (4 * h * h)
    return d


def _split_second_derivatives(f, pt: HatPoint, h: float) -> float:
    """``sum_k (Im w_k)² (∂²/∂X_k² + ∂²/∂Y_k²) f`` by central differences.

    A step ``s`` in ``w1`` (resp. ``w2``) moves ``(tau, z)`` by ``(s/2, s/2)``
    (resp. ``(s/2, -s/2)``); the step is ``h Im w_k``, which keeps every
    stencil point inside Ĥ₂ and makes the truncation error scale-free.
    """
    f0 = f(pt)
    total = 0.0
    for sign, im_w in ((1, pt.plus.imag), (-1, pt.minus.imag)):
        for direction in (1.0, 1j):
            s = h * im_w * direction / 2
            hi = f(HatPoint(pt.tau + s, pt.z + sign * s))
            lo = f(HatPoint(pt.tau - s, pt.z - sign * s))
            total += (hi - 2 * f0 + lo) / h**2
    return total


def laplacian_apply(f: Callable[[HatPoint], float], pt: HatPoint, h: float = 1e-4,
                    form: str = "beltrami") -> float:
    """Apply the Laplacian of ds² to ``f`` at ``pt`` by central differences.

    ``form="beltrami"`` (default) is the Laplace-Beltrami operator of ds²,
    ``(y²+v²)/2 (∂x²+∂y²+∂u²+∂v²) + 2yv (∂x∂u + ∂y∂v)``, which commutes
    with the Ĝ action. It equals the sum of the hyperbolic Laplacians in
    ``w1 = tau + z`` and ``w2 = tau - z`` and is evaluated in that form, with
    ``h`` a relative step (the step in ``w_k`` is ``h Im w_k``). Expanding in
    (x, y, u, v) instead cancels two large terms near the boundary.

    ``form="printed"`` evaluates the expanded operator
    ``(y²+v²)(∂x²+∂y²) + (y²+v²)/4 (∂u²+∂v²) + yv(∂x∂u + ∂y∂v)`` with the
    absolute step ``h``; it does not commute with the action and is kept for
    comparison only.
    """
    if not 0 < h <= 0.1:
        raise DomainError("step must lie in (0, 0.1]")
    if form == "beltrami":
        return _split_second_derivatives(f, pt, h)
    if form == "printed":
        d = _second_derivatives(f, pt, h)
        y, v = pt.y, pt.v
        s = y * y + v * v
        return s * (d["xx"] + d["yy"]) + s / 4 * (d["uu"] + d["vv"]) + y * v * (d["xu"] + d["yv"])
    raise DomainError(f"unknown form {form!r}")


def laplacian_equivariance_residual(m_act: Callable[[HatPoint], HatPoint], f: Callable[[HatPoint], float],
                                    pt: HatPoint, h: float = 1e-4, form: str = "beltrami") -> float:
    """``|Δ(f∘M)(p) - (Δf)(M p)| / max(1, |(Δf)(M p)|)``."""
    lhs = laplacian_apply(lambda p: f(m_act(p)), pt, h, form)
    rhs = laplacian_apply(f, m_act(pt), h, form)
    return abs(lhs - rhs) / max(1.0, abs(rhs))
