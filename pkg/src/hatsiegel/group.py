"""The group Ĝ = {M in Sp(4,R) : MQ = ±QM}, its SL(2,R)² splitting and Lie algebra."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .halfspace import HatPoint
from .numeric import DEFAULT_TOL, DomainError, Tolerance, as_matrix, is_symplectic

# Rows 2 and 4 negated: maps the + pattern of Ĝ onto the - pattern.
FLIP = np.diag([1.0, -1.0, 1.0, -1.0])


def _pattern(m: np.ndarray, eps: int) -> np.ndarray:
    """The Ĝ block pattern with the free entries read from rows 1 and 3 of ``m``."""
    a1, a2, b1, b2 = m[0]
    c1, c2, d1, d2 = m[2]
    return np.array([
        [a1, a2, b1, b2],
        [eps * a2, eps * a1, eps * b2, eps * b1],
        [c1, c2, d1, d2],
        [eps * c2, eps * c1, eps * d2, eps * d1],
    ])


def in_g_hat(m, tol: Tolerance = DEFAULT_TOL) -> int | None:
    """Return the sign ε when ``m`` is in Ĝ, else ``None``."""
    try:
        m = as_matrix(m, (4, 4), dtype=float)
    except DomainError:
        return None
    if not is_symplectic(m, tol):
        return None
    for eps in (1, -1):
        if tol.close(m, _pattern(m, eps)):
            return eps
    return None


@dataclass(frozen=True, eq=False)
class GHatElement:
    matrix: np.ndarray
    epsilon: int

    def __post_init__(self):
        m = as_matrix(self.matrix, (4, 4), dtype=float)
        object.__setattr__(self, "matrix", m)
        eps = in_g_hat(m, Tolerance(1e-9, 1e-9))
        if eps is None:
            raise DomainError("matrix is not an element of Ĝ")
        if self.epsilon != eps:
            raise DomainError(f"stored epsilon {self.epsilon} contradicts pattern sign {eps}")

    @classmethod
    def from_matrix(cls, m, tol: Tolerance = DEFAULT_TOL) -> GHatElement:
        eps = in_g_hat(m, tol)
        if eps is None:
            raise DomainError("matrix is not an element of Ĝ")
        return cls(np.asarray(m, dtype=float), eps)

    a1 = property(lambda s: s.matrix[0, 0])
    a2 = property(lambda s: s.matrix[0, 1])
    b1 = property(lambda s: s.matrix[0, 2])
    b2 = property(lambda s: s.matrix[0, 3])
    c1 = property(lambda s: s.matrix[2, 0])
    c2 = property(lambda s: s.matrix[2, 1])
    d1 = property(lambda s: s.matrix[2, 2])
    d2 = property(lambda s: s.matrix[2, 3])

    def scalar_relations(self) -> tuple[float, float]:
        """The two quadratic relations; (1, 0) for every element of Ĝ."""
        a1, a2, b1, b2, c1, c2, d1, d2 = (
            self.a1, self.a2, self.b1, self.b2, self.c1, self.c2, self.d1, self.d2)
        return (a1 * d1 + a2 * d2 - b1 * c1 - b2 * c2,
                a1 * d2 + a2 * d1 - b2 * c1 - b1 * c2)

    def __matmul__(self, other: GHatElement) -> GHatElement:
        return GHatElement.from_matrix(self.matrix @ other.matrix, Tolerance(1e-9, 1e-9))

    def act(self, pt: HatPoint) -> HatPoint:
        from .halfspace import symplectic_act
        return symplectic_act(self.matrix, pt, check=False)


@dataclass(frozen=True, eq=False)
class Sl2Pair:
    m1: np.ndarray
    m2: np.ndarray

    def __post_init__(self):
        for name in ("m1", "m2"):
            m = as_matrix(getattr(self, name), (2, 2), dtype=float)
            if abs(np.linalg.det(m) - 1) > 1e-9:
                raise DomainError(f"{name} does not have determinant 1")
            object.__setattr__(self, name, m)

    def __matmul__(self, other: Sl2Pair) -> Sl2Pair:
        return Sl2Pair(self.m1 @ other.m1, self.m2 @ other.m2)


def _split(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a1, a2, b1, b2 = m[0]
    c1, c2, d1, d2 = m[2]
    m1 = np.array([[a1 + a2, b1 + b2], [c1 + c2, d1 + d2]])
    m2 = np.array([[a1 - a2, b1 - b2], [c1 - c2, d1 - d2]])
    return m1, m2


def decompose_sl2_pair(m: GHatElement) -> Sl2Pair:
    """Split an element of Ĝ₊ into its two SL(2,R) factors."""
    if m.epsilon != 1:
        raise DomainError("splitting is defined on Ĝ₊ only; multiply by FLIP first")
    return Sl2Pair(*_split(m.matrix))


def compose_sl2_pair(p: Sl2Pair) -> GHatElement:
    s = (p.m1 + p.m2) / 2
    d = (p.m1 - p.m2) / 2
    (a1, b1), (c1, d1) = s
    (a2, b2), (c2, d2) = d
    m = np.array([
        [a1, a2, b1, b2],
        [a2, a1, b2, b1],
        [c1, c2, d1, d2],
        [c2, c1, d2, d1],
    ])
    return GHatElement(m, 1)


def mobius(m: np.ndarray, w: complex) -> complex:
    return (m[0, 0] * w + m[0, 1]) / (m[1, 0] * w + m[1, 1])


def act_via_split(p: Sl2Pair, pt: HatPoint, epsilon: int = 1) -> HatPoint:
    """Act through the two Möbius factors on ``tau + z`` and ``tau - z``.

    With ``epsilon = -1`` this is the action of ``FLIP @ compose_sl2_pair(p)``.
    """
    if epsilon not in (1, -1):
        raise DomainError("epsilon must be +1 or -1")
    w1 = mobius(p.m1, pt.plus)
    w2 = mobius(p.m2, pt.minus)
    return HatPoint((w1 + w2) / 2, epsilon * (w1 - w2) / 2)


# -- Lie algebra -------------------------------------------------------------

def _sym_pattern(p: float, q: float) -> np.ndarray:
    return np.array([[p, q], [q, p]])


@dataclass(frozen=True, eq=False)
class LieHatElement:
    """Element ``[[X, Y], [Z, -X^t]]`` of ĝ with X, Y, Z of the form [[p, q], [q, p]]."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    @classmethod
    def from_coords(cls, a1, a2, b1, b2, c1, c2) -> LieHatElement:
        return cls(_sym_pattern(a1, a2), _sym_pattern(b1, b2), _sym_pattern(c1, c2))

    @classmethod
    def from_matrix(cls, m, tol: Tolerance = DEFAULT_TOL) -> LieHatElement:
        if not in_lie_hat(m, tol):
            raise DomainError("matrix is not in ĝ")
        m = np.asarray(m, dtype=float)
        return cls(m[:2, :2], m[:2, 2:], m[2:, :2])

    def matrix(self) -> np.ndarray:
        return np.block([[self.x, self.y], [self.z, -self.x.T]])

    def coords(self) -> np.ndarray:
        """``(a1, a2, b1, b2, c1, c2)``."""
        return np.array([self.x[0, 0], self.x[0, 1], self.y[0, 0], self.y[0, 1],
                         self.z[0, 0], self.z[0, 1]])


def _in_A(b: np.ndarray, tol: Tolerance) -> bool:
    return tol.close(b, _sym_pattern(b[0, 0], b[0, 1]))


def in_lie_hat(x, tol: Tolerance = DEFAULT_TOL) -> bool:
    try:
        x = as_matrix(x, (4, 4), dtype=float)
    except DomainError:
        return False
    X, Y, Z, W = x[:2, :2], x[:2, 2:], x[2:, :2], x[2:, 2:]
    return _in_A(X, tol) and _in_A(Y, tol) and _in_A(Z, tol) and tol.close(W, -X.T)


def canonical_basis() -> list[LieHatElement]:
    return [LieHatElement.from_coords(*row) for row in np.eye(6)]


def bracket(x: LieHatElement, y: LieHatElement) -> LieHatElement:
    a, b = x.matrix(), y.matrix()
    return LieHatElement.from_matrix(a @ b - b @ a, Tolerance(1e-9, 1e-9))


def ad_matrices(basis: list[LieHatElement]) -> list[np.ndarray]:
    """Matrices of ad(b_k) in the given basis (columns are coordinate vectors)."""
    coords = np.array([b.coords() for b in basis]).T
    if np.linalg.matrix_rank(coords) < 6:
        raise DomainError("basis does not span ĝ")
    coords_inv = np.linalg.inv(coords)
    return [coords_inv @ np.array([bracket(b, c).coords() for c in basis]).T for b in basis]


def killing_gram(basis: list[LieHatElement]) -> np.ndarray:
    """Gram matrix of ``B(X, Y) = Tr(ad X ad Y)`` computed by brute force."""
    if len(basis) != 6:
        raise DomainError("ĝ is six-dimensional; need exactly 6 basis elements")
    ads = ad_matrices(basis)
    return np.array([[np.trace(p @ q) for q in ads] for p in ads])


def killing_form(x: LieHatElement, y: LieHatElement) -> float:
    """B(x, y) evaluated through the canonical-basis Gram matrix."""
    g = killing_gram(canonical_basis())
    return float(x.coords() @ g @ y.coords())


def exact_rank(m) -> int:
    """Rank by fraction-exact pivoted elimination (entries rounded to rationals)."""
    rows = [[Fraction(v).limit_denominator(10**12) for v in row] for row in np.asarray(m).tolist()]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def pattern_bilinear(x: LieHatElement, y: LieHatElement) -> float:
    """``2(2 a1 p1 + 2 a2 p2 + b1 r1 + b2 r2 + c1 q1 + c2 q2)``, i.e. Tr(XY)."""
    a1, a2, b1, b2, c1, c2 = x.coords()
    p1, p2, q1, q2, r1, r2 = y.coords()
    return 2 * (2 * a1 * p1 + 2 * a2 * p2 + b1 * r1 + b2 * r2 + c1 * q1 + c2 * q2)


@dataclass
class KillingReport:
    gram: np.ndarray
    rank: int
    constant: float
    fit_residual: float
    symmetric_residual: float

    @property
    def degenerate(self) -> bool:
        return self.rank < 6


def killing_report(basis: list[LieHatElement] | None = None) -> KillingReport:
    """Gram matrix, rank and least-squares fit ``B = c * pattern`` in one place."""
    basis = canonical_basis() if basis is None else basis
    g = killing_gram(basis)
    pat = np.array([[pattern_bilinear(x, y) for y in basis] for x in basis])
    c = float(np.sum(g * pat) / np.sum(pat * pat))
    rank = exact_rank(g) if basis_is_canonical(basis) else int(np.linalg.matrix_rank(g, tol=1e-8))
    return KillingReport(g, rank, c, float(np.abs(g - c * pat).max()), float(np.abs(g - g.T).max()))


def basis_is_canonical(basis: list[LieHatElement]) -> bool:
    return all(np.array_equal(b.coords(), e) for b, e in zip(basis, np.eye(6)))


# -- stabilizer and sampling ---------------------------------------------------

def in_stabilizer(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Membership in K̂, the stabilizer of iI₂."""
    m = m.matrix if isinstance(m, GHatElement) else as_matrix(m, (4, 4), dtype=float)
    eps = in_g_hat(m, tol)
    if eps is None:
        return False
    A, B, C, D = m[:2, :2], m[:2, 2:], m[2:, :2], m[2:, 2:]
    if not (tol.close(D, A) and tol.close(C, -B)):
        return False
    a1, a2, b1, b2 = m[0]
    return tol.close(a1**2 + a2**2 + b1**2 + b2**2, 1) and abs(a1 * a2 + b1 * b2) <= tol.abs_tol


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def random_sl2(rng: np.random.Generator) -> np.ndarray:
    """Rotation · diagonal · shear with angle uniform, log-scale and shear in [-1, 1]."""
    a = np.exp(rng.uniform(-1, 1))
    return rotation(rng.uniform(0, 2 * np.pi)) @ np.diag([a, 1 / a]) @ np.array([[1.0, rng.uniform(-1, 1)], [0.0, 1.0]])


def random_sl2_pair(rng: np.random.Generator) -> Sl2Pair:
    return Sl2Pair(random_sl2(rng), random_sl2(rng))


def sample_g_hat_plus(seed) -> GHatElement:
    """Deterministic element of Ĝ₊ for an integer seed (or a Generator)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return compose_sl2_pair(random_sl2_pair(rng))


def sample_g_hat(rng: np.random.Generator) -> GHatElement:
    """Element of Ĝ₊ or Ĝ₋ with equal probability."""
    g = sample_g_hat_plus(rng)
    if rng.random() < 0.5:
        return GHatElement(FLIP @ g.matrix, -1)
    return g


def sample_lie_hat(rng: np.random.Generator, scale: float = 1.0) -> LieHatElement:
    return LieHatElement.from_coords(*rng.uniform(-scale, scale, 6))


def trivial_kernel() -> list[np.ndarray]:
    """The four matrices ±I₄, ±Q acting trivially on Ĥ₂."""
    from .numeric import I4, Q4
    return [I4, -I4, Q4, -Q4]


def fixed_point_residual(m, probes: list[HatPoint]) -> float:
    """Largest displacement ``|M<Ω> - Ω|`` over the probe points."""
    from .halfspace import symplectic_act
    m = m.matrix if isinstance(m, GHatElement) else m
    return max(float(np.abs(symplectic_act(m, p.matrix(), check=False) - p.matrix()).max()) for p in probes)



def fixed_point_residuals(matrices, probes: list[HatPoint]) -> np.ndarray:
    """Vectorised :func:`fixed_point_residual` for a stack of 4x4 matrices."""
    ms = np.asarray(matrices, dtype=float)
    oms = np.array([p.matrix() for p in probes])
    a, b, c, d = ms[:, None, :2, :2], ms[:, None, :2, 2:], ms[:, None, 2:, :2], ms[:, None, 2:, 2:]
    num = a @ oms[None] + b
    den = c @ oms[None] + d
    # X = num den^-1  <=>  den^t X^t = num^t
    out = np.swapaxes(np.linalg.solve(np.swapaxes(den, -1, -2), np.swapaxes(num, -1, -2)), -1, -2)
    return np.abs(out - oms[None]).max(axis=(1, 2, 3))
