"""Points of the real projective line and elements of PSL(2,R).

Everything is done in homogeneous coordinates, so the point at infinity is
just ``[1:0]`` and no arithmetic path special-cases it.  A finite real ``t``
is the point ``[t:1]``.  The positive orientation of RP^1 is the one in which
``t -> [t:1]`` is increasing, so ``(0, 1, inf)`` is positively ordered.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateTriple, DegenerateTuple, NotHyperbolic, OrientationMismatch, ValidationError

# Tolerance used to decide that two points of RP^1 coincide.  With unit
# representatives |det| is the sine of the angle between the two lines.
POINT_TOL = 1e-12
CLASSIFY_TOL = 1e-9

_ULP_SLACK = 4 * 2.0**-52


def _normalize_pair(a: float, b: float) -> tuple[float, float]:
    n = math.hypot(a, b)
    if n == 0.0 or not math.isfinite(n):
        raise ValidationError(f"invalid homogeneous coordinates ({a}, {b})")
    if abs(n - 1.0) > _ULP_SLACK:
        a, b = a / n, b / n
    if b < 0.0 or (b == 0.0 and a < 0.0):
        a, b = -a, -b
    # get rid of negative zeros so equal points compare bitwise equal
    return a + 0.0, b + 0.0


@dataclass(frozen=True)
class ProjectivePoint:
    """The point ``[a:b]`` of RP^1, stored in canonical normalization."""

    a: float
    b: float

    def __post_init__(self) -> None:
        a, b = _normalize_pair(float(self.a), float(self.b))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_real(cls, t: float) -> "ProjectivePoint":
        if math.isinf(t):
            return INF
        return cls(t, 1.0)

    @classmethod
    def parse(cls, token: str | float | Sequence[float]) -> "ProjectivePoint":
        """Accept a float, the token ``inf`` or an ``[a, b]`` pair."""
        if isinstance(token, ProjectivePoint):
            return token
        if isinstance(token, (list, tuple)):
            return cls(float(token[0]), float(token[1]))
        if isinstance(token, str) and token.strip().lower() in ("inf", "+inf", "infinity", "oo"):
            return INF
        return cls.from_real(float(token))

    def to_real(self) -> float:
        """Value in the standard chart; ``inf`` for the point at infinity."""
        if self.b == 0.0:
            return math.inf
        return self.a / self.b

    def is_inf(self, tol: float = POINT_TOL) -> bool:
        return abs(self.b) <= tol

    def close_to(self, other: "ProjectivePoint", tol: float = POINT_TOL) -> bool:
        return abs(det(self, other)) <= tol

    def as_list(self) -> list[float]:
        return [self.a, self.b]

    def __str__(self) -> str:
        return "inf" if self.b == 0.0 else repr(self.a / self.b)


INF = ProjectivePoint(1.0, 0.0)
ZERO = ProjectivePoint(0.0, 1.0)
ONE = ProjectivePoint(1.0, 1.0)


def point(t: float | str) -> ProjectivePoint:
    """Shorthand: a real number or ``'inf'`` as a projective point."""
    return ProjectivePoint.parse(t)


def det(p: ProjectivePoint, q: ProjectivePoint) -> float:
    return p.a * q.b - p.b * q.a


@dataclass(frozen=True)
class MoebiusMap:
    """A determinant-one real matrix up to sign, acting by homographies."""

    m11: float
    m12: float
    m21: float
    m22: float

    def __post_init__(self) -> None:
        m = [float(self.m11), float(self.m12), float(self.m21), float(self.m22)]
        d = m[0] * m[3] - m[1] * m[2]
        if not d > 0.0 or not math.isfinite(d):
            raise ValidationError(f"matrix with determinant {d} is not in PSL(2,R)")
        if abs(d - 1.0) > _ULP_SLACK:
            s = math.sqrt(d)
            m = [v / s for v in m]
        for v in m:
            if v != 0.0:
                if v < 0.0:
                    m = [-w for w in m]
                break
        m = [v + 0.0 for v in m]
        for name, v in zip(("m11", "m12", "m21", "m22"), m):
            object.__setattr__(self, name, v)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "MoebiusMap":
        return cls(rows[0][0], rows[0][1], rows[1][0], rows[1][1])

    def rows(self) -> list[list[float]]:
        return [[self.m11, self.m12], [self.m21, self.m22]]

    @property
    def trace(self) -> float:
        return self.m11 + self.m22

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.m22, -self.m12, -self.m21, self.m11)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return compose(self, other)

    def __call__(self, p: ProjectivePoint) -> ProjectivePoint:
        return apply(self, p)

    def real(self, t: float) -> float:
        """Evaluate on a finite real in the standard chart (may return inf)."""
        num = self.m11 * t + self.m12
        den = self.m21 * t + self.m22
        if den == 0.0:
            return math.inf
        return num / den

    def close_to(self, other: "MoebiusMap", tol: float = 1e-9) -> bool:
        a = (self.m11, self.m12, self.m21, self.m22)
        b = (other.m11, other.m12, other.m21, other.m22)
        return max(abs(x - y) for x, y in zip(a, b)) <= tol or max(abs(x + y) for x, y in zip(a, b)) <= tol


IDENTITY = MoebiusMap(1.0, 0.0, 0.0, 1.0)


def apply(m: MoebiusMap, p: ProjectivePoint) -> ProjectivePoint:
    return ProjectivePoint(m.m11 * p.a + m.m12 * p.b, m.m21 * p.a + m.m22 * p.b)


def compose(m: MoebiusMap, n: MoebiusMap) -> MoebiusMap:
    """The map ``p -> m(n(p))``."""
    return MoebiusMap(
        m.m11 * n.m11 + m.m12 * n.m21,
        m.m11 * n.m12 + m.m12 * n.m22,
        m.m21 * n.m11 + m.m22 * n.m21,
        m.m21 * n.m12 + m.m22 * n.m22,
    )


def compose_all(maps: Iterable[MoebiusMap]) -> MoebiusMap:
    """Left-to-right product: ``compose_all([a, b, c]) = a b c``."""
    out = IDENTITY
    for m in maps:
        out = compose(out, m)
    return out


def inverse(m: MoebiusMap) -> MoebiusMap:
    return m.inverse()


def _standard_map(p1: ProjectivePoint, p2: ProjectivePoint, p3: ProjectivePoint) -> tuple[list[float], float]:
    # Rows r1, r2 with r1.v = det(p2,p3) det(v,p1) and r2.v = det(p2,p1) det(v,p3):
    # p1 -> 0, p3 -> inf and p2 -> 1.  The determinant of this matrix is
    # det(p2,p3) det(p2,p1) det(p1,p3), positive exactly for positive triples.
    for u, v in ((p1, p2), (p2, p3), (p1, p3)):
        if abs(det(u, v)) <= POINT_TOL:
            raise DegenerateTriple(f"points {u} and {v} coincide")
    lam = det(p2, p3)
    mu = det(p2, p1)
    mat = [lam * p1.b, -lam * p1.a, mu * p3.b, -mu * p3.a]
    return mat, mat[0] * mat[3] - mat[1] * mat[2]


def from_triples(
    p1: ProjectivePoint, p2: ProjectivePoint, p3: ProjectivePoint,
    q1: ProjectivePoint, q2: ProjectivePoint, q3: ProjectivePoint,
) -> MoebiusMap:
    """The element of PSL(2,R) sending ``p1, p2, p3`` to ``q1, q2, q3``.

    Built as the composition of the standard map of the first triple onto
    ``(0, 1, inf)`` with the inverse of the standard map of the second.
    Triples of opposite cyclic order are related only by an orientation
    reversing map, which is not in PSL(2,R); that raises
    ``OrientationMismatch``.
    """
    s, ds = _standard_map(p1, p2, p3)
    t, dt = _standard_map(q1, q2, q3)
    if (ds > 0) != (dt > 0):
        raise OrientationMismatch("triples have opposite cyclic orders")
    # t^{-1} s, both taken up to scale
    ti = [t[3], -t[1], -t[2], t[0]]
    prod = [
        ti[0] * s[0] + ti[1] * s[2],
        ti[0] * s[1] + ti[1] * s[3],
        ti[2] * s[0] + ti[3] * s[2],
        ti[2] * s[1] + ti[3] * s[3],
    ]
    d = prod[0] * prod[3] - prod[1] * prod[2]
    if d < 0:
        prod = [-v for v in prod]
        d = -d
        # scaling by -1 does not change the sign of a 2x2 determinant
    if d <= 0:
        raise DegenerateTriple("degenerate triple")
    return MoebiusMap(*prod)


def trace_abs(m: MoebiusMap) -> float:
    return abs(m.m11 + m.m22)


def trace_commutator(m: MoebiusMap, n: MoebiusMap) -> float:
    """Signed trace of ``m n m^-1 n^-1``; independent of the lifts to SL(2,R)."""
    c = compose_all([m, n, m.inverse(), n.inverse()])
    return c.trace


@dataclass(frozen=True)
class MapClass:
    tag: str
    translation_parameter: float | None = None


def is_identity(m: MoebiusMap, tol: float = CLASSIFY_TOL) -> bool:
    return m.close_to(IDENTITY, tol)


def classify(m: MoebiusMap, tol: float = CLASSIFY_TOL) -> MapClass:
    if is_identity(m, tol):
        return MapClass("identity")
    t = trace_abs(m)
    if t > 2.0 + tol:
        return MapClass("hyperbolic", math.acosh(t / 2.0))
    if abs(t - 2.0) <= tol:
        return MapClass("parabolic")
    return MapClass("elliptic")


def _positive_lift(m: MoebiusMap) -> tuple[float, float, float, float]:
    if m.trace < 0:
        return -m.m11, -m.m12, -m.m21, -m.m22
    return m.m11, m.m12, m.m21, m.m22


def _eigen(m: MoebiusMap) -> tuple[tuple[float, float, float, float], float, float]:
    if classify(m).tag != "hyperbolic":
        raise NotHyperbolic(f"|trace| = {trace_abs(m)} is not > 2")
    a, b, c, d = _positive_lift(m)
    tr = a + d
    disc = math.sqrt(tr * tr - 4.0)
    lam_big = (tr + disc) / 2.0
    lam_small = 1.0 / lam_big
    return (a, b, c, d), lam_big, lam_small


def hyperbolic_power(m: MoebiusMap, t: float) -> MoebiusMap:
    """``m^t`` along the one-parameter subgroup through ``m``.

    Uses the spectral projectors of the positive-trace lift:
    ``f(M) = f(l1) (M - l2) / (l1 - l2) + f(l2) (M - l1) / (l2 - l1)``.
    """
    (a, b, c, d), l1, l2 = _eigen(m)
    f1, f2 = l1**t, l2**t
    k = l1 - l2
    u = (f1 - f2) / k
    v = (l1 * f2 - l2 * f1) / k
    return MoebiusMap(u * a + v, u * b, u * c, u * d + v)


def _eigvec(a: float, b: float, c: float, d: float, lam: float) -> ProjectivePoint:
    v1 = (b, lam - a)
    v2 = (lam - d, c)
    if math.hypot(*v1) >= math.hypot(*v2):
        return ProjectivePoint(*v1)
    return ProjectivePoint(*v2)


def fixed_points(m: MoebiusMap) -> tuple[ProjectivePoint, ProjectivePoint]:
    """(attracting, repelling) fixed points of a hyperbolic map."""
    (a, b, c, d), l1, l2 = _eigen(m)
    return _eigvec(a, b, c, d, l1), _eigvec(a, b, c, d, l2)


def log_derivative_at_fixed_point(m: MoebiusMap, p: ProjectivePoint) -> float:
    """log of the derivative of ``m`` at its fixed point ``p`` (chart free)."""
    a, b, c, d = _positive_lift(m)
    # eigenvalue of p: m (p.a, p.b) = lam (p.a, p.b)
    img = (a * p.a + b * p.b, c * p.a + d * p.b)
    lam = img[0] * p.a + img[1] * p.b  # unit representative
    # derivative at a fixed point equals det / lam^2 = 1 / lam^2
    return -2.0 * math.log(abs(lam))


def cyclic_order(p: ProjectivePoint, q: ProjectivePoint, r: ProjectivePoint, tol: float = POINT_TOL) -> str:
    d1, d2, d3 = det(p, q), det(q, r), det(r, p)
    if min(abs(d1), abs(d2), abs(d3)) <= tol:
        return "degenerate"
    # (0, 1, inf) gives (-1)(-1)(1) = 1
    return "positive" if d1 * d2 * d3 > 0 else "negative"


def cross_ratio(p: ProjectivePoint, q: ProjectivePoint, r: ProjectivePoint, s: ProjectivePoint) -> float:
    """Invariant with ``cross_ratio(0, 1, inf, t) = t``.

    It is the image of ``s`` under the map sending ``p, q, r`` to ``0, 1, inf``.
    """
    pts = (p, q, r, s)
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(det(pts[i], pts[j])) <= POINT_TOL:
                raise DegenerateTuple("cross ratio needs four distinct points")
    return det(q, r) * det(s, p) / (det(q, p) * det(s, r))


def rotation_matrix(r: float) -> MoebiusMap:
    return MoebiusMap(math.cos(r), -math.sin(r), math.sin(r), math.cos(r))


def chart_sending_to_infinity(z: ProjectivePoint) -> MoebiusMap:
    """A rotation of RP^1 sending ``z`` to infinity."""
    return MoebiusMap(-z.a, -z.b, z.b, -z.a)


def angle_coordinate(p: ProjectivePoint) -> float:
    """Position of ``p`` on the circle RP^1 as a number in [0, 1).

    Increases with the positive orientation; 0 corresponds to infinity.
    """
    # phi in (0, pi] for b > 0 decreases as t increases; map to increasing.
    phi = math.atan2(p.b, p.a)  # in [0, pi)
    u = (math.pi - phi) / math.pi
    return u % 1.0
