"""The de-Sitter plane as RP^1 x RP^1 minus the diagonal.

The metric in an affine chart is ``dx dy / (x - y)^2``.  Integrating it over a
lightlike rectangle ``[xA, xC] x [yA, yC]`` gives

    area = log( (xC - yC)(xA - yA) / ((xA - yC)(xC - yA)) )

which is a logarithm of a cross-ratio and can therefore be evaluated with
2x2 determinants of homogeneous coordinates, with no chart at all.  The
quadrature oracle in ``area_rectangle_quadrature`` is the independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ChartFailure, DegenerateRectangle, NonPositiveAngle, OutsideDomain, ValidationError
from .moebius import (
    INF,
    POINT_TOL,
    MoebiusMap,
    ProjectivePoint,
    angle_coordinate,
    apply,
    chart_sending_to_infinity,
    cyclic_order,
    det,
    point,
)

DOMAIN_TOL = 1e-12


@dataclass(frozen=True)
class DSPoint:
    x: ProjectivePoint
    y: ProjectivePoint

    def __post_init__(self) -> None:
        if abs(det(self.x, self.y)) <= POINT_TOL:
            raise ValidationError(f"({self.x}, {self.y}) lies on the diagonal")

    @classmethod
    def of(cls, x, y) -> "DSPoint":
        return cls(ProjectivePoint.parse(x), ProjectivePoint.parse(y))

    def moved(self, m: MoebiusMap) -> "DSPoint":
        """Diagonal action."""
        return DSPoint(apply(m, self.x), apply(m, self.y))

    def as_list(self) -> list[float]:
        return [self.x.a, self.x.b, self.y.a, self.y.b]

    @classmethod
    def from_list(cls, v) -> "DSPoint":
        return cls(ProjectivePoint(v[0], v[1]), ProjectivePoint(v[2], v[3]))

    def close_to(self, other: "DSPoint", tol: float = 1e-9) -> bool:
        return self.x.close_to(other.x, tol) and self.y.close_to(other.y, tol)

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


def y_theta(theta: float) -> float:
    if not theta > 0:
        raise NonPositiveAngle(f"theta must be positive, got {theta}")
    return -math.expm1(-theta)


@dataclass(frozen=True)
class LightlikeRectangle:
    """``[xA, xC] x [yA, yC]`` with both sides taken in the positive direction."""

    xA: ProjectivePoint
    xC: ProjectivePoint
    yA: ProjectivePoint
    yC: ProjectivePoint

    def __post_init__(self) -> None:
        if cyclic_order(self.yA, self.yC, self.xA) != "positive" or cyclic_order(self.xA, self.xC, self.yA) != "positive":
            raise DegenerateRectangle("rectangle is degenerate or meets the diagonal")
        # the two arcs must be disjoint: xC must also come before yA
        if cyclic_order(self.xA, self.xC, self.yC) != "positive" or cyclic_order(self.yA, self.yC, self.xC) != "positive":
            raise DegenerateRectangle("rectangle meets the diagonal")

    @classmethod
    def of(cls, xA, xC, yA, yC) -> "LightlikeRectangle":
        return cls(*(ProjectivePoint.parse(v) for v in (xA, xC, yA, yC)))

    def corners(self) -> list[DSPoint]:
        return [DSPoint(self.xA, self.yA), DSPoint(self.xC, self.yA), DSPoint(self.xC, self.yC), DSPoint(self.xA, self.yC)]

    def moved(self, m: MoebiusMap) -> "LightlikeRectangle":
        return LightlikeRectangle(apply(m, self.xA), apply(m, self.xC), apply(m, self.yA), apply(m, self.yC))


def area_rectangle(r: LightlikeRectangle) -> float:
    num = det(r.xC, r.yC) * det(r.xA, r.yA)
    den = det(r.xA, r.yC) * det(r.xC, r.yA)
    return math.log(abs(num / den))


def bounded_chart(points: list[ProjectivePoint], arcs: list[tuple[ProjectivePoint, ProjectivePoint]] = ()) -> MoebiusMap:
    """A rotation of RP^1 moving every given point and arc away from infinity.

    ``arcs`` are positive arcs ``(start, end)`` that must avoid the new
    infinity.  The new infinity is the middle of the widest free gap.
    """
    cuts = sorted({angle_coordinate(p) for p in points})
    if not cuts:
        return chart_sending_to_infinity(INF)
    spans = [(angle_coordinate(s), angle_coordinate(e)) for s, e in arcs]

    def covered(u: float) -> bool:
        for s, e in spans:
            if s <= e and s <= u <= e:
                return True
            if s > e and (u >= s or u <= e):
                return True
        return False

    best = None
    for i, c in enumerate(cuts):
        nxt = cuts[(i + 1) % len(cuts)] + (1.0 if i + 1 == len(cuts) else 0.0)
        mid = ((c + nxt) / 2.0) % 1.0
        width = nxt - c
        if covered(mid):
            continue
        if best is None or width > best[0]:
            best = (width, mid)
    if best is None:
        raise ChartFailure("no affine chart contains the figure")
    u = best[1]
    phi = math.pi - u * math.pi
    z = ProjectivePoint(math.cos(phi), math.sin(phi))
    return chart_sending_to_infinity(z)


def rectangle_chart(r: LightlikeRectangle) -> MoebiusMap:
    return bounded_chart([r.xA, r.xC, r.yA, r.yC], [(r.xA, r.xC), (r.yA, r.yC)])


def area_rectangle_quadrature(r: LightlikeRectangle, epsabs: float = 1e-11, epsrel: float = 1e-11) -> float:
    """Independent check: adaptive 2-D quadrature in a bounded chart."""
    from scipy.integrate import dblquad

    c = rectangle_chart(r)
    rr = r.moved(c)
    x0, x1 = rr.xA.to_real(), rr.xC.to_real()
    y0, y1 = rr.yA.to_real(), rr.yC.to_real()
    if not all(math.isfinite(v) for v in (x0, x1, y0, y1)) or x1 <= x0 or y1 <= y0:
        raise ChartFailure("rectangle did not land in a bounded chart")
    val, _err = dblquad(lambda y, x: 1.0 / (x - y) ** 2, x0, x1, y0, y1, epsabs=epsabs, epsrel=epsrel)
    return val


def r_theta(theta: float) -> LightlikeRectangle:
    """The rectangle ``[1, inf] x [0, y_theta]`` of area theta."""
    return LightlikeRectangle(point(1.0), INF, point(0.0), point(y_theta(theta)))


def y_plus(theta: float, x: ProjectivePoint, y: float) -> float:
    """Height of the L-shaped polygon making its area equal to theta.

    Evaluated homogeneously in ``x = [a:b]`` so that ``x = inf`` gives y_theta.
    """
    a, b = x.a, x.b
    et = math.exp(theta)
    num = -a + et * (a - y * b)
    den = -b + et * (a - y * b)
    return num / den


def in_domain(theta: float, x: ProjectivePoint, y: float, tol: float = DOMAIN_TOL) -> bool:
    """Membership in D: x in [1, inf], 0 < y <= y_theta and y > 1 - e^-theta x."""
    yt = y_theta(theta)
    if not (0.0 < y <= yt + tol):
        return False
    if x.is_inf(0.0):
        return True
    xv = x.to_real()
    if xv < 1.0 - tol:
        return False
    return y > 1.0 - math.exp(-theta) * xv + tol or abs(y - yt) <= tol


@dataclass(frozen=True)
class LShapedPolygon:
    """``R(1, inf, 0, y_plus)`` minus ``(x, inf] x (y, y_plus]``."""

    theta: float
    x: ProjectivePoint
    y: float
    y_plus: float = field(init=False)

    def __post_init__(self) -> None:
        x = ProjectivePoint.parse(self.x)
        object.__setattr__(self, "x", x)
        if not in_domain(self.theta, x, self.y):
            raise OutsideDomain(f"(x, y) = ({x}, {self.y}) is not in D for theta = {self.theta}")
        object.__setattr__(self, "y_plus", y_plus(self.theta, x, self.y))

    def big_rectangle(self) -> LightlikeRectangle:
        return LightlikeRectangle(point(1.0), INF, point(0.0), point(self.y_plus))

    def cut_rectangle(self) -> LightlikeRectangle | None:
        if self.x.is_inf(0.0) or self.y_plus - self.y <= 0.0:
            return None
        return LightlikeRectangle(self.x, INF, point(self.y), point(self.y_plus))


def area_lshape(p: LShapedPolygon) -> float:
    cut = p.cut_rectangle()
    big = area_rectangle(p.big_rectangle())
    return big if cut is None else big - area_rectangle(cut)
