"""Homographic interval exchange transformations and their circle maps.

A HIET lives on an arc ``[left, right)`` of RP^1.  The arc is cut twice,
into top and bottom subintervals, and branch ``i`` is a Moebius map sending
the ``i``-th top subinterval onto the ``perm[i]``-th bottom one.  Gluing
``left ~ right`` turns it into a circle map; the circle is coordinatized by
a Moebius chart sending ``left, mid, right`` to ``0, 1/2, 1``.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .desitter import in_domain, y_plus as _y_plus, y_theta
from .errors import BoundaryCase, DomainError, NotBoundary, OutOfInterval, OutsideDomain, ValidationError
from .moebius import (
    INF,
    ONE,
    ZERO,
    MoebiusMap,
    ProjectivePoint,
    angle_coordinate,
    apply,
    compose,
    compose_all,
    from_triples,
    point,
)

ENDPOINT_TOL = 1e-9
BOUNDARY_TOL = 1e-12


def arc_midpoint(left: ProjectivePoint, right: ProjectivePoint) -> ProjectivePoint:
    """Middle of the positive arc from ``left`` to ``right`` in angle."""
    ul, ur = angle_coordinate(left), angle_coordinate(right)
    if ur <= ul:
        ur += 1.0
    u = ((ul + ur) / 2.0) % 1.0
    phi = math.pi - u * math.pi
    return ProjectivePoint(math.cos(phi), math.sin(phi))


def interval_chart(left: ProjectivePoint, right: ProjectivePoint, mid: ProjectivePoint | None = None) -> MoebiusMap:
    if mid is None:
        mid = arc_midpoint(left, right)
    return from_triples(left, mid, right, ZERO, point(0.5), ONE)


def _chart_value(chart: MoebiusMap, p: ProjectivePoint) -> float:
    q = apply(chart, p)
    if q.b == 0.0:
        return math.inf
    return q.a / q.b


class CircleMap:
    """A degree-one monotone map of R/Z given piece by piece.

    Piece ``i`` covers ``[cuts[i], cuts[i+1])`` of the chart coordinate and is
    ``s -> (A s + B) / (C s + D)`` (constant pieces have ``A = C = 0``).  The
    lift adds an integer ``offset`` per piece so that it is continuous.
    When built from a HIET the ``hiet`` and ``chart`` attributes are set.
    """

    def __init__(self, cuts, coeffs, offsets, interval=None, chart=None, hiet=None, kind="homeomorphism"):
        self.cuts = [float(c) for c in cuts]
        self.coeffs = [tuple(float(v) for v in c) for c in coeffs]
        self.offsets = [int(k) for k in offsets]
        self.interval = interval
        self.chart = chart
        self.hiet = hiet
        self.kind = kind
        arr = np.array(self.coeffs, dtype=float).reshape(-1, 4)
        self._A, self._B, self._C, self._D = arr.T.copy()
        self._cuts = np.array(self.cuts)
        self._off = np.array(self.offsets, dtype=float)

    # construction -----------------------------------------------------
    @classmethod
    def from_pieces(cls, left: ProjectivePoint, right: ProjectivePoint, pieces, hiet=None, chart=None) -> "CircleMap":
        """``pieces`` is a list of ``(start, end, f)`` in the original chart.

        ``f`` is a MoebiusMap or a constant ProjectivePoint.  Starts must be
        increasing along the arc; the first start is ``left`` and the last
        end is ``right``.
        """
        if chart is None:
            chart = interval_chart(left, right)
        ci = chart.inverse()
        cuts, coeffs, lo, hi = [], [], [], []
        kind = "homeomorphism"
        for start, end, f in pieces:
            s0 = _chart_value(chart, start)
            cuts.append(0.0 if start is left or start.close_to(left, 0.0) else s0)
            if isinstance(f, MoebiusMap):
                k = compose_all([chart, f, ci])
                coeffs.append((k.m11, k.m12, k.m21, k.m22))
                lo.append(_chart_value(chart, apply(f, start)))
                hi.append(_chart_value(chart, apply(f, end)))
            else:
                c = _chart_value(chart, f)
                coeffs.append((0.0, c, 0.0, 1.0))
                lo.append(c)
                hi.append(c)
                kind = "endomorphism"
        offsets = [0]
        for i in range(1, len(pieces)):
            jump = hi[i - 1] - lo[i]
            k = round(jump)
            if abs(jump - k) > 1e-6:
                raise ValidationError("pieces do not glue into a continuous circle map")
            offsets.append(offsets[-1] + k)
        total = hi[-1] + offsets[-1] - lo[0]
        if abs(total - 1.0) > 1e-6:
            raise ValidationError(f"circle map does not have degree one (total displacement {total})")
        return cls(cuts, coeffs, offsets, interval=(left, right), chart=chart, hiet=hiet, kind=kind)

    # evaluation ------------------------------------------------------
    def _piece(self, s: float) -> int:
        return bisect_right(self.cuts, s) - 1

    def lift(self, t: float) -> float:
        n = math.floor(t)
        s = t - n
        if s >= 1.0:
            n += 1
            s = 0.0
        i = bisect_right(self.cuts, s) - 1
        if i < 0:
            i = 0
        a, b, c, d = self.coeffs[i]
        return n + self.offsets[i] + (a * s + b) / (c * s + d)

    def lift_array(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        n = np.floor(t)
        s = t - n
        wrap = s >= 1.0
        n = np.where(wrap, n + 1, n)
        s = np.where(wrap, 0.0, s)
        i = np.clip(np.searchsorted(self._cuts, s, side="right") - 1, 0, len(self.cuts) - 1)
        val = (self._A[i] * s + self._B[i]) / (self._C[i] * s + self._D[i])
        return n + self._off[i] + val

    def __call__(self, s: float) -> float:
        return self.lift(s) % 1.0

    def resolution(self) -> float:
        """Length of the shortest non-constant piece, measured on both sides.

        Tolerances used on this map must stay well below it, or a point of a
        short piece becomes indistinguishable from its neighbours.
        """
        ends = self.cuts + [1.0]
        widths = []
        for i, (a, b) in enumerate(zip(ends, ends[1:])):
            A, B, C, D = self.coeffs[i]
            if A == 0.0 and C == 0.0:
                continue
            widths.append(b - a)
            lo = (A * a + B) / (C * a + D)
            hi = (A * b + B) / (C * b + D)
            widths.append(abs(hi - lo))
        return min(widths) if widths else 1.0

    def branch_index(self, s: float) -> int:
        return max(self._piece(s % 1.0), 0)

    def to_chart(self, p: ProjectivePoint) -> float:
        s = _chart_value(self.chart, p)
        if s < 0.0 and s > -BOUNDARY_TOL:
            s = 0.0
        if not (0.0 <= s < 1.0):
            raise OutOfInterval(f"{p} is outside the interval of the circle map")
        return s

    def from_chart(self, s: float) -> ProjectivePoint:
        return apply(self.chart.inverse(), point(s % 1.0))

    def eval_point(self, p: ProjectivePoint) -> ProjectivePoint:
        return self.from_chart(self(self.to_chart(p)))


@dataclass(frozen=True)
class Hiet:
    interval: tuple[ProjectivePoint, ProjectivePoint]
    top_breaks: tuple[ProjectivePoint, ...]
    bottom_breaks: tuple[ProjectivePoint, ...]
    branches: tuple[MoebiusMap, ...]
    perm: tuple[int, ...]
    letters: tuple[str, ...] | None = None
    chart: MoebiusMap = field(init=False, repr=False, compare=False)
    _top_cuts: tuple[float, ...] = field(init=False, repr=False, compare=False)
    _bottom_cuts: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "top_breaks", tuple(self.top_breaks))
        object.__setattr__(self, "bottom_breaks", tuple(self.bottom_breaks))
        object.__setattr__(self, "branches", tuple(self.branches))
        object.__setattr__(self, "perm", tuple(int(i) for i in self.perm))
        n = len(self.branches)
        if len(self.top_breaks) != n - 1 or len(self.bottom_breaks) != n - 1 or sorted(self.perm) != list(range(n)):
            raise ValidationError("inconsistent numbers of breaks, branches and permutation entries")
        if self.letters is None:
            object.__setattr__(self, "letters", tuple("abcdefghijklmnopqrstuvwxyz"[:n]))
        left, right = self.interval
        chart = interval_chart(left, right)
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "_top_cuts", self._cuts_of(self.top_breaks))
        object.__setattr__(self, "_bottom_cuts", self._cuts_of(self.bottom_breaks))
        self._validate()

    def _cuts_of(self, breaks) -> tuple[float, ...]:
        cuts = [0.0] + [_chart_value(self.chart, b) for b in breaks] + [1.0]
        for u, v in zip(cuts, cuts[1:]):
            if not u < v:
                raise ValidationError("breaks must be interior and strictly increasing")
        return tuple(cuts)

    def top_interval(self, i: int) -> tuple[ProjectivePoint, ProjectivePoint]:
        pts = (self.interval[0],) + self.top_breaks + (self.interval[1],)
        return pts[i], pts[i + 1]

    def bottom_interval(self, j: int) -> tuple[ProjectivePoint, ProjectivePoint]:
        pts = (self.interval[0],) + self.bottom_breaks + (self.interval[1],)
        return pts[j], pts[j + 1]

    def _validate(self) -> None:
        for i, m in enumerate(self.branches):
            a, b = self.top_interval(i)
            c, d = self.bottom_interval(self.perm[i])
            if not (apply(m, a).close_to(c, ENDPOINT_TOL) and apply(m, b).close_to(d, ENDPOINT_TOL)):
                raise ValidationError(f"branch {i} does not map its top interval onto bottom interval {self.perm[i]}")
            mid = apply(self.chart.inverse(), point(0.5 * (self._top_cuts[i] + self._top_cuts[i + 1])))
            s = _chart_value(self.chart, apply(m, mid))
            if not (self._bottom_cuts[self.perm[i]] <= s <= self._bottom_cuts[self.perm[i] + 1]):
                raise ValidationError(f"branch {i} reverses orientation")

    # evaluation ------------------------------------------------------
    def _coord(self, p: ProjectivePoint) -> float:
        s = _chart_value(self.chart, p)
        if -BOUNDARY_TOL < s < 0.0:
            s = 0.0
        if not (0.0 <= s < 1.0):
            raise OutOfInterval(f"{p} is not in [{self.interval[0]}, {self.interval[1]})")
        return s

    def top_index(self, p: ProjectivePoint) -> int:
        return bisect_right(self._top_cuts, self._coord(p)) - 1

    def bottom_index(self, p: ProjectivePoint) -> int:
        return bisect_right(self._bottom_cuts, self._coord(p)) - 1

    def inverse(self) -> "Hiet":
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return Hiet(
            self.interval,
            self.bottom_breaks,
            self.top_breaks,
            tuple(self.branches[inv[j]].inverse() for j in range(len(inv))),
            tuple(inv),
            tuple(self.letters[inv[j]] for j in range(len(inv))),
        )

    def to_circle_map(self) -> CircleMap:
        pieces = [(*self.top_interval(i), m) for i, m in enumerate(self.branches)]
        return CircleMap.from_pieces(self.interval[0], self.interval[1], pieces, hiet=self, chart=self.chart)

    def to_json(self) -> dict:
        return {
            "interval": [p.as_list() for p in self.interval],
            "top_breaks": [p.as_list() for p in self.top_breaks],
            "bottom_breaks": [p.as_list() for p in self.bottom_breaks],
            "branches": [m.rows() for m in self.branches],
            "perm": list(self.perm),
        }

    @classmethod
    def from_json(cls, d: dict) -> "Hiet":
        return cls(
            tuple(ProjectivePoint(*p) for p in d["interval"]),
            tuple(ProjectivePoint(*p) for p in d["top_breaks"]),
            tuple(ProjectivePoint(*p) for p in d["bottom_breaks"]),
            tuple(MoebiusMap.from_rows(m) for m in d["branches"]),
            tuple(d["perm"]),
        )


def eval(h: Hiet, p: ProjectivePoint) -> ProjectivePoint:  # noqa: A001 - mirrors the documented operation name
    return apply(h.branches[h.top_index(p)], p)


def eval_inverse(h: Hiet, p: ProjectivePoint) -> ProjectivePoint:
    j = h.bottom_index(p)
    i = h.perm.index(j)
    return apply(h.branches[i].inverse(), p)


def _wrap(h: Hiet, p: ProjectivePoint) -> ProjectivePoint:
    # the right end of the interval is the left end on the circle
    if p.close_to(h.interval[1], BOUNDARY_TOL):
        return h.interval[0]
    return p


def iterate(h: Hiet, p: ProjectivePoint, n: int) -> ProjectivePoint:
    step = eval if n >= 0 else eval_inverse
    for _ in range(abs(n)):
        p = _wrap(h, step(h, p))
    return p


def coding(h: Hiet, p: ProjectivePoint, n: int) -> str:
    """Letters of the branches visited by ``p, E(p), ..., E^{n-1}(p)``."""
    out = []
    for _ in range(n):
        i = h.top_index(p)
        out.append(h.letters[i])
        p = _wrap(h, apply(h.branches[i], p))
    return "".join(out)


def to_circle_map(h: Hiet) -> CircleMap:
    return h.to_circle_map()


# ----------------------------------------------------------------------
# the one-singularity family


def _as_point(x) -> ProjectivePoint:
    return ProjectivePoint.parse(x)


def g_theta(theta: float) -> MoebiusMap:
    """The map with ``g(1, 0, y_theta) = (inf, 0, y_theta)``."""
    yt = y_theta(theta)
    return from_triples(ONE, ZERO, point(yt), INF, ZERO, point(yt))


def h_infinity(theta: float) -> MoebiusMap:
    yt = y_theta(theta)
    return from_triples(ONE, INF, ZERO, ONE, INF, point(yt))


def s_of_x(theta: float, x) -> float:
    """The time ``s`` in [0, 1] with ``x = g^s(1)``.

    ``w(t) = (t - y_theta) / t`` linearizes g as ``w -> e^theta w``.
    """
    x = _as_point(x)
    yt = y_theta(theta)
    w = (x.a - yt * x.b) / x.a
    return (math.log(w) + theta) / theta


def x_of_s(theta: float, s: float) -> ProjectivePoint:
    yt = y_theta(theta)
    w = math.exp(theta * (s - 1.0))
    return ProjectivePoint(yt, 1.0 - w)


@dataclass(frozen=True)
class OneSingFamilyX:
    theta: float
    x: ProjectivePoint
    y_theta: float
    x_prime: ProjectivePoint
    g: MoebiusMap
    h: MoebiusMap
    E: Hiet

    @property
    def gh(self) -> MoebiusMap:
        return compose(self.g, self.h)


def build_one_sing(theta: float, x) -> OneSingFamilyX:
    x = _as_point(x)
    yt = y_theta(theta)
    if not (x.b == 0.0 or x.a / x.b >= 1.0):
        raise DomainError(f"x = {x} is not in [1, inf]")
    g = g_theta(theta)
    x_prime = ProjectivePoint(x.a, x.a - x.b)
    is_inf = x.b == 0.0
    is_one = x.a == x.b
    if is_inf or is_one:
        h_inf = h_infinity(theta)
        h = h_inf if is_inf else compose(g.inverse(), h_inf)
        E = Hiet((ONE, INF), (), (), (h_inf,), (0,), ("b",) if is_inf else ("a",))
    else:
        h = from_triples(x_prime, INF, ZERO, ONE, x, point(yt))
        gh = compose(g, h)
        if not apply(gh, ONE).close_to(x, ENDPOINT_TOL):
            raise ValidationError("single-singularity condition gh(1) = x failed")
        E = Hiet((ONE, INF), (x_prime,), (x,), (gh, h), (1, 0), ("a", "b"))
    return OneSingFamilyX(theta, x, yt, x_prime, g, h, E)


# ----------------------------------------------------------------------
# the two-singularity family


@dataclass(frozen=True)
class TwoSingFamilyXY:
    theta: float
    x: ProjectivePoint
    y: float
    x_prime: ProjectivePoint
    y_plus: float
    y_prime: float
    h1: MoebiusMap | None
    h2: MoebiusMap
    g1: MoebiusMap | None
    g2: MoebiusMap
    E: Hiet
    F: Hiet


def x_prime_xy(theta: float, x: ProjectivePoint, y: float) -> ProjectivePoint:
    return ProjectivePoint(x.a, math.exp(theta) * (y - 1.0) * x.b + x.a)


def y_prime_xy(theta: float, x: ProjectivePoint, y: float) -> float:
    et = math.exp(theta)
    num = x.a + et * x.a * (y - 1.0)
    den = x.b + et * x.a * (y - 1.0) + y * (x.a - x.b)
    return num / den


def classify_xy(theta: float, x, y: float, tol: float = BOUNDARY_TOL) -> str:
    """'interior', 'boundary' or 'outside' for the domain D."""
    x = _as_point(x)
    et = math.exp(theta)
    if x.b != 0.0 and x.a / x.b < 1.0 - tol:
        return "outside"
    xv = math.inf if x.b == 0.0 else x.a / x.b
    if abs(y) <= tol and xv >= et * (1 - tol):
        return "boundary"
    if xv <= et and abs(y - (1.0 - xv / et)) <= tol:
        return "boundary"
    return "interior" if in_domain(theta, x, y, tol) else "outside"


def build_two_sing(theta: float, x, y: float) -> TwoSingFamilyXY:
    x = _as_point(x)
    where = classify_xy(theta, x, y)
    if where == "boundary":
        raise BoundaryCase(f"(x, y) = ({x}, {y}) is on the boundary of D; use build_boundary_inverse")
    if where == "outside":
        raise OutsideDomain(f"(x, y) = ({x}, {y}) is outside D")
    yt = y_theta(theta)
    if abs(y - yt) <= BOUNDARY_TOL:
        y = yt
    x_inf = x.b == 0.0
    xp = x_prime_xy(theta, x, y)
    yp = _y_plus(theta, x, y)
    ypr = 0.0 if y == yt else y_prime_xy(theta, x, y)
    Y, Yp, Ypr = point(y), point(yp), point(ypr)
    h2 = from_triples(xp, INF, ZERO, ONE, x, Yp)
    h1 = None if x_inf else from_triples(ONE, xp, ZERO, x, INF, Y)
    if h1 is not None:
        g1 = compose_all([h2, h1, h2.inverse()])
        g2 = compose(h1, h2.inverse())
        yp_check = apply(compose(h2, h1.inverse()), ZERO)
        if not yp_check.close_to(Ypr, 1e-9):
            raise ValidationError("closed form for y' disagrees with h2 h1^-1 (0)")
    else:
        g1 = None if y == yt else from_triples(ONE, ZERO, Ypr, x, Y, Yp)
        g2 = from_triples(ONE, Ypr, Yp, INF, ZERO, Y)
    if g1 is not None and y != yt:
        ok = all(apply(g1, p).close_to(q, 1e-9) for p, q in ((ONE, x), (ZERO, Y), (Ypr, Yp)))
        if not ok:
            raise ValidationError("g1(1, 0, y') != (x, y, y_plus)")
    ok = all(apply(g2, p).close_to(q, 1e-9) for p, q in ((ONE, INF), (Ypr, ZERO), (Yp, Y)))
    if not ok:
        raise ValidationError("g2(1, y', y_plus) != (inf, 0, y)")
    if x_inf:
        E = Hiet((ONE, INF), (), (), (h2,), (0,), ("b",))
    else:
        E = Hiet((ONE, INF), (xp,), (x,), (h1, h2), (1, 0), ("a", "b"))
    if y == yt:
        F = Hiet((ZERO, Yp), (), (), (g2,), (0,), ("b",))
    else:
        F = Hiet((ZERO, Yp), (Ypr,), (Y,), (g1, g2), (1, 0), ("a", "b"))
    return TwoSingFamilyXY(theta, x, y, xp, yp, ypr, h1, h2, g1, g2, E, F)


def build_boundary_inverse(theta: float, x, y: float | None = None) -> CircleMap:
    """``E^-1`` on the part of the boundary of D where E degenerates.

    On the edge ``y = 0, x >= e^theta`` and on the edge
    ``y = 1 - e^-theta x, x <= e^theta``.  Where ``x' = inf`` the inverse
    is constant equal to infinity on ``[1, x)``.
    """
    x = _as_point(x)
    et = math.exp(theta)
    xv = math.inf if x.b == 0.0 else x.a / x.b
    if y is None:
        y = 0.0 if xv >= et else 1.0 - xv / et
    if classify_xy(theta, x, y, 1e-12) != "boundary":
        raise NotBoundary(f"(x, y) = ({x}, {y}) is not on the boundary of D")
    yp = _y_plus(theta, x, y) if xv != math.inf else y_theta(theta)
    xp = x_prime_xy(theta, x, y)
    Y = point(y)
    if xv == math.inf:
        h2 = from_triples(ONE, INF, ZERO, ONE, INF, point(yp))
        return CircleMap.from_pieces(ONE, INF, [(ONE, INF, h2.inverse())])
    if abs(xp.b) <= 1e-15:
        h1 = from_triples(ONE, INF, ZERO, x, INF, Y)
        pieces = [(ONE, x, INF), (x, INF, h1.inverse())]
        if abs(xv - 1.0) <= 1e-15:
            pieces = pieces[1:]
        return CircleMap.from_pieces(ONE, INF, pieces)
    h1 = from_triples(ONE, xp, ZERO, x, INF, Y)
    h2 = from_triples(xp, INF, ZERO, ONE, x, point(yp))
    return CircleMap.from_pieces(ONE, INF, [(ONE, x, h2.inverse()), (x, INF, h1.inverse())])
