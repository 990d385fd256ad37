"""Lightlike polygons with edge pairings, and the tori they glue into.

A polygon lives in dS^2 = RP^1 x RP^1 minus the diagonal.  Its edges are
segments of lightlike leaves: alpha edges keep ``y`` fixed, beta edges keep
``x`` fixed.  All geometric decisions (orientation, simplicity, which edge a
leaf hits next) are made in one bounded affine chart, obtained by a rotation
of RP^1 applied to both coordinates.  Rotations are isometries, so the area
and the light cone are the same in the chart.

Conventions used throughout:

* the boundary is traversed counterclockwise in the chart, so the interior
  is on the left; bottom sides run +X, right sides +Y, top sides -X and left
  sides -Y;
* a pairing ``(top, bottom, M)`` has ``M(bottom) = top`` with the direction
  of traversal reversed (``M(bottom.start) = top.end``);
* quadrants around a corner are numbered counterclockwise from +X:
  0 future spacelike, 1 future timelike, 2 past spacelike, 3 past timelike.

The sign of a cone angle depends on a choice of orientation conventions.
``ANGLE_SIGN`` is fixed once so that the one-singularity tori report
``+theta``.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import cached_property

from .desitter import DSPoint, LShapedPolygon, bounded_chart, y_theta
from .errors import (
    ChartFailure,
    EllipticHolonomy,
    GaussBonnetViolation,
    InconsistentPairing,
    NoReturn,
    NonStandardQuadrants,
    NotFixingBase,
    ValidationError,
)
from .hiet import CircleMap, build_one_sing, build_two_sing
from .moebius import (
    IDENTITY,
    INF,
    ONE,
    ZERO,
    MoebiusMap,
    ProjectivePoint,
    apply,
    compose,
    compose_all,
    is_identity,
    log_derivative_at_fixed_point,
    point,
    trace_abs,
)

ALPHA, BETA = "alpha", "beta"
PAIRING_TOL = 1e-9
FIX_TOL = 1e-8
CORNER_TOL = 1e-10
GAUSS_BONNET_TOL = 1e-6
# round-off allowance for point-in-span decisions in chart coordinates
SPAN_TOL = 1e-12

QUADRANT_NAMES = ("future spacelike", "future timelike", "past spacelike", "past timelike")
STANDARD_SEQUENCE = (1, 2, 3, 0)

# Fixed once so that the singular vertex of build_T_theta_x reports +theta
# (checked in the tests).  With the counterclockwise boundary convention the
# holonomy there contracts the alpha direction at its base corner.
ANGLE_SIGN = -1


def _kind(k: str) -> str:
    k = str(k).lower()
    if k in ("alpha", "a", "α"):
        return ALPHA
    if k in ("beta", "b", "β"):
        return BETA
    raise ValidationError(f"unknown edge kind {k!r}")


@dataclass(frozen=True)
class Edge:
    kind: str
    start: DSPoint
    end: DSPoint
    orientation: str = "+"

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", _kind(self.kind))
        if self.orientation not in ("+", "-"):
            raise ValidationError(f"orientation must be '+' or '-', got {self.orientation!r}")

    @property
    def fixed(self) -> ProjectivePoint:
        """The coordinate held constant along the edge."""
        return self.start.y if self.kind == ALPHA else self.start.x

    def moving(self, p: DSPoint) -> ProjectivePoint:
        return p.x if self.kind == ALPHA else p.y

    def is_degenerate(self, tol: float = SPAN_TOL) -> bool:
        return self.moving(self.start).close_to(self.moving(self.end), tol)

    def arc(self) -> tuple[ProjectivePoint, ProjectivePoint]:
        """The positive arc of RP^1 covered by the moving coordinate."""
        s, e = self.moving(self.start), self.moving(self.end)
        return (s, e) if self.orientation == "+" else (e, s)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "start": self.start.as_list(),
            "end": self.end.as_list(),
            "orient": self.orientation,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Edge":
        return cls(d["kind"], DSPoint.from_list(d["start"]), DSPoint.from_list(d["end"]), d.get("orient", "+"))


@dataclass(frozen=True)
class Pairing:
    top: int
    bottom: int
    matrix: MoebiusMap

    def map_from(self, e: int) -> MoebiusMap:
        """The map carrying edge ``e`` onto its partner."""
        return self.matrix if e == self.bottom else self.matrix.inverse()

    def partner(self, e: int) -> int:
        return self.top if e == self.bottom else self.bottom

    def to_json(self) -> dict:
        return {"top": self.top, "bottom": self.bottom, "matrix": self.matrix.rows()}

    @classmethod
    def from_json(cls, d: dict) -> "Pairing":
        return cls(int(d["top"]), int(d["bottom"]), MoebiusMap.from_rows(d["matrix"]))


class _Geometry:
    """Chart data shared by every chart-based computation on a spec."""

    def __init__(self, edges: tuple[Edge, ...]):
        pts, arcs = [], []
        for e in edges:
            pts += [e.start.x, e.start.y]
            arcs.append(e.arc())
        # every arc swept by either projection must avoid the new infinity
        self.chart = bounded_chart(pts, arcs)
        self.chart_inv = self.chart.inverse()
        self.xy = [self.to_chart(e.start) for e in edges]
        for X, Y in self.xy:
            if not (math.isfinite(X) and math.isfinite(Y)):
                raise ChartFailure("polygon does not fit in an affine chart")

    def coord(self, p: ProjectivePoint) -> float:
        q = apply(self.chart, p)
        return math.inf if q.b == 0.0 else q.a / q.b

    def to_chart(self, p: DSPoint) -> tuple[float, float]:
        return self.coord(p.x), self.coord(p.y)

    def from_coord(self, t: float) -> ProjectivePoint:
        return apply(self.chart_inv, point(t))


@dataclass(frozen=True)
class PolygonSpec:
    edges: tuple[Edge, ...]
    pairings: tuple[Pairing, ...]
    check: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "pairings", tuple(self.pairings))
        if self.check:
            validate_spec(self)

    @cached_property
    def geometry(self) -> _Geometry:
        return _Geometry(self.edges)

    @cached_property
    def pairing_of(self) -> dict[int, int]:
        out = {}
        for k, p in enumerate(self.pairings):
            for e in (p.top, p.bottom):
                if e in out:
                    raise InconsistentPairing(f"edge {e} is paired twice")
                out[e] = k
        return out

    def partner(self, e: int) -> int:
        return self.pairings[self.pairing_of[e]].partner(e)

    def map_from(self, e: int) -> MoebiusMap:
        return self.pairings[self.pairing_of[e]].map_from(e)

    def corner(self, i: int) -> DSPoint:
        return self.edges[i].start

    def to_json(self) -> dict:
        return {"edges": [e.to_json() for e in self.edges], "pairings": [p.to_json() for p in self.pairings]}

    @classmethod
    def from_json(cls, d: dict, check: bool = True) -> "PolygonSpec":
        try:
            edges = [Edge.from_json(e) for e in d["edges"]]
            pairings = [Pairing.from_json(p) for p in d["pairings"]]
        except (KeyError, TypeError, IndexError) as exc:
            raise ValidationError(f"malformed polygon spec: {exc}") from exc
        return cls(tuple(edges), tuple(pairings), check)

    def canonical(self) -> tuple["PolygonSpec", dict[int, int]]:
        """Drop zero-length edges and the pairings between them.

        Returns the new spec and the map from old to new edge indices.
        """
        keep = [i for i, e in enumerate(self.edges) if not e.is_degenerate()]
        index = {old: new for new, old in enumerate(keep)}
        pairs = []
        for p in self.pairings:
            kt, kb = p.top in index, p.bottom in index
            if kt != kb:
                raise InconsistentPairing(f"edge {p.top if not kt else p.bottom} is degenerate but its partner is not")
            if kt:
                pairs.append(Pairing(index[p.top], index[p.bottom], p.matrix))
        pairs.sort(key=lambda q: min(q.top, q.bottom))
        return PolygonSpec(tuple(self.edges[i] for i in keep), tuple(pairs), self.check), index

    def close_to(self, other: "PolygonSpec", tol: float = 1e-9) -> bool:
        if len(self.edges) != len(other.edges) or len(self.pairings) != len(other.pairings):
            return False
        for a, b in zip(self.edges, other.edges):
            if a.kind != b.kind or a.orientation != b.orientation:
                return False
            if not (a.start.close_to(b.start, tol) and a.end.close_to(b.end, tol)):
                return False
        mine = {(p.top, p.bottom): p.matrix for p in self.pairings}
        for p in other.pairings:
            m = mine.get((p.top, p.bottom))
            if m is None or not m.close_to(p.matrix, tol):
                return False
        return True


# ----------------------------------------------------------------------
# validation


def _segments_touch(p0, p1, q0, q1) -> bool:
    """Do two axis-parallel closed segments in the plane intersect?"""
    ax0, ax1 = sorted((p0[0], p1[0]))
    ay0, ay1 = sorted((p0[1], p1[1]))
    bx0, bx1 = sorted((q0[0], q1[0]))
    by0, by1 = sorted((q0[1], q1[1]))
    t = SPAN_TOL
    return ax0 <= bx1 + t and bx0 <= ax1 + t and ay0 <= by1 + t and by0 <= ay1 + t


def signed_area_chart(xy: list[tuple[float, float]]) -> float:
    s = 0.0
    n = len(xy)
    for i in range(n):
        x0, y0 = xy[i]
        x1, y1 = xy[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s / 2.0


def validate_spec(spec: PolygonSpec) -> None:
    edges = spec.edges
    n = len(edges)
    if n < 4 or n % 2:
        raise ValidationError(f"a polygon needs an even number (>= 4) of edges, got {n}")
    for i, e in enumerate(edges):
        # exact checks on the stored coordinates
        if e.kind == ALPHA and e.start.y != e.end.y:
            raise ValidationError(f"alpha edge {i} does not keep y fixed")
        if e.kind == BETA and e.start.x != e.end.x:
            raise ValidationError(f"beta edge {i} does not keep x fixed")
        if e.is_degenerate():
            raise ValidationError(f"edge {i} has zero length; canonicalize first")
        nxt = edges[(i + 1) % n]
        if not e.end.close_to(nxt.start, SPAN_TOL):
            raise ValidationError(f"edge {i} does not end where edge {(i + 1) % n} starts")
    geo = spec.geometry
    xy = geo.xy
    for i, e in enumerate(edges):
        a, b = xy[i], xy[(i + 1) % n]
        axis = 0 if e.kind == ALPHA else 1
        d = b[axis] - a[axis]
        if (d > 0) != (e.orientation == "+"):
            raise ValidationError(f"edge {i}: orientation {e.orientation} disagrees with its endpoints")
    if signed_area_chart(xy) <= 0.0:
        raise ValidationError("boundary is not traversed counterclockwise")
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_touch(xy[i], xy[(i + 1) % n], xy[j], xy[(j + 1) % n]):
                raise ValidationError(f"boundary is not simple: edges {i} and {j} meet")
    sides = {X > Y for X, Y in xy}
    if len(sides) != 1 or any(abs(X - Y) <= SPAN_TOL for X, Y in xy):
        raise ValidationError("polygon meets the diagonal")
    # pairings: a perfect matching by maps that reverse the traversal
    seen = spec.pairing_of
    if sorted(seen) != list(range(n)):
        raise InconsistentPairing("pairings are not a perfect matching of the edges")
    for k, p in enumerate(spec.pairings):
        top, bot = edges[p.top], edges[p.bottom]
        if top.kind != bot.kind:
            raise InconsistentPairing(f"pairing {k} joins an alpha edge to a beta edge")
        s_img = bot.start.moved(p.matrix)
        e_img = bot.end.moved(p.matrix)
        if not (s_img.close_to(top.end, PAIRING_TOL) and e_img.close_to(top.start, PAIRING_TOL)):
            if s_img.close_to(top.start, PAIRING_TOL) and e_img.close_to(top.end, PAIRING_TOL):
                raise InconsistentPairing(f"pairing {k} preserves the traversal direction (non-orientable gluing)")
            raise InconsistentPairing(f"pairing {k} does not send edge {p.bottom} onto edge {p.top}")


# ----------------------------------------------------------------------
# vertices


def vertex_orbits(spec: PolygonSpec) -> list[tuple[int, ...]]:
    """Corners grouped into orbits, each in the order met by a small positive loop.

    Corner ``i`` is the start of edge ``i``.  Going counterclockwise around
    it one leaves through the incoming edge ``i - 1``; on the other side of
    that edge one arrives at the start of its partner.
    """
    n = len(spec.edges)
    if sorted(spec.pairing_of) != list(range(n)):
        raise InconsistentPairing("pairings are not a perfect matching of the edges")
    seen: set[int] = set()
    orbits = []
    for c0 in range(n):
        if c0 in seen:
            continue
        orbit = []
        c = c0
        while c not in seen:
            seen.add(c)
            orbit.append(c)
            c = spec.partner((c - 1) % n)
        if c != c0:
            raise InconsistentPairing(f"corner chase from {c0} does not close up")
        orbits.append(tuple(orbit))
    return orbits


def euler_characteristic(spec: PolygonSpec) -> int:
    return len(vertex_orbits(spec)) - len(spec.pairings) + 1


def _ray(e: Edge) -> int:
    if e.kind == ALPHA:
        return 0 if e.orientation == "+" else 2
    return 1 if e.orientation == "+" else 3


def _inside(xy, px: float, py: float) -> bool:
    inside = False
    n = len(xy)
    for i in range(n):
        (x0, y0), (x1, y1) = xy[i], xy[(i + 1) % n]
        if (y0 > py) != (y1 > py):
            xc = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
            if px < xc:
                inside = not inside
    return inside


def corner_quadrants(spec: PolygonSpec, c: int) -> list[int]:
    """Quadrants covered by the polygon at corner ``c``, counterclockwise."""
    n = len(spec.edges)
    r_out = _ray(spec.edges[c])
    r_back = (_ray(spec.edges[(c - 1) % n]) + 2) % 4
    k = (r_back - r_out) % 4
    if k == 0:
        raise ValidationError(f"boundary doubles back at corner {c}")
    return [(r_out + j) % 4 for j in range(k)]


@dataclass(frozen=True)
class QuadrantReport:
    orbit: tuple[int, ...]
    standard: bool
    quadrants: tuple[tuple[str, ...], ...]
    mismatch: str | None = None

    def to_json(self) -> dict:
        return {
            "orbit": list(self.orbit),
            "standard": self.standard,
            "quadrants": [list(q) for q in self.quadrants],
            "mismatch": self.mismatch,
        }


def quadrant_check(spec: PolygonSpec, orbit) -> QuadrantReport:
    """Compare the quadrants met around a vertex with the standard sequence.

    Each corner contributes the quadrants between its outgoing edge and its
    reversed incoming edge.  The pairing maps must carry each corner onto
    the previous one with reversed traversal, the quadrant sequences must
    continue each other, and exactly one full turn (four quadrants) must be
    covered.
    """
    n = len(spec.edges)
    orbit = tuple(orbit)
    geo = spec.geometry
    problems = []
    seqs = []
    for i, c in enumerate(orbit):
        qs = corner_quadrants(spec, c)
        seqs.append(qs)
        # interior witness: a short step into the middle quadrant
        X, Y = geo.xy[c]
        scale = min(abs(geo.xy[(c + 1) % n][0] - X) + abs(geo.xy[(c + 1) % n][1] - Y),
                    abs(geo.xy[(c - 1) % n][0] - X) + abs(geo.xy[(c - 1) % n][1] - Y))
        q = qs[len(qs) // 2]
        ang = (q + 0.5) * math.pi / 2 if len(qs) % 2 else q * math.pi / 2
        eps = 1e-3 * scale
        if not _inside(geo.xy, X + eps * math.cos(ang), Y + eps * math.sin(ang)):
            problems.append(f"corner {c}: interior witness lies outside the polygon")
        crossed = (c - 1) % n
        nxt = orbit[(i + 1) % len(orbit)]
        f = spec.map_from(spec.partner(crossed))
        here, there = spec.corner(c), spec.corner(nxt)
        if not there.moved(f).close_to(here, FIX_TOL):
            e_other = spec.edges[spec.partner(crossed)].end
            if e_other.moved(f).close_to(here, FIX_TOL):
                problems.append(f"edge {crossed}: identification preserves the traversal direction")
            else:
                problems.append(f"edge {crossed}: pairing map does not carry corner {nxt} to corner {c}")
    flat = [q for s in seqs for q in s]
    if not problems:
        for i in range(len(seqs)):
            a, b = seqs[i], seqs[(i + 1) % len(seqs)]
            if (a[-1] + 1) % 4 != b[0]:
                problems.append(f"quadrants do not continue from corner {orbit[i]} to corner {orbit[(i + 1) % len(orbit)]}")
        if len(flat) != 4:
            problems.append(f"{len(flat)} quadrants around the vertex instead of 4")
    names = tuple(tuple(QUADRANT_NAMES[q] for q in s) for s in seqs)
    return QuadrantReport(orbit, not problems, names, "; ".join(problems) or None)


def vertex_holonomy(spec: PolygonSpec, orbit, report: QuadrantReport | None = None) -> MoebiusMap:
    """Product ``f_0 f_1 ... f_d`` of the maps met going around the vertex.

    ``f_i`` carries the partner of the edge crossed at corner ``P_i`` back
    onto that edge, so the product fixes ``P_0``.
    """
    orbit = tuple(orbit)
    if report is None:
        report = quadrant_check(spec, orbit)
    if not report.standard:
        raise NonStandardQuadrants(report.mismatch or "nonstandard vertex")
    n = len(spec.edges)
    maps = []
    for c in orbit:
        crossed = (c - 1) % n
        maps.append(spec.map_from(spec.partner(crossed)))
    return compose_all(maps)


def angle_of_holonomy(M: MoebiusMap, base: DSPoint, frame_sign: int = 1) -> float:
    """Signed cone angle of a vertex from its holonomy.

    The magnitude is ``arccosh(|tr M| / 2)``.  The sign compares the
    derivative of ``M`` at the alpha coordinate of ``base`` with 1;
    ``frame_sign`` flips it for a reversed local frame.
    """
    for p in (base.x, base.y):
        if not apply(M, p).close_to(p, FIX_TOL):
            raise NotFixingBase(f"holonomy does not fix {base}")
    if is_identity(M, 1e-9):
        return 0.0
    t = trace_abs(M)
    if t < 2.0 - 1e-9:
        raise EllipticHolonomy(f"|trace| = {t} < 2: not a standard singularity")
    mag = math.acosh(max(t, 2.0) / 2.0)
    if mag == 0.0:
        return 0.0
    ld = log_derivative_at_fixed_point(M, base.x)
    return ANGLE_SIGN * frame_sign * math.copysign(mag, ld)


def polygon_area(spec: PolygonSpec) -> float:
    """Area by Green's formula in the chart.

    With ``Q = 1 / (y - x)`` one has ``dQ/dx = 1 / (x - y)^2``, so the area
    is the boundary integral of ``Q dy``; only beta edges contribute.
    """
    xy = spec.geometry.xy
    n = len(xy)
    total = 0.0
    for i, e in enumerate(spec.edges):
        if e.kind != BETA:
            continue
        X, ya = xy[i]
        yb = xy[(i + 1) % n][1]
        total += math.log(abs(yb - X)) - math.log(abs(ya - X))
    return total


# ----------------------------------------------------------------------
# glued surfaces


@dataclass(frozen=True)
class GluedSurface:
    spec: PolygonSpec
    vertex_orbits: tuple[tuple[int, ...], ...]
    quadrant_report: tuple[QuadrantReport, ...]
    holonomies: tuple[MoebiusMap | None, ...]
    angles: tuple[float | None, ...]
    area: float
    sections: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertex_orbits) - len(self.spec.pairings) + 1

    @property
    def all_standard(self) -> bool:
        return all(r.standard for r in self.quadrant_report)

    def singular_orbits(self, tol: float = 1e-9) -> list[int]:
        return [i for i, a in enumerate(self.angles) if a is not None and abs(a) > tol]

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "area": self.area,
            "euler_characteristic": self.euler_characteristic,
            "gauss_bonnet_residual": gauss_bonnet_check(self) if self.all_standard else None,
            "vertices": [
                {
                    "orbit": list(o),
                    "corners": [self.spec.corner(c).as_list() for c in o],
                    "quadrants": r.to_json(),
                    "holonomy": None if h is None else h.rows(),
                    "angle": a,
                }
                for o, r, h, a in zip(self.vertex_orbits, self.quadrant_report, self.holonomies, self.angles)
            ],
            "spec": self.spec.to_json(),
        }


def gauss_bonnet_check(surface: GluedSurface) -> float:
    """``|area - sum of angles|``."""
    if not surface.all_standard or any(a is None for a in surface.angles):
        raise NonStandardQuadrants("Gauss-Bonnet needs every vertex to be standard")
    return abs(surface.area - sum(surface.angles))


def glue(spec: PolygonSpec, require_gauss_bonnet: bool = True, sections=None, params=None) -> GluedSurface:
    """Vertex orbits, quadrant reports, holonomies, angles and area of a spec."""
    orbits = tuple(vertex_orbits(spec))
    chi = len(orbits) - len(spec.pairings) + 1
    if chi != 0:
        raise ValidationError(f"the gluing is not a torus (Euler characteristic {chi})")
    reports, hols, angles = [], [], []
    for o in orbits:
        r = quadrant_check(spec, o)
        reports.append(r)
        if r.standard:
            h = vertex_holonomy(spec, o, r)
            hols.append(h)
            angles.append(angle_of_holonomy(h, spec.corner(o[0])))
        else:
            hols.append(None)
            angles.append(None)
    surf = GluedSurface(spec, orbits, tuple(reports), tuple(hols), tuple(angles), polygon_area(spec),
                        dict(sections or {}), dict(params or {}))
    if require_gauss_bonnet:
        if not surf.all_standard:
            bad = [r.mismatch for r in reports if not r.standard]
            raise NonStandardQuadrants("; ".join(m for m in bad if m))
        res = gauss_bonnet_check(surf)
        if res > GAUSS_BONNET_TOL:
            raise GaussBonnetViolation(f"area {surf.area} but angles sum to {sum(angles)} (residual {res:.3g})")
    return surf


# ----------------------------------------------------------------------
# the two families


def _alpha(s: DSPoint, e: DSPoint, o: str) -> Edge:
    return Edge(ALPHA, s, e, o)


def _beta(s: DSPoint, e: DSPoint, o: str) -> Edge:
    return Edge(BETA, s, e, o)


def _finish(edges, pairings, sections, params) -> GluedSurface:
    raw = PolygonSpec(tuple(edges), tuple(pairings), check=False)
    spec, index = raw.canonical()
    spec = PolygonSpec(spec.edges, spec.pairings, check=True)
    secs = {k: tuple(index[i] for i in v if i in index) for k, v in sections.items()}
    return glue(spec, sections=secs, params=params)


def rect_torus_spec(theta: float, x) -> tuple[list[Edge], list[Pairing]]:
    """The rectangle ``[1, inf] x [0, y_theta]`` with the pairings g, h and gh."""
    fam = build_one_sing(theta, x)
    X, Xp = fam.x, fam.x_prime
    Y0, YT = ZERO, point(fam.y_theta)
    P = DSPoint
    c = [P(ONE, Y0), P(Xp, Y0), P(INF, Y0), P(INF, YT), P(X, YT), P(ONE, YT)]
    edges = [
        _alpha(c[0], c[1], "+"),
        _alpha(c[1], c[2], "+"),
        _beta(c[2], c[3], "+"),
        _alpha(c[3], c[4], "-"),
        _alpha(c[4], c[5], "-"),
        _beta(c[5], c[0], "-"),
    ]
    pairings = [Pairing(3, 0, fam.gh), Pairing(4, 1, fam.h), Pairing(2, 5, fam.g)]
    return edges, pairings


def build_T_theta_x(theta: float, x) -> GluedSurface:
    fam = build_one_sing(theta, x)
    edges, pairings = rect_torus_spec(theta, fam.x)
    params = {"family": "rect-torus", "theta": theta, "x": fam.x.as_list()}
    return _finish(edges, pairings, {BETA: (0, 1), ALPHA: (5,)}, params)


def lshape_torus_spec(theta: float, x, y: float) -> tuple[list[Edge], list[Pairing]]:
    fam = build_two_sing(theta, x, y)
    X, Xp = fam.x, fam.x_prime
    Y0, Y, Yp, Ypr = ZERO, point(fam.y), point(fam.y_plus), point(fam.y_prime)
    P = DSPoint
    c = [P(ONE, Y0), P(Xp, Y0), P(INF, Y0), P(INF, Y), P(X, Y), P(X, Yp), P(ONE, Yp), P(ONE, Ypr)]
    edges = [
        _alpha(c[0], c[1], "+"),
        _alpha(c[1], c[2], "+"),
        _beta(c[2], c[3], "+"),
        _alpha(c[3], c[4], "-"),
        _beta(c[4], c[5], "+"),
        _alpha(c[5], c[6], "-"),
        _beta(c[6], c[7], "-"),
        _beta(c[7], c[0], "-"),
    ]
    h1 = fam.h1 if fam.h1 is not None else IDENTITY
    g1 = fam.g1 if fam.g1 is not None else IDENTITY
    pairings = [Pairing(3, 0, h1), Pairing(5, 1, fam.h2), Pairing(4, 7, g1), Pairing(2, 6, fam.g2)]
    return edges, pairings


def build_T_theta_xy(theta: float, x, y: float) -> GluedSurface:
    fam = build_two_sing(theta, x, y)
    LShapedPolygon(theta, fam.x, fam.y)  # domain check
    edges, pairings = lshape_torus_spec(theta, fam.x, fam.y)
    params = {"family": "l-torus", "theta": theta, "x": fam.x.as_list(), "y": fam.y, "y_plus": fam.y_plus}
    return _finish(edges, pairings, {BETA: (0, 1), ALPHA: (6, 7)}, params)


# ----------------------------------------------------------------------
# leaves


@dataclass(frozen=True)
class LeafTrace:
    kind: str
    start: DSPoint
    segments: tuple[tuple[DSPoint, DSPoint], ...]
    jumps: tuple[tuple[int, MoebiusMap], ...]
    crossing_counts: dict
    status: str  # "max_jumps", "closed" or "corner"
    corner: DSPoint | None = None

    @property
    def closed(self) -> bool:
        return self.status == "closed"

    def to_csv(self, spec: PolygonSpec) -> str:
        geo = spec.geometry
        buf = io.StringIO()
        buf.write("segment,x0,y0,x1,y1,jump_edge,status\n")
        last = len(self.segments) - 1
        for i, (a, b) in enumerate(self.segments):
            (x0, y0), (x1, y1) = geo.to_chart(a), geo.to_chart(b)
            jump = str(self.jumps[i][0]) if i < len(self.jumps) else ""
            status = self.status if i == last else ""
            buf.write(f"{i},{x0:.17g},{y0:.17g},{x1:.17g},{y1:.17g},{jump},{status}\n")
        return buf.getvalue()

    def to_svg(self, spec: PolygonSpec, size: int = 1000) -> str:
        geo = spec.geometry
        xs = [p[0] for p in geo.xy]
        ys = [p[1] for p in geo.xy]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
        sx = size / (x1 - x0)
        sy = size / (y1 - y0)

        def pt(X: float, Y: float) -> str:
            return f"{(X - x0) * sx:.6f},{(y1 - Y) * sy:.6f}"

        outline = " ".join(pt(X, Y) for X, Y in geo.xy)
        path = []
        for a, b in self.segments:
            path.append("M" + pt(*geo.to_chart(a)) + " L" + pt(*geo.to_chart(b)))
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" width="{size}" height="{size}">\n'
            f'<polygon points="{outline}" fill="none" stroke="black" stroke-width="2"/>\n'
            f'<path d="{" ".join(path)}" fill="none" stroke="crimson" stroke-width="1"/>\n'
            "</svg>\n"
        )


def _exit_edges(spec: PolygonSpec, kind: str) -> list[int]:
    """Edges through which a leaf of the given kind leaves the polygon."""
    if kind == BETA:
        return [i for i, e in enumerate(spec.edges) if e.kind == ALPHA and e.orientation == "-"]
    return [i for i, e in enumerate(spec.edges) if e.kind == BETA and e.orientation == "+"]


def _entry_edges(spec: PolygonSpec, kind: str) -> list[int]:
    if kind == BETA:
        return [i for i, e in enumerate(spec.edges) if e.kind == ALPHA and e.orientation == "+"]
    return [i for i, e in enumerate(spec.edges) if e.kind == BETA and e.orientation == "-"]


def _axes(kind: str) -> tuple[int, int]:
    """(fixed, moving) chart axes of a leaf; beta leaves keep x fixed."""
    return (0, 1) if kind == BETA else (1, 0)


def _span(spec: PolygonSpec, e: int, axis: int) -> tuple[float, float]:
    xy = spec.geometry.xy
    n = len(xy)
    a, b = xy[e][axis], xy[(e + 1) % n][axis]
    return (a, b) if a <= b else (b, a)


def _level(spec: PolygonSpec, e: int, axis: int) -> float:
    return spec.geometry.xy[e][axis]


def _next_exit(spec: PolygonSpec, kind: str, F: float, V: float, strict: bool) -> int:
    fa, ma = _axes(kind)
    best, best_level = None, math.inf
    for e in _exit_edges(spec, kind):
        lo, hi = _span(spec, e, fa)
        if not (lo - SPAN_TOL <= F < hi - SPAN_TOL):
            continue
        lv = _level(spec, e, ma)
        if (lv > V + SPAN_TOL if strict else lv >= V - SPAN_TOL) and lv < best_level:
            best, best_level = e, lv
    if best is None:
        raise ValidationError("leaf leaves the polygon without meeting a paired edge")
    return best


def _leaf_point(kind: str, fixed: ProjectivePoint, moving: ProjectivePoint) -> DSPoint:
    return DSPoint(fixed, moving) if kind == BETA else DSPoint(moving, fixed)


def _fixed_of(kind: str, p: DSPoint) -> ProjectivePoint:
    return p.x if kind == BETA else p.y


def _runs_along_boundary(spec: PolygonSpec, kind: str, F: float, v0: float, v1: float) -> bool:
    fa, ma = _axes(kind)
    leaf_kind = BETA if kind == BETA else ALPHA
    for i, e in enumerate(spec.edges):
        if e.kind != leaf_kind:
            continue
        if abs(_level(spec, i, fa) - F) > CORNER_TOL:
            continue
        lo, hi = _span(spec, i, ma)
        if min(hi, v1) - max(lo, v0) > CORNER_TOL:
            return True
    return False


def trace_leaf(
    surface: GluedSurface | PolygonSpec, start: DSPoint, kind: str, max_jumps: int = 100, close_tol: float = 1e-8
) -> LeafTrace:
    """Follow a lightlike leaf in its positive direction through the gluing.

    Beta leaves go up (x fixed), alpha leaves go right (y fixed).  A leaf
    leaving through a paired edge continues from the image point.  Tracing
    stops after ``max_jumps`` jumps, when the leaf comes back to ``start``
    (closed leaf, within ``close_tol`` in the chart) or when an interior leaf runs into a corner; the last is a
    reported outcome since leaves through singular points are legitimate.
    """
    spec = surface.spec if isinstance(surface, GluedSurface) else surface
    kind = _kind(kind)
    geo = spec.geometry
    fa, ma = _axes(kind)
    S = geo.to_chart(start)
    segments, jumps = [], []
    counts: dict[int, int] = {}
    p = start
    status, corner = "max_jumps", None
    for step in range(max_jumps + 1):
        C = geo.to_chart(p)
        F, V = C[fa], C[ma]
        e = _next_exit(spec, kind, F, V, strict=False)
        edge = spec.edges[e]
        hit = _leaf_point(kind, _fixed_of(kind, p), edge.fixed)
        Hm = _level(spec, e, ma)
        if step > 0 and abs(S[fa] - F) <= close_tol and V - close_tol <= S[ma] <= Hm + close_tol:
            segments.append((p, start))
            status = "closed"
            break
        segments.append((p, hit))
        lo, hi = _span(spec, e, fa)
        if min(abs(F - lo), abs(F - hi)) <= CORNER_TOL and not _runs_along_boundary(spec, kind, F, V, Hm):
            status, corner = "corner", hit
            break
        if step == max_jumps:
            break
        k = spec.pairing_of[e]
        M = spec.pairings[k].map_from(e)
        partner = spec.edges[spec.partner(e)]
        p = _leaf_point(kind, apply(M, _fixed_of(kind, hit)), partner.fixed)
        jumps.append((e, M))
        counts[k] = counts.get(k, 0) + (1 if e == spec.pairings[k].top else -1)
    return LeafTrace(kind, start, tuple(segments), tuple(jumps), counts, status, corner)


def section_interval(spec: PolygonSpec, section, kind: str) -> tuple[ProjectivePoint, ProjectivePoint]:
    """End points of the union of the section edges, in the leaf-transverse coordinate."""
    kind = _kind(kind)
    fa, _ = _axes(kind)
    entries = set(_entry_edges(spec, kind))
    spans = []
    for e in section:
        if e not in entries:
            raise ValidationError(f"edge {e} is not crossed by {kind} leaves entering the polygon")
        lo, hi = _span(spec, e, fa)
        edge = spec.edges[e]
        a, b = edge.arc()
        spans.append((lo, hi, a, b))
    spans.sort(key=lambda s: s[0])
    for (lo0, hi0, _, _), (lo1, _, _, _) in zip(spans, spans[1:]):
        if abs(hi0 - lo1) > SPAN_TOL * max(1.0, abs(hi0)):
            raise ValidationError("section edges do not form one interval")
    return spans[0][2], spans[-1][3]


def _section_of(surface, section, kind):
    if section is None:
        if not isinstance(surface, GluedSurface) or kind not in surface.sections:
            raise ValidationError(f"no default {kind} section for this surface")
        return surface.sections[kind]
    return tuple(section)


def traced_return(surface: GluedSurface, t: ProjectivePoint, kind: str, section=None, max_jumps: int = 64) -> ProjectivePoint:
    """First return of the leaf through ``t`` on the section, by tracing it.

    ``t`` is the transverse coordinate on the section (x for beta leaves,
    y for alpha leaves).
    """
    spec = surface.spec
    kind = _kind(kind)
    section = _section_of(surface, section, kind)
    geo = spec.geometry
    fa, _ = _axes(kind)
    tc = geo.coord(t)
    src = None
    for e in section:
        lo, hi = _span(spec, e, fa)
        if lo - SPAN_TOL <= tc < hi - SPAN_TOL or (src is None and abs(tc - lo) <= SPAN_TOL):
            src = e
            break
    if src is None:
        raise ValidationError(f"{t} is not on the section")
    p = _leaf_point(kind, t, spec.edges[src].fixed)
    for _ in range(max_jumps):
        C = geo.to_chart(p)
        e = _next_exit(spec, kind, C[fa], C[1 - fa], strict=True)
        M = spec.map_from(e)
        dest = spec.partner(e)
        img = apply(M, _fixed_of(kind, p))
        if dest in section:
            return img
        p = _leaf_point(kind, img, spec.edges[dest].fixed)
    raise NoReturn(f"leaf through {t} did not return within {max_jumps} jumps")


def first_return(surface: GluedSurface, kind: str, section=None, max_depth: int | None = None) -> CircleMap:
    """First-return map of a lightlike foliation to a section, piece by piece.

    Intervals of the section are pushed along the leaves: each one is split
    where the leaves start meeting a different exit edge, carried through the
    pairing, and either lands back on the section (a branch of the return
    map) or is pushed further.  The result is exact piecewise Moebius data.
    """
    spec = surface.spec
    kind = _kind(kind)
    section = _section_of(surface, section, kind)
    geo = spec.geometry
    fa, ma = _axes(kind)
    left, right = section_interval(spec, section, kind)
    if max_depth is None:
        max_depth = 4 * len(spec.edges)
    exits = _exit_edges(spec, kind)
    work = []
    for e in section:
        a, b = spec.edges[e].arc()
        work.append((a, b, a, b, e, IDENTITY, 0))
    pieces = []
    while work:
        oa, ob, ca, cb, e, acc, depth = work.pop()
        if depth >= max_depth:
            raise NoReturn("leaves keep missing the section; it is not a closed transversal")
        A, B = geo.coord(ca), geo.coord(cb)
        V = _level(spec, e, ma)
        cuts = [(A, ca)]
        for x in exits:
            edge = spec.edges[x]
            for q in (edge.moving(edge.start), edge.moving(edge.end)):
                Q = geo.coord(q)
                if A + SPAN_TOL < Q < B - SPAN_TOL:
                    cuts.append((Q, q))
        cuts.sort(key=lambda c: c[0])
        cuts.append((B, cb))
        acc_inv = acc.inverse()
        for (Q0, q0), (Q1, q1) in zip(cuts, cuts[1:]):
            if Q1 - Q0 <= SPAN_TOL:
                continue
            x = _next_exit(spec, kind, 0.5 * (Q0 + Q1), V, strict=True)
            M = spec.map_from(x)
            dest = spec.partner(x)
            o0 = oa if q0 is ca else apply(acc_inv, q0)
            o1 = ob if q1 is cb else apply(acc_inv, q1)
            new_acc = compose(M, acc)
            if dest in section:
                pieces.append((o0, o1, new_acc))
            else:
                work.append((o0, o1, apply(M, q0), apply(M, q1), dest, new_acc, depth + 1))
    pieces.sort(key=lambda pc: geo.coord(pc[0]))
    merged = [pieces[0]]
    for pc in pieces[1:]:
        if pc[2].close_to(merged[-1][2], 1e-12):
            merged[-1] = (merged[-1][0], pc[1], pc[2])
        else:
            merged.append(pc)
    merged[0] = (left, merged[0][1], merged[0][2])
    return CircleMap.from_pieces(left, right, merged)


def homology_counts(trace: LeafTrace) -> dict[int, int]:
    """Signed crossings of each pairing curve along a traced leaf."""
    return dict(sorted(trace.crossing_counts.items()))


__all__ = [
    "ALPHA",
    "BETA",
    "ANGLE_SIGN",
    "Edge",
    "Pairing",
    "PolygonSpec",
    "QuadrantReport",
    "GluedSurface",
    "LeafTrace",
    "validate_spec",
    "vertex_orbits",
    "euler_characteristic",
    "corner_quadrants",
    "quadrant_check",
    "vertex_holonomy",
    "angle_of_holonomy",
    "polygon_area",
    "gauss_bonnet_check",
    "glue",
    "rect_torus_spec",
    "lshape_torus_spec",
    "build_T_theta_x",
    "build_T_theta_xy",
    "trace_leaf",
    "traced_return",
    "first_return",
    "section_interval",
    "homology_counts",
    "y_theta",
]
