"""Solvers for prescribed rotation data, and the surgery on return maps.

The one-singularity family is parametrized by ``s`` in [0, 1] through
``x = g^s(1)``.  Along it ``h_x = g^s h_1``, which is what makes the word
evaluations below monotone in ``s``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .desitter import y_theta
from .errors import (
    BudgetExceeded,
    DomainError,
    IncompatibleCircle,
    NoRoot,
    PlateauWarning,
    ValidationError,
    VerificationFailed,
)
from .glue import ALPHA, GluedSurface, trace_leaf
from .hiet import CircleMap, build_one_sing, build_two_sing, g_theta, s_of_x, x_of_s
from .moebius import (
    IDENTITY,
    MoebiusMap,
    ProjectivePoint,
    angle_coordinate,
    apply,
    compose,
    compose_all,
    fixed_points,
    hyperbolic_power,
    point,
    trace_abs,
)
from .rotation import (
    ComposedCircleMap,
    RotationNumber,
    ShiftedLift,
    circle_distance,
    cyclic_order_matches,
    iterate_lift,
    rotation_number,
)

RETURN_TOL = 1e-9
PLATEAU_WIDTH = 1e-12


def _point_json(p: ProjectivePoint) -> list[float]:
    return p.as_list()


# ----------------------------------------------------------------------
# words


def rotation_word(p: int, q: int) -> str:
    """Branch coding of the rigid ``p/q`` orbit of 0, cut at ``1 - p/q``.

    Points of ``[0, 1 - p/q)`` get ``a``, the others ``b``.
    """
    if q < 1 or math.gcd(p, q) != 1:
        raise ValidationError(f"{p}/{q} is not a reduced fraction")
    r = Fraction(p, q)
    t = Fraction(0)
    out = []
    for _ in range(q):
        out.append("a" if t < 1 - r else "b")
        t = (t + r) % 1
    return "".join(out)


def evaluate_word(word: str, A: MoebiusMap, B: MoebiusMap, start: ProjectivePoint) -> list[ProjectivePoint]:
    """Images of ``start`` under every prefix; the first letter acts first."""
    out = []
    p = start
    for c in word:
        p = apply(A if c == "a" else B, p)
        out.append(p)
    return out


def _family_map(theta: float, s: float) -> CircleMap:
    return build_one_sing(theta, x_of_s(theta, s)).E.to_circle_map()


def _coding(m: CircleMap, orbit, tol: float = RETURN_TOL) -> str:
    """Branch letters of the periodic orbit of [1].

    Its last point is ``x' = E^-1([1])``, the cut itself, which round-off can
    put on either side; that point gets ``b`` when it is within ``tol`` of
    the cut.  Every other point follows the half-open rule exactly.
    """
    out = ["a" if m.branch_index(t) == 0 else "b" for t in orbit]
    if len(m.cuts) > 1 and orbit:
        d = abs(orbit[-1] - m.cuts[1])
        if min(d, 1.0 - d) <= tol:
            out[-1] = "b"
    return "".join(out)


# ----------------------------------------------------------------------
# realization


@dataclass
class Realization:
    theta: float
    target: object
    x: ProjectivePoint
    s: float
    rotation: dict
    residual: float
    certificate: dict = field(default_factory=dict)
    iterations: int = 0
    warning: str | None = None
    history: list = field(default_factory=list)

    @property
    def x_real(self) -> float:
        return self.x.to_real()

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "target": self.target,
            "x": _point_json(self.x),
            "x_real": self.x_real,
            "s": self.s,
            "rotation": self.rotation,
            "residual": self.residual,
            "certificate": self.certificate,
            "iterations": self.iterations,
            "warning": self.warning,
        }


def realize_rational(theta: float, p: int, q: int, return_tol: float = RETURN_TOL, grid: int = 129) -> Realization:
    """``x`` such that the orbit of [1] under ``E_x`` is periodic with cyclic order ``p/q``.

    Solves ``F_s^q(0) = p`` for the lift ``F_s`` of ``E_{x(s)}`` in the chart
    where [1] is 0, then checks the orbit combinatorially: exact return,
    cyclic order and coding equal to the rotation word.
    """
    if not (0 < p < q) or math.gcd(p, q) != 1:
        raise ValidationError(f"need a reduced p/q in (0, 1), got {p}/{q}")
    word = rotation_word(p, q)

    def psi(s: float) -> float:
        return iterate_lift(_family_map(theta, s), 0.0, q) - p

    # rotation numbers near 1 live very close to s = 1, hence the geometric tail
    ss = np.linspace(0.0, 1.0, grid)[1:-1]
    tail = 1.0 - 2.0 ** -np.arange(int(math.log2(grid)) + 1, 46)
    ss = np.unique(np.concatenate([ss, tail]))
    lo = hi = None
    prev_s, prev_v = 0.0, -float(p)  # the limit at s = 0 (x = 1) is a fixed point
    for s in ss:
        s = float(s)
        try:
            v = psi(s)
        except ValidationError as exc:
            raise NoRoot(f"{p}/{q} needs x beyond double precision (s > {prev_s!r})") from exc
        if v == 0.0:
            lo = hi = s
            break
        if prev_v < 0.0 < v:
            lo, hi = prev_s, s
            break
        prev_s, prev_v = s, v
    if lo is None:
        raise NoRoot(f"no sign change of the return equation for {p}/{q}")
    root = lo if lo == hi else brentq(psi, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    x = x_of_s(theta, root)
    m = build_one_sing(theta, x).E.to_circle_map()
    pts = [0.0]
    t = 0.0
    for _ in range(q):
        t = m.lift(t)
        pts.append(t)
    ret = pts[q] - p
    orbit = tuple(v % 1.0 for v in pts[:q])
    cert = {
        "word": word,
        "return_error": abs(ret),
        "orbit": list(orbit),
        "coding": _coding(m, orbit),
    }
    if abs(ret) > return_tol:
        raise VerificationFailed(f"orbit of [1] misses itself by {ret:.3g}")
    if not cyclic_order_matches(orbit, p, q):
        raise VerificationFailed("orbit of [1] does not have the cyclic order of the rotation")
    if cert["coding"] != word:
        raise VerificationFailed(f"coding {cert['coding']} differs from the rotation word {word}")
    cert["cyclic_order"] = [p, q]
    rot = {"kind": "rational", "p": p, "q": q, "value": p / q, "error_bound": 0.0}
    return Realization(theta, [p, q], x, root, rot, abs(ret), cert, q)


def realize_irrational(
    theta: float,
    rho_target: float,
    tol: float = 1e-6,
    budget: int = 2_000_000,
    q_max: int = 64,
    max_steps: int = 200,
) -> Realization:
    """``x`` with ``|rho(E_x) - rho_target| <= tol``, by bisection on ``s``.

    ``s -> tau(E_{x(s)})`` is continuous, non-decreasing and runs from 0 to
    1.  Each step measures the rotation number just well enough to place it
    on one side of the target.  If the bracket in ``s`` shrinks below
    ``PLATEAU_WIDTH`` first, the target sits at the edge of a mode-locked
    plateau; the plateau point is returned with a ``PlateauWarning``.
    """
    target = rho_target % 1.0
    if target == 0.0:
        m = build_one_sing(theta, 1.0).E.to_circle_map()
        r = rotation_number(m)
        return Realization(theta, rho_target, point(1.0), 0.0, r.to_json(), 0.0,
                           {"note": "x = 1 = inf; rho = 0 also holds on a plateau of x just above 1"}, r.iterations)
    s_lo, s_hi = 0.0, 1.0
    history = []
    total = 0
    best = None
    for _ in range(max_steps):
        s = 0.5 * (s_lo + s_hi)
        m = _family_map(theta, s)
        try:
            r = rotation_number(m, budget=budget, tol=tol / 2, q_max=q_max, target=target)
        except BudgetExceeded as exc:
            r = exc.best
            res = Realization(theta, rho_target, x_of_s(theta, s), s, r.to_json(), abs(r.tau - target),
                              {"bracket_s": [s_lo, s_hi]}, total + r.iterations, "budget", history)
            raise BudgetExceeded(f"could not decide the side of the target at s = {s}", best=res) from exc
        total += r.iterations
        tau = r.tau
        lo, hi = r.bracket if r.bracket is not None else (tau, tau)
        best = (s, r)
        history.append({"s_lo": s_lo, "s_hi": s_hi, "s": s, "tau": tau, "lo": lo, "hi": hi})
        if target < lo:
            s_hi = s
        elif target > hi:
            s_lo = s
        elif hi - lo <= 2 * tol and max(hi - target, target - lo) <= tol:
            return Realization(theta, rho_target, x_of_s(theta, s), s, r.to_json(), abs(tau - target),
                               {"bracket": [lo, hi], "bracket_s": [s_lo, s_hi]}, total, None, history)
        else:
            res = Realization(theta, rho_target, x_of_s(theta, s), s, r.to_json(), abs(tau - target),
                              {"bracket": [lo, hi], "bracket_s": [s_lo, s_hi]}, total, "budget", history)
            raise BudgetExceeded(f"bracket [{lo}, {hi}] still straddles the target at s = {s}", best=res)
        if s_hi - s_lo < PLATEAU_WIDTH:
            msg = f"mode-locked plateau at rho = {r.value:.17g} near the target; residual {abs(tau - target):.3g}"
            warnings.warn(msg, PlateauWarning, stacklevel=2)
            return Realization(theta, rho_target, x_of_s(theta, s), s, r.to_json(), abs(tau - target),
                               {"bracket_s": [s_lo, s_hi]}, total, "plateau", history)
    s, r = best
    res = Realization(theta, rho_target, x_of_s(theta, s), s, r.to_json(), abs(r.tau - target),
                      {"bracket_s": [s_lo, s_hi]}, total, "budget", history)
    raise BudgetExceeded("bisection step budget exhausted", best=res)


# ----------------------------------------------------------------------
# pairs of rotation numbers


@dataclass
class PairRealization:
    theta: float
    target: tuple[float, float]
    x: ProjectivePoint
    y: float
    rho_alpha: dict
    rho_beta: dict
    residuals: tuple[float, float]
    evaluations: int
    certified: bool

    @property
    def residual(self) -> float:
        return max(self.residuals)

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "target": list(self.target),
            "x": _point_json(self.x),
            "x_real": self.x.to_real(),
            "y": self.y,
            "rho_alpha": self.rho_alpha,
            "rho_beta": self.rho_beta,
            "residuals": list(self.residuals),
            "evaluations": self.evaluations,
            "certified": self.certified,
        }


def _pair_point(theta: float, u: float, v: float) -> tuple[ProjectivePoint, float]:
    """``u`` in (0, 1] runs over x in (1, inf]; ``v`` in (0, 1] over the allowed y."""
    x = ProjectivePoint(1.0, 1.0 - u)
    xv = math.inf if u >= 1.0 else 1.0 / (1.0 - u)
    yt = y_theta(theta)
    y_low = 0.0 if xv == math.inf else max(0.0, 1.0 - math.exp(-theta) * xv)
    y = yt if v >= 1.0 else y_low + v * (yt - y_low)
    return x, y


def _measure(m, tol: float, budget: int) -> RotationNumber:
    try:
        return rotation_number(m, budget=budget, tol=tol)
    except BudgetExceeded as exc:
        return exc.best


def measure_pair(theta: float, x, y: float, tol: float = 1e-4, budget: int = 20_000) -> tuple[RotationNumber, RotationNumber, float]:
    """(rho(F), rho(E), rho(E^-1)) for an interior point of the domain."""
    fam = build_two_sing(theta, x, y)
    rf = _measure(fam.F.to_circle_map(), tol, budget)
    re = _measure(fam.E.to_circle_map(), tol, budget)
    return rf, re, (-re.value) % 1.0


def realize_pair(
    theta: float,
    rho_alpha: float,
    rho_beta: float,
    tol: float = 1e-3,
    grid: int = 24,
    rounds: int = 10,
    zoom: int = 9,
    budget: int = 20_000,
    starts: int = 3,
) -> PairRealization:
    """``(x, y)`` with ``rho(F) ~ rho_alpha`` and ``rho(E^-1) ~ rho_beta``.

    A coarse grid over the domain (its edge ``y = y_theta`` and its edge
    ``x = inf`` included) followed by repeated zooms around the best few
    cells.  The residuals are part of the result; failure raises
    ``BudgetExceeded`` carrying the best point found.
    """
    ta, tb = rho_alpha % 1.0, rho_beta % 1.0
    cache: dict[tuple[float, float], tuple] = {}

    def evaluate(u: float, v: float):
        key = (u, v)
        if key not in cache:
            x, y = _pair_point(theta, u, v)
            try:
                rf, _re, rb = measure_pair(theta, x, y, tol=tol / 4, budget=budget)
            except ValidationError:
                # too close to a corner of D to build the maps in doubles
                cache[key] = (math.inf, (math.inf, math.inf), x, y, None, None, None)
                return cache[key]
            res = (circle_distance(rf.value, ta), circle_distance(rb, tb))
            cache[key] = (max(res), res, x, y, rf, rb, _re)
        return cache[key]

    us = np.linspace(0.0, 1.0, grid + 1)[1:]
    vs = np.linspace(0.0, 1.0, grid + 1)[1:]
    scored = sorted(((evaluate(float(u), float(v))[0], float(u), float(v)) for u in us for v in vs))
    best = scored[0]
    centers = scored[:starts]
    h = 1.0 / grid
    for _ in range(rounds):
        if best[0] <= tol:
            break
        new = []
        for _, uc, vc in centers:
            for u in np.linspace(uc - h, uc + h, zoom):
                for v in np.linspace(vc - h, vc + h, zoom):
                    u = float(min(max(u, 1e-9), 1.0))
                    v = float(min(max(v, 1e-9), 1.0))
                    new.append((evaluate(u, v)[0], u, v))
        new.sort()
        centers = new[:starts]
        if new[0][0] < best[0]:
            best = new[0]
        h /= 3.0
    _, res, x, y, rf, rb, re = evaluate(best[1], best[2])
    out = PairRealization(
        theta,
        (rho_alpha, rho_beta),
        x,
        y,
        rf.to_json(),
        {"value": rb, "of_E": re.to_json()},
        res,
        len(cache),
        max(res) <= tol,
    )
    if max(res) > tol:
        raise BudgetExceeded(f"best residual {max(res):.3g} > {tol:.3g}", best=out)
    return out


# ----------------------------------------------------------------------
# surgery


@dataclass(frozen=True)
class AffineCircle:
    """A circle with an affine structure.

    ``translation``: R/Z in the coordinate ``coord``.  ``dilation``:
    R+* / <mu id> in the coordinate ``coord`` (a Moebius map whose values
    are positive on the circle).  ``log_coordinate`` turns either into a
    coordinate in which one period has length 1 and automorphisms are
    translations.
    """

    kind: str
    mu: float | None = None
    coord: MoebiusMap = IDENTITY

    def __post_init__(self) -> None:
        if self.kind not in ("translation", "dilation"):
            raise ValidationError(f"unknown affine circle kind {self.kind!r}")
        if self.kind == "dilation" and not (self.mu is not None and self.mu > 1.0):
            raise ValidationError("a dilation circle needs mu > 1")

    def log_coordinate(self, p: ProjectivePoint) -> float:
        v = apply(self.coord, p)
        t = v.a / v.b if v.b != 0.0 else math.inf
        if self.kind == "translation":
            return t
        if not t > 0.0:
            raise IncompatibleCircle(f"{p} is not on the dilation circle")
        return math.log(t) / math.log(self.mu)

    def from_log(self, l: float) -> ProjectivePoint:
        t = l if self.kind == "translation" else self.mu**l
        return apply(self.coord.inverse(), point(t))

    def automorphism(self, u: float) -> MoebiusMap:
        """The Moebius map acting as ``l -> l + u`` in the log coordinate."""
        if self.kind == "translation":
            step = MoebiusMap(1.0, u, 0.0, 1.0)
        else:
            lam = self.mu**u
            r = math.sqrt(lam)
            step = MoebiusMap(r, 0.0, 0.0, 1.0 / r)
        return compose_all([self.coord.inverse(), step, self.coord])

    def to_json(self) -> dict:
        return {"kind": self.kind, "mu": self.mu, "coord": self.coord.rows()}


def closed_leaf_circle(surface: GluedSurface, start=None) -> tuple[AffineCircle, MoebiusMap]:
    """Affine structure of the closed alpha-leaf through ``start``.

    The leaf ``y = y0`` is RP^1 minus ``y0``; its holonomy is hyperbolic and
    fixes ``y0`` and a second point ``f``.  In ``psi = 1/(f - y0) - 1/(x - y0)``
    the holonomy is ``psi -> mu psi``, so the leaf is ``R+* / <mu>``.
    ``mu`` is read off the trace of the holonomy.
    """
    from .desitter import DSPoint

    if start is None:
        start = DSPoint.of(2.0, 0.0)
    tr = trace_leaf(surface, start, ALPHA, max_jumps=16)
    if not tr.closed:
        raise IncompatibleCircle("the alpha-leaf through the start point is not closed")
    hol = compose_all([m for _, m in reversed(tr.jumps)])
    mu = math.exp(2.0 * math.acosh(trace_abs(hol) / 2.0))
    y0 = start.y
    a, b = fixed_points(hol)
    f = b if a.close_to(y0, 1e-9) else a
    fv, yv = f.to_real(), y0.to_real()
    d = fv - yv
    coord = MoebiusMap.from_rows([[1.0, -fv], [d, -d * yv]])
    return AffineCircle("dilation", mu, coord), hol


@dataclass
class SurgeryResult:
    map: object
    rotation: RotationNumber
    parameter: float
    automorphism: object = None

    def to_json(self) -> dict:
        return {"parameter": self.parameter, "rotation": self.rotation.to_json()}


def automorphism_circle_map(P: CircleMap, circle: AffineCircle, u: float):
    """``T_u`` as a degree-one lift in the chart of ``P``."""
    left, right = P.interval
    l0 = circle.log_coordinate(left)
    l1 = circle.log_coordinate(right)
    if abs((l1 - l0) - 1.0) > 1e-9:
        raise IncompatibleCircle(f"the section is {l1 - l0:.6g} periods of the affine circle, not 1")
    k = math.floor(u)
    f = u - k
    if f == 0.0:
        base = CircleMap.from_pieces(left, right, [(left, right, IDENTITY)], chart=P.chart)
    else:
        cut = circle.from_log(l0 + 1.0 - f)
        pieces = [(left, cut, circle.automorphism(f)), (cut, right, circle.automorphism(f - 1.0))]
        base = CircleMap.from_pieces(left, right, pieces, chart=P.chart)
    return base if k == 0 else ShiftedLift(base, k)


def surgery_compose(P: CircleMap, circle: AffineCircle, u: float, tol: float = 1e-8, budget: int = 200_000, q_max: int = 64) -> SurgeryResult:
    """``P o T_u`` and its rotation number."""
    T = automorphism_circle_map(P, circle, u)
    Q = ComposedCircleMap(P, T)
    try:
        r = rotation_number(Q, budget=budget, tol=tol, q_max=q_max)
    except BudgetExceeded as exc:
        r = exc.best
    return SurgeryResult(Q, r, u, T)


def surgery_sweep(P: CircleMap, circle: AffineCircle, n: int = 50, **kw) -> list[SurgeryResult]:
    return [surgery_compose(P, circle, float(u), **kw) for u in np.linspace(0.0, 1.0, n + 1)]


def surgery_realize(P: CircleMap, circle: AffineCircle, p: int, q: int, max_steps: int = 80, **kw) -> SurgeryResult:
    """A parameter ``u`` with ``rho(P o T_u) = p/q`` certified, by bisection.

    The lift ``tau(u)`` is non-decreasing with ``tau(1) = tau(0) + 1``, so
    exactly one lift of ``p/q`` lies in ``[tau(0), tau(0) + 1)``.
    """
    r0 = surgery_compose(P, circle, 0.0, **kw)
    tau0 = r0.rotation.tau
    target = p / q + math.ceil(tau0 - p / q)
    if r0.rotation.is_rational and Fraction(r0.rotation.p, r0.rotation.q) == Fraction(p, q) % 1:
        return r0
    lo, hi = 0.0, 1.0
    for _ in range(max_steps):
        u = 0.5 * (lo + hi)
        res = surgery_compose(P, circle, u, **kw)
        r = res.rotation
        if r.is_rational and abs(r.tau - target) < 1e-12:
            return res
        if r.tau - r.error_bound > target:
            hi = u
        elif r.tau + r.error_bound < target:
            lo = u
        else:
            break
    raise BudgetExceeded(f"no certified {p}/{q} found in the surgery loop", best=(lo, hi))


# ----------------------------------------------------------------------
# monotone words and rigidity


@dataclass
class WordScanReport:
    theta: float
    x_base: float
    word: str
    s_grid: list
    strictly_increasing: list
    in_range: list
    violations: list
    values: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("values")
        d["ok"] = self.ok
        return d


def _word_values(theta: float, h: MoebiusMap, word: str, s: float) -> list[ProjectivePoint]:
    g = g_theta(theta)
    gs = hyperbolic_power(g, s)
    B = compose(gs, h)
    A = compose(g, B)
    return evaluate_word(word, A, B, point(1.0))


def _unwrap_angles(values: list[ProjectivePoint]) -> np.ndarray:
    return np.unwrap(2.0 * np.pi * np.array([angle_coordinate(v) for v in values])) / (2.0 * np.pi)


def default_word_window(theta: float, x_base, word: str) -> float:
    """Largest ``w`` (halving from the family's end) keeping every prefix in [1, inf) at ``s = w``."""
    x_base = ProjectivePoint.parse(x_base)
    h = build_one_sing(theta, x_base).h
    w = 1.0 - s_of_x(theta, x_base)
    for _ in range(60):
        vals = _word_values(theta, h, word, w)
        if all(v.b > 0 and v.a / v.b >= 1.0 for v in vals):
            return w
        w /= 2.0
    return 0.0


def monotone_word_scan(theta: float, x_base, word: str, s_grid=None, n: int = 200) -> WordScanReport:
    """Check that ``s -> w_k(g^{s+1} h, g^s h)(1)`` increases for each prefix.

    Values live on RP^1; monotonicity is tested on the continuous lift of
    their angle coordinate, range containment on the affine value.
    """
    if not word or set(word) - {"a", "b"}:
        raise ValidationError("word must be a non-empty string over {a, b}")
    x_base = ProjectivePoint.parse(x_base)
    xv = x_base.to_real()
    if not (1.0 < xv < math.inf):
        raise DomainError("x_base must lie in (1, inf)")
    h = build_one_sing(theta, x_base).h
    if s_grid is None:
        s_grid = np.linspace(0.0, default_word_window(theta, x_base, word), n)
    s_grid = [float(s) for s in s_grid]
    rows = [_word_values(theta, h, word, s) for s in s_grid]
    inc, rng, bad, values = [], [], [], []
    for k in range(len(word)):
        col = [r[k] for r in rows]
        lifted = _unwrap_angles(col)
        diffs = np.diff(lifted)
        up = bool(np.all(diffs > 0.0))
        real = [v.a / v.b if v.b > 0 else math.inf for v in col]
        within = all(1.0 - 1e-12 <= t < math.inf for t in real)
        inc.append(up)
        rng.append(within)
        values.append(real)
        if not up:
            bad.append({"prefix": k + 1, "problem": "not strictly increasing", "min_step": float(diffs.min())})
        if not within:
            bad.append({"prefix": k + 1, "problem": "leaves [1, inf)"})
    return WordScanReport(theta, xv, word, s_grid, inc, rng, bad, values)


def rigidity_uniqueness_check(theta: float, p: int, q: int, n: int = 400) -> dict:
    """Unique zero crossing of ``w(g^{s+1} h, g^s h)(1) - 1`` on an s-grid.

    The base is the rational realization ``x_1``; ``s`` runs over the window
    where the prefixes of the word stay in [1, inf), which contains ``s = 0``
    (the root).  Also counts the sign changes of the return equation over
    the whole family, which must be exactly one.
    """
    if q == 1 and p % q == 0:
        m1 = build_one_sing(theta, 1.0).E.to_circle_map()
        mi = build_one_sing(theta, "inf").E.to_circle_map()
        ok = rotation_number(m1).fraction() == 0 and rotation_number(mi).fraction() == 0
        return {"p": 0, "q": 1, "unique": ok, "x": [1.0, math.inf], "note": "fixed-point locus"}
    real = realize_rational(theta, p, q)
    word = real.certificate["word"]
    w = default_word_window(theta, real.x, word)
    grid = np.concatenate([np.linspace(-w, 0.0, n // 2, endpoint=False), np.linspace(0.0, w, n - n // 2)])
    h = build_one_sing(theta, real.x).h
    vals = [_word_values(theta, h, word, float(s))[-1] for s in grid]
    lifted = _unwrap_angles(vals) - angle_coordinate(point(1.0))
    diffs = np.diff(lifted)
    monotone = bool(np.all(diffs > 0.0))
    k = np.round(lifted)
    signs = np.sign(lifted - k)
    crossings = int(np.sum((signs[:-1] < 0) & (signs[1:] >= 0) & (k[:-1] == k[1:])))
    crossings += int(np.sum(k[1:] != k[:-1]))
    family_s = np.linspace(0.0, 1.0, 257)[1:-1]
    psi = np.array([iterate_lift(_family_map(theta, float(s)), 0.0, q) - p for s in family_s])
    fam_changes = int(np.sum(np.diff(np.sign(psi)) != 0))
    unique = monotone and crossings == 1 and fam_changes == 1
    return {
        "p": p,
        "q": q,
        "word": word,
        "x": real.x_real,
        "s_root": real.s,
        "window": w,
        "monotone": monotone,
        "crossings": crossings,
        "family_sign_changes": fam_changes,
        "unique": unique,
    }
