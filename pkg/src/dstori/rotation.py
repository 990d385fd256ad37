"""Rotation numbers of degree-one circle maps.

Everything works on lifts ``F: R -> R`` with ``F(t + 1) = F(t) + 1``.  Any
object with a ``lift(t)`` method qualifies; ``lift_array`` is used when
present to scan many points at once.

Two facts drive the estimator.  If ``F^n(x) - x = m`` for some x then the
rotation number is exactly ``m / n`` (periodic point).  Otherwise
``F^n(x) - x`` stays strictly between two consecutive integers for every
x, which pins ``tau`` between ``floor(F^n(0)) / n`` and that plus ``1 / n``.
Intersecting those intervals over n gives a Farey-type bracket that is much
tighter than the plain ``1 / n`` bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import BudgetExceeded, DuplicatePoints, ValidationError
from .moebius import ProjectivePoint, angle_coordinate

Q_MAX = 64
RETURN_TOL = 1e-9
# slack on floor() decisions to absorb round-off in long orbits
FLOOR_SLACK = 1e-9
# certificates must resolve the shortest piece of the map
RESOLUTION_FRACTION = 1e-3


# ----------------------------------------------------------------------
# lifts


class Lift:
    """A lift given by an explicit function; ``base`` is informational."""

    def __init__(self, func: Callable[[float], float], base=None, array_func=None):
        self._f = func
        self._fa = array_func
        self.base = base

    def lift(self, t: float) -> float:
        return self._f(t)

    def lift_array(self, t):
        if self._fa is not None:
            return self._fa(np.asarray(t, dtype=float))
        return np.array([self._f(float(v)) for v in np.ravel(t)]).reshape(np.shape(t))

    def __call__(self, s: float) -> float:
        return self.lift(s) % 1.0


class RigidRotation:
    def __init__(self, alpha: float):
        self.alpha = float(alpha)

    def lift(self, t: float) -> float:
        return t + self.alpha

    def lift_array(self, t):
        return np.asarray(t, dtype=float) + self.alpha

    def __call__(self, s: float) -> float:
        return self.lift(s) % 1.0


class ComposedCircleMap:
    """``outer o inner`` on the level of lifts."""

    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner

    def lift(self, t: float) -> float:
        return self.outer.lift(self.inner.lift(t))

    def lift_array(self, t):
        return _lift_array(self.outer, _lift_array(self.inner, t))

    def __call__(self, s: float) -> float:
        return self.lift(s) % 1.0


class ShiftedLift:
    """The lift ``F + d`` of the same circle map (d an integer)."""

    def __init__(self, base, d: int):
        self.base = base
        self.d = int(d)

    def lift(self, t: float) -> float:
        return self.base.lift(t) + self.d

    def lift_array(self, t):
        return _lift_array(self.base, t) + self.d


def _lift_array(m, t):
    if hasattr(m, "lift_array"):
        return m.lift_array(t)
    t = np.asarray(t, dtype=float)
    return np.array([m.lift(float(v)) for v in t.ravel()]).reshape(t.shape)


def map_resolution(m) -> float | None:
    """Shortest piece of a (possibly composed) piecewise map, if it has pieces."""
    if hasattr(m, "resolution"):
        return m.resolution()
    if isinstance(m, ComposedCircleMap):
        parts = [r for r in (map_resolution(m.outer), map_resolution(m.inner)) if r is not None]
        return min(parts) if parts else None
    if isinstance(m, ShiftedLift):
        return map_resolution(m.base)
    return None


def iterate_lift(m, t: float, n: int) -> float:
    f = m.lift
    for _ in range(n):
        t = f(t)
    return t


def iterate_lift_array(m, t, n: int) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    for _ in range(n):
        t = _lift_array(m, t)
    return t


# ----------------------------------------------------------------------
# results


@dataclass(frozen=True)
class RotationNumber:
    kind: str  # "rational" or "estimate"
    value: float  # in [0, 1)
    error_bound: float
    p: int | None = None
    q: int | None = None
    orbit: tuple[float, ...] = ()
    tau: float | None = None  # translation number of the lift that was used
    iterations: int = 0
    bracket: tuple[float, float] | None = None  # lift-level bounds on tau

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    def fraction(self) -> Fraction | None:
        return Fraction(self.p, self.q) if self.is_rational else None

    def to_json(self) -> dict:
        d = {"kind": self.kind, "value": self.value, "error_bound": self.error_bound, "tau": self.tau, "iterations": self.iterations}
        if self.bracket is not None:
            d["bracket"] = list(self.bracket)
        if self.is_rational:
            d.update({"p": self.p, "q": self.q, "orbit": list(self.orbit)})
        return d


@dataclass
class _Bracket:
    lo: float = -math.inf
    hi: float = math.inf
    n: int = 0
    t: float = 0.0
    periodic: tuple[int, int] | None = None

    def update(self, v: float, n: int, x0: float, exact_tol: float) -> None:
        d = v - x0
        m = round(d)
        if abs(d - m) <= exact_tol and self.periodic is None:
            self.periodic = (m, n)
        self.lo = max(self.lo, math.floor(d - FLOOR_SLACK) / n)
        self.hi = min(self.hi, (math.floor(d + FLOOR_SLACK) + 1) / n)
        self.n = n
        self.t = v

    @property
    def width(self) -> float:
        return self.hi - self.lo


def _run(m, x0: float, n_from: int, n_to: int, br: _Bracket, exact_tol: float, stop_width: float | None = None) -> _Bracket:
    f = m.lift
    t = br.t if n_from > 0 else x0
    for n in range(n_from + 1, n_to + 1):
        t = f(t)
        br.update(t, n, x0, exact_tol)
        if stop_width is not None and br.width <= stop_width:
            break
    return br


def translation_number(L, budget: int = 100_000, tol: float = 1e-6, x0: float = 0.0, exact_tol: float = RETURN_TOL) -> tuple[float, float]:
    """(tau, error_bound) for the lift ``L``.

    A periodic orbit of the base point (return within ``exact_tol``) ends the
    run with error 0.  Raises ``BudgetExceeded`` when the bracket is still
    wider than ``2 tol`` after ``budget`` steps.
    """
    if budget < 1:
        raise ValidationError("budget must be at least 1")
    br = _Bracket(t=x0)
    f = L.lift
    t = x0
    for n in range(1, budget + 1):
        t = f(t)
        br.update(t, n, x0, exact_tol)
        if br.periodic is not None:
            m, q = br.periodic
            return m / q, 0.0
        if br.width <= 2 * tol:
            break
    value = 0.5 * (br.lo + br.hi)
    err = 0.5 * br.width
    if err > tol:
        raise BudgetExceeded(f"translation number bound {err} > {tol} after {budget} steps", best=(value, err))
    return value, err


# ----------------------------------------------------------------------
# cyclic orders


def _circle_values(orbit: Sequence) -> list[float]:
    out = []
    for v in orbit:
        if isinstance(v, ProjectivePoint):
            out.append(angle_coordinate(v))
        else:
            out.append(float(v) % 1.0)
    return out


def cyclic_order_matches(orbit: Sequence, p: int, q: int) -> bool:
    """Does the orbit sit on the circle like the rigid ``p/q`` orbit of 0?

    Pure rank comparison: the k-th point must be the ``(k p mod q)``-th point
    met when turning positively from the first one.
    """
    q = int(q)
    p = int(p) % q if q > 0 else 0
    if len(orbit) != q:
        raise ValidationError(f"expected {q} points, got {len(orbit)}")
    if math.gcd(p, q) != 1 and q != 1:
        raise ValidationError(f"{p}/{q} is not reduced")
    vals = _circle_values(orbit)
    if len(set(vals)) != len(vals):
        raise DuplicatePoints("orbit points must be pairwise distinct")
    order = sorted(range(q), key=lambda k: vals[k])
    rank = [0] * q
    for r, k in enumerate(order):
        rank[k] = r
    return all((rank[k] - rank[0]) % q == (k * p) % q for k in range(q))


def cyclic_sign(u: float, v: float, w: float) -> int:
    """+1 if (u, v, w) is positively ordered on R/Z, -1 if negatively, 0 if degenerate."""
    u, v, w = u % 1.0, v % 1.0, w % 1.0
    if u == v or v == w or u == w:
        return 0
    # number of descents in the cyclic sequence
    desc = (u > v) + (v > w) + (w > u)
    return 1 if desc == 1 else -1


def orbit_cyclic_order(m, p0, q_max: int = Q_MAX, return_tol: float = RETURN_TOL) -> tuple[int, int] | None:
    """(p, q) if the orbit of ``p0`` closes up at period ``q <= q_max``."""
    if isinstance(p0, ProjectivePoint):
        p0 = m.to_chart(p0)
    t0 = float(p0)
    t = t0
    pts = [t0]
    for k in range(1, q_max + 1):
        t = m.lift(t)
        d = t - t0
        r = round(d)
        if abs(d - r) <= return_tol:
            g = math.gcd(r, k)
            p, q = r // g, k // g
            if q != k:
                return None
            try:
                if cyclic_order_matches(pts, p % q, q):
                    return (p % q, q)
            except DuplicatePoints:
                return None
            return None
        pts.append(t)
    return None


def bracket_from_orbit(m, x: float, p: int, q: int) -> tuple[float, float] | None:
    """Interval for rho from one orbit segment with the cyclic order of p/q.

    If ``(x, Tx, ..., T^{q-1}x)`` is ordered like the p/q rotation and
    ``T^q x`` lies in the closure of the gap ending at x, rho is in
    ``(r - 1/q, r]``; in the closure of the gap starting at x it is in
    ``[r, r + 1/q)``.  Returns None when the predicate does not apply.
    Bounds are for rho taken modulo 1 near ``r = p/q``.
    """
    if q < 2:
        return None
    pts = [x]
    t = x
    for _ in range(q):
        t = m.lift(t)
        pts.append(t)
    try:
        if not cyclic_order_matches(pts[:q], p, q):
            return None
    except DuplicatePoints:
        return None
    rel = [(v - x) % 1.0 for v in pts[1:q]]
    prev_rel, next_rel = max(rel), min(rel)
    last = (pts[q] - x) % 1.0
    r = p / q
    if last == 0.0:
        return (r, r)
    if last >= prev_rel:
        return (r - 1.0 / q, r)
    if last <= next_rel:
        return (r, r + 1.0 / q)
    return None


# ----------------------------------------------------------------------
# rational certification


def _phi(m, p: int, q: int):
    def f(t: float) -> float:
        return iterate_lift(m, t, q) - t - p
    return f


def find_periodic_orbit(m, p: int, q: int, seeds: Sequence[float] = (), grid: int = 257, return_tol: float = RETURN_TOL) -> float | None:
    """A point x with ``F^q(x) = x + p`` (within return_tol), or None."""
    phi = _phi(m, p, q)
    # attracting orbits: polish seeds by iterating F^q
    for s in seeds:
        t = s % 1.0
        for _ in range(64):
            d = phi(t)
            if abs(d) <= return_tol:
                return t
            t = (iterate_lift(m, t, q) - p) % 1.0
        if abs(phi(t)) <= return_tol:
            return t
    xs = np.linspace(0.0, 1.0, grid)
    vals = iterate_lift_array(m, xs, q) - xs - p
    zero = np.nonzero(np.abs(vals) <= return_tol)[0]
    if zero.size:
        return float(xs[zero[0]] % 1.0)
    signs = np.sign(vals)
    idx = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    for i in idx:
        try:
            r = brentq(phi, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        except ValueError:
            continue
        if abs(phi(r)) <= return_tol:
            return r % 1.0
    # tangential (saddle-node) orbits: minimize |phi| around the best grid point
    k = int(np.argmin(np.abs(vals)))
    if abs(vals[k]) < 1e-5:
        a, b = xs[max(k - 1, 0)], xs[min(k + 1, grid - 1)]
        res = minimize_scalar(lambda t: abs(phi(t)), bounds=(a, b), method="bounded", options={"xatol": 1e-15})
        if abs(phi(res.x)) <= return_tol:
            return float(res.x) % 1.0
    return None


def _certify(m, x: float, p: int, q: int, return_tol: float) -> tuple[float, ...] | None:
    pts = [x]
    t = x
    for _ in range(q):
        t = m.lift(t)
        pts.append(t)
    if abs(pts[q] - x - p) > return_tol:
        return None
    orbit = tuple(v % 1.0 for v in pts[:q])
    try:
        ok = cyclic_order_matches(orbit, p % q, q)
    except DuplicatePoints:
        return None
    return orbit if ok else None


def _candidates(lo: float, hi: float, q_max: int) -> list[tuple[int, int]]:
    out = []
    for q in range(1, q_max + 1):
        for p in range(math.ceil(lo * q - 1e-12), math.floor(hi * q + 1e-12) + 1):
            if math.gcd(p, q) == 1:
                out.append((p, q))
    return out


def simplest_fraction(lo: float, hi: float) -> Fraction:
    """Fraction of smallest denominator in ``[lo, hi]`` (Stern-Brocot descent)."""
    if lo > hi:
        raise ValidationError("empty interval")
    fl = math.floor(lo)
    if fl + 1 <= hi or fl == lo:
        return Fraction(fl if fl == lo else fl + 1)
    # continued-fraction descent on (lo - fl, hi - fl) inside (0, 1)
    a, b = Fraction(lo - fl), Fraction(hi - fl)
    p0, q0, p1, q1 = 0, 1, 1, 0
    for _ in range(200):
        k = math.floor(a)
        if k + 1 <= b or k == a:
            k = k if k == a else k + 1
            return fl + Fraction(k * p1 + p0, k * q1 + q0)
        p0, q0, p1, q1 = p1, q1, k * p1 + p0, k * q1 + q0
        a, b = 1 / (b - k), 1 / (a - k)
    return fl + Fraction(p1, q1)


def rotation_number(
    m,
    budget: int = 200_000,
    tol: float = 1e-8,
    q_max: int = Q_MAX,
    return_tol: float = RETURN_TOL,
    certify: bool = True,
    near_tol: float = 1e-7,
    warmup: int = 256,
    target: float | None = None,
) -> RotationNumber:
    """Certified rational rotation number if one is found, else an estimate.

    A single orbit of 0 is followed.  It feeds the Farey bracket, and after a
    warm-up its returns near a recent base point propose candidates ``p/q``
    (attracting periodic orbits show up this way long before the bracket
    narrows).  Candidates are certified by ``find_periodic_orbit`` plus the
    exact cyclic-order check.  ``certify=False`` skips all of this, which is
    what the boundary endomorphisms use.

    With ``target`` (a value of the lift's translation number) the run stops
    as soon as the bracket excludes it; the estimate returned then carries
    its bracket as error bound, however wide, and never raises.
    """
    res = map_resolution(m)
    if res is not None:
        return_tol = max(min(return_tol, RESOLUTION_FRACTION * res), 1e-13)
    x0 = 0.0
    br = _Bracket(t=x0)
    f = m.lift
    t = x0
    tried: set[tuple[int, int]] = set()

    def attempt(p: int, q: int, seed: float) -> RotationNumber | None:
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q > q_max or (p, q) in tried:
            return None
        tried.add((p, q))
        if abs(iterate_lift(m, seed, q) - seed - p) <= return_tol:
            x = seed % 1.0
        else:
            x = find_periodic_orbit(m, p, q, seeds=(seed,), return_tol=return_tol)
        if x is None:
            return None
        orbit = _certify(m, x, p, q, return_tol)
        if orbit is None:
            return None
        return RotationNumber("rational", (p / q) % 1.0, 0.0, p % q, q, orbit, p / q, br.n)

    base, base_n = x0, 0
    n = 0
    for n in range(1, budget + 1):
        t = f(t)
        br.update(t, n, x0, return_tol)
        if not certify:
            if br.width <= 2 * tol:
                break
            continue
        if br.periodic is not None and br.periodic[1] <= q_max:
            res = attempt(*br.periodic, x0)
            if res is not None:
                return res
        if n == warmup:
            base, base_n = t, n
        elif n > warmup:
            k = n - base_n
            d = t - base
            r = round(d)
            if abs(d - r) <= near_tol:
                res = attempt(r, k, base)
                if res is not None:
                    return res
            if k >= q_max:
                base, base_n = t, n
        if br.width <= 2 * tol:
            break
        if target is not None and n >= 2 and not (br.lo <= target <= br.hi):
            tau = 0.5 * (br.lo + br.hi)
            return RotationNumber("estimate", tau % 1.0, br.width / 2, tau=tau, iterations=br.n, bracket=(br.lo, br.hi))
    if certify:
        cands = _candidates(br.lo, br.hi, q_max)
        if len(cands) <= 8:
            for p, q in cands:
                res = attempt(p, q, t % 1.0)
                if res is not None:
                    return res
    # the midpoint is the estimate with the smallest guaranteed error
    tau = 0.5 * (br.lo + br.hi)
    err = br.width / 2
    est = RotationNumber("estimate", tau % 1.0, err, tau=tau, iterations=br.n, bracket=(br.lo, br.hi))
    if err > tol:
        raise BudgetExceeded(f"rotation number bound {err:.3g} > {tol:.3g} after {br.n} steps", best=est)
    return est


def estimate_tau(m, budget: int, x0: float = 0.0) -> tuple[float, float, float]:
    """(tau, lo, hi) after at most ``budget`` steps, never raising."""
    br = _Bracket(t=x0)
    f = m.lift
    t = x0
    for n in range(1, budget + 1):
        t = f(t)
        br.update(t, n, x0, 0.0)
    tau = min(max((t - x0) / budget, br.lo), br.hi)
    return tau, br.lo, br.hi


def tau_bracket(m, budget: int, tol: float = 0.0, x0: float = 0.0, exact_tol: float = RETURN_TOL) -> tuple[float, float, float]:
    """(tau, lo, hi), stopping early at width <= tol or on a periodic return."""
    br = _Bracket(t=x0)
    f = m.lift
    t = x0
    for n in range(1, budget + 1):
        t = f(t)
        br.update(t, n, x0, exact_tol)
        if br.periodic is not None:
            mm, q = br.periodic
            return mm / q, mm / q, mm / q
        if br.width <= tol:
            break
    tau = min(max((t - x0) / br.n, br.lo), br.hi)
    return tau, br.lo, br.hi


def circle_distance(a: float, b: float) -> float:
    d = (a - b) % 1.0
    return min(d, 1.0 - d)


# ----------------------------------------------------------------------
# asymptotic cycles


@dataclass(frozen=True)
class HomologyRay:
    """The ray spanned by ``a + slope * b``; ``sign`` orients it."""

    slope: Fraction | float
    sign: int = 1
    labels: tuple[str, str] = ("a", "b")

    @property
    def is_rational(self) -> bool:
        return isinstance(self.slope, Fraction)

    def coefficients(self) -> tuple[Fraction | float, int]:
        """(b coefficient, a coefficient) as in ``a + (u + n) b``."""
        return self.slope, 1

    def contains(self, a_count: int, b_count: int) -> bool:
        """Is the integral class ``a_count a + b_count b`` on this ray?"""
        if a_count * self.sign <= 0:
            return False
        if self.is_rational:
            return Fraction(b_count, a_count) == self.slope
        return math.isclose(b_count / a_count, float(self.slope), abs_tol=1e-12)


def asymptotic_cycle(u: RotationNumber, n: int, basis_labels: tuple[str, str] = ("a", "b")) -> HomologyRay:
    if u.is_rational:
        slope: Fraction | float = Fraction(u.p, u.q) + n
    else:
        slope = u.value + n
    return HomologyRay(slope, 1, tuple(basis_labels))
