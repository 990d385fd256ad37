"""Named invariant suites, run by ``dstori check``.

Each suite returns a list of ``CheckResult``; a suite passes when every
entry does.  The parameters are small fixed grids so that a suite runs in
seconds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .desitter import DSPoint
from .glue import (
    ALPHA,
    BETA,
    build_T_theta_x,
    build_T_theta_xy,
    first_return,
    gauss_bonnet_check,
    traced_return,
    trace_leaf,
)
from .hiet import build_one_sing, build_two_sing, eval_inverse
from .moebius import ProjectivePoint, apply, det
from .solve import _pair_point, monotone_word_scan, realize_rational, rigidity_uniqueness_check, rotation_word


@dataclass
class CheckResult:
    name: str
    ok: bool
    value: float | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "value": self.value, "detail": self.detail}


RECT_PARAMS = [(0.5, 1.5), (1.0, 2.0), (1.0, 7.0), (2.0, 3.0), (0.25, 40.0)]
L_PARAMS = [(1.0, 3.0, 0.4), (1.0, 1.5, 0.5), (0.5, 2.0, 0.3), (2.0, 5.0, 0.6), (1.0, math.inf, 0.2)]


def sample_section(m, n: int = 100) -> list[ProjectivePoint]:
    """``n`` interior points of a circle map's interval, evenly spaced in its chart."""
    return [m.from_chart(t) for t in (np.arange(n) + 0.5) / n]


def chart_gap(m, a: ProjectivePoint, b: ProjectivePoint) -> float:
    """Distance of two points of a circle map's interval, measured around the circle in its chart."""
    d = abs(m.to_chart(a) - m.to_chart(b)) % 1.0
    return min(d, 1.0 - d)


def _max_gap(m, ref, pts) -> float:
    """Largest gap between ``m`` and the point map ``ref`` over ``pts``."""
    return max(chart_gap(m, m.eval_point(p), ref(p)) for p in pts)


def suite_gauss_bonnet(n: int = 10) -> list[CheckResult]:
    out = []
    for theta in (0.25, 1.0, 2.0):
        worst = 0.0
        for x in (1.2, 2.0, 5.0, 50.0):
            worst = max(worst, gauss_bonnet_check(build_T_theta_x(theta, x)))
        out.append(CheckResult(f"rect-torus theta={theta}", worst <= 1e-6, worst))
    theta = 1.0
    worst = 0.0
    for u in (np.arange(n) + 0.5) / n:
        for v in (np.arange(n) + 0.5) / n:
            x, y = _pair_point(theta, float(u), float(v))
            worst = max(worst, gauss_bonnet_check(build_T_theta_xy(theta, x, y)))
    out.append(CheckResult(f"l-torus theta={theta} {n}x{n} grid", worst <= 1e-6, worst))
    return out


def _jump_consistency(trace) -> float:
    """Largest chart gap between a segment end, carried by its jump, and the next start."""
    worst = 0.0
    for i, (e, M) in enumerate(trace.jumps):
        if i + 1 >= len(trace.segments):
            break
        end = trace.segments[i][1]
        nxt = trace.segments[i + 1][0]
        coord = end.y if trace.kind == ALPHA else end.x
        img = apply(M, coord)
        target = nxt.y if trace.kind == ALPHA else nxt.x
        worst = max(worst, abs(det(img, target)))
    return worst


def suite_traces() -> list[CheckResult]:
    out = []
    surf = build_T_theta_x(1.0, 2.0)
    tr = trace_leaf(surf, DSPoint.of(2.0, 0.0), ALPHA)
    out.append(CheckResult("closed alpha-leaf of T(1,2)", tr.closed and len(tr.jumps) == 1, len(tr.jumps)))
    tr = trace_leaf(surf, DSPoint.of(1.5, 0.1), BETA, max_jumps=200)
    gap = _jump_consistency(tr)
    out.append(CheckResult("beta trace jump consistency", gap <= 1e-8, gap))
    geo = surf.spec.geometry
    straight = all(abs(geo.to_chart(a)[0] - geo.to_chart(b)[0]) <= 1e-12 for a, b in tr.segments)
    out.append(CheckResult("beta segments vertical in the chart", straight))
    fam = build_one_sing(1.0, 2.0)
    sing = trace_leaf(surf, DSPoint(fam.x, ProjectivePoint.parse(0.0)), BETA)
    out.append(CheckResult("singular beta-leaf reports a corner", sing.status == "corner", detail={"status": sing.status}))
    P = first_return(surf, BETA)
    pts = sample_section(P, 50)
    worst = max(chart_gap(P, traced_return(surf, p, BETA), P.eval_point(p)) for p in pts)
    out.append(CheckResult("traced return = first-return map", worst <= 1e-9, worst))
    return out


def suite_cross_validation(n: int = 100) -> list[CheckResult]:
    out = []
    for theta, x in RECT_PARAMS:
        surf = build_T_theta_x(theta, x)
        P = first_return(surf, BETA)
        E = build_one_sing(theta, x).E
        gap = _max_gap(P, lambda p: eval_inverse(E, p), sample_section(P, n))
        out.append(CheckResult(f"rect-torus theta={theta} x={x}: beta return = E^-1", gap <= 1e-9, gap))
    for theta, x, y in L_PARAMS:
        xx = "inf" if x == math.inf else x
        surf = build_T_theta_xy(theta, xx, y)
        fam = build_two_sing(theta, xx, y)
        for kind, h in ((BETA, fam.E), (ALPHA, fam.F)):
            P = first_return(surf, kind)
            gap = _max_gap(P, lambda p, h=h: eval_inverse(h, p), sample_section(P, n))
            name = "E^-1" if kind == BETA else "F^-1"
            out.append(CheckResult(f"l-torus theta={theta} x={x} y={y}: {kind} return = {name}", gap <= 1e-9, gap))
    return out


def suite_words() -> list[CheckResult]:
    out = []
    for theta in (0.5, 1.0, 2.0):
        for p, q in ((1, 2), (1, 3), (2, 5)):
            real = realize_rational(theta, p, q)
            word = rotation_word(p, q)
            rep = monotone_word_scan(theta, real.x, word, n=200)
            out.append(CheckResult(f"word scan theta={theta} {p}/{q} ({word})", rep.ok, detail={"violations": rep.violations}))
            rig = rigidity_uniqueness_check(theta, p, q)
            out.append(CheckResult(f"rigidity theta={theta} {p}/{q}", bool(rig["unique"]), detail=rig))
    return out


SUITES = {
    "gauss-bonnet": suite_gauss_bonnet,
    "traces": suite_traces,
    "cross-validation": suite_cross_validation,
    "words": suite_words,
}


def random_word_instance(rng: np.random.Generator) -> tuple[float, float, str, int]:
    """A random (theta, x_base, word, grid size) meeting the scan's hypotheses.

    The word is the rotation word of a random reduced p/q with q <= 12, and
    the base is the parameter realizing it, so the word codes a periodic
    orbit of [1].
    """
    theta = float(rng.uniform(0.25, 2.5))
    q = int(rng.integers(2, 13))
    p = int(rng.integers(1, q))
    while math.gcd(p, q) != 1:
        p = int(rng.integers(1, q))
    x_base = realize_rational(theta, p, q).x_real
    n = int(rng.integers(20, 201))
    return theta, x_base, rotation_word(p, q), n


def suite_random_words(seed: int = 0, count: int = 100) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    bad = []
    for _ in range(count):
        theta, x_base, word, n = random_word_instance(rng)
        rep = monotone_word_scan(theta, x_base, word, n=n)
        if not rep.ok:
            bad.append({"theta": theta, "x_base": x_base, "word": word, "n": n, "violations": rep.violations})
    return [CheckResult(f"{count} random word scans (seed {seed})", not bad, len(bad), {"failures": bad[:5]})]
