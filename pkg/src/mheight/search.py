"""Fundamental-domain search and structural checks for the built-in families.

Each family's symmetry group folds the sphere of information directions onto
a small fundamental domain -- an arc ``[0, pi/(2n)]`` for the polygonal
codes, a sub-triangle of a face for the polyhedral ones -- on which the
m-height supremum is already attained.  This module parametrizes those
domains, verifies the fixed magnitude orderings that hold on them, checks
the sign patterns of the height-ratio partial derivatives, and runs direct
grid searches that lower-bound (and in practice reproduce) the exact
heights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .codes import (
    DUAL_DODECAHEDRAL,
    DUAL_ICOSAHEDRAL,
    DUAL_POLYGONAL,
    PHI,
    Family,
    GeneratorMatrix,
    dual_dodecahedral,
    dual_icosahedral,
)
from .errors import InvalidParameterError
from .heights import ExtendedHeight

#: Two magnitudes closer than this (relative to their size) are treated as
#: tied, and either order is accepted.
TIE_TOL = 1e-12

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_REFINE_ITERS = 64
_REFINE_SWEEPS = 4
_DEFAULT_ARC_RESOLUTION = 10_000
_DEFAULT_TRIANGLE_RESOLUTION = 300


@dataclass(frozen=True)
class ArcDomain:
    """Angles ``alpha in [0, pi/(2n)]``; directions ``(cos a, sin a)``."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidParameterError("arc domain needs n >= 2")

    @property
    def upper(self) -> float:
        return math.pi / (2 * self.n)

    def direction(self, alpha: float) -> np.ndarray:
        return np.array([math.cos(alpha), math.sin(alpha)])


@dataclass(frozen=True)
class TriangleDomain:
    """Barycentric triangle ``x(u, v) = u*v1 + v*v2 + (1-u-v)*v3``.

    The parameter domain is ``D = {u >= 0, v >= 0, u + v <= 1}``.
    """

    v1: tuple[float, ...]
    v2: tuple[float, ...]
    v3: tuple[float, ...]

    def __post_init__(self) -> None:
        vs = []
        for name in ("v1", "v2", "v3"):
            vs.append(np.asarray(getattr(self, name), dtype=float))
            object.__setattr__(self, name, tuple(float(x) for x in vs[-1]))
        span = np.array([vs[0] - vs[2], vs[1] - vs[2]])
        if np.linalg.matrix_rank(span) < 2:
            raise InvalidParameterError("triangle vertices are affinely dependent")

    def point(self, u: float, v: float) -> np.ndarray:
        a, b, c = (np.array(self.v1), np.array(self.v2), np.array(self.v3))
        return u * a + v * b + (1.0 - u - v) * c

    def points(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        a, b, c = (np.array(self.v1), np.array(self.v2), np.array(self.v3))
        w = 1.0 - us - vs
        return np.outer(us, a) + np.outer(vs, b) + np.outer(w, c)


FundamentalDomain = ArcDomain | TriangleDomain


def polygonal_domain(n: int) -> ArcDomain:
    if n < 2:
        raise InvalidParameterError("polygonal domain needs n >= 2")
    return ArcDomain(int(n))


def icosahedral_domain() -> TriangleDomain:
    """Sub-triangle of an icosahedron face closest to the first axis."""
    g = dual_icosahedral().columns
    return TriangleDomain(tuple(g[0]), tuple((g[0] + g[2]) / 2.0),
                          tuple((g[0] + g[2] + g[4]) / 3.0))


def dodecahedral_domain() -> TriangleDomain:
    """Sub-triangle of a dodecahedron face: vertex, edge midpoint, face center."""
    g = dual_dodecahedral().columns
    center = (g[0] + g[1] + g[4] + g[5] + g[8]) / 5.0
    return TriangleDomain(tuple(g[0]), tuple((g[0] + g[4]) / 2.0), tuple(center))


@dataclass(frozen=True)
class Violation:
    """A single failed ordering assertion with its severity."""

    label: str
    magnitude: float

    def to_json_dict(self) -> dict:
        return {"label": self.label, "magnitude": self.magnitude}


@dataclass(frozen=True)
class RankReport:
    """Observed magnitude ranking at one domain point.

    ``perm`` lists coordinate indices by descending projection magnitude --
    0-based for the polygonal family, 1-based for the polyhedral axes.
    ``violations`` lists asserted-order failures beyond the tie tolerance.
    """

    point: tuple[float, ...]
    perm: tuple[int, ...]
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {
            "point": list(self.point),
            "perm": list(self.perm),
            "violations": [v.to_json_dict() for v in self.violations],
        }


def _tied(a: float, b: float) -> bool:
    return abs(a - b) <= TIE_TOL * max(1.0, abs(a), abs(b))


def polygonal_rank_index(n: int, k: int) -> int:
    """Index whose magnitude attains rank ``k`` (0-based) on the arc.

    On ``alpha in [0, pi/(2n)]`` the sorted magnitudes interleave around the
    reduced angles ``alpha, pi/n - alpha, pi/n + alpha, 2*pi/n - alpha, ...``
    giving the fixed index sequence ``0, 1, n-1, 2, n-2, ...``.
    """
    if not 0 <= k <= n - 1:
        raise InvalidParameterError(f"rank must be in [0, {n - 1}], got {k}")
    if k == 0:
        return 0
    if k % 2 == 1:
        return (k + 1) // 2
    return n - k // 2


def polygonal_order_indices(n: int, alpha: float) -> RankReport:
    """Check the fixed arc ordering of ``|cos(pi*j/n - alpha)|`` at ``alpha``."""
    if n < 2:
        raise InvalidParameterError("need n >= 2")
    upper = math.pi / (2 * n)
    if not -1e-12 <= alpha <= upper + 1e-12:
        raise InvalidParameterError(
            f"alpha must lie in [0, {upper:.6g}], got {alpha}")
    mags = np.abs(np.cos(np.pi * np.arange(n) / n - alpha))
    perm = np.argsort(-mags, kind="stable")
    violations = []
    for k in range(n):
        expected = polygonal_rank_index(n, k)
        attained = float(mags[perm[k]])
        gap = attained - float(mags[expected])
        if gap > TIE_TOL * max(1.0, attained):
            violations.append(Violation(f"rank {k} expected index {expected}", gap))
    return RankReport((float(alpha),), tuple(int(j) for j in perm),
                      tuple(violations))


_ICOSA_CHAIN = (1, 3, 5, 4, 2, 6)   # axis numbers by nonincreasing magnitude

# Allowed axis numbers per magnitude rank (1-based) on the dodecahedral
# fundamental triangle, plus the pairwise dominances they follow from.
_DODE_RANK_SETS = {
    1: (1,), 2: (5,), 3: (9,), 4: (6, 7), 5: (2, 6, 7),
    6: (2, 4, 7), 7: (2, 4), 8: (8, 10), 9: (3, 8, 10), 10: (3, 8),
}
_DODE_PAIRS = (
    (1, 5), (5, 9), (9, 6), (9, 7),
    (6, 2), (6, 4), (7, 4),
    (4, 3), (4, 8), (4, 10), (2, 3), (2, 8), (2, 10),
    (10, 3),
)


def _check_triangle_params(u: float, v: float) -> None:
    if u < -1e-12 or v < -1e-12 or u + v > 1.0 + 1e-12:
        raise InvalidParameterError(
            f"(u, v) must satisfy u, v >= 0 and u + v <= 1, got ({u}, {v})")


def icosahedral_chain_check(u: float, v: float) -> RankReport:
    """Verify the fixed magnitude chain of the six axis projections."""
    _check_triangle_params(u, v)
    x = icosahedral_domain().point(u, v)
    mags = np.abs(x @ dual_icosahedral().matrix)
    violations = []
    for hi_axis, lo_axis in zip(_ICOSA_CHAIN, _ICOSA_CHAIN[1:]):
        gap = float(mags[lo_axis - 1] - mags[hi_axis - 1])
        if gap > TIE_TOL * max(1.0, float(mags[lo_axis - 1])):
            violations.append(Violation(f"g{hi_axis} >= g{lo_axis}", gap))
    perm = np.argsort(-mags, kind="stable") + 1
    return RankReport((float(u), float(v)), tuple(int(j) for j in perm),
                      tuple(violations))


def dodecahedral_rank_check(u: float, v: float) -> RankReport:
    """Verify rank supports and pairwise dominances of the ten projections."""
    _check_triangle_params(u, v)
    x = dodecahedral_domain().point(u, v)
    mags = np.abs(x @ dual_dodecahedral().matrix)
    order = np.sort(mags)[::-1]
    violations = []
    for hi_axis, lo_axis in _DODE_PAIRS:
        gap = float(mags[lo_axis - 1] - mags[hi_axis - 1])
        if gap > TIE_TOL * max(1.0, float(mags[lo_axis - 1])):
            violations.append(Violation(f"g{hi_axis} >= g{lo_axis}", gap))
    for rank, allowed in _DODE_RANK_SETS.items():
        value = float(order[rank - 1])
        if not any(_tied(float(mags[axis - 1]), value) for axis in allowed):
            violations.append(Violation(
                f"rank {rank} outside axes {allowed}",
                min(abs(value - float(mags[axis - 1])) for axis in allowed)))
    perm = np.argsort(-mags, kind="stable") + 1
    return RankReport((float(u), float(v)), tuple(int(j) for j in perm),
                      tuple(violations))


def dodecahedral_candidates() -> tuple[tuple[float, float], ...]:
    """The six ``(u, v)`` points that can maximize the mid-range heights.

    The ratio objectives have no interior stationary points, so maximizers
    sit on triangle vertices or on intersections of denominator-switching
    lines with the boundary.
    """
    s5 = math.sqrt(5.0)
    return (
        (1.0, 0.0),
        (0.0, 0.0),
        (0.0, 1.0),
        (0.0, (1.0 + 3.0 * s5) / 11.0),
        (PHI / 3.0, 0.0),
        (0.0, 2.0 * s5 - 4.0),
    )


# ---------------------------------------------------------------------------
# Monotonicity checks

_FD_STEP = 1e-6
_FD_ASSERT = 1e-8

# Expected signs (d/du, d/dv) of the ratio |x.g1| / |x.g_j| on the
# fundamental triangle; None leaves that partial unasserted.
#
# Icosahedral ratios are indexed by the target m, with the denominators the
# magnitude chain dictates: g3 for m=1, g5 for m=2, g4 for m=3.  The signs
# follow from the linear forms: d/dv of the g3 ratio is -24u / (6 x.g3)^2,
# so it is only nonpositive, while the g5 ratio increases in both
# parameters.
_ICOSA_SIGNS = {1: (1, -1), 2: (1, 1), 3: (-1, -1)}
_ICOSA_DENOM = {1: 3, 2: 5, 3: 4}     # ratio index -> denominator axis
_DODE_SIGNS = {
    2: (1, 1), 4: (None, -1), 5: (1, -1), 6: (1, 1),
    7: (-1, -1), 8: (-1, -1), 9: (1, 1), 10: (-1, 1),
}


@dataclass(frozen=True)
class MonotonicityReport:
    """Finite-difference sign check of a height ratio over an interior grid."""

    family: Family
    ratio_index: int
    expected: tuple[int | None, ...]
    asserted: int
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {
            "family": self.family.label,
            "ratio_index": self.ratio_index,
            "expected": list(self.expected),
            "asserted": self.asserted,
            "violations": [v.to_json_dict() for v in self.violations],
        }


def _arc_ratio(n: int, m: int, alphas: np.ndarray) -> np.ndarray:
    mags = np.abs(np.cos(np.pi * np.arange(n)[None, :] / n - alphas[:, None]))
    mags.sort(axis=1)
    return mags[:, -1] / mags[:, -1 - m]


def _polygonal_monotonicity(family: Family, m: int, res: int) -> MonotonicityReport:
    n = family.n
    if not 1 <= m <= n - 2:
        raise InvalidParameterError(
            f"ratio index must be in [1, {n - 2}] for n={n}, got {m}")
    expected = 1 if m % 2 == 0 else -1
    upper = math.pi / (2 * n)
    margin = max(10 * _FD_STEP, 1e-5 * upper)
    alphas = np.linspace(margin, upper - margin, res)
    deriv = (_arc_ratio(n, m, alphas + _FD_STEP)
             - _arc_ratio(n, m, alphas - _FD_STEP)) / (2 * _FD_STEP)
    check = np.abs(deriv) > _FD_ASSERT
    bad = check & (expected * deriv < 0)
    violations = tuple(
        Violation(f"sign(dh/dalpha) at alpha={alphas[i]:.9g}", float(abs(deriv[i])))
        for i in np.flatnonzero(bad))
    return MonotonicityReport(family, m, (expected,), int(check.sum()), violations)


def _triangle_grid(res: int, margin: float,
                   region: Callable[[np.ndarray, np.ndarray], np.ndarray] | None) -> tuple[np.ndarray, np.ndarray]:
    line = np.linspace(margin, 1.0 - margin, res)
    uu, vv = np.meshgrid(line, line)
    uu, vv = uu.ravel(), vv.ravel()
    keep = uu + vv <= 1.0 - margin
    if region is not None:
        keep &= region(uu, vv)
    return uu[keep], vv[keep]


def _triangle_monotonicity(family: Family, j: int, res: int) -> MonotonicityReport:
    if family.kind == DUAL_ICOSAHEDRAL:
        signs = _ICOSA_SIGNS
        denom_axis = _ICOSA_DENOM
        domain = icosahedral_domain()
        matrix = dual_icosahedral().matrix
        region = None
    else:
        signs = _DODE_SIGNS
        denom_axis = {idx: idx for idx in _DODE_SIGNS}
        domain = dodecahedral_domain()
        matrix = dual_dodecahedral().matrix
        # The eighth projection vanishes along a line inside the triangle;
        # its ratio is only asserted on the far side of the switching
        # boundary, where that projection is bounded away from zero.
        if j == 8:
            cut = 2.0 * math.sqrt(5.0) - 4.0
            region = lambda uu, vv: vv >= cut * (1.0 - uu) + 1e-4
        else:
            region = None
    if j not in signs:
        raise InvalidParameterError(
            f"ratio index {j} is not checkable for {family.label}")

    su, sv = signs[j]
    col = denom_axis[j] - 1
    uu, vv = _triangle_grid(res, max(10 * _FD_STEP, 1e-5), region)

    def ratio(us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        pts = domain.points(us, vs) @ matrix
        return np.abs(pts[:, 0]) / np.abs(pts[:, col])

    h = _FD_STEP
    du = (ratio(uu + h, vv) - ratio(uu - h, vv)) / (2 * h)
    dv = (ratio(uu, vv + h) - ratio(uu, vv - h)) / (2 * h)

    violations = []
    asserted = 0
    for sign, deriv, name in ((su, du, "u"), (sv, dv, "v")):
        if sign is None:
            continue
        check = np.abs(deriv) > _FD_ASSERT
        asserted += int(check.sum())
        for i in np.flatnonzero(check & (sign * deriv < 0)):
            violations.append(Violation(
                f"sign(d/d{name}) at (u,v)=({uu[i]:.9g},{vv[i]:.9g})",
                float(abs(deriv[i]))))
    return MonotonicityReport(family, j, (su, sv), asserted, tuple(violations))


def monotonicity_check(family: Family, j: int, grid_resolution: int) -> MonotonicityReport:
    """Assert the sign pattern of a height ratio's partial derivatives.

    ``j`` names the ratio: the target ``m`` for the polygonal family, the
    ratio index (1..3) for the icosahedral one, and the denominator axis for
    the dodecahedral one.  Signs are asserted only where the centered
    finite difference (step 1e-6) exceeds 1e-8 in magnitude.
    """
    if grid_resolution < 2:
        raise InvalidParameterError("grid_resolution must be >= 2")
    if family.kind == DUAL_POLYGONAL:
        return _polygonal_monotonicity(family, j, grid_resolution)
    if family.kind in (DUAL_ICOSAHEDRAL, DUAL_DODECAHEDRAL):
        return _triangle_monotonicity(family, j, grid_resolution)
    raise InvalidParameterError(f"no monotonicity facts for family {family.label}")


# ---------------------------------------------------------------------------
# Direct search

def _golden_max(f: Callable[[float], float], lo: float, hi: float,
                iters: int = _REFINE_ITERS) -> tuple[float, float]:
    """Golden-section maximization on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
    x = 0.5 * (a + b)
    return x, f(x)


def _ratio_batch(points: np.ndarray, matrix: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-point ``(ratio, numerator, denominator)`` of the height objective."""
    mags = np.abs(points @ matrix)
    mags.sort(axis=1)
    num = mags[:, -1]
    den = mags[:, -1 - m]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(den > 0.0, num / den, np.where(num > 0.0, np.inf, -np.inf))
    return ratios, num, den


def domain_search(generator: GeneratorMatrix, m: int, domain: FundamentalDomain,
                  resolution: int | None = None) -> ExtendedHeight:
    """Grid search plus local refinement over a fundamental domain.

    Returns a certified lower bound on the m-height (every evaluation is a
    genuine codeword ratio).  Infinity is reported only when a sampled
    denominator order statistic is exactly zero while the top one is not;
    otherwise unboundedness is left to the exact engine.
    """
    if not 1 <= m <= generator.n - 1:
        raise InvalidParameterError(
            f"m must be in [1, {generator.n - 1}], got {m}")
    if resolution is not None and resolution < 2:
        raise InvalidParameterError("resolution must be >= 2")

    if isinstance(domain, ArcDomain):
        if generator.k != 2:
            raise InvalidParameterError("arc domains require a k=2 generator")
        return _search_arc(generator, m, domain,
                           resolution or _DEFAULT_ARC_RESOLUTION)
    if isinstance(domain, TriangleDomain):
        if len(domain.v1) != generator.k:
            raise InvalidParameterError(
                "triangle vertices must match the generator dimension")
        return _search_triangle(generator, m, domain,
                                resolution or _DEFAULT_TRIANGLE_RESOLUTION)
    raise InvalidParameterError(f"unknown domain type {type(domain).__name__}")


def _search_arc(generator: GeneratorMatrix, m: int, domain: ArcDomain,
                resolution: int) -> ExtendedHeight:
    matrix = generator.matrix
    alphas = np.linspace(0.0, domain.upper, resolution)
    dirs = np.column_stack([np.cos(alphas), np.sin(alphas)])
    ratios, num, den = _ratio_batch(dirs, matrix, m)

    exact_inf = (den == 0.0) & (num > 0.0)
    if exact_inf.any():
        i = int(np.flatnonzero(exact_inf)[0])
        return ExtendedHeight(math.inf, witness=tuple(dirs[i]))

    best = int(np.argmax(ratios))
    best_alpha = float(alphas[best])
    best_val = float(ratios[best])

    def f(alpha: float) -> float:
        r, _, _ = _ratio_batch(np.array([[math.cos(alpha), math.sin(alpha)]]), matrix, m)
        return float(r[0])

    step = domain.upper / (resolution - 1)
    lo = max(0.0, best_alpha - step)
    hi = min(domain.upper, best_alpha + step)
    x, fx = _golden_max(f, lo, hi)
    if fx > best_val:
        best_val, best_alpha = fx, x
    if math.isinf(best_val):
        return ExtendedHeight(math.inf, witness=(math.cos(best_alpha), math.sin(best_alpha)))
    return ExtendedHeight(best_val, witness=(math.cos(best_alpha), math.sin(best_alpha)))


def _search_triangle(generator: GeneratorMatrix, m: int, domain: TriangleDomain,
                     resolution: int) -> ExtendedHeight:
    matrix = generator.matrix
    line = np.linspace(0.0, 1.0, resolution)
    uu, vv = np.meshgrid(line, line)
    uu, vv = uu.ravel(), vv.ravel()
    keep = uu + vv <= 1.0 + 1e-12
    uu, vv = uu[keep], vv[keep]
    pts = domain.points(uu, vv)
    ratios, num, den = _ratio_batch(pts, matrix, m)

    exact_inf = (den == 0.0) & (num > 0.0)
    if exact_inf.any():
        i = int(np.flatnonzero(exact_inf)[0])
        return ExtendedHeight(math.inf, witness=tuple(pts[i]))

    best = int(np.argmax(ratios))
    bu, bv = float(uu[best]), float(vv[best])
    best_val = float(ratios[best])

    def f(u: float, v: float) -> float:
        r, _, _ = _ratio_batch(domain.point(u, v)[None, :], matrix, m)
        return float(r[0])

    cell = 1.0 / (resolution - 1)
    for _ in range(_REFINE_SWEEPS):
        lo = max(0.0, bu - cell)
        hi = min(1.0 - bv, bu + cell)
        if hi > lo:
            bu, _ = _golden_max(lambda t: f(t, bv), lo, hi)
        lo = max(0.0, bv - cell)
        hi = min(1.0 - bu, bv + cell)
        if hi > lo:
            bv, _ = _golden_max(lambda t: f(bu, t), lo, hi)
    refined = f(bu, bv)
    if refined > best_val:
        best_val = refined
        witness = domain.point(bu, bv)
    else:
        witness = pts[best]
    if math.isinf(best_val):
        return ExtendedHeight(math.inf, witness=tuple(witness))
    return ExtendedHeight(best_val, witness=tuple(witness))
