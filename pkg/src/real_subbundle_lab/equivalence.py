"""Linear equivalence of small-degree divisors via interpolation in |kH|.

H denotes the hyperelliptic degree-2 class (any fiber of the x-map; the two
points at infinity form one such fiber).  Two effective degree-d divisors
(d <= 4) satisfy D ~ D' exactly when D + iota(D') is a member of |dH|, i.e.
when some section of L(dH) vanishes on the combined multiset.  L(kH) has the
monomial basis {1, x, ..., x^k} + {y, xy, ..., x^(k-3)y} of dimension 2k-1
for k >= 2 (k = 1 is the canonical series, basis {1, x}).

Membership is decided numerically: evaluate the basis at the 2k combined
points (limits of basis/x^k at infinity), row-normalize, and test the
smallest singular value against a fixed threshold.  Repeated points are
repaired before evaluation: a repeated point whose hyperelliptic partner is
also present is removed together with the partner and replaced by a fresh
fiber — an exact operation on the linear-equivalence class since every fiber
belongs to |H| — while a repeated point with no partner present gets a crude
1e-6 relative jitter and the decision is flagged as inexact.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .curve import (
    INFINITY,
    CurvePoint,
    RealHyperellipticCurve,
    affine_point,
    infinity_point,
    involute,
    point_distance,
)
from .divisors import Divisor, divisor
from .errors import DegreeMismatch, DegreeTooLarge, IllConditioned, LabError

KERNEL_THRESHOLD = 1.0e-8
MIN_DECISION_GAP = 1.0e2
_CRUDE_JITTER = 1.0e-6


@dataclass(frozen=True)
class EquivalenceDecision:
    """Outcome of one membership test, with conditioning diagnostics."""

    equivalent: bool
    ratio: float  # sigma_min / sigma_max of the evaluation matrix
    gap: float  # decision margin relative to the threshold (>= 1 by construction)
    jittered: bool  # repeated points repaired by exact fiber replacement
    jittered_inexact: bool  # crude jitter used; treat with suspicion


def rr_basis_columns(k: int) -> list[tuple[int, bool]]:
    """Monomial exponents (j, with_y) spanning L(kH)."""
    if k == 1:
        return [(0, False), (1, False)]
    cols = [(j, False) for j in range(k + 1)]
    cols += [(j, True) for j in range(k - 2)]
    return cols


def evaluation_row(curve: RealHyperellipticCurve, point: CurvePoint, k: int) -> np.ndarray:
    """Basis values at an affine point, or the limit of basis/x^k at infinity
    (only x^k and x^(k-3)*y survive, the latter tending to branch*sqrt(a6))."""
    cols = rr_basis_columns(k)
    row = np.zeros(len(cols), dtype=complex)
    if point.kind == INFINITY:
        for idx, (j, with_y) in enumerate(cols):
            if not with_y and j == k:
                row[idx] = 1.0
            elif with_y and j == k - 3:
                row[idx] = point.branch * curve.sqrt_a6
        return row
    for idx, (j, with_y) in enumerate(cols):
        row[idx] = point.x**j * (point.y if with_y else 1.0)
    return row


def evaluation_matrix(
    curve: RealHyperellipticCurve, points: list[CurvePoint], k: int
) -> np.ndarray:
    rows = []
    for p in points:
        row = evaluation_row(curve, p, k)
        norm = np.linalg.norm(row)
        if norm == 0.0:
            raise LabError("zero evaluation row")
        rows.append(row / norm)
    return np.array(rows)


def linear_equivalence_decision(d1: Divisor, d2: Divisor) -> EquivalenceDecision:
    """Decide D ~ D' for equal-degree effective divisors of degree <= 4.

    Raises DegreeMismatch / DegreeTooLarge on bad input and IllConditioned
    when the singular-value ratio lands within a factor 10^2 of the decision
    threshold on either side.
    """
    curve = d1.curve
    if d2.curve is not curve:
        raise ValueError("divisors live on different curves")
    k = d1.degree
    if k != d2.degree:
        raise DegreeMismatch(f"degrees {k} and {d2.degree} differ")
    if k > 4:
        raise DegreeTooLarge("membership test supports degree <= 4")
    if k == 0:
        return EquivalenceDecision(True, 0.0, np.inf, False, False)

    combined = d1.points() + [involute(curve, p, "iota") for p in d2.points()]
    points, jittered, inexact = _repair_repeats(curve, combined)
    matrix = evaluation_matrix(curve, points, k)
    svals = np.linalg.svd(matrix, compute_uv=False)
    ratio = float(svals[-1] / svals[0])
    equivalent = ratio < KERNEL_THRESHOLD
    if equivalent:
        # duplicated evaluation rows (e.g. two points of one fiber under a
        # y-free basis) make the smallest singular value exactly zero
        gap = np.inf if ratio == 0.0 else KERNEL_THRESHOLD / ratio
    else:
        gap = ratio / KERNEL_THRESHOLD
    if gap < MIN_DECISION_GAP:
        raise IllConditioned(
            f"singular-value ratio {ratio:.3e} too close to threshold "
            f"{KERNEL_THRESHOLD:.1e} (gap {gap:.2f} < {MIN_DECISION_GAP:.0f})"
        )
    return EquivalenceDecision(equivalent, ratio, gap, jittered, inexact)


def is_linearly_equivalent(d1: Divisor, d2: Divisor) -> bool:
    return linear_equivalence_decision(d1, d2).equivalent


def membership_kernel(curve, points, k) -> np.ndarray:
    """Right-singular vector for the smallest singular value: coefficients of
    the interpolating section when membership holds (testing hook)."""
    matrix = evaluation_matrix(curve, points, k)
    _, _, vh = np.linalg.svd(matrix)
    return vh[-1].conj()


# --------------------------------------------------------------------------
# repeated-point repair


def _repair_repeats(curve, points):
    tol = curve.equality_tolerance
    items = list(points)
    jittered = False
    inexact = False
    for _ in range(32):
        clusters = _clusters(curve, items, tol)
        repeated = next((c for c in clusters if len(c) >= 2), None)
        if repeated is None:
            return items, jittered, inexact
        rep = items[repeated[0]]
        partner_idx = _find_partner(curve, items, repeated, rep, tol)
        if partner_idx is not None:
            drop = {repeated[0], partner_idx}
            items = [p for i, p in enumerate(items) if i not in drop]
            items.extend(_fresh_fiber(curve, items))
            jittered = True
        else:
            items[repeated[0]] = _crude_jitter(curve, rep, items)
            inexact = True
    raise LabError("repeated-point repair did not terminate")


def _clusters(curve, items, tol):
    clusters: list[list[int]] = []
    for i, p in enumerate(items):
        for c in clusters:
            if point_distance(p, items[c[0]]) <= tol:
                c.append(i)
                break
        else:
            clusters.append([i])
    return clusters


def _find_partner(curve, items, repeated, rep, tol):
    """Index of a hyperelliptic partner of ``rep`` usable for fiber surgery.

    For a Weierstrass point (or any self-paired repeat) the second copy in the
    cluster is the partner; otherwise search the whole list for iota(rep)."""
    iota_rep = involute(curve, rep, "iota")
    if point_distance(iota_rep, rep) <= tol:
        return repeated[1]
    for i, p in enumerate(items):
        if i != repeated[0] and point_distance(p, iota_rep) <= tol:
            return i
    return None


def _fresh_fiber(curve, existing):
    """Both points of the fiber over a deterministic fresh abscissa, kept
    clear of Weierstrass x-values and of every x already in play."""
    scale = 1.0 + max(
        [abs(r) for r in curve.roots]
        + [abs(p.x) for p in existing if p.kind != INFINITY]
        + [0.0]
    )
    taken = [complex(r) for r in curve.roots]
    taken += [p.x for p in existing if p.kind != INFINITY]
    j = 1
    while j < 1000:
        x0 = scale * (0.3183 + 0.61803 * j)
        if all(abs(x0 - t) > 1.0e-2 * scale for t in taken):
            y0 = cmath.sqrt(curve.f(x0))
            return [affine_point(x0, y0), affine_point(x0, -y0)]
        j += 1
    raise LabError("could not place a fresh fiber")


def _crude_jitter(curve, point, items):
    if point.kind == INFINITY:
        # push the repeated infinity point down the matching y-branch
        scale = 1.0 + max(abs(r) for r in curve.roots)
        x0 = scale / _CRUDE_JITTER
        y0 = cmath.sqrt(curve.f(x0))
        if (y0 / (point.branch * curve.sqrt_a6 * x0**3)).real < 0:
            y0 = -y0
        return affine_point(x0, y0)
    x0 = point.x + _CRUDE_JITTER * (1.0 + abs(point.x))
    y0 = cmath.sqrt(curve.f(x0))
    if abs(y0 - point.y) > abs(y0 + point.y):
        y0 = -y0
    return affine_point(x0, y0)


# --------------------------------------------------------------------------
# 2-torsion


@dataclass(frozen=True)
class TwoTorsionClass:
    """Point of order <= 2 in Jac: the identity or a Weierstrass pair {i, j}
    (the class of w_i + w_j - H).  Real iff the pair is conjugation-stable."""

    pair: tuple[int, int] | None
    is_real: bool


def two_torsion(curve: RealHyperellipticCurve) -> list[TwoTorsionClass]:
    """All 16 classes: identity first, then pairs {i, j} in lexicographic
    order over the curve's Weierstrass indexing."""
    perm = curve.tau_root_permutation()
    classes = [TwoTorsionClass(None, True)]
    for i, j in combinations(range(6), 2):
        stable = {perm[i], perm[j]} == {i, j}
        classes.append(TwoTorsionClass((i, j), stable))
    return classes


def real_two_torsion_count(curve: RealHyperellipticCurve) -> int:
    return sum(1 for c in two_torsion(curve) if c.is_real)


def torsion_representative(curve: RealHyperellipticCurve, cls: TwoTorsionClass) -> Divisor:
    """Degree-2 divisor whose class is (torsion) + H: w_i + w_j, or the
    doubled first Weierstrass point for the identity (2*w_0 ~ H)."""
    ws = [affine_point(r, 0.0) for r in curve.roots]
    if cls.pair is None:
        return divisor(curve, [(ws[0], 2)])
    i, j = cls.pair
    return divisor(curve, [ws[i], ws[j]])


def generic_fiber_divisor(curve: RealHyperellipticCurve, index: int) -> Divisor:
    """Deterministic member of |H|: the fiber over a real abscissa picked
    clear of the Weierstrass x-values, distinct for distinct indices."""
    scale = 1.0 + max(abs(r) for r in curve.roots)
    j = 0
    hits = -1
    while j < 2000:
        x0 = scale * (0.2731 + 0.37119 * j)
        j += 1
        if all(abs(x0 - r) > 1.0e-2 * scale for r in curve.roots):
            hits += 1
            if hits == index:
                y0 = cmath.sqrt(curve.f(x0))
                return divisor(curve, [affine_point(x0, y0), affine_point(x0, -y0)])
    raise LabError("could not place a generic fiber")


def doubling_decision(curve: RealHyperellipticCurve, cls: TwoTorsionClass) -> EquivalenceDecision:
    """Membership of twice a torsion representative in |2H| — the doubled
    class must be trivial."""
    rep = torsion_representative(curve, cls)
    target = generic_fiber_divisor(curve, 0) + generic_fiber_divisor(curve, 1)
    return linear_equivalence_decision(rep + rep, target)
