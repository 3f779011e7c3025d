"""Real genus-2 hyperelliptic curves y^2 = f(x) with a chosen real structure.

A curve is the smooth projective model of y^2 = f(x) for a degree-6 squarefree
real polynomial f.  Since deg f is even there are two points at infinity,
labelled by the sign s in y/x^3 -> s*sqrt(a6) (principal square root).  The
antiholomorphic involution tau_sigma(x, y) = (conj(x), sigma*conj(y)) depends
on the chosen lift sign sigma = +-1; composing with the hyperelliptic
involution iota(x, y) = (x, -y) gives the other lift.

The fixed locus of tau is a disjoint union of circles lying over the closed
real intervals where sigma*f >= 0; the locus where tau(p) = iota(p) ("anti-real"
points, y purely imaginary for sigma = +1) lies over sigma*f <= 0.  Because f
is squarefree its sign alternates at every real root, so the two loci alternate
along the real axis, and the two unbounded rays always carry the same kind of
component, joined through the points at infinity.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegreeError,
    EmptyRealLocus,
    EmptyRegion,
    LabError,
    NonRealCoefficient,
    NotSquarefree,
    OffCurve,
)

AFFINE = "affine"
INFINITY = "infinity"

REGION_FIXED = "fixed_circle"
REGION_ANTI = "anti_real"
REGION_GENERIC = "generic"

# Multiplier turning the point-equality tolerance into the coarser scale used
# for root snapping and the squarefree separation gate.
_ROOT_SCALE = 1.0e3


@dataclass(frozen=True)
class CurvePoint:
    """A point of the smooth model: affine (x, y) or one of the two points
    at infinity, identified by branch = +-1 (the sign of y/x^3 asymptotics)."""

    kind: str
    x: complex = 0j
    y: complex = 0j
    branch: int = 0

    @property
    def is_infinity(self) -> bool:
        return self.kind == INFINITY


def affine_point(x: complex, y: complex) -> CurvePoint:
    return CurvePoint(AFFINE, complex(x), complex(y))


def infinity_point(branch: int) -> CurvePoint:
    if branch not in (1, -1):
        raise ValueError("infinity branch must be +1 or -1")
    return CurvePoint(INFINITY, branch=branch)


def point_distance(p: CurvePoint, q: CurvePoint) -> float:
    """Normalized distance used by all tolerance comparisons.

    Componentwise relative: max over coordinates of |dp|/(1 + max(|p|, |q|)).
    Points of different kinds, or infinity points on different branches, are
    infinitely far apart.
    """
    if p.kind != q.kind:
        return math.inf
    if p.kind == INFINITY:
        return 0.0 if p.branch == q.branch else math.inf
    dx = abs(p.x - q.x) / (1.0 + max(abs(p.x), abs(q.x)))
    dy = abs(p.y - q.y) / (1.0 + max(abs(p.y), abs(q.y)))
    return max(dx, dy)


def points_equal(curve: "RealHyperellipticCurve", p: CurvePoint, q: CurvePoint) -> bool:
    return point_distance(p, q) <= curve.equality_tolerance


@dataclass(frozen=True)
class FixedCircle:
    """One connected component of the tau-fixed locus.

    ``intervals`` lists the closed x-intervals (endpoints may be +-inf) whose
    fibers make up the circle; an unbounded circle consists of two rays glued
    through the two points at infinity.
    """

    index: int
    intervals: tuple[tuple[float, float], ...]
    through_infinity: bool

    def contains_x(self, x: float, pad: float) -> bool:
        return any(lo - pad <= x <= hi + pad for lo, hi in self.intervals)


@dataclass(frozen=True)
class AntiRealComponent:
    """Connected component of the locus where tau(p) = iota(p)."""

    index: int
    intervals: tuple[tuple[float, float], ...]
    through_infinity: bool

    def contains_x(self, x: float, pad: float) -> bool:
        return any(lo - pad <= x <= hi + pad for lo, hi in self.intervals)


@dataclass(frozen=True)
class TopologicalType:
    """(n, a) real topological type plus m = number of real branch-point pairs.

    n = number of fixed circles, a = 0 iff the complement of the real locus
    is disconnected (dividing case).
    """

    n: int
    a: int
    m: int


@dataclass(frozen=True)
class Region:
    """Sampling/location descriptor: a fixed circle, an anti-real component,
    or the generic (complex) locus."""

    kind: str
    index: int = -1


def fixed_region(index: int) -> Region:
    return Region(REGION_FIXED, index)


def anti_real_region(index: int) -> Region:
    return Region(REGION_ANTI, index)


GENERIC_REGION = Region(REGION_GENERIC)


@dataclass(frozen=True)
class RealHyperellipticCurve:
    """Immutable curve data; all derived loci are precomputed at build time.

    ``roots`` lists the six Weierstrass x-values: real roots first in
    ascending order, then complex-conjugate pairs adjacent with the positive
    imaginary part first.
    """

    coefficients: tuple[float, ...]  # a0..a6, ascending powers
    lift_sign: int
    equality_tolerance: float
    roots: tuple[complex, ...]
    n_real_roots: int
    fixed_circles: tuple[FixedCircle, ...]
    anti_real_components: tuple[AntiRealComponent, ...]

    def f(self, x: complex) -> complex:
        acc = 0j
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def f_prime(self, x: complex) -> complex:
        acc = 0j
        for k in range(6, 0, -1):
            acc = acc * x + k * self.coefficients[k]
        return acc

    @property
    def sign_a6(self) -> int:
        return 1 if self.coefficients[6] > 0 else -1

    @property
    def sqrt_a6(self) -> complex:
        return cmath.sqrt(complex(self.coefficients[6]))

    @property
    def infinity_is_real(self) -> bool:
        """True when tau fixes the points at infinity (they lie on a circle)."""
        return self.lift_sign * self.sign_a6 > 0

    def tau_root_permutation(self) -> tuple[int, ...]:
        """Index permutation induced by conjugation on the Weierstrass roots."""
        perm = list(range(6))
        i = self.n_real_roots
        while i < 6:
            perm[i], perm[i + 1] = i + 1, i
            i += 2
        return tuple(perm)


def weierstrass_points(curve: RealHyperellipticCurve) -> tuple[CurvePoint, ...]:
    return tuple(affine_point(r, 0.0) for r in curve.roots)


# --------------------------------------------------------------------------
# construction


def build_curve(
    coefficients,
    lift_sign: int = 1,
    tolerance: float = 1.0e-9,
) -> RealHyperellipticCurve:
    """Validate a coefficient vector a0..a6 and assemble the curve.

    Raises DegreeError if a6 = 0, NonRealCoefficient for complex or non-finite
    input, NotSquarefree when two polished roots collide within the separation
    gate 10^3 * tolerance * (1 + max|root|).
    """
    coeffs = _validate_coefficients(coefficients)
    if lift_sign not in (1, -1):
        raise ValueError("lift_sign must be +1 or -1")
    if not (0.0 < tolerance <= 1.0e-4):
        raise ValueError("tolerance must lie in (0, 1e-4]")

    roots = _polished_roots(coeffs)
    scale = 1.0 + max(abs(r) for r in roots)
    gate = _ROOT_SCALE * tolerance * scale

    snapped = [complex(r.real, 0.0) if abs(r.imag) <= _ROOT_SCALE * tolerance * (1.0 + abs(r)) else r for r in roots]
    for i in range(6):
        for j in range(i + 1, 6):
            if abs(snapped[i] - snapped[j]) <= gate:
                raise NotSquarefree(
                    f"roots {snapped[i]:.12g} and {snapped[j]:.12g} separated by "
                    f"less than the squarefree gate {gate:.3g}"
                )
    ordered, n_real = _order_roots(snapped, gate)

    fixed, anti = _split_components(coeffs, [r.real for r in ordered[:n_real]], lift_sign)
    return RealHyperellipticCurve(
        coefficients=coeffs,
        lift_sign=lift_sign,
        equality_tolerance=tolerance,
        roots=ordered,
        n_real_roots=n_real,
        fixed_circles=fixed,
        anti_real_components=anti,
    )


def _validate_coefficients(coefficients) -> tuple[float, ...]:
    if len(coefficients) != 7:
        raise NonRealCoefficient("expected exactly 7 coefficients a0..a6")
    out = []
    for c in coefficients:
        if isinstance(c, complex):
            if c.imag != 0.0:
                raise NonRealCoefficient(f"coefficient {c!r} has nonzero imaginary part")
            c = c.real
        try:
            v = float(c)
        except (TypeError, ValueError) as exc:
            raise NonRealCoefficient(f"coefficient {c!r} is not a real number") from exc
        if not math.isfinite(v):
            raise NonRealCoefficient(f"coefficient {c!r} is not finite")
        out.append(v)
    if out[6] == 0.0:
        raise DegreeError("leading coefficient a6 must be nonzero")
    return tuple(out)


def _polished_roots(coeffs: tuple[float, ...]) -> list[complex]:
    raw = np.roots(list(reversed(coeffs)))
    polished = []
    for r in raw.tolist():
        # one Newton step on top of the companion-matrix eigenvalues
        fp = _horner_prime(coeffs, r)
        if abs(fp) > 1.0e-30:
            r = r - _horner(coeffs, r) / fp
        polished.append(complex(r))
    return polished


def _horner(coeffs, x):
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _horner_prime(coeffs, x):
    acc = 0j
    for k in range(6, 0, -1):
        acc = acc * x + k * coeffs[k]
    return acc


def _order_roots(snapped: list[complex], gate: float) -> tuple[tuple[complex, ...], int]:
    reals = sorted(r.real for r in snapped if r.imag == 0.0)
    upper = sorted((r for r in snapped if r.imag > 0.0), key=lambda z: (z.real, z.imag))
    lower = [r for r in snapped if r.imag < 0.0]
    if len(upper) != len(lower):
        raise LabError("conjugate pairing of complex roots failed")
    ordered: list[complex] = [complex(r, 0.0) for r in reals]
    for z in upper:
        best = min(lower, key=lambda w: abs(w - z.conjugate()))
        if abs(best - z.conjugate()) > gate:
            raise LabError("conjugate pairing of complex roots failed")
        lower.remove(best)
        sym = 0.5 * (z + best.conjugate())  # enforce exact conjugate symmetry
        ordered.extend([sym, sym.conjugate()])
    return tuple(ordered), len(reals)


def _split_components(coeffs, real_roots, lift_sign):
    """Partition the real x-axis by the real roots and classify each closed
    piece as fixed-locus support (sigma*f >= 0) or anti-real support."""
    rs = sorted(real_roots)
    pieces: list[tuple[float, float, float]] = []  # (lo, hi, probe)
    if not rs:
        pieces.append((-math.inf, math.inf, 0.0))
    else:
        span = max(1.0, rs[-1] - rs[0])
        pieces.append((-math.inf, rs[0], rs[0] - span))
        for a, b in zip(rs, rs[1:]):
            pieces.append((a, b, 0.5 * (a + b)))
        pieces.append((rs[-1], math.inf, rs[-1] + span))

    fixed_iv: list[tuple[float, float]] = []
    anti_iv: list[tuple[float, float]] = []
    for lo, hi, probe in pieces:
        value = lift_sign * _horner(coeffs, probe).real
        (fixed_iv if value > 0.0 else anti_iv).append((lo, hi))

    def assemble(intervals, cls):
        rays = [iv for iv in intervals if math.isinf(iv[0]) or math.isinf(iv[1])]
        ovals = sorted(iv for iv in intervals if iv not in rays)
        comps = [
            cls(index=i, intervals=(iv,), through_infinity=False)
            for i, iv in enumerate(ovals)
        ]
        if rays:
            # even degree: both rays carry the same sign and join at infinity
            comps.append(
                cls(index=len(comps), intervals=tuple(sorted(rays)), through_infinity=True)
            )
        return tuple(comps)

    return assemble(fixed_iv, FixedCircle), assemble(anti_iv, AntiRealComponent)


# --------------------------------------------------------------------------
# classification


def classify(curve: RealHyperellipticCurve) -> TopologicalType:
    """Topological type (n, a, m) of the real structure.

    n counts fixed circles (n = m for m > 0, n = 1 for m = 0 with nonempty
    real locus), a records whether the complement of the real locus in the
    complex curve is connected (a = 1) or not (a = 0).  Raises EmptyRealLocus
    when tau has no fixed points.
    """
    if not curve.fixed_circles:
        raise EmptyRealLocus("the chosen lift has no real points")
    m = curve.n_real_roots // 2
    n = len(curve.fixed_circles)
    expected_n = m if m > 0 else 1
    if n != expected_n:
        raise LabError(f"component count n={n} disagrees with m={m}")
    a = 0 if m in (0, 3) else 1
    return TopologicalType(n=n, a=a, m=m)


def classification_notes(curve: RealHyperellipticCurve) -> list[str]:
    """Human-readable remarks attached to classification reports."""
    notes = []
    try:
        classify(curve)
    except EmptyRealLocus:
        return ["real locus is empty for this lift"]
    m = curve.n_real_roots // 2
    if m == 0:
        notes.append(
            "no real Weierstrass points: the real locus is a single circle "
            "through the two points at infinity"
        )
        if curve.sign_a6 < 0 and curve.lift_sign == -1:
            notes.append(
                "negative-definite sextic with lift_sign=-1: the circle covers "
                "the whole real x-line"
            )
    return notes


def fixed_and_antireal_components(
    curve: RealHyperellipticCurve,
) -> tuple[tuple[FixedCircle, ...], tuple[AntiRealComponent, ...]]:
    """Connected components of the fixed and anti-real loci, ovals ordered
    left to right with the unbounded component (if any) last."""
    return curve.fixed_circles, curve.anti_real_components


# --------------------------------------------------------------------------
# point operations


def on_curve(curve: RealHyperellipticCurve, point: CurvePoint) -> bool:
    if point.kind == INFINITY:
        return point.branch in (1, -1)
    fx = curve.f(point.x)
    scale = 1.0 + abs(fx) + abs(point.y) ** 2
    return abs(point.y * point.y - fx) <= 10.0 * _ROOT_SCALE * curve.equality_tolerance * scale


def _require_on_curve(curve, point):
    if not on_curve(curve, point):
        raise OffCurve(f"point {point} does not satisfy y^2 = f(x)")


def involute(curve: RealHyperellipticCurve, point: CurvePoint, which: str) -> CurvePoint:
    """Apply tau, iota, or their composition to a point.

    At infinity: iota swaps the two branches; tau sends branch s to
    s * lift_sign * sign(a6) (conjugation fixes x^3 and multiplies the
    asymptotic y/x^3 = s*sqrt(a6) by the lift sign, so the branch flips
    exactly when sigma*sqrt(a6) differs from sqrt(a6)).
    """
    _require_on_curve(curve, point)
    if which == "tau":
        if point.kind == INFINITY:
            return infinity_point(point.branch * curve.lift_sign * curve.sign_a6)
        return affine_point(point.x.conjugate(), curve.lift_sign * point.y.conjugate())
    if which == "iota":
        if point.kind == INFINITY:
            return infinity_point(-point.branch)
        return affine_point(point.x, -point.y)
    if which == "tau_iota":
        return involute(curve, involute(curve, point, "iota"), "tau")
    raise ValueError(f"unknown involution {which!r}")


def locate(curve: RealHyperellipticCurve, point: CurvePoint) -> Region:
    """Classify a point as lying on a fixed circle, an anti-real component,
    or the generic locus, and report the component index."""
    _require_on_curve(curve, point)
    tol = curve.equality_tolerance
    tau_p = involute(curve, point, "tau")
    if point_distance(tau_p, point) <= tol:
        return _locate_on(curve.fixed_circles, curve, point, REGION_FIXED)
    iota_p = involute(curve, point, "iota")
    if point_distance(tau_p, iota_p) <= tol:
        return _locate_on(curve.anti_real_components, curve, point, REGION_ANTI)
    return GENERIC_REGION


def _locate_on(components, curve, point, kind):
    if point.kind == INFINITY:
        for comp in components:
            if comp.through_infinity:
                return Region(kind, comp.index)
        raise LabError("infinity point fixed but no unbounded component found")
    x = point.x.real
    pad = 10.0 * curve.equality_tolerance * (1.0 + abs(x))
    for comp in components:
        if comp.contains_x(x, pad):
            return Region(kind, comp.index)
    raise LabError(f"point with x={x!r} not contained in any {kind} support")


# --------------------------------------------------------------------------
# sampling


def sample(
    curve: RealHyperellipticCurve,
    region: Region,
    rng: np.random.Generator,
    radius: float = 5.0,
) -> CurvePoint:
    """Draw one point from the requested region.

    Fixed/anti-real regions sample x uniformly on bounded intervals and via a
    half-Cauchy stretch along unbounded rays, excluding Weierstrass x-values
    within tolerance; the y-branch is a fair coin.  The generic region samples
    x uniformly from a complex disk of the given radius.  Points at infinity
    are never produced.  Raises EmptyRegion for a missing component index.
    """
    if region.kind == REGION_FIXED:
        comp = _component(curve.fixed_circles, region.index, "fixed circle")
        y_real = curve.lift_sign == 1
        return _sample_component(curve, comp, y_real, rng)
    if region.kind == REGION_ANTI:
        comp = _component(curve.anti_real_components, region.index, "anti-real component")
        y_real = curve.lift_sign == -1
        return _sample_component(curve, comp, y_real, rng)
    if region.kind == REGION_GENERIC:
        return _sample_generic(curve, rng, radius)
    raise ValueError(f"unknown region kind {region.kind!r}")


def _component(components, index, label):
    if not components:
        raise EmptyRegion(f"curve has no {label}s")
    if not (0 <= index < len(components)):
        raise EmptyRegion(f"no {label} with index {index}")
    return components[index]


def _sample_component(curve, comp, y_real, rng):
    x = _sample_support_x(curve, comp.intervals, rng)
    magnitude = math.sqrt(abs(curve.f(x).real))
    sign = 1.0 if rng.integers(0, 2) == 1 else -1.0
    y = complex(sign * magnitude, 0.0) if y_real else complex(0.0, sign * magnitude)
    return affine_point(complex(x, 0.0), y)


def _sample_support_x(curve, intervals, rng):
    for _ in range(1000):
        lo, hi = intervals[int(rng.integers(0, len(intervals)))]
        u = float(rng.random())
        if math.isinf(lo) and math.isinf(hi):
            x = math.tan(math.pi * (u - 0.5))
        elif math.isinf(lo):
            x = hi - math.tan(0.5 * math.pi * u)
        elif math.isinf(hi):
            x = lo + math.tan(0.5 * math.pi * u)
        else:
            x = lo + u * (hi - lo)
        if _clear_of_roots(curve, complex(x, 0.0)):
            return x
    raise LabError("sampling stalled while avoiding Weierstrass x-values")


def _sample_generic(curve, rng, radius):
    for _ in range(1000):
        r = radius * math.sqrt(float(rng.random()))
        theta = 2.0 * math.pi * float(rng.random())
        x = complex(r * math.cos(theta), r * math.sin(theta))
        if _clear_of_roots(curve, x):
            sign = 1.0 if rng.integers(0, 2) == 1 else -1.0
            return affine_point(x, sign * cmath.sqrt(curve.f(x)))
    raise LabError("sampling stalled while avoiding Weierstrass x-values")


def _clear_of_roots(curve, x):
    pad = curve.equality_tolerance
    return all(abs(x - r) > pad * (1.0 + abs(r)) for r in curve.roots)


# --------------------------------------------------------------------------
# curve-spec files and content hashing


def canonical_curve_spec(curve: RealHyperellipticCurve) -> dict:
    return {
        "coeffs": list(curve.coefficients),
        "lift_sign": curve.lift_sign,
        "tol": curve.equality_tolerance,
    }


def curve_content_hash(curve: RealHyperellipticCurve) -> str:
    """SHA-256 of the canonical curve spec; embedded in every report."""
    blob = json.dumps(canonical_curve_spec(curve), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("ascii")).hexdigest()


def curve_from_spec(data: dict, tol_override: float | None = None) -> RealHyperellipticCurve:
    """Build a curve from a spec dict {"coeffs": [a0..a6], "lift_sign": +-1,
    "tol": float}; unknown keys are rejected so stale configs fail loudly."""
    if not isinstance(data, dict):
        raise ValueError("curve spec must be a JSON object")
    unknown = set(data) - {"coeffs", "lift_sign", "tol"}
    if unknown:
        raise ValueError(f"unknown curve spec keys: {sorted(unknown)}")
    if "coeffs" not in data:
        raise ValueError("curve spec requires 'coeffs'")
    tol = tol_override if tol_override is not None else data.get("tol", 1.0e-9)
    return build_curve(data["coeffs"], lift_sign=data.get("lift_sign", 1), tolerance=tol)
