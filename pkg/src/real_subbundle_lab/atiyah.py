"""Atiyah orbits of degree-3 divisors and their reality bookkeeping.

A degree-3 divisor D = A + B + C determines three further divisors by
flipping two of the three points with the hyperelliptic involution:

    A + B + C,   A + iB + iC,   iA + B + iC,   iA + iB + C.

All four share the class of D + (correction in |H|) twists, and the 4-set is
independent of how D is split into A, B, C.  The real structure tau permutes
this 4-set whenever it fixes one member's class, so when the members are
pairwise distinct the number of tau-fixed members is 0, 2, or 4 — never 1
or 3.  A divisor is "projectively real" when tau(D) lands somewhere in its
own orbit.

Orbits whose members collide, touch Weierstrass points, contain
hyperelliptic-paired base points, or sit near the matching tolerance are
flagged as degenerate; surveys discard (and count) them rather than bin them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curve import RealHyperellipticCurve, involute, point_distance
from .divisors import (
    Divisor,
    LineBundleTopType,
    divisor,
    match_point_multisets,
    near_branch_point,
    signature,
    is_real,
)
from .errors import AmbiguousMatch, LabError, NotReal

_FLIP_PATTERNS = ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0))

CASE_REAL_BASE = "real_base"
CASE_TAU_SWAPS = "tau_fixes_one_swaps_rest"
CASE_NONE = "none"

# coarse multiplier for the near-tolerance uncertainty band
_COARSE = 1.0e3


@dataclass(frozen=True)
class AtiyahOrbit:
    base: Divisor
    members: tuple[Divisor, Divisor, Divisor, Divisor]
    members_distinct: bool


@dataclass(frozen=True)
class OrbitReport:
    projectively_real: bool
    case_label: str
    real_member_count: int
    common_signature: LineBundleTopType | None
    flags: tuple[str, ...]  # sorted degeneracy flags; empty = clean orbit
    orbit: AtiyahOrbit


def orbit(d: Divisor) -> AtiyahOrbit:
    """The four-member orbit of a degree-3 divisor under double iota-flips."""
    if d.degree != 3:
        raise ValueError(f"orbit is defined for degree-3 divisors, got {d.degree}")
    curve = d.curve
    base_points = d.points()
    members = []
    for pattern in _FLIP_PATTERNS:
        pts = [
            involute(curve, p, "iota") if bit else p
            for p, bit in zip(base_points, pattern)
        ]
        members.append(divisor(curve, pts))
    distinct = True
    for i in range(4):
        for j in range(i + 1, 4):
            try:
                if _same(members[i], members[j], curve.equality_tolerance):
                    distinct = False
            except AmbiguousMatch:
                distinct = False
    return AtiyahOrbit(base=members[0], members=tuple(members), members_distinct=distinct)


def _same(a: Divisor, b: Divisor, tol: float) -> bool:
    return match_point_multisets(a.curve, a.points(), b.points(), tol=tol)


def analyze(d: Divisor) -> OrbitReport:
    """Full reality report for an orbit.

    The near_tolerance flag records any comparison whose outcome changes
    between the working tolerance and a 10^3-coarser one (or that raised an
    ambiguity) — those orbits are not trustworthy at this precision.
    """
    curve = d.curve
    tol = curve.equality_tolerance
    orb = orbit(d)
    flags: set[str] = set()

    base_points = orb.base.points()
    if near_branch_point(orb.base):
        flags.add("weierstrass_point")
    for i in range(len(base_points)):
        for j in range(i + 1, len(base_points)):
            if (
                point_distance(base_points[i], involute(curve, base_points[j], "iota"))
                <= tol
            ):
                flags.add("iota_paired_points")
    if not orb.members_distinct:
        flags.add("coincident_members")

    def robust_same(a: Divisor, b: Divisor) -> bool:
        try:
            fine = _same(a, b, tol)
        except AmbiguousMatch:
            flags.add("near_tolerance")
            fine = False
        try:
            coarse = _same(a, b, _COARSE * tol)
        except AmbiguousMatch:
            flags.add("near_tolerance")
            coarse = fine
        if coarse != fine:
            flags.add("near_tolerance")
        return fine

    from .divisors import transform  # local import to avoid cycle at module load

    tau_d = transform(orb.base, "tau")
    member_match = [robust_same(tau_d, m) for m in orb.members]
    projectively_real = any(member_match)
    if member_match[0]:
        case_label = CASE_REAL_BASE
    elif projectively_real:
        case_label = CASE_TAU_SWAPS
    else:
        case_label = CASE_NONE

    real_members = [robust_same(transform(m, "tau"), m) for m in orb.members]
    count = sum(real_members)

    if orb.members_distinct and not flags and count not in (0, 2, 4):
        raise LabError(
            f"orbit parity violated: {count} real members among distinct members"
        )

    common_sig: LineBundleTopType | None = None
    if count > 0:
        sigs = []
        try:
            sigs = [signature(m) for m, r in zip(orb.members, real_members) if r]
        except (NotReal, AmbiguousMatch):
            flags.add("near_tolerance")
        if sigs:
            if all(s == sigs[0] for s in sigs):
                common_sig = sigs[0]
            else:
                flags.add("signature_disagreement")

    return OrbitReport(
        projectively_real=projectively_real,
        case_label=case_label,
        real_member_count=count,
        common_signature=common_sig,
        flags=tuple(sorted(flags)),
        orbit=orb,
    )


def matches_determinant(d: Divisor, lam: LineBundleTopType) -> bool:
    """Whether a real degree-3 divisor has the odd-circle vector of the
    determinant type lam.  Raises NotReal for non-real input."""
    if len(lam.odd_circles) != len(d.curve.fixed_circles):
        raise ValueError("determinant type has wrong number of circles")
    if not is_real(d):
        raise NotReal("matches_determinant requires a real divisor")
    return signature(d).odd_circles == lam.odd_circles


def antireal_obstruction(curve: RealHyperellipticCurve) -> bool:
    """True when the curve has no anti-real points, so no orbit can realize
    a real-member count of zero via anti-real pairs."""
    return len(curve.anti_real_components) == 0
