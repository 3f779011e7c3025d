"""Effective divisors on a real curve and their topological bookkeeping.

A divisor is a finite multiset of curve points.  The real structure acts
entrywise; a divisor fixed by tau is "real" and carries a signature: the
vector of mod-2 point counts on each fixed circle ("odd circles").  Conjugate
pairs and anti-real entries contribute nothing mod 2, which gives the parity
law  sum(bits) == deg mod 2  for every real divisor.

All point comparisons are tolerance-aware multiset matching with an
ambiguity guard: if the second-nearest candidate is within a factor 10 of
the nearest (and both are within tolerance), the match is refused rather
than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .curve import (
    AFFINE,
    INFINITY,
    REGION_FIXED,
    CurvePoint,
    RealHyperellipticCurve,
    affine_point,
    infinity_point,
    involute,
    locate,
    on_curve,
    point_distance,
)
from .errors import AmbiguousMatch, BadParity, NotReal, OffCurve

_AMBIGUITY_FACTOR = 10.0


@dataclass(frozen=True)
class LineBundleTopType:
    """Topological type of a real line bundle: total degree plus the parity
    of the point count over each fixed circle."""

    degree: int
    odd_circles: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.odd_circles):
            raise BadParity("odd_circles entries must be 0 or 1")
        if sum(self.odd_circles) % 2 != self.degree % 2:
            raise BadParity(
                f"odd-circle bits {self.odd_circles} violate parity for degree {self.degree}"
            )


def enumerate_line_bundle_types(n: int, d: int) -> list[LineBundleTopType]:
    """All 2^(n-1) odd-circle vectors compatible with degree-d parity, in
    lexicographic order."""
    if n < 1:
        raise ValueError("need at least one fixed circle")
    out = []
    for bits in product((0, 1), repeat=n):
        if sum(bits) % 2 == d % 2:
            out.append(LineBundleTopType(degree=d, odd_circles=bits))
    return out


# --------------------------------------------------------------------------


def _sort_key(entry):
    p, _ = entry
    kind_rank = 0 if p.kind == AFFINE else 1
    return (kind_rank, p.x.real, p.x.imag, p.y.real, p.y.imag, p.branch)


@dataclass(frozen=True)
class Divisor:
    """Effective divisor: canonically ordered entries (point, multiplicity)
    on a fixed curve.  Construct through :func:`divisor`."""

    curve: RealHyperellipticCurve
    entries: tuple[tuple[CurvePoint, int], ...]

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.entries)

    def points(self) -> list[CurvePoint]:
        """Entries expanded with multiplicity."""
        return [p for p, m in self.entries for _ in range(m)]

    def __add__(self, other: "Divisor") -> "Divisor":
        if other.curve is not self.curve:
            raise ValueError("divisors live on different curves")
        return divisor(self.curve, list(self.entries) + list(other.entries))


def divisor(curve: RealHyperellipticCurve, entries) -> Divisor:
    """Build a divisor from (point, mult) pairs or bare points.

    Points are validated against the curve equation; entries equal within
    tolerance are merged by summing multiplicities.
    """
    normalized: list[tuple[CurvePoint, int]] = []
    for item in entries:
        if isinstance(item, CurvePoint):
            p, m = item, 1
        else:
            p, m = item
        if not isinstance(m, int) or m < 1:
            raise ValueError(f"multiplicity {m!r} must be a positive integer")
        if not on_curve(curve, p):
            raise OffCurve(f"point {p} does not satisfy y^2 = f(x)")
        for k, (q, mq) in enumerate(normalized):
            if point_distance(p, q) <= curve.equality_tolerance:
                normalized[k] = (q, mq + m)
                break
        else:
            normalized.append((p, m))
    return Divisor(curve, tuple(sorted(normalized, key=_sort_key)))


def near_branch_point(d: Divisor) -> bool:
    """True if some entry sits within tolerance of a Weierstrass point."""
    tol = d.curve.equality_tolerance
    ws = [affine_point(r, 0.0) for r in d.curve.roots]
    return any(
        point_distance(p, w) <= tol for p, _ in d.entries for w in ws
    )


# --------------------------------------------------------------------------
# tolerance-aware multiset matching


def match_point_multisets(
    curve: RealHyperellipticCurve,
    items_a: list[CurvePoint],
    items_b: list[CurvePoint],
    tol: float | None = None,
) -> bool:
    """Greedy nearest-neighbour matching of two point lists.

    Raises AmbiguousMatch when a point sees two genuinely distinct candidates
    with the second within 10x of the first (both inside tolerance).
    """
    if tol is None:
        tol = curve.equality_tolerance
    if len(items_a) != len(items_b):
        return False
    remaining = list(items_b)
    for a in items_a:
        dists = sorted(
            ((point_distance(a, b), i) for i, b in enumerate(remaining)),
            key=lambda t: t[0],
        )
        if not dists or dists[0][0] > tol:
            return False
        d1, i1 = dists[0]
        if len(dists) > 1:
            d2, i2 = dists[1]
            if (
                d2 <= tol
                and d2 <= _AMBIGUITY_FACTOR * d1
                and point_distance(remaining[i1], remaining[i2]) > 0.0
            ):
                raise AmbiguousMatch(
                    f"two distinct candidates at distances {d1:.3g} and {d2:.3g} "
                    f"both within tolerance {tol:.3g}"
                )
        remaining.pop(i1)
    return True


def same_divisor(a: Divisor, b: Divisor, tol: float | None = None) -> bool:
    return match_point_multisets(a.curve, a.points(), b.points(), tol=tol)


# --------------------------------------------------------------------------
# real structure on divisors


def transform(d: Divisor, which: str, subset: Divisor | None = None) -> Divisor:
    """Apply tau/iota/tau_iota entrywise, or iota to a designated sub-multiset
    only (``which="iota_on_subset"``, used for orbit constructions)."""
    if which == "iota_on_subset":
        if subset is None:
            raise ValueError("iota_on_subset requires a subset divisor")
        remaining = _subtract(d, subset)
        flipped = [
            (involute(d.curve, p, "iota"), m) for p, m in subset.entries
        ]
        return divisor(d.curve, list(remaining) + flipped)
    mapped = [(involute(d.curve, p, which), m) for p, m in d.entries]
    return divisor(d.curve, mapped)


def _subtract(d: Divisor, subset: Divisor) -> list[tuple[CurvePoint, int]]:
    tol = d.curve.equality_tolerance
    remaining = [[p, m] for p, m in d.entries]
    for q in subset.points():
        candidates = sorted(
            ((point_distance(q, p), k) for k, (p, m) in enumerate(remaining) if m > 0),
            key=lambda t: t[0],
        )
        if not candidates or candidates[0][0] > tol:
            raise ValueError("subset is not contained in the divisor")
        remaining[candidates[0][1]][1] -= 1
    return [(p, m) for p, m in remaining if m > 0]


def is_real(d: Divisor) -> bool:
    """True when tau fixes the divisor as a multiset."""
    return match_point_multisets(d.curve, d.points(), transform(d, "tau").points())


def signature(d: Divisor) -> LineBundleTopType:
    """Topological type of O(D) for a real divisor D: degree plus per-circle
    parity bits.  Raises NotReal for divisors not fixed by tau."""
    if not is_real(d):
        raise NotReal("signature is defined for real divisors only")
    bits = [0] * len(d.curve.fixed_circles)
    for p, m in d.entries:
        region = locate(d.curve, p)
        if region.kind == REGION_FIXED:
            bits[region.index] += m
    # parity law: conjugate pairs and anti-real entries cancel mod 2,
    # so LineBundleTopType's validator doubles as an internal consistency check
    return LineBundleTopType(degree=d.degree, odd_circles=tuple(b % 2 for b in bits))


# --------------------------------------------------------------------------
# JSON literals


def divisor_to_literal(d: Divisor) -> dict:
    entries = []
    for p, m in d.entries:
        if p.kind == INFINITY:
            entries.append({"infinity": p.branch, "mult": m})
        else:
            entries.append(
                {"x": [p.x.real, p.x.imag], "y": [p.y.real, p.y.imag], "mult": m}
            )
    return {"entries": entries}


def divisor_from_literal(curve: RealHyperellipticCurve, data: dict) -> Divisor:
    if not isinstance(data, dict) or set(data) != {"entries"}:
        raise ValueError('divisor literal must be {"entries": [...]}')
    entries = []
    for item in data["entries"]:
        unknown = set(item) - {"x", "y", "infinity", "mult"}
        if unknown:
            raise ValueError(f"unknown divisor entry keys: {sorted(unknown)}")
        m = item.get("mult", 1)
        if "infinity" in item:
            entries.append((infinity_point(item["infinity"]), m))
        else:
            x = complex(*item["x"])
            y = complex(*item["y"])
            entries.append((affine_point(x, y), m))
    return divisor(curve, entries)
