import cmath

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from real_subbundle_lab.curve import (
    GENERIC_REGION,
    affine_point,
    fixed_region,
    infinity_point,
    involute,
    sample,
)
from real_subbundle_lab.divisors import (
    LineBundleTopType,
    divisor,
    divisor_from_literal,
    divisor_to_literal,
    enumerate_line_bundle_types,
    is_real,
    match_point_multisets,
    near_branch_point,
    same_divisor,
    signature,
    transform,
)
from real_subbundle_lab.errors import AmbiguousMatch, BadParity, NotReal, OffCurve


def _fiber_point(curve, x, sign=1):
    return affine_point(x, sign * cmath.sqrt(curve.f(x)))


# --------------------------------------------------------------------------
# topological types


def test_parity_validation():
    LineBundleTopType(degree=3, odd_circles=(1, 1, 1))
    LineBundleTopType(degree=3, odd_circles=(1, 0, 0))
    with pytest.raises(BadParity):
        LineBundleTopType(degree=3, odd_circles=(1, 1, 0))
    with pytest.raises(BadParity):
        LineBundleTopType(degree=0, odd_circles=(1, 0, 0))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(min_value=1, max_value=6), d=st.integers(min_value=0, max_value=5))
def test_enumerate_type_count(n, d):
    types = enumerate_line_bundle_types(n, d)
    assert len(types) == 2 ** (n - 1)
    assert len({t.odd_circles for t in types}) == len(types)
    for t in types:
        assert sum(t.odd_circles) % 2 == d % 2
        assert len(t.odd_circles) == n


# --------------------------------------------------------------------------
# construction


def test_divisor_merges_near_duplicates(c1):
    p = _fiber_point(c1, 0.5)
    q = _fiber_point(c1, 0.5 + 1e-13)
    d = divisor(c1, [p, q, (p, 2)])
    assert d.degree == 4
    assert len(d.entries) == 1


def test_divisor_canonical_order_is_permutation_invariant(c1):
    pts = [_fiber_point(c1, x) for x in (1.5, -0.25, 0.75)] + [infinity_point(1)]
    d1 = divisor(c1, pts)
    d2 = divisor(c1, list(reversed(pts)))
    assert d1.entries == d2.entries


def test_divisor_rejects_off_curve_and_bad_mult(c1):
    with pytest.raises(OffCurve):
        divisor(c1, [affine_point(0.0, 1.0)])
    with pytest.raises(ValueError):
        divisor(c1, [(_fiber_point(c1, 0.5), 0)])


def test_divisor_addition(c1):
    a = divisor(c1, [_fiber_point(c1, 0.5)])
    b = divisor(c1, [_fiber_point(c1, 1.5), _fiber_point(c1, 0.5)])
    total = a + b
    assert total.degree == 3
    assert total.entries[0][1] == 2  # x=0.5 collected with multiplicity 2


def test_near_branch_point(c4):
    on_branch = divisor(c4, [affine_point(1.0, 0.0)])
    assert near_branch_point(on_branch)
    generic = divisor(c4, [_fiber_point(c4, 1.5)])
    assert not near_branch_point(generic)


# --------------------------------------------------------------------------
# matching


def test_same_divisor_tolerates_small_perturbations(c1):
    pts = [_fiber_point(c1, 0.5), _fiber_point(c1, 1.25)]
    moved = [affine_point(p.x + 1e-12, p.y) for p in pts]
    fixed = [affine_point(p.x.real, p.y) for p in pts]
    assert match_point_multisets(c1, fixed, moved, tol=1e-9)
    assert not match_point_multisets(c1, fixed, [fixed[0]], tol=1e-9)


def test_matching_flags_ambiguity(c1):
    a = [_fiber_point(c1, 0.5)]
    b = [affine_point(0.5 + 1e-10, a[0].y), affine_point(0.5 - 1e-10, a[0].y)]
    with pytest.raises(AmbiguousMatch):
        match_point_multisets(c1, a + a, b, tol=1e-8)


def test_same_divisor_disagrees_on_distinct_points(c1):
    d1 = divisor(c1, [_fiber_point(c1, 0.5)])
    d2 = divisor(c1, [_fiber_point(c1, 0.6)])
    assert not same_divisor(d1, d2)


# --------------------------------------------------------------------------
# real structure


def test_transform_involutions_compose(c3, rng):
    pts = [sample(c3, GENERIC_REGION, rng) for _ in range(3)]
    d = divisor(c3, pts)
    assert same_divisor(transform(transform(d, "tau"), "tau"), d)
    assert same_divisor(transform(transform(d, "iota"), "iota"), d)
    assert same_divisor(
        transform(d, "tau_iota"), transform(transform(d, "iota"), "tau")
    )


def test_iota_on_subset(c1):
    p, q = _fiber_point(c1, 0.5), _fiber_point(c1, 1.5)
    d = divisor(c1, [p, q])
    sub = divisor(c1, [q])
    flipped = transform(d, "iota_on_subset", subset=sub)
    expected = divisor(c1, [p, involute(c1, q, "iota")])
    assert same_divisor(flipped, expected)
    with pytest.raises(ValueError):
        transform(d, "iota_on_subset", subset=divisor(c1, [_fiber_point(c1, 2.5)]))


def test_real_divisor_detection(c2, rng):
    a = sample(c2, fixed_region(0), rng)
    b = sample(c2, GENERIC_REGION, rng)
    real_d = divisor(c2, [a, b, involute(c2, b, "tau")])
    assert is_real(real_d)
    assert not is_real(divisor(c2, [a, b, b]))


def test_signature_counts_odd_circles(c4, rng):
    pts = [sample(c4, fixed_region(i), rng) for i in range(3)]
    sig = signature(divisor(c4, pts))
    assert sig.odd_circles == (1, 1, 1)

    a = sample(c4, fixed_region(1), rng)
    b = sample(c4, GENERIC_REGION, rng)
    sig2 = signature(divisor(c4, [a, b, involute(c4, b, "tau")]))
    assert sig2.odd_circles == (0, 1, 0)

    with pytest.raises(NotReal):
        signature(divisor(c4, [a, b, b]))


def test_signature_counts_multiplicity(c4, rng):
    a = sample(c4, fixed_region(0), rng)
    b = sample(c4, fixed_region(0), rng)
    c = sample(c4, fixed_region(2), rng)
    sig = signature(divisor(c4, [a, b, c]))
    assert sig.odd_circles == (0, 0, 1)


# --------------------------------------------------------------------------
# literals


def test_literal_round_trip(c2, rng):
    pts = [
        sample(c2, fixed_region(0), rng),
        sample(c2, GENERIC_REGION, rng),
        infinity_point(-1),
    ]
    d = divisor(c2, [(pts[0], 2), pts[1], pts[2]])
    lit = divisor_to_literal(d)
    back = divisor_from_literal(c2, lit)
    assert same_divisor(back, d)
    assert back.degree == d.degree


def test_literal_rejects_unknown_keys(c1):
    with pytest.raises(ValueError):
        divisor_from_literal(c1, {"points": []})
    with pytest.raises(ValueError):
        divisor_from_literal(c1, {"entries": [{"x": [0.5, 0], "y": [1, 0], "weight": 2}]})
