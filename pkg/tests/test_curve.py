import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from real_subbundle_lab.curve import (
    GENERIC_REGION,
    anti_real_region,
    build_curve,
    canonical_curve_spec,
    classification_notes,
    classify,
    curve_content_hash,
    curve_from_spec,
    fixed_region,
    infinity_point,
    involute,
    locate,
    on_curve,
    point_distance,
    sample,
    weierstrass_points,
)
from real_subbundle_lab.errors import (
    DegreeError,
    EmptyRealLocus,
    EmptyRegion,
    NonRealCoefficient,
    NotSquarefree,
    OffCurve,
)

from conftest import FIXTURE_COEFFS, FIXTURE_TYPES


# --------------------------------------------------------------------------
# construction and validation


def test_fixture_classification(curves):
    for name, curve in curves.items():
        t = classify(curve)
        assert (t.n, t.a, t.m) == FIXTURE_TYPES[name], name


def test_roots_ordering(c4, c1):
    # reals ascending first, conjugate pairs adjacent (+Im first)
    assert [round(r.real) for r in c4.roots] == [-3, -2, -1, 1, 2, 3]
    assert all(abs(r.imag) == 0 for r in c4.roots)
    assert c1.n_real_roots == 0
    for i in range(0, 6, 2):
        assert c1.roots[i].imag > 0
        assert c1.roots[i + 1] == c1.roots[i].conjugate()


def test_tau_root_permutation(c4, c1, c2):
    assert c4.tau_root_permutation() == (0, 1, 2, 3, 4, 5)
    assert c1.tau_root_permutation() == (1, 0, 3, 2, 5, 4)
    perm = c2.tau_root_permutation()
    assert perm[0] == 0 and perm[1] == 1  # the two real roots stay put
    assert perm[2] == 3 and perm[3] == 2


def test_rejects_repeated_roots():
    # (x^2 - 1)^2 (x^2 + 1) has double roots at +-1
    p = np.polynomial.Polynomial.fromroots([1, 1, -1, -1, 1j, -1j])
    with pytest.raises(NotSquarefree):
        build_curve([c.real for c in p.coef])


def test_rejects_complex_coefficients_and_bad_degree():
    with pytest.raises(NonRealCoefficient):
        build_curve([0, 0, 0, 0, 0, 0, 1j])
    with pytest.raises(NonRealCoefficient):
        build_curve([1, 0, 0])
    with pytest.raises(DegreeError):
        build_curve([1, 0, 0, 0, 0, 0, 0])  # vanishing leading coefficient


def test_empty_real_locus_other_lift():
    # f = (x^2+1)(x^2+2)(x^2+3) > 0 everywhere, so the -1 lift has no fixed
    # points and classification must refuse.
    curve = build_curve(FIXTURE_COEFFS["c1"], lift_sign=-1)
    assert curve.fixed_circles == ()
    with pytest.raises(EmptyRealLocus):
        classify(curve)


def test_classification_notes_mention_single_circle(c1, c4):
    notes = classification_notes(c1)
    assert any("single circle" in note for note in notes)
    assert classification_notes(c4) == []


# --------------------------------------------------------------------------
# component geometry


def test_fixed_circle_supports(c2, c3, c4):
    # c2: rays beyond +-1 glued through infinity
    (circle,) = c2.fixed_circles
    assert circle.through_infinity
    (lo0, hi0), (lo1, hi1) = circle.intervals
    assert math.isinf(lo0) and hi0 == pytest.approx(-1.0)
    assert lo1 == pytest.approx(1.0) and math.isinf(hi1)

    # c3: bounded oval [-1, 1] first, unbounded component last
    first, last = c3.fixed_circles
    assert not first.through_infinity
    assert first.intervals[0] == (pytest.approx(-1.0), pytest.approx(1.0))
    assert last.through_infinity

    # c4: ovals ordered left to right, unbounded last
    a, b, c = c4.fixed_circles
    assert a.intervals[0] == (pytest.approx(-2.0), pytest.approx(-1.0))
    assert b.intervals[0] == (pytest.approx(1.0), pytest.approx(2.0))
    assert c.through_infinity


def test_anti_real_components(c1, c2, c4):
    assert c1.anti_real_components == ()
    (arc,) = c2.anti_real_components
    assert arc.intervals[0] == (pytest.approx(-1.0), pytest.approx(1.0))
    assert len(c4.anti_real_components) == 3
    assert all(not a.through_infinity for a in c4.anti_real_components)


def test_weierstrass_points_lie_on_curve(curves):
    for curve in curves.values():
        pts = weierstrass_points(curve)
        assert len(pts) == 6
        for p in pts:
            assert p.y == 0
            assert on_curve(curve, p)


# --------------------------------------------------------------------------
# involutions


def test_involution_algebra_on_samples(curves, rng):
    for curve in curves.values():
        regions = [GENERIC_REGION]
        regions += [fixed_region(i) for i in range(len(curve.fixed_circles))]
        regions += [anti_real_region(i) for i in range(len(curve.anti_real_components))]
        for region in regions:
            for _ in range(20):
                p = sample(curve, region, rng)
                tau_tau = involute(curve, involute(curve, p, "tau"), "tau")
                iota_iota = involute(curve, involute(curve, p, "iota"), "iota")
                ti = involute(curve, involute(curve, p, "iota"), "tau")
                it = involute(curve, involute(curve, p, "tau"), "iota")
                assert point_distance(tau_tau, p) <= 1e-12
                assert point_distance(iota_iota, p) <= 1e-12
                assert point_distance(ti, it) <= 1e-12
                assert point_distance(involute(curve, p, "tau_iota"), ti) == 0


def test_involutions_at_infinity(c1, c4):
    # both fixtures have positive leading coefficient and the +1 lift,
    # so conjugation fixes each branch and iota swaps them
    for curve in (c1, c4):
        plus, minus = infinity_point(1), infinity_point(-1)
        assert involute(curve, plus, "tau") == plus
        assert involute(curve, minus, "tau") == minus
        assert involute(curve, plus, "iota") == minus


def test_involute_rejects_off_curve_points(c1):
    from real_subbundle_lab.curve import affine_point

    with pytest.raises(OffCurve):
        involute(c1, affine_point(0.0, 1.0), "tau")


# --------------------------------------------------------------------------
# locate and sample


def test_sampled_points_locate_in_their_region(curves, rng):
    for curve in curves.values():
        for i in range(len(curve.fixed_circles)):
            for _ in range(10):
                p = sample(curve, fixed_region(i), rng)
                assert locate(curve, p) == fixed_region(i)
        for i in range(len(curve.anti_real_components)):
            for _ in range(10):
                p = sample(curve, anti_real_region(i), rng)
                assert locate(curve, p) == anti_real_region(i)
        for _ in range(10):
            p = sample(curve, GENERIC_REGION, rng)
            assert locate(curve, p) == GENERIC_REGION


def test_infinity_locates_on_unbounded_circle(c2, c4):
    assert locate(c2, infinity_point(1)) == fixed_region(0)
    assert locate(c4, infinity_point(-1)) == fixed_region(2)


def test_sample_missing_component(c1, rng):
    with pytest.raises(EmptyRegion):
        sample(c1, anti_real_region(0), rng)
    with pytest.raises(EmptyRegion):
        sample(c1, fixed_region(5), rng)


# --------------------------------------------------------------------------
# specs and hashing


def test_spec_round_trip(curves):
    for curve in curves.values():
        rebuilt = curve_from_spec(canonical_curve_spec(curve))
        assert curve_content_hash(rebuilt) == curve_content_hash(curve)


def test_spec_rejects_unknown_keys():
    with pytest.raises(ValueError):
        curve_from_spec({"coeffs": FIXTURE_COEFFS["c1"], "extra": 1})


def test_spec_tolerance_override():
    curve = curve_from_spec({"coeffs": FIXTURE_COEFFS["c1"]}, tol_override=1e-7)
    assert curve.equality_tolerance == 1e-7


# --------------------------------------------------------------------------
# classification as a property over generated curves


@st.composite
def squarefree_even_sextics(draw):
    """Coefficients of f = prod (x^2 - r_i^2) * prod (x^2 + s_j^2) with all
    the quadratic factors distinct, plus the number of real root pairs."""
    m = draw(st.integers(min_value=0, max_value=3))
    values = draw(
        st.lists(
            st.floats(min_value=0.3, max_value=4.0, allow_nan=False),
            min_size=3,
            max_size=3,
            unique=True,
        )
    )
    # keep factors x^2 - v^2 and x^2 + w^2 pairwise separated
    values = sorted(values)
    if min(b - a for a, b in zip(values, values[1:])) < 0.05:
        values = [v + 0.2 * i for i, v in enumerate(values)]
    roots = []
    for i, v in enumerate(values):
        roots += [v, -v] if i < m else [1j * v, -1j * v]
    coef = np.polynomial.Polynomial.fromroots(roots).coef
    return [float(c.real) for c in coef], m


@settings(max_examples=40, deadline=None)
@given(squarefree_even_sextics())
def test_classification_matches_real_root_pairs(case):
    coeffs, m = case
    curve = build_curve(coeffs, tolerance=1e-9)
    t = classify(curve)
    assert t.m == m
    assert t.n == (m if m > 0 else 1)
    assert t.a == (0 if m in (0, 3) else 1)
