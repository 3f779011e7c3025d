import cmath

import pytest

from real_subbundle_lab.curve import GENERIC_REGION, affine_point, sample
from real_subbundle_lab.divisors import divisor
from real_subbundle_lab.equivalence import (
    MIN_DECISION_GAP,
    doubling_decision,
    generic_fiber_divisor,
    is_linearly_equivalent,
    linear_equivalence_decision,
    real_two_torsion_count,
    rr_basis_columns,
    torsion_representative,
    two_torsion,
)
from real_subbundle_lab.errors import DegreeMismatch, DegreeTooLarge


def _fiber(curve, x):
    y = cmath.sqrt(curve.f(x))
    return divisor(curve, [affine_point(x, y), affine_point(x, -y)])


# --------------------------------------------------------------------------
# interpolation basis


def test_basis_dimensions():
    assert rr_basis_columns(1) == [(0, False), (1, False)]
    for k in range(2, 5):
        assert len(rr_basis_columns(k)) == 2 * k - 1


# --------------------------------------------------------------------------
# membership decisions


def test_fibers_are_equivalent(c1):
    # any two fibers of the double cover cut out the same pencil
    d = linear_equivalence_decision(_fiber(c1, 0.4), _fiber(c1, 1.7))
    assert d.equivalent
    assert d.gap >= MIN_DECISION_GAP
    assert not d.jittered_inexact


def test_generic_pair_is_not_a_fiber(c1, rng):
    p = sample(c1, GENERIC_REGION, rng)
    q = sample(c1, GENERIC_REGION, rng)
    d = linear_equivalence_decision(divisor(c1, [p, q]), _fiber(c1, 0.9))
    assert not d.equivalent
    assert d.gap >= MIN_DECISION_GAP


def test_equivalence_survives_adding_a_common_point(c2, rng):
    p = sample(c2, GENERIC_REGION, rng)
    d1 = _fiber(c2, 0.25) + divisor(c2, [p])
    d2 = _fiber(c2, 2.5) + divisor(c2, [p])
    assert is_linearly_equivalent(d1, d2)


def test_self_equivalence_uses_exact_repair(c1):
    # D vs itself folds each point against its iota-image: every entry
    # doubles and must be replaced by a fresh fiber, never crude-jittered
    f = _fiber(c1, 0.8)
    d = linear_equivalence_decision(f, f)
    assert d.equivalent
    assert d.jittered
    assert not d.jittered_inexact


def test_degree_guards(c1, rng):
    p = sample(c1, GENERIC_REGION, rng)
    one = divisor(c1, [p])
    with pytest.raises(DegreeMismatch):
        linear_equivalence_decision(one, _fiber(c1, 0.3))
    five = divisor(c1, [sample(c1, GENERIC_REGION, rng) for _ in range(5)])
    with pytest.raises(DegreeTooLarge):
        linear_equivalence_decision(five, five)
    # identical coefficients but a different curve object is still an error:
    # decisions must not silently mix tolerance contexts
    from real_subbundle_lab.curve import build_curve

    clone = build_curve([float(c) for c in c1.coefficients])
    with pytest.raises(ValueError):
        linear_equivalence_decision(one, divisor(clone, [p]))
    # degree-0 case is trivially equivalent
    empty = divisor(c1, [])
    assert linear_equivalence_decision(empty, empty).equivalent


# --------------------------------------------------------------------------
# 2-torsion


def test_torsion_enumeration(curves):
    expected_real = {"c1": 4, "c2": 4, "c3": 8, "c4": 16}
    for name, curve in curves.items():
        classes = two_torsion(curve)
        assert len(classes) == 16
        assert classes[0].pair is None and classes[0].is_real
        assert real_two_torsion_count(curve) == expected_real[name], name


def test_torsion_representatives_have_degree_two(c4):
    for cls in two_torsion(c4):
        rep = torsion_representative(c4, cls)
        assert rep.degree == 2


def test_doubling_lands_in_the_fiber_pencil(c1, c4):
    for curve in (c1, c4):
        for cls in two_torsion(curve):
            decision = doubling_decision(curve, cls)
            assert decision.equivalent
            assert decision.gap >= MIN_DECISION_GAP
            assert not decision.jittered_inexact


def test_distinct_torsion_classes_are_inequivalent(c4):
    classes = two_torsion(c4)
    # spot-check a handful of pairs; the acceptance suite runs all 105
    reps = [torsion_representative(c4, c) for c in classes[1:8]]
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            d = linear_equivalence_decision(reps[i], reps[j])
            assert not d.equivalent


def test_generic_fibers_are_distinct_but_equivalent(c3):
    f0 = generic_fiber_divisor(c3, 0)
    f1 = generic_fiber_divisor(c3, 1)
    assert f0.points()[0].x != f1.points()[0].x
    assert is_linearly_equivalent(f0, f1)
