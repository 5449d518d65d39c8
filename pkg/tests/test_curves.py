import math
import random
from fractions import Fraction

import pytest

from xprime6.curves import (
    CurveFp,
    CurveQ,
    count_points,
    entanglement_scan,
    family_curve,
    frobenius_signature,
    primes_up_to,
    specialize_integral,
    torsion_count,
    two_division_field_analysis,
)
from xprime6.errors import InputError
from xprime6.funcfield import j_of_t

# Ten curves with varied 2-division fields, used for the Chebotarev checks.
CORPUS = [
    CurveQ(1, 1),
    CurveQ(-1, 0),
    CurveQ(-3, 1),
    CurveQ(0, 32),
    CurveQ(-144, 672),
    CurveQ(-2, 3),
    CurveQ(5, -7),
    CurveQ(-43, 166),
    CurveQ(12, 0),
    CurveQ(-7, 6),
]


def test_specialize_examples():
    m = specialize_integral(1)
    assert (m.a, m.b, m.scale) == (-144, 672, 2)
    assert m.curve.discriminant == -3981312 and m.curve.j == -82944
    m0 = specialize_integral(0)
    assert (m0.a, m0.b) == (0, 32) and m0.curve.j == 0 and m0.curve.has_cm
    mh = specialize_integral(Fraction(1, 2))
    assert (mh.a, mh.b) == (12, 0) and mh.curve.j == 1728 and mh.curve.has_cm
    assert not m.curve.has_cm


def test_specialize_random_heights():
    rng = random.Random(4)
    for _ in range(20):
        t = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
        m = specialize_integral(t)
        assert m.curve.is_integral()
        assert m.curve.j == j_of_t(t)
        # least scale: no smaller s clears denominators
        E = family_curve(t)
        for s in range(1, m.scale):
            if m.scale % s == 0:
                assert not ((E.a * s**4).denominator == 1 and (E.b * s**6).denominator == 1)


def test_count_points_examples():
    r = count_points(CurveFp.reduce(CurveQ(1, 1), 5))
    assert r.count == 9 and r.ap == -3
    r = count_points(CurveFp.reduce(CurveQ(0, 32), 5))
    assert r.count == 6 and r.ap == 0
    with pytest.raises(InputError):
        count_points(CurveFp.reduce(CurveQ(1, 1), 31))  # 4 + 27 = 31
    with pytest.raises(InputError):
        count_points(CurveFp.reduce(CurveQ(1, 1), 3))


def test_count_points_matches_brute_force():
    for E in CORPUS[:4]:
        for p in (5, 7, 11, 13, 17):
            Ep = CurveFp.reduce(E, p)
            if not Ep.good:
                continue
            brute = 1 + sum(1 for x in range(p) for y in range(p) if (y * y - x**3 - Ep.a * x - Ep.b) % p == 0)
            assert count_points(Ep).count == brute


def test_signature_examples():
    E = specialize_integral(1).curve
    r = frobenius_signature(E, 7)
    assert r.two_split_type == (1, 1, 1) and r.three_full is False
    for p in primes_up_to(200).tolist():
        if p > 3 and p % 3 == 2:
            Ep = CurveFp.reduce(CurveQ(1, 1), p)
            if Ep.good:
                assert not frobenius_signature(Ep).three_full
    for p in (5, 7, 11, 13):
        assert frobenius_signature(CurveQ(-1, 0), p).two_split_type == (1, 1, 1)


def test_three_full_matches_group_law():
    E = CurveQ(1, 1)
    for p in primes_up_to(150).tolist():
        Ep = CurveFp.reduce(E, p)
        if Ep.good:
            r = frobenius_signature(Ep)
            assert r.three_full == (torsion_count(Ep, 3) == 9)
            assert (r.two_split_type == (1, 1, 1)) == (torsion_count(Ep, 2) == 4)


def test_scan_examples():
    assert entanglement_scan(specialize_integral(1).curve, 10**4).violations == []
    assert entanglement_scan(CurveQ(-1, 0), 10**3).violations == []
    res = entanglement_scan(CurveQ(1, 1), 10**4)
    # 139 confirmed separately with the brute-force group law (see test above)
    assert res.violations[0] == 139
    assert "smallest violation p=139" in res.summary()
    with pytest.raises(InputError):
        entanglement_scan(CurveQ(1, 1), 10**7)


def test_scan_family_random():
    rng = random.Random(8)
    for _ in range(20):
        t = Fraction(rng.randint(-50, 50), rng.randint(1, 50))
        assert entanglement_scan(family_curve(t), 1000).violations == []


def test_two_division_field():
    assert two_division_field_analysis(CurveQ(-1, 0)) == "trivial"
    assert two_division_field_analysis(CurveQ(1, 1)) == "S3"
    assert two_division_field_analysis(CurveQ(-3, 1)) == "C3"
    assert two_division_field_analysis(CurveQ(-7, 6)) == "trivial"  # roots 1, 2, -3
    assert two_division_field_analysis(CurveQ(12, 0)) == "C2"


def test_singular_curve_rejected():
    with pytest.raises(InputError):
        CurveQ(-3, 2)
    with pytest.raises(InputError):
        CurveQ.parse("1;2")


def test_corpus_chebotarev_properties():
    for E in CORPUS:
        d = E.cubic_discriminant
        for p in primes_up_to(1000).tolist():
            Ep = CurveFp.reduce(E, p)
            if not Ep.good:
                continue
            r = frobenius_signature(Ep)
            dp = d.numerator * pow(d.denominator, -1, p) % p
            square = pow(dp, (p - 1) // 2, p) == 1
            assert square == (r.two_split_type in ((1, 1, 1), (3,)))
            assert (r.two_split_type != (3,)) == (r.count % 2 == 0)
            if r.three_full:
                assert p % 3 == 1 and r.count % 9 == 0
            assert r.ap**2 <= 4 * p
            assert math.isclose(r.count, p + 1, abs_tol=2 * math.sqrt(p))
