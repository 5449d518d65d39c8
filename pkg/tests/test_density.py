import random
from fractions import Fraction

import numpy as np
import pytest

from xprime6.density import (
    ImageSpec,
    correction_factor,
    division_degree,
    entangled_part,
    h6_spec,
    hooley_delta,
    mobius_divisors,
    sign_det_spec,
    tail_bound,
)
from xprime6.errors import InputError
from xprime6.groups import closure, gl2
from xprime6.modring import Mat2, gl2_order, project_codes


def test_division_degree_examples():
    assert division_degree(ImageSpec.full(), 2) == 6
    assert division_degree(h6_spec(), 6) == 48
    assert division_degree(h6_spec(), 1) == 1
    assert division_degree(h6_spec(), 2) == 6 and division_degree(h6_spec(), 3) == 48
    with pytest.raises(InputError):
        division_degree(ImageSpec.full(), 4)


def test_division_degree_multiplicative():
    rng = random.Random(1)
    spec = h6_spec()
    squarefree = [1, 5, 7, 11, 35, 77]
    for _ in range(10):
        a, b = rng.sample(squarefree, 2)
        if a == b or (a % 5 == 0 and b % 5 == 0) or (a % 7 == 0 and b % 7 == 0) or (a % 11 == 0 and b % 11 == 0):
            continue
        assert division_degree(spec, a * b) == division_degree(spec, a) * division_degree(spec, b)
    assert division_degree(spec, 30) == 48 * gl2_order(5)


def test_entangled_parts():
    assert entangled_part(h6_spec()) == Fraction(5, 6)
    assert entangled_part(sign_det_spec()) == Fraction(59, 72)
    assert division_degree(sign_det_spec(), 6) == 144


def test_entangled_part_direct_sum():
    for spec in (h6_spec(), sign_det_spec(), ImageSpec.full(6)):
        direct = sum(
            Fraction(mu, division_degree(spec, d)) for d, mu in mobius_divisors(spec.radical)
        )
        partial = Fraction(0)
        for d, mu in sorted(mobius_divisors(spec.radical)):
            partial += Fraction(mu, division_degree(spec, d))
        assert partial == direct == entangled_part(spec)


def test_correction_factor_examples():
    assert correction_factor(ImageSpec.full(), 100).value == 1
    assert correction_factor(ImageSpec.full(6), 100).value == 1
    assert correction_factor(h6_spec(), 100).value == Fraction(48, 47)
    assert correction_factor(sign_det_spec(), 100).value == Fraction(236, 235)


def test_hooley_delta_full():
    r = hooley_delta(ImageSpec.full(), 100)
    assert r.lower <= r.value == r.upper
    assert r.width < Fraction(1, 10**5)
    assert Fraction("0.8137") <= r.lower and r.upper < Fraction("0.8138")
    assert r.render().endswith("(L=100, GRH)")


def test_tail_bound_is_rigorous():
    # direct partial sum over all integers, which dominates the prime sum
    for L in (5, 20, 100):
        s = sum(Fraction(1, (n * n - 1) * (n * n - n)) for n in range(L + 1, 4 * L))
        assert s < tail_bound(L)


def test_trivial_image_gives_zero():
    spec = ImageSpec(2, closure([], 2))
    assert hooley_delta(spec, 5).value == 0


def _chebotarev_fraction(spec):
    """Share of image elements that are not the identity mod any prime dividing the level."""
    e = spec.group.elements
    bad = np.zeros(len(e), bool)
    for ell in spec.primes:
        bad |= project_codes(e, spec.level, ell) == Mat2.identity(ell).code
    return Fraction(int((~bad).sum()), len(e))


def test_entangled_part_matches_element_count():
    for spec in (h6_spec(), sign_det_spec(), ImageSpec.full(6), ImageSpec.full(2)):
        assert entangled_part(spec) == _chebotarev_fraction(spec)
    for s in (h6_spec(), sign_det_spec(), ImageSpec.full(6)):
        assert 0 < hooley_delta(s, 30).value <= 1
        assert correction_factor(s, 30).value > 0


def test_delta_not_monotone_in_image():
    # H6' < sign-det group < GL2(Z/6), yet the entangled parts go down:
    # the smaller image has fewer elements trivial mod 2.
    small, mid, full = h6_spec(), sign_det_spec(), ImageSpec.full(6)
    assert small.group.issubgroup(mid.group)
    parts = [entangled_part(s) for s in (small, mid, full)]
    assert parts == [Fraction(5, 6), Fraction(59, 72), Fraction(235, 288)]
    d = [hooley_delta(s, 30).value for s in (small, mid, full)]
    assert d[0] > d[1] > d[2]


def test_input_errors():
    with pytest.raises(InputError):
        hooley_delta(h6_spec(), 2)
    with pytest.raises(InputError):
        ImageSpec(5, closure([Mat2(5, 1, 1, 0, 1)]))
    with pytest.raises(InputError):
        ImageSpec(6, gl2(3))
