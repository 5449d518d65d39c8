import itertools
import random

import numpy as np
import pytest

from xprime6.errors import InputError, ResourceError
from xprime6.groups import (
    GoursatDatum,
    GroupHom,
    all_subgroups,
    are_conjugate,
    center,
    closure,
    commutator_subgroup,
    conjugate,
    det_surjective,
    direct_product,
    find_isomorphism,
    from_product,
    gl2,
    goursat_decompose,
    goursat_fiber,
    hom_from_generator_images,
    is_cyclic,
    is_isomorphic,
    is_maximal,
    is_normal,
    maximal_subgroups_detsurj,
    normal_subgroups,
    preimage,
    quotient,
    reduce_group,
    sl2,
    standard_generators,
    to_product,
)
from xprime6.modring import Mat2, gl2_order


def random_element(G, rng):
    return Mat2.from_code(G.elements[rng.randrange(G.order)], G.modulus)


def test_closure_examples():
    assert closure([Mat2(2, 0, 1, 1, 0), Mat2(2, 1, 1, 0, 1)]).order == 6
    assert closure([Mat2.identity(36)]).order == 1
    assert closure(standard_generators(3)).order == 48
    assert closure([], 5).order == 1
    with pytest.raises(InputError):
        closure([Mat2(6, 2, 0, 0, 2)])


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 8, 9, 12, 36])
def test_gl2_enumeration(n):
    G = gl2(n)
    assert G.order == gl2_order(n)
    assert np.all(np.diff(G.elements) > 0)
    assert sl2(n).order * (len([u for u in range(n) if np.gcd(u, n) == 1]) or 1) == G.order


def test_closure_is_closed_and_lagrange():
    rng = random.Random(7)
    G = gl2(12)
    for _ in range(10):
        H = closure([random_element(G, rng) for _ in range(rng.randint(1, 2))])
        assert G.order % H.order == 0
        prod = G.codec.mul(H.elements[:, None], H.elements[None, :]).ravel()
        assert np.all(H.contains(prod))
        assert np.all(H.contains(G.codec.inv(H.elements)))


def test_commutator_examples():
    assert commutator_subgroup(gl2(2)).order == 3
    assert commutator_subgroup(gl2(3)) == sl2(3)
    D = closure([Mat2(7, 3, 0, 0, 1), Mat2(7, 1, 0, 0, 5)])
    assert D.is_abelian() and commutator_subgroup(D).order == 1


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_commutator_normal_with_abelian_quotient(n):
    G = gl2(n)
    C = commutator_subgroup(G)
    assert is_normal(C, G)
    Q, proj = quotient(G, C)
    assert Q.is_abelian() and proj.kernel() == C


def test_quotient_examples():
    G3 = gl2(3)
    N = [N for N in normal_subgroups(G3) if N.order == 8][0]
    Q, proj = quotient(G3, N)
    assert Q.order == 6 and is_isomorphic(Q, gl2(2))
    assert proj.is_surjective() and proj.kernel() == N and proj.is_homomorphism()
    assert quotient(G3, G3)[0].order == 1
    Q2, _ = quotient(G3, sl2(3))
    assert Q2.order == 2 and is_cyclic(Q2)
    with pytest.raises(InputError):
        quotient(G3, closure([Mat2(3, 1, 1, 0, 1)]))


def test_normal_subgroups_examples():
    assert [N.order for N in normal_subgroups(gl2(3))] == [1, 2, 8, 24, 48]
    assert [N.order for N in normal_subgroups(gl2(2))] == [1, 3, 6]
    assert [N.order for N in normal_subgroups(closure([], 5))] == [1]
    for N in normal_subgroups(gl2(4)):
        assert is_normal(N, gl2(4))
    with pytest.raises(ResourceError):
        normal_subgroups(gl2(9), bound=100)


def test_are_conjugate():
    rng = random.Random(11)
    G = gl2(6)
    H = closure([Mat2(6, 1, 1, 0, 1), Mat2(6, 5, 0, 0, 1)])
    for _ in range(5):
        g = random_element(G, rng)
        K = conjugate(H, g)
        ok, w = are_conjugate(H, K, G)
        assert ok and conjugate(H, w) == K
    triv = closure([], 6)
    assert are_conjugate(triv, triv, G) == (True, Mat2.identity(6))
    assert not are_conjugate(H, closure([Mat2(6, 1, 1, 0, 1)]), G)[0]
    with pytest.raises(InputError):
        are_conjugate(H, gl2(12), G)


def test_are_conjugate_equivalence_relation():
    G = gl2(3)
    fam = [H for H in all_subgroups(G) if H.order == 4]
    rel = [[are_conjugate(a, b, G)[0] for b in fam] for a in fam]
    n = len(fam)
    for i, j, k in itertools.product(range(n), repeat=3):
        assert rel[i][i]
        assert rel[i][j] == rel[j][i]
        if rel[i][j] and rel[j][k]:
            assert rel[i][k]


def test_maximal_subgroups_l2():
    ms = maximal_subgroups_detsurj(2)
    assert sorted(H.order for H in ms) == [2, 3]


@pytest.mark.parametrize("ell", [3, 5, 7])
def test_maximal_subgroups_are_maximal(ell):
    G = gl2(ell)
    ms = maximal_subgroups_detsurj(ell)
    assert ms
    for H in ms:
        assert det_surjective(H) and H.order < G.order
        assert is_maximal(H, G)
    for a, b in itertools.combinations(ms, 2):
        assert not are_conjugate(a, b, G)[0]


def test_maximal_subgroups_l3_cover_lattice():
    """Every proper det-surjective subgroup of GL2(F_3) lies in a conjugate of a listed one."""
    from xprime6.groups import conjugate_into

    G = gl2(3)
    ms = maximal_subgroups_detsurj(3)
    for H in all_subgroups(G):
        if H.order < G.order and det_surjective(H):
            assert any(conjugate_into(H, M, G) is not None for M in ms)


def test_maximal_subgroups_bad_prime():
    with pytest.raises(InputError):
        maximal_subgroups_detsurj(11)
    with pytest.raises(InputError):
        maximal_subgroups_detsurj(4)


def test_reduce_and_preimage():
    H = closure([Mat2(3, 1, 1, 0, 1)])
    P = preimage(H, 9)
    assert P.order == H.order * 81
    assert reduce_group(P, 3) == H
    assert preimage(H, 3) == H


def test_homomorphisms():
    G = gl2(3)
    det = GroupHom(G, closure([Mat2.scalar(-1, 3)]), [Mat2.scalar(d, 3).code for d in G.codec.det(G.elements)])
    assert det.is_homomorphism() and det.kernel() == sl2(3)
    bad = GroupHom(G, G, np.roll(G.elements, 1))
    assert not bad.is_homomorphism()
    gens = np.array(G.gens)
    ident = hom_from_generator_images(G, gens, G)
    assert np.array_equal(ident.images, G.elements)
    # S3 = <s, r>: sending an involution to an element of order 3 cannot extend
    S3 = gl2(2)
    orders = {int(g): _order(S3, g) for g in S3.elements}
    gens2 = list(S3.gens)
    three = [g for g, k in orders.items() if k == 3][0]
    if any(orders[int(g)] == 2 for g in gens2):
        imgs = [three if orders[int(g)] == 2 else g for g in gens2]
        assert hom_from_generator_images(S3, imgs, S3) is None


def _order(G, g):
    k, x = 1, g
    while x != G.identity:
        x = G.codec.mul(x, g)
        k += 1
    return k


def test_isomorphism_search():
    S3 = gl2(2)
    Q, _ = quotient(gl2(3), [N for N in normal_subgroups(gl2(3)) if N.order == 8][0])
    iso = find_isomorphism(Q, S3)
    assert iso is not None and iso.is_homomorphism() and iso.is_surjective()
    C6 = closure([Mat2(7, 3, 0, 0, 3)])
    assert C6.order == 6 and not is_isomorphic(C6, S3)


def test_center():
    assert center(gl2(5)).order == 4
    assert center(gl2(2)).order == 1


# --- Goursat


def h6_pairs():
    from xprime6.catalog import h6_prime

    return to_product(h6_prime(), 2, 3)


def test_goursat_examples():
    G2, G3 = gl2(2), gl2(3)
    datum = goursat_decompose(h6_pairs(), G2, G3)
    assert datum.q.order == 6
    assert datum.psi0.kernel().order == 1
    assert goursat_fiber(datum) == h6_pairs()
    # diagonal
    diag = closure([Mat2(2, 0, 1, 1, 0), Mat2(2, 1, 1, 0, 1)])
    D = direct_product(diag, diag)
    diag_pairs = type(D)(D.codec, D.codec.join(diag.elements, diag.elements), [D.codec.join(g, g) for g in diag.gens])
    assert is_isomorphic(goursat_decompose(diag_pairs, G2, G2).q, G2)
    # full product
    full = direct_product(G2, G3)
    d = goursat_decompose(full, G2, G3)
    assert d.q.order == 1 and goursat_fiber(d) == full


def test_goursat_fiber_trivial_q():
    G2, G3 = gl2(2), gl2(3)
    T = closure([], 1)
    d = GoursatDatum(T, GroupHom(G2, T, np.zeros(6, np.int64)), GroupHom(G3, T, np.zeros(48, np.int64)))
    assert goursat_fiber(d).order == 288


@pytest.mark.slow
def test_goursat_roundtrip_exhaustive():
    """Every subgroup of GL2(Z/2) x GL2(Z/3) with surjective projections,
    found from the full subgroup lattice of GL2(Z/6)."""
    from xprime6.groups import goursat_data

    G2, G3 = gl2(2), gl2(3)
    lattice = [
        H for H in all_subgroups(gl2(6)) if reduce_group(H, 2) == G2 and reduce_group(H, 3) == G3
    ]
    for H in lattice:
        assert from_product(goursat_fiber(goursat_decompose(H, G2, G3))) == H
    from_data = {from_product(goursat_fiber(d)).key() for d in goursat_data(G2, G3)}
    assert from_data == {H.key() for H in lattice}
    # trivial Q, Z/2, and the six graphs of GL2(Z/3) -> S3 twisted by Aut(S3)
    assert sorted(H.order for H in lattice) == [48] * 6 + [144, 288]


def test_goursat_monotone_under_push():
    from xprime6.catalog import level6_datum

    datum = level6_datum()
    S3 = datum.q
    C2, sign = quotient(S3, commutator_subgroup(S3))
    small = goursat_fiber(datum)
    big = goursat_fiber(datum.push(sign))
    assert small.order == 48 and big.order == 144
    assert small.issubgroup(big)


def test_goursat_rejects_bad_input():
    G2, G3 = gl2(2), gl2(3)
    with pytest.raises(InputError):
        goursat_decompose(to_product(preimage(closure([Mat2(2, 1, 1, 0, 1)]), 6), 2, 3), G2, G3)
    T = closure([], 1)
    bad = GoursatDatum(gl2(2), GroupHom(G2, gl2(2), G2.elements), GroupHom(G3, gl2(2), np.full(48, G2.identity)))
    with pytest.raises(InputError):
        goursat_fiber(bad)
    del T


def test_all_subgroups_counts():
    assert len(all_subgroups(gl2(2))) == 6
    assert len(all_subgroups(gl2(3))) == 55
    with pytest.raises(ResourceError):
        all_subgroups(gl2(7))
