"""The named level-4, -6, -9 and -36 subgroups and the finite checks behind them.

This module builds the concrete groups that cut out the modular curves
X'(4), X''(4), X'(9) and X'(6), the map theta: GL_2(Z/3) -> GL_2(Z/2),
and runs every finite group computation that the classification of
mod-36 images relies on:

* :func:`verify_groups_suite` -- the level-6 group, its Goursat structure,
  and the commutator behaviour of fibered products;
* :func:`verify_level49_steps` -- the semidirect structure of GL_2(Z/4), the
  invariant-subspace table, and the character argument at level 9;
* :func:`goursat_scan_36` -- exhaustive enumeration of fibered products
  GL_2(Z/4) x_Q GL_2(Z/9) with proper commutator subgroup.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from .errors import InputError, VerificationError
from .groups import (
    FinGroup,
    GoursatDatum,
    GroupHom,
    TableCodec,
    all_subgroups,
    are_conjugate,
    closure,
    commutator_subgroup,
    conjugate_into,
    det_surjective,
    direct_product,
    from_product,
    gl2,
    goursat_data,
    goursat_decompose,
    goursat_fiber,
    is_cyclic,
    is_isomorphic,
    is_normal,
    isomorphisms,
    normal_subgroups,
    preimage,
    quotient,
    reduce_group,
    sl2,
    subgroup_from_elements,
)
from .modring import GL2Codec, Mat2, gl2_order, project_codes
from .report import Report

LEVEL = 36

# Class labels in the order classify_mod36 tries them.
CLASS_LABELS = ("X'(4)", "X''(4)", "X'(9)", "X'(6)")


@dataclass(frozen=True)
class NamedSubgroup:
    label: str
    group: FinGroup
    note: str = ""


@dataclass(frozen=True)
class ThetaMap:
    hom: GroupHom
    kernel: FinGroup

    def __call__(self, g):
        return self.hom(g)


# ---------------------------------------------------------------------------
# the index-6 normal subgroup of GL_2(Z/3) and theta


def defining_set_N() -> list[Mat2]:
    """The eight matrices [[x,-y],[y,x]] with x^2+y^2 = 1 and
    [[x,y],[y,-x]] with x^2+y^2 = -1 (mod 3)."""
    out = []
    for x, y in itertools.product(range(3), repeat=2):
        if (x * x + y * y) % 3 == 1:
            out.append(Mat2(3, x, -y, y, x))
        if (x * x + y * y) % 3 == 2:
            out.append(Mat2(3, x, y, y, -x))
    return sorted(out)


@lru_cache(maxsize=None)
def unique_index6_normal() -> NamedSubgroup:
    """The unique normal subgroup of index 6 in GL_2(Z/3Z).

    Raises VerificationError if the enumeration finds zero or several, or
    if the one found differs from :func:`defining_set_N`.
    """
    G = gl2(3)
    index6 = [N for N in normal_subgroups(G) if G.order // N.order == 6]
    if len(index6) != 1:
        raise VerificationError(f"found {len(index6)} index-6 normal subgroups of GL2(Z/3)")
    N = index6[0]
    if N.matrices() != defining_set_N():
        raise VerificationError("index-6 normal subgroup differs from the defining set")
    return NamedSubgroup("N", N, "unique index-6 normal subgroup of GL2(Z/3)")


@lru_cache(maxsize=None)
def theta() -> ThetaMap:
    """GL_2(Z/3) -> GL_2(Z/3)/N -> GL_2(Z/2).

    The second arrow is the isomorphism whose generator images are
    lexicographically least.  Every automorphism of GL_2(Z/2) is inner, so
    any other choice changes theta by a conjugation, and all downstream
    classification is conjugation invariant.
    """
    G3, G2 = gl2(3), gl2(2)
    N = unique_index6_normal().group
    Q, proj = quotient(G3, N)
    gens = np.array(Q.gens, dtype=np.int64)
    best = min(isomorphisms(Q, G2), key=lambda iso: tuple(iso(gens).tolist()))
    hom = proj.then(best)
    return ThetaMap(hom, hom.kernel())


def sign_character(g2_codes) -> np.ndarray:
    """The nontrivial character of GL_2(Z/2) ~ S_3, as +1/-1."""
    A3 = commutator_subgroup(gl2(2))
    return np.where(A3.contains(g2_codes), 1, -1)


# ---------------------------------------------------------------------------
# the four exceptional groups


def identity_hom(G: FinGroup) -> GroupHom:
    return GroupHom(G, G, G.elements)


def reduction_hom(n: int, d: int) -> GroupHom:
    return GroupHom(gl2(n), gl2(d), project_codes(gl2(n).elements, n, d))


@lru_cache(maxsize=None)
def level6_datum() -> GoursatDatum:
    """Q = GL_2(Z/2) with psi0 = id and psi1 = theta: the graph of theta."""
    G2 = gl2(2)
    return GoursatDatum(G2, identity_hom(G2), theta().hom)


@lru_cache(maxsize=None)
def h6_prime() -> FinGroup:
    """{(g2, g3) : g2 = theta(g3)} inside GL_2(Z/6) via CRT."""
    return from_product(goursat_fiber(level6_datum()))


@lru_cache(maxsize=None)
def h4_prime() -> FinGroup:
    """{g in GL_2(Z/4) : det g = sign(g mod 2)}, with det read in {+1, -1}."""
    G4 = gl2(4)
    det = G4.codec.det(G4.elements)
    det_pm = np.where(det == 1, 1, -1)
    sign = sign_character(project_codes(G4.elements, 4, 2))
    return subgroup_from_elements(G4.codec, G4.elements[det_pm == sign])


@lru_cache(maxsize=None)
def h4_double_prime() -> FinGroup:
    return closure([Mat2(4, 0, 1, 3, 0), Mat2(4, 0, 1, 1, 1)])


# Generators of the level-9 group as usually printed.  They generate all of
# GL_2(Z/9); changing the first one to [[0,1],[4,0]] gives the index-27
# group (every single-entry repair that gives a proper group with full
# determinant and full mod-3 image lands in this one conjugacy class).
H9_PRINTED_GENERATORS = ((0, 2, 4, 0), (4, 1, -3, 4), (2, 0, 0, 2), (-1, 0, 0, 1))
H9_GENERATORS = ((0, 1, 4, 0), (4, 1, -3, 4), (2, 0, 0, 2), (-1, 0, 0, 1))


def h9_printed() -> FinGroup:
    return closure([Mat2(9, *g) for g in H9_PRINTED_GENERATORS])


@lru_cache(maxsize=None)
def h9_prime() -> FinGroup:
    return closure([Mat2(9, *g) for g in H9_GENERATORS])


def h9_single_entry_repairs() -> list[tuple[int, int, int, FinGroup]]:
    """(generator, entry, new value, group) for each one-entry change of the
    printed generators giving a proper subgroup of GL_2(Z/9) with surjective
    determinant and full mod-3 image."""
    out = []
    for gi, ei, v in itertools.product(range(4), range(4), range(9)):
        gens = [list(g) for g in H9_PRINTED_GENERATORS]
        if gens[gi][ei] % 9 == v:
            continue
        gens[gi][ei] = v
        mats = [Mat2(9, *g) for g in gens]
        if not all(m.is_invertible() for m in mats):
            continue
        H = closure(mats)
        if H.order < gl2_order(9) and det_surjective(H) and reduce_group(H, 3).order == gl2_order(3):
            out.append((gi, ei, v, H))
    return out


_BUILDERS: dict[str, tuple[str, Callable[[], FinGroup]]] = {
    "X'(4)": ("H4p", h4_prime),
    "X''(4)": ("H4pp", h4_double_prime),
    "X'(9)": ("H9p", h9_prime),
    "X'(6)": ("H6p", h6_prime),
}


@lru_cache(maxsize=None)
def class_representative(label: str) -> FinGroup:
    """Full preimage in GL_2(Z/36) of the level-d group defining ``label``."""
    if label not in _BUILDERS:
        raise InputError(f"unknown class {label!r}")
    return preimage(_BUILDERS[label][1](), LEVEL)


def _check_named(label: str, H: FinGroup, *, level36: bool) -> None:
    n = H.modulus
    if not det_surjective(H):
        raise VerificationError(f"{label}: determinant not surjective")
    if Mat2.scalar(-1, n) not in H:
        raise VerificationError(f"{label}: -I missing")
    if level36:
        for d in (2, 3):
            if reduce_group(H, d).order != gl2_order(d):
                raise VerificationError(f"{label}: reduction mod {d} not surjective")


@lru_cache(maxsize=None)
def canonical_subgroups() -> tuple[NamedSubgroup, ...]:
    """H6p, H4p, H4pp, H9p and their preimages in GL_2(Z/36), each checked for
    surjective determinant, -I membership and (at level 36) full mod-2 and
    mod-3 images."""
    out = []
    for label, (short, build) in _BUILDERS.items():
        H = build()
        _check_named(short, H, level36=False)
        out.append(NamedSubgroup(short, H, f"level-{H.modulus} group of {label}"))
    for label, (short, _) in _BUILDERS.items():
        R = class_representative(label)
        _check_named(f"preimage36({short})", R, level36=True)
        out.append(NamedSubgroup(f"preimage36({short})", R, f"representative of {label}"))
    return tuple(out)


# ---------------------------------------------------------------------------
# classification and the Serre-curve criterion


@dataclass(frozen=True)
class Classification:
    label: str  # one of CLASS_LABELS or "none"
    witness: Mat2 | None = None  # g with g H g^-1 inside the representative


def classify_mod36(H: FinGroup) -> Classification:
    if H.modulus != LEVEL:
        raise InputError(f"expected a subgroup of GL2(Z/{LEVEL}), got modulus {H.modulus}")
    G = gl2(LEVEL)
    for label in CLASS_LABELS:
        R = class_representative(label)
        if R.order % H.order:
            continue
        g = conjugate_into(H, R, G)
        if g is not None:
            return Classification(label, g)
    return Classification("none")


@lru_cache(maxsize=None)
def _full_commutator_order(n: int) -> int:
    return commutator_subgroup(gl2(n)).order


def is_serre_obstructed(images: Mapping[int, FinGroup]) -> tuple[bool, str]:
    """Apply the Serre-curve criterion to supplied mod-l and mod-36 images.

    Keys are levels.  A proper image at a prime l >= 5, or a mod-36 image
    whose commutator subgroup is smaller than that of GL_2(Z/36), is an
    obstruction.  Other levels are accepted and ignored.
    """
    for level, H in images.items():
        if H.modulus != level:
            raise InputError(f"image supplied for level {level} has modulus {H.modulus}")
        if not det_surjective(H):
            raise InputError(f"mod-{level} image does not have surjective determinant")
    for ell in sorted(images):
        if ell >= 5 and ell != LEVEL and _is_prime(ell) and images[ell].order < gl2_order(ell):
            return True, f"proper mod-{ell} image"
    if LEVEL in images:
        if commutator_subgroup(images[LEVEL]).order < _full_commutator_order(LEVEL):
            return True, "proper mod-36 commutator"
    return False, "no obstruction"


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n**0.5) + 1))


_MAX_LABELS = {12: "A4", 24: "S4", 60: "A5"}


def label_maximal_subgroup(H: FinGroup) -> str:
    """Structural label of a maximal subgroup of GL_2(F_l).

    borel: a common eigenline exists.  Otherwise, if H or an index-2
    subgroup is abelian, H is a (normaliser of a) split or nonsplit Cartan
    according to whether that abelian group has two eigenlines or none.
    Otherwise the projective image order decides A4/S4/A5.
    """
    ell = H.modulus
    lines = _common_eigenlines(H)
    if lines:
        return "borel"
    if H.is_abelian():
        # no eigenline over F_l, so the abelian group is a nonsplit Cartan
        return "nonsplit_cartan"
    for N in normal_subgroups(H):
        if H.order // N.order == 2 and N.is_abelian():
            kind = "split" if len(_common_eigenlines(N)) >= 2 else "nonsplit"
            return f"{kind}_cartan_normalizer"
    scalars = sum(1 for s in range(1, ell) if Mat2.scalar(s, ell) in H)
    return "exceptional_" + _MAX_LABELS.get(H.order // scalars, f"order{H.order // scalars}")


def _common_eigenlines(H: FinGroup) -> list[tuple[int, int]]:
    ell = H.modulus
    lines = [(1, y) for y in range(ell)] + [(0, 1)]
    out = []
    for x, y in lines:
        ok = True
        for g in H.gens:
            m = Mat2.from_code(g, ell)
            u, v = (m.a * x + m.b * y) % ell, (m.c * x + m.d * y) % ell
            if (u * y - v * x) % ell:
                ok = False
                break
        if ok:
            out.append((x, y))
    return out


# ---------------------------------------------------------------------------
# verification: level-6 structure and fibered-product commutators


def cyclic_fibered_products(groups: list[FinGroup]) -> list[tuple[FinGroup, FinGroup, GoursatDatum]]:
    """All fibered products over a cyclic quotient for unordered pairs
    (with repetition) drawn from ``groups``."""
    out = []
    for i, j in itertools.combinations_with_replacement(range(len(groups)), 2):
        G0, G1 = groups[i], groups[j]
        for datum in goursat_data(G0, G1, keep=is_cyclic, max_quotient=min(G0.order, G1.order)):
            out.append((G0, G1, datum))
    return out


def verify_groups_suite() -> Report:
    rep = Report()
    G2, G3, G6 = gl2(2), gl2(3), gl2(6)

    def unique_n():
        normals = normal_subgroups(G3)
        index6 = [N for N in normals if G3.order // N.order == 6]
        N = index6[0] if len(index6) == 1 else None
        ok = N is not None and N.matrices() == defining_set_N() and Mat2.scalar(-1, 3) in N
        return ok, f"normal subgroup orders {[M.order for M in normals]}, index-6 count {len(index6)}, equals defining set"

    rep.run("n.unique_index6", "exactly one index 6 normal subgroup of GL2(Z/3)", unique_n)

    def theta_step():
        th = theta()
        N = unique_index6_normal().group
        Q, _ = quotient(G3, N)
        ok = (
            th.hom.is_surjective()
            and th.hom.is_homomorphism()
            and th.kernel == N
            and th(Mat2.scalar(-1, 3)) == Mat2.identity(2)
            and is_isomorphic(Q, G2)
        )
        return ok, f"theta surjective onto order {th.hom.image().order}, kernel order {th.kernel.order} = N, GL2(Z/3)/N ~ GL2(Z/2)"

    rep.run("theta.exact_sequence", "exact sequence 1 -> N -> GL2(Z/3) -> GL2(Z/2) -> 1", theta_step)

    def named():
        subs = canonical_subgroups()
        orders = {s.label: s.group.order for s in subs}
        return True, " ".join(f"|{k}|={v}" for k, v in orders.items())

    rep.run("catalog.named_subgroups", "defining generators and equations of the four groups", named)

    def h6_suite():
        H = h6_prime()
        datum = goursat_decompose(H, G2, G3)
        rebuilt = from_product(goursat_fiber(datum))
        comm = commutator_subgroup(H)
        prod_comm = commutator_subgroup(G2).order * commutator_subgroup(G3).order
        ok = (
            H.order == 48
            and G6.order // H.order == 6
            and reduce_group(H, 2) == G2
            and reduce_group(H, 3) == G3
            and det_surjective(H)
            and datum.q.order == 6
            and rebuilt == H
            and comm.order == 24
            and prod_comm == 72
        )
        return ok, f"|H6p|={H.order} index {G6.order // H.order}, Goursat Q order {datum.q.order}, |[H,H]|={comm.order} < {prod_comm}"

    rep.run("h6.structure", "graph of theta; commutator strictly smaller than the product", h6_suite)

    def cyclic_q():
        groups = [gl2(2), gl2(3), gl2(4)]
        data = cyclic_fibered_products(groups)
        failures = 0
        for G0, G1, datum in data:
            H = goursat_fiber(datum)
            expect = direct_product(commutator_subgroup(G0), commutator_subgroup(G1))
            if commutator_subgroup(H) != expect:
                failures += 1
        return failures == 0, f"{len(data)} cyclic fibered products checked, {failures} failures"

    rep.run("cyclic_q.commutator", "equality of commutator subgroups for cyclic Q", cyclic_q)

    def small_levels():
        bad = []
        counts = {}
        for ell in (2, 3):
            G = gl2(ell)
            full = commutator_subgroup(G).order
            proper = [H for H in all_subgroups(G) if H.order < G.order and det_surjective(H)]
            counts[ell] = len(proper)
            bad += [H for H in proper if commutator_subgroup(H).order >= full]
        return not bad, f"proper det-surjective subgroups: {counts[2]} at l=2, {counts[3]} at l=3; all have proper commutator"

    rep.run("levels23.commutator", "proper det-surjective subgroups at l=2,3 have proper commutator", small_levels)

    def reps_distinct():
        G = gl2(LEVEL)
        reps = [class_representative(lbl) for lbl in CLASS_LABELS]
        pairs = [(a, b) for a, b in itertools.combinations(range(4), 2) if are_conjugate(reps[a], reps[b], G)[0]]
        obstructed = all(is_serre_obstructed({LEVEL: R})[0] for R in reps)
        return not pairs and obstructed, f"orders {[R.order for R in reps]}, pairwise non-conjugate, all with proper commutator"

    rep.run("catalog.level36_representatives", "four representatives of the level-36 classes", reps_distinct)

    def h9_generators():
        printed = h9_printed()
        repairs = h9_single_entry_repairs()
        H = h9_prime()
        conj = all(are_conjugate(R, H, gl2(9))[0] for *_, R in repairs)
        ok = printed.order == gl2_order(9) and bool(repairs) and conj and H.order == 144
        return ok, (
            f"printed generators give order {printed.order} (all of GL2(Z/9)); {len(repairs)} single-entry repairs, "
            f"all conjugate to the order-{H.order} index-{gl2_order(9) // H.order} group used for X'(9)"
        )

    rep.run("catalog.h9_generators", "printed generators of the level-9 group", h9_generators)
    return rep


# ---------------------------------------------------------------------------
# verification: the semidirect structure of GL_2(Z/4) and level 9

# Six-matrix section GL_2(Z/2) -> GL_2(Z), reduced mod 4.
SECTION = {
    ((1, 0), (0, 1)): ((1, 0), (0, 1)),
    ((1, 1), (1, 0)): ((-1, -1), (1, 0)),
    ((0, 1), (1, 1)): ((0, 1), (-1, -1)),
    ((0, 1), (1, 0)): ((0, 1), (1, 0)),
    ((1, 1), (0, 1)): ((-1, -1), (0, 1)),
    ((1, 0), (1, 1)): ((1, 0), (-1, -1)),
}

# The nonzero GL_2(Z/2)-invariant subspaces of M_2(Z/2), each with the
# isomorphism type of GL_2(Z/4)/(I + 2N).
_A = lambda rows: Mat2.from_rows(rows, 2)  # noqa: E731
SUBSPACE_TABLE = [
    ("all", None, "GL2(Z/2)"),
    ("trace0", None, "GL2(Z/2) x C2"),
    ("cubic", [_A(((0, 0), (0, 0))), _A(((1, 0), (0, 1))), _A(((1, 1), (1, 0))), _A(((0, 1), (1, 1)))], "GL2(Z/2) x| (Z/2)^2 natural"),
    ("involutions", [_A(((0, 0), (0, 0))), _A(((1, 1), (0, 1))), _A(((1, 0), (1, 1))), _A(((0, 1), (1, 0)))], "GL2(Z/2) x| (Z/2)^2 swap"),
    ("scalars", [_A(((0, 0), (0, 0))), _A(((1, 0), (0, 1)))], "PGL2(Z/4)"),
]


def section_hom() -> GroupHom:
    G2, G4 = gl2(2), gl2(4)
    images = [Mat2.from_rows(SECTION[m.rows()], 4).code for m in G2.matrices()]
    return GroupHom(G2, G4, images)


def _mat_bits(m: Mat2) -> int:
    return m.a << 3 | m.b << 2 | m.c << 1 | m.d


def _bits_mat(v: int) -> Mat2:
    return Mat2(2, v >> 3 & 1, v >> 2 & 1, v >> 1 & 1, v & 1)


def invariant_subspaces() -> list[frozenset[int]]:
    """All GL_2(Z/2)-conjugation-invariant subspaces of M_2(Z/2), by brute force
    over every subset closed under addition."""
    conj = []
    for g in gl2(2).matrices():
        gi = g.inverse()
        conj.append([_mat_bits(g * _bits_mat(v) * gi) for v in range(16)])
    spaces = set()
    for gens in itertools.chain.from_iterable(itertools.combinations(range(1, 16), k) for k in range(5)):
        span = {0}
        for v in gens:
            span |= {x ^ v for x in span}
        spaces.add(frozenset(span))
    return sorted(
        (S for S in spaces if all(all(c[v] in S for v in S) for c in conj)),
        key=lambda S: (len(S), sorted(S)),
    )


def _table_space(name: str, mats) -> frozenset[int]:
    if name == "all":
        return frozenset(range(16))
    if name == "trace0":
        return frozenset(v for v in range(16) if _bits_mat(v).trace == 0)
    return frozenset(_mat_bits(m) for m in mats)


def _kernel_subgroup(space: frozenset[int]) -> FinGroup:
    """{I + 2A : A in space} inside GL_2(Z/4)."""
    codes = []
    for v in space:
        A = _bits_mat(v)
        codes.append(Mat2(4, 1 + 2 * A.a, 2 * A.b, 2 * A.c, 1 + 2 * A.d).code)
    return subgroup_from_elements(GL2Codec(4), codes)


def semidirect_group(action: Callable[[Mat2, tuple[int, int]], tuple[int, int]]) -> FinGroup:
    """GL_2(Z/2) x| (Z/2)^2 with the given action, as a Cayley-table group."""
    mats = gl2(2).matrices()
    ident = mats.index(Mat2.identity(2))
    mats = [mats[ident]] + mats[:ident] + mats[ident + 1 :]
    vecs = [(0, 0), (0, 1), (1, 0), (1, 1)]
    elems = [(g, v) for g in mats for v in vecs]
    index = {(g.code, v): i for i, (g, v) in enumerate(elems)}
    table = np.zeros((24, 24), dtype=np.int64)
    for i, (g, v) in enumerate(elems):
        for j, (h, w) in enumerate(elems):
            gw = action(g, w)
            table[i, j] = index[((g * h).code, ((v[0] + gw[0]) % 2, (v[1] + gw[1]) % 2))]
    return subgroup_from_elements(TableCodec(table), np.arange(24))


def _natural_action(g: Mat2, w):
    return (g.a * w[0] + g.b * w[1]) % 2, (g.c * w[0] + g.d * w[1]) % 2


def _swap_action(g: Mat2, w):
    return w if g in commutator_subgroup(gl2(2)) else (w[1], w[0])


def _model_quotient(kind: str) -> FinGroup:
    G2 = gl2(2)
    if kind == "GL2(Z/2)":
        return G2
    if kind == "GL2(Z/2) x C2":
        return direct_product(G2, closure([Mat2.scalar(-1, 3)]))
    if kind.endswith("natural"):
        return semidirect_group(_natural_action)
    if kind.endswith("swap"):
        return semidirect_group(_swap_action)
    if kind == "PGL2(Z/4)":
        G4 = gl2(4)
        return quotient(G4, closure([Mat2.scalar(-1, 4)]))[0]
    raise KeyError(kind)


def _theta_on(codes9) -> np.ndarray:
    return theta().hom(project_codes(codes9, 9, 3))


def level9_characters():
    """P = preimage of SL_2(Z/3) in GL_2(Z/9) and the two Z/3-valued characters
    chi1 = eta1 o theta o (mod 3) and chi2 = eta2 o det, as arrays over P."""
    P = preimage(sl2(3), 9)
    r = Mat2(2, 1, 1, 1, 0)
    eta1 = {Mat2.identity(2).code: 0, r.code: 1, (r * r).code: 2}
    th = _theta_on(P.elements)
    if not set(th.tolist()) <= set(eta1):
        raise VerificationError("theta does not map SL2(Z/3) into the order-3 subgroup")
    chi1 = np.array([eta1[int(x)] for x in th], dtype=np.int64)
    det = P.codec.det(P.elements)
    if not set(det.tolist()) <= {1, 4, 7}:
        raise VerificationError("det of P not in 1 + 3Z/9")
    chi2 = (det - 1) // 3
    return P, chi1, chi2


def verify_level49_steps() -> Report:
    rep = Report()
    G2, G4, G9 = gl2(2), gl2(4), gl2(9)

    def step_section():
        s = section_hom()
        ker = subgroup_from_elements(G4.codec, G4.elements[project_codes(G4.elements, 4, 2) == Mat2.identity(2).code])
        splits = np.array_equal(project_codes(s.images, 4, 2), G2.elements)
        img = s.image()
        complement = img.order * ker.order == G4.order and np.sum(ker.contains(img.elements)) == 1
        # I + 2A -> A is an isomorphism onto (M_2(Z/2), +) compatible with conjugation
        compatible = True
        for g in G2.matrices():
            sg = Mat2.from_code(s(np.array([g.code]))[0], 4)
            for v in range(16):
                A = _bits_mat(v)
                k = Mat2(4, 1 + 2 * A.a, 2 * A.b, 2 * A.c, 1 + 2 * A.d)
                lhs = sg * k * sg.inverse()
                rhs_a = g * A * g.inverse()
                compatible &= lhs == Mat2(4, 1 + 2 * rhs_a.a, 2 * rhs_a.b, 2 * rhs_a.c, 1 + 2 * rhs_a.d)
        additive = all(
            (Mat2(4, 1 + 2 * _bits_mat(u).a, 2 * _bits_mat(u).b, 2 * _bits_mat(u).c, 1 + 2 * _bits_mat(u).d)
             * Mat2(4, 1 + 2 * _bits_mat(v).a, 2 * _bits_mat(v).b, 2 * _bits_mat(v).c, 1 + 2 * _bits_mat(v).d))
            == Mat2(4, 1 + 2 * _bits_mat(u ^ v).a, 2 * _bits_mat(u ^ v).b, 2 * _bits_mat(u ^ v).c, 1 + 2 * _bits_mat(u ^ v).d)
            for u in range(16) for v in range(16)
        )
        ok = s.is_homomorphism() and splits and complement and compatible and additive and ker.order == 16
        return ok, "section is a homomorphism splitting reduction mod 2; kernel ~ (M2(Z/2),+) equivariantly"

    rep.run("i.semidirect_splitting", "six-matrix section splits GL2(Z/4) -> GL2(Z/2)", step_section)

    def step_table():
        found = invariant_subspaces()
        table = [_table_space(name, mats) for name, mats, _ in SUBSPACE_TABLE]
        nonzero = [S for S in found if len(S) > 1]
        ok = len(found) == 6 and len(found[0]) == 1 and sorted(nonzero, key=sorted) == sorted(table, key=sorted)
        detail = f"{len(found)} invariant subspaces (incl. zero), sizes {[len(S) for S in found]}"
        for row, ((name, mats, kind), S) in enumerate(zip(SUBSPACE_TABLE, table), start=1):
            N4 = _kernel_subgroup(S)
            Q, _ = quotient(G4, N4)
            iso = is_normal(N4, G4) and is_isomorphic(Q, _model_quotient(kind))
            ok &= iso
            detail += f"; row{row} |Q|={Q.order}{'' if iso else ' MISMATCH'}"
        return ok, detail

    rep.run("ii.invariant_subspaces", "invariant-subspace table and its quotient column", step_table)

    def step_table_quotients():
        # every row except Q = GL2(Z/2): no normal subgroup of order 3, or each
        # quotient by one has (Z/2)^2 as a quotient
        v4 = direct_product(closure([Mat2.scalar(-1, 3)]), closure([Mat2.scalar(-1, 5)]))
        ok = True
        for name, mats, kind in SUBSPACE_TABLE[1:]:
            Q, _ = quotient(G4, _kernel_subgroup(_table_space(name, mats)))
            for K in (K for K in normal_subgroups(Q) if K.order == 3):
                Q3, _ = quotient(Q, K)
                ok &= any(
                    Q3.order // M.order == 4 and is_isomorphic(quotient(Q3, M)[0], v4) for M in normal_subgroups(Q3)
                )
        no_v4 = not any(
            gl2(3).order // M.order == 4 and is_isomorphic(quotient(gl2(3), M)[0], v4) for M in normal_subgroups(gl2(3))
        )
        comm3 = commutator_subgroup(gl2(3)) == sl2(3)
        return ok and no_v4 and comm3, "order-3 normal subgroups give (Z/2)^2 quotients; GL2(Z/3) has none; [GL2(Z/3),GL2(Z/3)] = SL2(Z/3)"

    rep.run("ii.table_quotients", "Q ~ Q3 in every row except Q = GL2(Z/2)", step_table_quotients)

    def step_q2():
        G3 = gl2(3)
        quotients = []
        for N3 in normal_subgroups(G3):
            has3 = bool(np.any(_orders_equal(N3, 3)))
            if has3:
                quotients.append(G3.order // N3.order)
        ok = all(q <= 2 for q in quotients) and all(N.order >= 24 for N in normal_subgroups(G3) if np.any(_orders_equal(N, 3)))
        return ok, f"normal subgroups of GL2(Z/3) containing order-3 elements have quotient orders {sorted(set(quotients))}"

    rep.run("q2.cyclic_branch", "N3 containing an order-3 element forces |Q| <= 2", step_q2)

    P, chi1, chi2 = level9_characters()

    def step_commutator():
        comm = commutator_subgroup(P)
        target = preimage(unique_index6_normal().group, 9)
        target_codes = target.elements[target.codec.det(target.elements) == 1]
        return np.array_equal(comm.elements, target_codes), f"|[P,P]| = {comm.order} = |preimage(N) & SL2(Z/9)| = {target_codes.size}, |P| = {P.order}"

    rep.run("iii.level9_commutator", "commutator of the preimage of SL2(Z/3) in GL2(Z/9)", step_commutator)

    def step_abelianization():
        comm = commutator_subgroup(P)
        Q, _ = quotient(P, comm)
        exps = {int(x) for x in _element_orders_small(Q)}
        ok = Q.order == 9 and Q.is_abelian() and max(exps) == 3
        return ok, f"P/[P,P] order {Q.order}, abelian, exponent {max(exps)}"

    rep.run("iv.level9_quotient", "quotient is Z/3 x Z/3", step_abelianization)

    def step_characters():
        # both are homomorphisms to Z/3 whose joint kernel is [P,P]
        codec = P.codec
        ok = True
        for chi in (chi1, chi2):
            for s in P.gens:
                xs = P.positions(codec.mul(P.elements, s))
                ok &= bool(np.all(chi[xs] == (chi + chi[P.positions(np.array([s]))[0]]) % 3))
        joint = P.elements[(chi1 == 0) & (chi2 == 0)]
        ok &= np.array_equal(joint, commutator_subgroup(P).elements)
        ok &= len(set(zip(chi1.tolist(), chi2.tolist()))) == 9
        # chi1 is not conjugation invariant, chi2 is
        inv = codec.inv(G9.elements)
        witness = None
        chi2_invariant = True
        for g, gi in zip(G9.elements, inv):
            conj = P.positions(codec.mul(codec.mul(g, P.elements), gi))
            chi2_invariant &= bool(np.array_equal(chi2[conj], chi2))
            if witness is None:
                bad = np.flatnonzero(chi1[conj] != chi1)
                if bad.size:
                    witness = (Mat2.from_code(g, 9), Mat2.from_code(P.elements[bad[0]], 9))
        ok &= witness is not None and chi2_invariant
        detail = f"chi1, chi2 span Hom(P, Z/3); witness g={witness[0]} x={witness[1]}" if witness else "no witness"
        return ok, detail

    rep.run("v.character_witness", "chi1 not conjugation invariant while chi2 is", step_characters)

    def step_kernels():
        # In this branch N9 reduces mod 3 onto N3 = SL2(Z/3).  ker(chi1) is
        # also normal in GL2(Z/9), but it is the preimage of N and reduces
        # onto N, so the branch hypothesis rules it out.
        normal_pairs, branch_pairs = [], []
        for a1, a2 in itertools.product(range(3), repeat=2):
            if (a1, a2) == (0, 0):
                continue
            K = subgroup_from_elements(P.codec, P.elements[(a1 * chi1 + a2 * chi2) % 3 == 0])
            if is_normal(K, G9):
                normal_pairs.append(((a1, a2), K))
                if reduce_group(K, 3) == sl2(3):
                    branch_pairs.append(((a1, a2), K))
        others = [(p, K) for p, K in normal_pairs if (p, K) not in branch_pairs]
        preimage_n = preimage(unique_index6_normal().group, 9)
        ok = (
            [p for p, _ in branch_pairs] == [(0, 1), (0, 2)]
            and all(K == sl2(9) for _, K in branch_pairs)
            and all(p[1] == 0 and K == preimage_n for p, K in others)
        )
        return ok, (
            f"normal kernels for (a1,a2) in {[p for p, _ in normal_pairs]}; reducing onto SL2(Z/3) only "
            f"{[p for p, _ in branch_pairs]}, equal to SL2(Z/9); the others equal preimage(N) and reduce onto N"
        )

    rep.run("vi.kernel_classification", "only a1 = 0 kernels are normal, forcing N9 = SL2(Z/9)", step_kernels)
    return rep


def _orders_equal(G: FinGroup, k: int) -> np.ndarray:
    from .groups import element_orders

    return element_orders(G) == k


def _element_orders_small(G: FinGroup) -> np.ndarray:
    from .groups import element_orders

    return element_orders(G)


# ---------------------------------------------------------------------------
# the level-36 Goursat scan


@dataclass
class ScanRecord:
    n4_order: int
    n9_order: int
    q_order: int
    q_cyclic: bool
    h_order: int
    det_surjective: bool
    proper_commutator: bool
    contained: bool | None  # only for survivors


@dataclass
class GoursatScan:
    records: list[ScanRecord] = field(default_factory=list)
    level6_match: bool = False

    @property
    def survivors(self) -> list[ScanRecord]:
        return [r for r in self.records if r.det_surjective and r.proper_commutator]

    @property
    def counterexamples(self) -> list[ScanRecord]:
        return [r for r in self.survivors if not r.contained]

    def report(self) -> Report:
        rep = Report()
        cyc = [r for r in self.records if r.q_cyclic]
        rep.check(
            "scan.cyclic_quotients",
            all(not r.proper_commutator for r in cyc),
            f"{len(cyc)} fibered products over cyclic Q, none with proper commutator",
            "equality of commutator subgroups for cyclic Q",
        )
        rep.check(
            "scan.level6_datum",
            self.level6_match,
            "Q = GL2(Z/2) datum (mod 2, theta o mod 3) survives and equals preimage36(H6p)",
            "containment in the level-6 group",
        )
        surv = self.survivors
        qs = sorted({r.q_order for r in surv})
        rep.check(
            "scan.containment",
            bool(surv) and not self.counterexamples,
            f"{len(self.records)} fibered products, {len(surv)} in G36 (Q orders {qs}), "
            f"{len(surv) - len(self.counterexamples)}/{len(surv)} inside a conjugate of preimage36(H6p)",
            "every G36 fibered product lies in a conjugate of the level-6 group",
        )
        return rep


def goursat_scan_36(progress: Callable[[int, ScanRecord], None] | None = None) -> GoursatScan:
    """Enumerate every GL_2(Z/4) x_Q GL_2(Z/9) and test the containment claim."""
    G4, G9, G36 = gl2(4), gl2(9), gl2(LEVEL)
    R = class_representative("X'(6)")
    full_comm = _full_commutator_order(LEVEL)
    scan = GoursatScan()
    for k, datum in enumerate(goursat_data(G4, G9)):
        H = from_product(goursat_fiber(datum))
        det_ok = det_surjective(H)
        proper = commutator_subgroup(H).order < full_comm
        contained = None
        if det_ok and proper:
            contained = conjugate_into(H, R, G36) is not None
        rec = ScanRecord(
            datum.psi0.kernel().order,
            datum.psi1.kernel().order,
            datum.q.order,
            is_cyclic(datum.q),
            H.order,
            det_ok,
            proper,
            contained,
        )
        scan.records.append(rec)
        if progress:
            progress(k, rec)
    # the explicit level-6 datum
    th = theta().hom
    psi4 = reduction_hom(4, 2)
    psi9 = reduction_hom(9, 3).then(th)
    H = from_product(goursat_fiber(GoursatDatum(gl2(2), psi4, psi9)))
    scan.level6_match = (
        H == R and det_surjective(H) and commutator_subgroup(H).order < full_comm
    )
    return scan


def verify_goursat36() -> Report:
    return goursat_scan_36().report()
