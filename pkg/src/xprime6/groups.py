"""Finite groups stored as fully enumerated, sorted element arrays.

A :class:`FinGroup` is a codec (how to multiply integer element codes) plus
a sorted ``int64`` array of codes and a list of generators.  Three codecs
are used:

* :class:`~xprime6.modring.GL2Codec` -- matrices over Z/nZ;
* :class:`ProductCodec` -- pairs from two codecs (external direct products);
* :class:`TableCodec` -- an abstract group given by a Cayley table, which is
  how quotients are represented.

Everything is exhaustive.  The largest group handled is GL_2(Z/36Z) with
373248 elements, so "store every element" is affordable and is the point:
no claim is checked on a presentation or a random sample.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InputError, ResourceError
from .modring import (
    GL2Codec,
    Mat2,
    crt_join_codes,
    crt_split_codes,
    gl2_codes,
    preimage_codes,
    project_codes,
    unit_group,
)

# Closure keeps a bitmap over the whole code space below this size.
BITMAP_LIMIT = 1 << 26
NORMAL_SUBGROUP_BOUND = 5000
QUOTIENT_BOUND = 5000
ISOMORPHISM_BOUND = 48


class ProductCodec:
    """Codes for pairs: ``code = x0 * size1 + x1``."""

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self.size = left.size * right.size
        self.identity = left.identity * right.size + right.identity

    def __eq__(self, other):
        return isinstance(other, ProductCodec) and (self.left, self.right) == (other.left, other.right)

    def __hash__(self):
        return hash((ProductCodec, self.left, self.right))

    def __repr__(self):
        return f"ProductCodec({self.left!r}, {self.right!r})"

    def split(self, x):
        x = np.asarray(x, dtype=np.int64)
        return x // self.right.size, x % self.right.size

    def join(self, x0, x1):
        return np.asarray(x0, dtype=np.int64) * self.right.size + np.asarray(x1, dtype=np.int64)

    def mul(self, x, y):
        x0, x1 = self.split(x)
        y0, y1 = self.split(y)
        return self.join(self.left.mul(x0, y0), self.right.mul(x1, y1))

    def inv(self, x):
        x0, x1 = self.split(x)
        return self.join(self.left.inv(x0), self.right.inv(x1))


class TableCodec:
    """An abstract group on ``0..m-1`` with identity 0, given by its Cayley table."""

    def __init__(self, table):
        table = np.asarray(table, dtype=np.int64)
        m = table.shape[0]
        if table.shape != (m, m) or not np.array_equal(table[0], np.arange(m)):
            raise InputError("Cayley table must be square with identity 0 in the first row")
        self.table = table
        self.size = m
        self.identity = 0
        self._inv = np.argmax(table == 0, axis=1).astype(np.int64)

    def __repr__(self):
        return f"TableCodec(order={self.size})"

    def mul(self, x, y):
        return self.table[np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)]

    def inv(self, x):
        return self._inv[np.asarray(x, dtype=np.int64)]


def _as_element(codec, code):
    if isinstance(codec, GL2Codec):
        return codec.to_mat(code)
    return int(code)


class FinGroup:
    """A finite group as a sorted array of element codes plus generators.

    ``elements`` is always the closure of ``gens``; constructors in this
    module maintain that, and :func:`subgroup_from_elements` recovers
    generators for a bare element set.
    """

    def __init__(self, codec, elements, gens: Iterable[int] = ()):
        el = np.unique(np.asarray(elements, dtype=np.int64))
        el.setflags(write=False)
        self.codec = codec
        self.elements = el
        self.gens = tuple(int(g) for g in gens)
        self._mask = None

    @property
    def order(self) -> int:
        return int(self.elements.size)

    def __len__(self):
        return self.order

    @property
    def modulus(self) -> int:
        if not isinstance(self.codec, GL2Codec):
            raise AttributeError("only matrix groups have a modulus")
        return self.codec.n

    @property
    def identity(self) -> int:
        return self.codec.identity

    def __repr__(self):
        where = f"mod {self.codec.n}" if isinstance(self.codec, GL2Codec) else repr(self.codec)
        return f"FinGroup(order={self.order}, {where}, {len(self.gens)} gens)"

    def _bitmap(self):
        if self._mask is None and self.codec.size <= BITMAP_LIMIT:
            mask = np.zeros(self.codec.size, dtype=bool)
            mask[self.elements] = True
            self._mask = mask
        return self._mask

    def contains(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        mask = self._bitmap()
        if mask is not None:
            return mask[codes]
        idx = np.searchsorted(self.elements, codes)
        idx = np.minimum(idx, self.order - 1)
        return self.elements[idx] == codes

    def __contains__(self, item) -> bool:
        code = item.code if isinstance(item, Mat2) else item
        if isinstance(item, Mat2) and item.modulus != getattr(self.codec, "n", None):
            return False
        return bool(self.contains(np.array([code]))[0])

    def positions(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        idx = np.searchsorted(self.elements, codes)
        if np.any(idx >= self.order) or np.any(self.elements[np.minimum(idx, self.order - 1)] != codes):
            raise InputError("element not in group")
        return idx

    def __iter__(self) -> Iterator:
        for code in self.elements:
            yield _as_element(self.codec, code)

    def matrices(self) -> list[Mat2]:
        return [self.codec.to_mat(c) for c in self.elements]

    def key(self) -> bytes:
        return self.elements.tobytes()

    def __eq__(self, other):
        return (
            isinstance(other, FinGroup)
            and self.codec == other.codec
            and np.array_equal(self.elements, other.elements)
        )

    def __hash__(self):
        return hash((id(self.codec) if isinstance(self.codec, TableCodec) else self.codec, self.key()))

    def issubgroup(self, other: FinGroup) -> bool:
        return self.codec == other.codec and bool(np.all(other.contains(self.elements)))

    def is_abelian(self) -> bool:
        g = np.array(self.gens, dtype=np.int64)
        if g.size == 0:
            return True
        return bool(np.all(self.codec.mul(g[:, None], g[None, :]) == self.codec.mul(g[None, :], g[:, None])))


# ---------------------------------------------------------------------------
# construction


def generate(codec, gens, seed: FinGroup | None = None) -> FinGroup:
    """Subgroup generated by ``gens`` (codes), optionally together with ``seed``.

    Breadth-first right multiplication by the generators; a finite monoid
    generated by group elements is the group they generate.  Generators
    already inside the running subgroup are dropped, so the stored
    generating set stays short even when ``gens`` is a whole conjugacy class.
    """
    group = seed if seed is not None else FinGroup(codec, [codec.identity])
    for g in np.asarray(list(gens) if not isinstance(gens, np.ndarray) else gens, dtype=np.int64).ravel():
        if group.contains(np.array([g]))[0]:
            continue
        group = _extend(group, int(g))
    return group


def _extend(group: FinGroup, g: int) -> FinGroup:
    codec = group.codec
    gens = np.array(group.gens + (g,), dtype=np.int64)
    if codec.size <= BITMAP_LIMIT:
        seen = np.zeros(codec.size, dtype=bool)
        seen[group.elements] = True
        frontier = group.elements
        while frontier.size:
            prods = codec.mul(frontier[:, None], gens[None, :]).ravel()
            prods = prods[~seen[prods]]
            if not prods.size:
                break
            prods = np.unique(prods)
            seen[prods] = True
            frontier = prods
        elements = np.flatnonzero(seen)
    else:
        elements = group.elements
        frontier = elements
        while frontier.size:
            prods = np.unique(codec.mul(frontier[:, None], gens[None, :]).ravel())
            prods = prods[~np.isin(prods, elements, assume_unique=True)]
            elements = np.union1d(elements, prods)
            frontier = prods
    return FinGroup(codec, elements, gens)


def closure(gens: Sequence[Mat2], n: int | None = None) -> FinGroup:
    """Smallest subgroup of GL_2(Z/nZ) containing the given matrices."""
    gens = list(gens)
    if n is None:
        if not gens:
            raise InputError("modulus required for an empty generator list")
        n = gens[0].modulus
    for g in gens:
        if g.modulus != n:
            raise InputError(f"generator {g} has modulus {g.modulus}, expected {n}")
        if not g.is_invertible():
            raise InputError(f"generator {g} is not invertible mod {n} (det {g.det})")
    codec = GL2Codec(n)
    return generate(codec, codec.from_mats(gens))


def subgroup_from_elements(codec, codes, *, seed: int = 0) -> FinGroup:
    """Wrap an element set as a FinGroup, finding a short generating set.

    Raises InputError if the set is not closed under multiplication.
    """
    target = np.unique(np.asarray(codes, dtype=np.int64))
    if target.size == 0 or not np.any(target == codec.identity):
        raise InputError("element set does not contain the identity")
    rng = np.random.default_rng(seed)
    group = FinGroup(codec, [codec.identity])
    while group.order < target.size:
        remaining = target[~group.contains(target)]
        group = _extend(group, int(remaining[rng.integers(remaining.size)]))
        if group.order > target.size:
            raise InputError("element set is not closed under multiplication")
    if not np.array_equal(group.elements, target):
        raise InputError("element set is not closed under multiplication")
    return group


def unit_generators(n: int) -> list[int]:
    units = unit_group(n)
    gens: list[int] = []
    span = {1 % n}
    for u in units:
        if u in span:
            continue
        gens.append(u)
        frontier = list(span)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = x * g % n
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
    return gens


def standard_generators(n: int) -> list[Mat2]:
    """Elementary matrices (generating SL_2) plus diag(u, 1) for unit generators."""
    gens = [Mat2(n, 1, 1, 0, 1), Mat2(n, 1, 0, 1, 1)]
    gens += [Mat2(n, u, 0, 0, 1) for u in unit_generators(n)]
    return [g for g in gens if g != Mat2.identity(n)]


@lru_cache(maxsize=None)
def gl2(n: int) -> FinGroup:
    """GL_2(Z/nZ) by direct enumeration, carrying the standard generators."""
    codec = GL2Codec(n)
    return FinGroup(codec, gl2_codes(n), codec.from_mats(standard_generators(n)))


@lru_cache(maxsize=None)
def sl2(n: int) -> FinGroup:
    G = gl2(n)
    return subgroup_from_elements(G.codec, G.elements[G.codec.det(G.elements) == 1 % n])


def det_image(H: FinGroup) -> set[int]:
    return set(int(d) for d in np.unique(H.codec.det(H.elements)))


def det_surjective(H: FinGroup) -> bool:
    return det_image(H) == set(unit_group(H.modulus))


def reduce_group(H: FinGroup, d: int) -> FinGroup:
    """Image of H under reduction mod d."""
    n = H.modulus
    codes = np.unique(project_codes(H.elements, n, d))
    gens = np.unique(project_codes(np.array(H.gens, dtype=np.int64), n, d)) if H.gens else []
    codec = GL2Codec(d)
    return generate(codec, gens) if len(gens) else FinGroup(codec, codes)


def preimage(H: FinGroup, n: int) -> FinGroup:
    """Full preimage of H (mod d) in GL_2(Z/nZ)."""
    d = H.modulus
    codes = preimage_codes(H.elements, d, n)
    reduced = project_codes(codes, n, d)
    lifts = [int(codes[np.argmax(reduced == g)]) for g in H.gens]
    codec = GL2Codec(n)
    group = generate(codec, lifts)
    if d != n:
        group = generate(codec, _reduction_kernel(n, d).gens, seed=group)
    if group.order != codes.size:
        raise AssertionError("preimage generation mismatch")
    return group


@lru_cache(maxsize=None)
def _reduction_kernel(n: int, d: int) -> FinGroup:
    G = gl2(n)
    ker = G.elements[project_codes(G.elements, n, d) == Mat2.identity(d).code]
    return subgroup_from_elements(G.codec, ker)


def conjugate(H: FinGroup, g) -> FinGroup:
    """g H g^-1."""
    codec = H.codec
    g = np.int64(g.code if isinstance(g, Mat2) else g)
    gi = codec.inv(g)
    els = codec.mul(codec.mul(g, H.elements), gi)
    gens = codec.mul(codec.mul(g, np.array(H.gens, dtype=np.int64)), gi) if H.gens else []
    return FinGroup(codec, els, gens)


def commutator(codec, x, y):
    return codec.mul(codec.mul(x, y), codec.mul(codec.inv(x), codec.inv(y)))


# ---------------------------------------------------------------------------
# normality, commutators, quotients


def is_normal(N: FinGroup, G: FinGroup) -> bool:
    if not N.issubgroup(G):
        return False
    if not N.gens or not G.gens:
        return True
    codec = G.codec
    g = np.array(G.gens, dtype=np.int64)[:, None]
    c = codec.mul(codec.mul(g, np.array(N.gens, dtype=np.int64)[None, :]), codec.inv(g))
    return bool(np.all(N.contains(c)))


def normal_closure(codes, G: FinGroup) -> FinGroup:
    """Smallest normal subgroup of G containing the given codes."""
    codec = G.codec
    N = generate(codec, codes)
    if not G.gens:
        return N
    g = np.array(G.gens, dtype=np.int64)[:, None]
    gi = codec.inv(g)
    while N.gens:
        c = codec.mul(codec.mul(g, np.array(N.gens, dtype=np.int64)[None, :]), gi).ravel()
        missing = np.unique(c[~N.contains(c)])
        if not missing.size:
            break
        N = generate(codec, missing, seed=N)
    return N


def commutator_subgroup(H: FinGroup) -> FinGroup:
    """[H, H]: the normal closure in H of commutators of generator pairs."""
    codec = H.codec
    g = np.array(H.gens, dtype=np.int64)
    if g.size == 0:
        return FinGroup(codec, [codec.identity])
    comms = np.unique(commutator(codec, g[:, None], g[None, :]).ravel())
    return normal_closure(comms, H)


def center(G: FinGroup) -> FinGroup:
    codec = G.codec
    el = G.elements
    ok = np.ones(el.size, dtype=bool)
    for s in G.gens:
        ok &= codec.mul(el, s) == codec.mul(s, el)
    return subgroup_from_elements(codec, el[ok])


class GroupHom:
    """A homomorphism given by the image of every domain element.

    ``images[i]`` is the codomain code of ``domain.elements[i]``.
    """

    def __init__(self, domain: FinGroup, codomain: FinGroup, images):
        images = np.asarray(images, dtype=np.int64)
        if images.shape != (domain.order,):
            raise InputError("one image per domain element required")
        self.domain = domain
        self.codomain = codomain
        self.images = images

    def __repr__(self):
        return f"GroupHom({self.domain!r} -> {self.codomain!r})"

    def __call__(self, x):
        if isinstance(x, Mat2):
            out = self.images[self.domain.positions(np.array([x.code]))[0]]
            return _as_element(self.codomain.codec, out)
        return self.images[self.domain.positions(x)]

    def gen_images(self) -> np.ndarray:
        return self(np.array(self.domain.gens, dtype=np.int64)) if self.domain.gens else np.zeros(0, np.int64)

    def image(self) -> FinGroup:
        return generate(self.codomain.codec, self.gen_images())

    def is_surjective(self) -> bool:
        return np.unique(self.images).size == self.codomain.order and bool(
            np.all(self.codomain.contains(self.images))
        )

    def kernel(self) -> FinGroup:
        ker = self.domain.elements[self.images == self.codomain.identity]
        return subgroup_from_elements(self.domain.codec, ker)

    def fiber(self, y) -> np.ndarray:
        return self.domain.elements[self.images == y]

    def then(self, other: GroupHom) -> GroupHom:
        """other o self."""
        return GroupHom(self.domain, other.codomain, other(self.images))

    def is_homomorphism(self, samples: int = 2000, seed: int = 0) -> bool:
        """Exhaustive check of f(x s) = f(x) f(s) for every x and generator s,
        which implies the hom property, plus random pair spot checks."""
        G, C = self.domain, self.codomain
        if self.images[G.positions(np.array([G.identity]))[0]] != C.identity:
            return False
        if not np.all(C.contains(self.images)):
            return False
        for s in G.gens:
            xs = G.positions(G.codec.mul(G.elements, s))
            if not np.array_equal(self.images[xs], C.codec.mul(self.images, self(np.array([s]))[0])):
                return False
        rng = np.random.default_rng(seed)
        i = rng.integers(G.order, size=samples)
        j = rng.integers(G.order, size=samples)
        prod = G.positions(G.codec.mul(G.elements[i], G.elements[j]))
        return bool(np.array_equal(self.images[prod], C.codec.mul(self.images[i], self.images[j])))


def hom_from_generator_images(G: FinGroup, images, codomain: FinGroup) -> GroupHom | None:
    """Extend generator images to a homomorphism, or None if no extension exists."""
    images = np.asarray(images, dtype=np.int64)
    codec, ccodec = G.codec, codomain.codec
    img = np.full(G.order, -1, dtype=np.int64)
    e = G.positions(np.array([G.identity]))[0]
    img[e] = ccodec.identity
    frontier = np.array([e])
    while frontier.size:
        nxt = []
        for s, fs in zip(G.gens, images):
            y = G.positions(codec.mul(G.elements[frontier], s))
            fy = ccodec.mul(img[frontier], fs)
            fresh = img[y] < 0
            img[y[fresh]] = fy[fresh]
            nxt.append(y[fresh])
        frontier = np.unique(np.concatenate(nxt)) if nxt else np.zeros(0, np.int64)
    if np.any(img < 0):
        return None
    hom = GroupHom(G, codomain, img)
    for s, fs in zip(G.gens, images):
        xs = G.positions(codec.mul(G.elements, s))
        if not np.array_equal(img[xs], ccodec.mul(img, fs)):
            return None
    return hom


def quotient(G: FinGroup, N: FinGroup, max_order: int = QUOTIENT_BOUND) -> tuple[FinGroup, GroupHom]:
    """G/N as a Cayley-table group, with the projection G -> G/N.

    Coset 0 is N itself; the other cosets are numbered by their smallest
    unlabelled representative in code order, so the result is canonical.
    """
    if not N.issubgroup(G):
        raise InputError("N is not a subgroup of G")
    if not is_normal(N, G):
        raise InputError("N is not normal in G")
    m = G.order // N.order
    if m > max_order:
        raise ResourceError(f"quotient of order {m} exceeds bound {max_order}")
    codec = G.codec
    labels = np.full(G.order, -1, dtype=np.int64)
    labels[G.positions(N.elements)] = 0
    reps = [G.identity]
    for k in range(1, m):
        i = int(np.flatnonzero(labels < 0)[0])
        rep = G.elements[i]
        labels[G.positions(codec.mul(rep, N.elements))] = k
        reps.append(int(rep))
    reps = np.array(reps, dtype=np.int64)
    table = labels[G.positions(codec.mul(reps[:, None], reps[None, :]))]
    qcodec = TableCodec(table)
    qgens = [int(x) for x in np.unique(labels[G.positions(np.array(G.gens, dtype=np.int64))])] if G.gens else []
    Q = generate(qcodec, [x for x in qgens if x != 0])
    if Q.order != m:
        raise AssertionError("quotient generators do not generate")
    return Q, GroupHom(G, Q, labels)


# ---------------------------------------------------------------------------
# invariants, conjugacy


def element_orders(G: FinGroup) -> np.ndarray:
    codec = G.codec
    el = G.elements
    orders = np.zeros(el.size, dtype=np.int64)
    cur = el.copy()
    k = 1
    while True:
        hit = (cur == codec.identity) & (orders == 0)
        orders[hit] = k
        if np.all(orders):
            return orders
        cur = codec.mul(cur, el)
        k += 1


def order_profile(G: FinGroup) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(Counter(element_orders(G).tolist()).items()))


def abelianization_order(G: FinGroup) -> int:
    return G.order // commutator_subgroup(G).order


def conjugacy_classes(G: FinGroup) -> list[np.ndarray]:
    codec = G.codec
    el = G.elements
    inv = codec.inv(el)
    unassigned = np.ones(el.size, dtype=bool)
    classes = []
    while unassigned.any():
        x = el[np.argmax(unassigned)]
        cls = np.unique(codec.mul(codec.mul(el, x), inv))
        unassigned[G.positions(cls)] = False
        classes.append(cls)
    return classes


def conjugators_into(H: FinGroup, R: FinGroup, G: FinGroup) -> np.ndarray:
    """Boolean mask over G.elements: g H g^-1 is contained in R."""
    codec = G.codec
    el = G.elements
    inv = codec.inv(el)
    ok = np.ones(el.size, dtype=bool)
    for h in H.gens:
        idx = np.flatnonzero(ok)
        if not idx.size:
            break
        ok[idx] = R.contains(codec.mul(codec.mul(el[idx], h), inv[idx]))
    return ok


def conjugate_into(H: FinGroup, R: FinGroup, G: FinGroup):
    """A g in G with g H g^-1 <= R (identity preferred), or None."""
    if H.codec != R.codec or R.order % H.order:
        return None
    ok = conjugators_into(H, R, G)
    if not ok.any():
        return None
    if H.issubgroup(R):
        return _as_element(G.codec, G.identity)
    return _as_element(G.codec, G.elements[np.argmax(ok)])


def are_conjugate(H1: FinGroup, H2: FinGroup, G: FinGroup):
    """(True, g) with g H1 g^-1 = H2 for some g in G, else (False, None)."""
    if not (H1.issubgroup(G) and H2.issubgroup(G)):
        raise InputError("both groups must be subgroups of the ambient group")
    if H1.order != H2.order:
        return False, None
    if H1.order <= NORMAL_SUBGROUP_BOUND and order_profile(H1) != order_profile(H2):
        return False, None
    g = conjugate_into(H1, H2, G)
    return (g is not None), g


def normal_subgroups(G: FinGroup, bound: int = NORMAL_SUBGROUP_BOUND) -> list[FinGroup]:
    """All normal subgroups of G, sorted by order then elements.

    Every normal subgroup is the join of the normal closures of the
    conjugacy classes it contains, so joins of class closures suffice.
    """
    if G.order > bound:
        raise ResourceError(f"|G| = {G.order} exceeds normal-subgroup bound {bound}")
    codec = G.codec
    atoms: dict[bytes, FinGroup] = {}
    for cls in conjugacy_classes(G):
        N = generate(codec, cls)
        atoms.setdefault(N.key(), N)
    found = dict(atoms)
    frontier = list(atoms.values())
    while frontier:
        nxt = []
        for A in frontier:
            for B in atoms.values():
                if B.issubgroup(A):
                    continue
                J = generate(codec, B.gens, seed=A)
                if J.key() not in found:
                    found[J.key()] = J
                    nxt.append(J)
        frontier = nxt
    return sorted(found.values(), key=lambda N: (N.order, N.key()))


# ---------------------------------------------------------------------------
# isomorphisms of small groups


def cayley_table(G: FinGroup) -> list[list[int]]:
    el = G.elements
    return G.positions(G.codec.mul(el[:, None], el[None, :])).tolist()


def _small_generators(table: list[list[int]], orders: list[int]) -> list[int]:
    """Greedy generating set, trying elements of large order first."""
    m = len(table)
    span = {0}
    gens: list[int] = []
    for x in sorted(range(m), key=lambda i: (-orders[i], i)):
        if x in span:
            continue
        gens.append(x)
        frontier = list(span)
        while frontier:
            nxt = []
            for y in frontier:
                for g in gens:
                    z = table[y][g]
                    if z not in span:
                        span.add(z)
                        nxt.append(z)
            frontier = nxt
        if len(span) == m:
            break
    return gens


def _extend_map(tA, tB, gens, imgs):
    f = {0: 0}
    queue = [0]
    for x in queue:
        fx = f[x]
        for s, fs in zip(gens, imgs):
            y = tA[x][s]
            fy = tB[fx][fs]
            prev = f.get(y)
            if prev is None:
                f[y] = fy
                queue.append(y)
            elif prev != fy:
                return None
    return f


def group_invariants(G: FinGroup) -> tuple:
    return (G.order, order_profile(G), abelianization_order(G), center(G).order)


def isomorphisms(A: FinGroup, B: FinGroup, bound: int = ISOMORPHISM_BOUND) -> Iterator[GroupHom]:
    """All isomorphisms A -> B, by backtracking over generator images.

    Candidates are pruned by element order and by consistency on the
    subgroup generated by the generators assigned so far.
    """
    if A.order != B.order:
        return
    if A.order > bound:
        raise ResourceError(f"isomorphism search limited to order <= {bound}")
    if group_invariants(A) != group_invariants(B):
        return
    tA, tB = cayley_table(A), cayley_table(B)
    oA, oB = element_orders(A).tolist(), element_orders(B).tolist()
    eA = int(A.positions(np.array([A.identity]))[0])
    eB = int(B.positions(np.array([B.identity]))[0])
    if eA != 0 or eB != 0:
        # reindex so the identity sits at position 0
        permA = [eA] + [i for i in range(A.order) if i != eA]
        permB = [eB] + [i for i in range(B.order) if i != eB]
        tA, oA, backA = _reindex(tA, oA, permA)
        tB, oB, backB = _reindex(tB, oB, permB)
    else:
        permA = permB = list(range(A.order))
    gens = _small_generators(tA, oA)
    by_order: dict[int, list[int]] = {}
    for i, o in enumerate(oB):
        by_order.setdefault(o, []).append(i)

    def search(k, imgs):
        if k == len(gens):
            f = _extend_map(tA, tB, gens, imgs)
            if f is not None and len(f) == len(tA) and len(set(f.values())) == len(tA):
                yield f
            return
        for cand in by_order.get(oA[gens[k]], []):
            trial = imgs + [cand]
            f = _extend_map(tA, tB, gens[: k + 1], trial)
            if f is None or len(set(f.values())) != len(f):
                continue
            yield from search(k + 1, trial)

    for f in search(0, []):
        images = np.empty(A.order, dtype=np.int64)
        for i, j in f.items():
            images[permA[i]] = B.elements[permB[j]]
        yield GroupHom(A, B, images)


def _reindex(table, orders, perm):
    pos = {p: i for i, p in enumerate(perm)}
    new = [[pos[table[perm[i]][perm[j]]] for j in range(len(perm))] for i in range(len(perm))]
    return new, [orders[p] for p in perm], pos


def find_isomorphism(A: FinGroup, B: FinGroup) -> GroupHom | None:
    return next(isomorphisms(A, B), None)


def is_isomorphic(A: FinGroup, B: FinGroup) -> bool:
    return find_isomorphism(A, B) is not None


# ---------------------------------------------------------------------------
# maximal subgroups of GL_2(F_l)


def is_maximal(H: FinGroup, G: FinGroup) -> bool:
    """True iff H < G properly and <H, x> = G for every x outside H.

    One representative per double coset HxH is enough.
    """
    if H.order >= G.order or not H.issubgroup(G):
        return False
    codec = G.codec
    outside = ~H.contains(G.elements)
    while outside.any():
        x = int(G.elements[np.argmax(outside)])
        if generate(codec, [x], seed=H).order != G.order:
            return False
        dc = np.unique(codec.mul(codec.mul(H.elements[:, None], x), H.elements[None, :]))
        outside[G.positions(dc)] = False
    return True


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, math.isqrt(n) + 1))


def _nonresidue(ell: int) -> int:
    return next(e for e in range(2, ell) if pow(e, (ell - 1) // 2, ell) == ell - 1)


def _structural_candidates(ell: int) -> list[FinGroup]:
    G = gl2(ell)
    codec = G.codec
    el = G.elements
    a, b, c, d = codec.decode(el)
    cands = [
        subgroup_from_elements(codec, el[c == 0]),  # Borel
        subgroup_from_elements(codec, el[((b == 0) & (c == 0)) | ((a == 0) & (d == 0))]),  # N(split Cartan)
    ]
    if ell == 2:
        cns = closure([Mat2(2, 0, 1, 1, 1)])
        cands.append(cns)
    else:
        eps = _nonresidue(ell)
        cns = el[(a == d) & (b == (eps * c) % ell)]
        cns = subgroup_from_elements(codec, cns)
        cands.append(generate(codec, [Mat2(ell, 1, 0, 0, ell - 1).code], seed=cns))
    cands += _exceptional_candidates(ell)
    return cands


def _exceptional_candidates(ell: int) -> list[FinGroup]:
    """Preimages in GL_2 of subgroups of PGL_2(F_l) isomorphic to A4, S4 or A5.

    Each such projective group is generated by an involution and an element
    of order 3 whose product has order 3, 4 or 5 respectively.
    """
    G = gl2(ell)
    scalars = subgroup_from_elements(G.codec, [Mat2.scalar(s, ell).code for s in unit_group(ell)])
    P, proj = quotient(G, scalars)
    table = P.codec.table.tolist()
    orders = element_orders(P).tolist()
    invol = [i for i in range(P.order) if orders[i] == 2]
    threes = [i for i in range(P.order) if orders[i] == 3]
    found: dict[frozenset, None] = {}
    for x, y in itertools.product(invol, threes):
        if orders[table[x][y]] not in (3, 4, 5):
            continue
        span = _small_span(table, [x, y], limit=60)
        if span is not None and len(span) in (12, 24, 60):
            found.setdefault(frozenset(span), None)
    out = []
    for span in found:
        codes = G.elements[np.isin(proj.images, np.fromiter(span, dtype=np.int64))]
        out.append(subgroup_from_elements(G.codec, codes))
    return out


def _small_span(table, gens, limit):
    span = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for y in frontier:
            for g in gens:
                z = table[y][g]
                if z not in span:
                    span.add(z)
                    nxt.append(z)
                    if len(span) > limit:
                        return None
        frontier = nxt
    return span


def maximal_subgroups_detsurj(ell: int) -> list[FinGroup]:
    """Conjugacy-class representatives of maximal proper subgroups of
    GL_2(F_l) with surjective determinant, for l in {2, 3, 5, 7}.

    Candidates come from the structural families (Borel, Cartan
    normalizers, exceptional projective images); each one is checked for
    det-surjectivity and maximality by the add-one-element test, then
    deduplicated up to conjugacy.
    """
    if ell not in (2, 3, 5, 7):
        raise InputError(f"maximal subgroup search supports l in {{2, 3, 5, 7}}, got {ell}")
    return _maximal_subgroups(ell)


@lru_cache(maxsize=None)
def _maximal_subgroups(ell: int) -> tuple[FinGroup, ...]:
    G = gl2(ell)
    reps: list[FinGroup] = []
    for H in _structural_candidates(ell):
        if H.order == G.order or not det_surjective(H) or not is_maximal(H, G):
            continue
        if any(are_conjugate(H, R, G)[0] for R in reps):
            continue
        reps.append(H)
    return tuple(sorted(reps, key=lambda H: (-H.order, H.key())))


# ---------------------------------------------------------------------------
# direct products and Goursat's lemma


def direct_product(G0: FinGroup, G1: FinGroup) -> FinGroup:
    codec = ProductCodec(G0.codec, G1.codec)
    els = codec.join(G0.elements[:, None], G1.elements[None, :]).ravel()
    gens = [codec.join(g, G1.identity) for g in G0.gens] + [codec.join(G0.identity, g) for g in G1.gens]
    return FinGroup(codec, els, gens)


def component_images(H: FinGroup) -> tuple[np.ndarray, np.ndarray]:
    x0, x1 = H.codec.split(H.elements)
    return np.unique(x0), np.unique(x1)


def to_product(H: FinGroup, n0: int, n1: int) -> FinGroup:
    """A subgroup of GL_2(Z/n0n1Z) as pairs in GL_2(Z/n0) x GL_2(Z/n1) (CRT)."""
    if H.modulus != n0 * n1:
        raise InputError(f"modulus {H.modulus} != {n0}*{n1}")
    codec = ProductCodec(GL2Codec(n0), GL2Codec(n1))
    x0, x1 = crt_split_codes(H.elements, n0, n1)
    gens = np.array(H.gens, dtype=np.int64)
    g0, g1 = crt_split_codes(gens, n0, n1) if gens.size else (gens, gens)
    return FinGroup(codec, codec.join(x0, x1), codec.join(g0, g1))


def from_product(H: FinGroup) -> FinGroup:
    """Inverse of :func:`to_product` for coprime matrix moduli."""
    codec = H.codec
    if not (isinstance(codec, ProductCodec) and isinstance(codec.left, GL2Codec) and isinstance(codec.right, GL2Codec)):
        raise InputError("CRT embedding needs a product of two matrix codecs")
    n0, n1 = codec.left.n, codec.right.n
    x0, x1 = codec.split(H.elements)
    gens = np.array(H.gens, dtype=np.int64)
    g0, g1 = codec.split(gens)
    return FinGroup(
        GL2Codec(n0 * n1),
        crt_join_codes(x0, n0, x1, n1),
        crt_join_codes(g0, n0, g1, n1) if gens.size else [],
    )


@dataclass(frozen=True)
class GoursatDatum:
    """Common quotient Q with surjections psi0: G0 -> Q and psi1: G1 -> Q."""

    q: FinGroup
    psi0: GroupHom
    psi1: GroupHom

    @property
    def g0(self) -> FinGroup:
        return self.psi0.domain

    @property
    def g1(self) -> FinGroup:
        return self.psi1.domain

    def validate(self):
        for psi in (self.psi0, self.psi1):
            if psi.codomain is not self.q and psi.codomain != self.q:
                raise InputError("both maps must land in Q")
            if not psi.is_surjective() or not psi.is_homomorphism():
                raise InputError("Goursat maps must be surjective homomorphisms")

    def push(self, f: GroupHom) -> GoursatDatum:
        """Compose both maps with a surjection f: Q -> Q1."""
        return GoursatDatum(f.codomain, self.psi0.then(f), self.psi1.then(f))


def _as_pairs(H: FinGroup, G0: FinGroup, G1: FinGroup) -> FinGroup:
    if isinstance(H.codec, ProductCodec):
        if (H.codec.left, H.codec.right) != (G0.codec, G1.codec):
            raise InputError("product codec does not match the factor groups")
        return H
    return to_product(H, G0.modulus, G1.modulus)


def goursat_decompose(H: FinGroup, G0: FinGroup, G1: FinGroup) -> GoursatDatum:
    """Write H <= G0 x G1 (surjective projections) as a fibered product.

    ``H`` may be given as pairs (a ProductCodec group) or, for coprime
    matrix moduli, as a subgroup of GL_2(Z/n0n1Z).
    """
    H = _as_pairs(H, G0, G1)
    codec = H.codec
    x0, x1 = codec.split(H.elements)
    if not (np.array_equal(np.unique(x0), G0.elements) and np.array_equal(np.unique(x1), G1.elements)):
        raise InputError("projections of H are not surjective onto the factors")
    ker0 = subgroup_from_elements(G0.codec, x0[x1 == G1.identity])
    Q, psi0 = quotient(G0, ker0)
    q_of_pair = psi0(x0)
    images1 = np.full(G1.order, -1, dtype=np.int64)
    pos1 = G1.positions(x1)
    images1[pos1] = q_of_pair
    if not np.array_equal(images1[pos1], q_of_pair):
        raise InputError("H is not a fibered product")
    datum = GoursatDatum(Q, psi0, GroupHom(G1, Q, images1))
    if fiber_elements(datum).size != H.order:
        raise InputError("H is not a fibered product")
    return datum


def fiber_elements(datum: GoursatDatum) -> np.ndarray:
    G0, G1 = datum.g0, datum.g1
    codec = ProductCodec(G0.codec, G1.codec)
    chunks = []
    for q in datum.q.elements:
        a = datum.psi0.fiber(q)
        b = datum.psi1.fiber(q)
        chunks.append(codec.join(a[:, None], b[None, :]).ravel())
    return np.sort(np.concatenate(chunks))


def goursat_fiber(datum: GoursatDatum) -> FinGroup:
    """The fibered product {(g0, g1) : psi0(g0) = psi1(g1)} as pairs."""
    datum.validate()
    G0, G1 = datum.g0, datum.g1
    codec = ProductCodec(G0.codec, G1.codec)
    gens = [codec.join(g, G1.identity) for g in datum.psi0.kernel().gens]
    gens += [codec.join(G0.identity, g) for g in datum.psi1.kernel().gens]
    for g in G0.gens:
        partner = datum.psi1.fiber(datum.psi0(np.array([g]))[0])[0]
        gens.append(codec.join(g, partner))
    H = FinGroup(codec, fiber_elements(datum), [int(x) for x in gens])
    if H.order * datum.q.order != G0.order * G1.order:
        raise AssertionError("fibered product has the wrong order")
    return H


def all_subgroups(G: FinGroup, bound: int = 500) -> list[FinGroup]:
    """Every subgroup of a small group, as joins of cyclic subgroups."""
    if G.order > bound:
        raise ResourceError(f"|G| = {G.order} exceeds subgroup-lattice bound {bound}")
    codec = G.codec
    cyclic: dict[bytes, FinGroup] = {}
    for x in G.elements:
        C = generate(codec, [x])
        cyclic.setdefault(C.key(), C)
    found = dict(cyclic)
    frontier = list(cyclic.values())
    while frontier:
        nxt = []
        for A in frontier:
            for C in cyclic.values():
                if C.issubgroup(A):
                    continue
                J = generate(codec, C.gens, seed=A)
                if J.key() not in found:
                    found[J.key()] = J
                    nxt.append(J)
        frontier = nxt
    return sorted(found.values(), key=lambda H: (H.order, H.key()))


def is_cyclic(G: FinGroup) -> bool:
    return G.is_abelian() and int(element_orders(G).max()) == G.order


def goursat_data(
    G0: FinGroup,
    G1: FinGroup,
    normals0: Sequence[FinGroup] | None = None,
    normals1: Sequence[FinGroup] | None = None,
    max_quotient: int = ISOMORPHISM_BOUND,
    keep=None,
) -> Iterator[GoursatDatum]:
    """Every Goursat datum for G0 x G1 with |Q| <= max_quotient.

    Yields one datum per (N0, N1, isomorphism G0/N0 -> G1/N1); distinct
    isomorphisms give distinct fibered products.  ``keep(Q)`` can restrict
    the quotients considered (e.g. to cyclic ones).
    """
    normals0 = normal_subgroups(G0) if normals0 is None else normals0
    normals1 = normal_subgroups(G1) if normals1 is None else normals1
    quot0 = [quotient(G0, N) for N in normals0 if G0.order // N.order <= max_quotient]
    quot1 = [quotient(G1, N) for N in normals1 if G1.order // N.order <= max_quotient]
    inv0 = {id(Q): group_invariants(Q) for Q, _ in quot0}
    inv1 = {id(Q): group_invariants(Q) for Q, _ in quot1}
    for Q0, p0 in quot0:
        if keep is not None and not keep(Q0):
            continue
        for Q1, p1 in quot1:
            if inv0[id(Q0)] != inv1[id(Q1)]:
                continue
            for alpha in isomorphisms(Q0, Q1, bound=max_quotient):
                yield GoursatDatum(Q1, p0.then(alpha), p1)
