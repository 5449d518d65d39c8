"""Exact arithmetic in Q(t) and in the tower Q(t)[w, delta], and the j-map of X'(6).

Rational functions are built on sympy's sparse polynomial ring QQ[t]; this
module only adds a canonical form (reduced, monic denominator) and the
degree-6 tower

    Q(t)[w, delta] / (w^2 + w + 1, delta^3 - disc(t)),

where ``disc`` is the discriminant of the family y^2 = x^3 + a(t) x + b(t).
A tower element is a 2x3 array of rational functions, the coefficient of
w^i delta^j.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy
from sympy import QQ
from sympy.polys.rings import ring

from .errors import InputError
from .report import Report

_RING, _T = ring("t", QQ)

# j(t) = J_SCALE * t^3 (1 - 4 t^3)
J_SCALE = 27648
# j = J_NUMERATOR * a^3 / disc for y^2 = x^3 + a x + b  (-1728 * 64)
J_NUMERATOR = -110592
# The discriminant constant as usually printed for this family, and the one
# the standard convention -16(4a^3 + 27b^2) actually produces.
DISC_CONSTANT_PRINTED = -1728
DISC_CONSTANT_STANDARD = -108


def to_fraction(x) -> Fraction:
    """Coerce int, Fraction, sympy/gmpy rationals or 'p/q' strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a rational number: {x!r}") from None
    num, den = getattr(x, "numerator", None), getattr(x, "denominator", None)
    if num is None:
        raise InputError(f"not a rational number: {x!r}")
    num = num() if callable(num) else num
    den = den() if callable(den) else den
    return Fraction(int(num), int(den))


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _qq(x: Fraction):
    return QQ(x.numerator, x.denominator)


# ---------------------------------------------------------------------------
# polynomials and rational functions in t


class Poly:
    """A polynomial in Q[t] (immutable wrapper around a sympy ring element)."""

    __slots__ = ("p",)

    def __init__(self, p):
        object.__setattr__(self, "p", p if hasattr(p, "ring") else _RING(p))

    def __setattr__(self, *_):
        raise AttributeError("Poly is immutable")

    @classmethod
    def from_coeffs(cls, coeffs) -> Poly:
        """Coefficients low to high."""
        return cls(sum((_qq(to_fraction(c)) * _T**k for k, c in enumerate(coeffs)), _RING.zero))

    @classmethod
    def t(cls) -> Poly:
        return cls(_T)

    def coeffs(self) -> list[Fraction]:
        """Coefficients low to high (``[]`` for zero)."""
        return [to_fraction(c) for c in reversed(self.p.to_dense())] if self.p else []

    @property
    def degree(self) -> int:
        return -1 if not self.p else self.p.degree()

    def __call__(self, x) -> Fraction:
        x = to_fraction(x)
        out = Fraction(0)
        for c in reversed(self.coeffs()):
            out = out * x + c
        return out

    def __add__(self, o):
        if not isinstance(o, (Poly, int, Fraction)):
            return NotImplemented
        return Poly(self.p + _poly(o).p)

    __radd__ = __add__

    def __sub__(self, o):
        if not isinstance(o, (Poly, int, Fraction)):
            return NotImplemented
        return Poly(self.p - _poly(o).p)

    def __rsub__(self, o):
        return Poly(_poly(o).p - self.p)

    def __mul__(self, o):
        if not isinstance(o, (Poly, int, Fraction)):
            return NotImplemented
        return Poly(self.p * _poly(o).p)

    __rmul__ = __mul__

    def __neg__(self):
        return Poly(-self.p)

    def __pow__(self, k: int):
        return Poly(self.p**k)

    def __eq__(self, o):
        try:
            return self.p == _poly(o).p
        except InputError:
            return NotImplemented

    def __hash__(self):
        return hash(tuple(self.coeffs()))

    def __bool__(self):
        return bool(self.p)

    def __repr__(self):
        return f"Poly({[format_rational(c) for c in self.coeffs()]})"

    def __str__(self):
        return str(self.p)


def _poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly(_RING(_qq(to_fraction(x))))
    raise InputError(f"cannot use {x!r} as a polynomial")


class RatFunc:
    """An element of Q(t): reduced numerator over monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        n, d = _poly(num).p, _poly(den).p
        if not d:
            raise ZeroDivisionError("zero denominator")
        g = n.gcd(d)
        n, d = n.exquo(g), d.exquo(g)
        lc = d.LC
        object.__setattr__(self, "num", Poly(n.quo_ground(lc)))
        object.__setattr__(self, "den", Poly(d.quo_ground(lc)))

    def __setattr__(self, *_):
        raise AttributeError("RatFunc is immutable")

    @classmethod
    def t(cls) -> RatFunc:
        return cls(Poly.t())

    def __call__(self, x) -> Fraction:
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at t = {x}")
        return self.num(x) / d

    def __add__(self, o):
        o = _rat_or_none(o)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, o):
        o = _rat_or_none(o)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        return _rat(o) - self

    def __mul__(self, o):
        o = _rat_or_none(o)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> RatFunc:
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, o):
        o = _rat_or_none(o)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        return _rat(o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num**k, self.den**k)

    def __eq__(self, o):
        try:
            o = _rat(o)
        except InputError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __repr__(self):
        if self.is_polynomial():
            return f"RatFunc({self.num})"
        return f"RatFunc(({self.num})/({self.den}))"


def _rat(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    return RatFunc(_poly(x))


def _rat_or_none(x) -> RatFunc | None:
    # lets richer types (tower elements) take over via reflected operators
    if isinstance(x, (RatFunc, Poly, int, Fraction)):
        return _rat(x)
    return None


# ---------------------------------------------------------------------------
# the tower Q(t)[w, delta]


@dataclass(frozen=True)
class TowerElem:
    """sum c[i][j] w^i delta^j with i < 2, j < 3, over a fixed delta^3 = disc."""

    coords: tuple[tuple[RatFunc, ...], ...]
    disc: RatFunc

    @classmethod
    def zero(cls, disc: RatFunc) -> TowerElem:
        z = RatFunc(0)
        return cls(((z, z, z), (z, z, z)), disc)

    @classmethod
    def scalar(cls, x, disc: RatFunc) -> TowerElem:
        return cls.zero(disc)._set(0, 0, _rat(x))

    @classmethod
    def omega(cls, disc: RatFunc) -> TowerElem:
        return cls.zero(disc)._set(1, 0, RatFunc(1))

    @classmethod
    def delta(cls, disc: RatFunc) -> TowerElem:
        return cls.zero(disc)._set(0, 1, RatFunc(1))

    def _set(self, i, j, v) -> TowerElem:
        rows = [list(r) for r in self.coords]
        rows[i][j] = v
        return TowerElem(tuple(tuple(r) for r in rows), self.disc)

    def _lift(self, o) -> TowerElem:
        if isinstance(o, TowerElem):
            if o.disc != self.disc:
                raise InputError("tower elements over different cube roots")
            return o
        return TowerElem.scalar(o, self.disc)

    def __add__(self, o):
        o = self._lift(o)
        return TowerElem(
            tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(self.coords, o.coords)), self.disc
        )

    __radd__ = __add__

    def __neg__(self):
        return TowerElem(tuple(tuple(-x for x in r) for r in self.coords), self.disc)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        # w-degree up to 2, delta-degree up to 4, then reduce
        acc = [[RatFunc(0)] * 5 for _ in range(3)]
        for i in range(2):
            for j in range(3):
                x = self.coords[i][j]
                if not x:
                    continue
                for k in range(2):
                    for m in range(3):
                        y = o.coords[k][m]
                        if y:
                            acc[i + k][j + m] = acc[i + k][j + m] + x * y
        for j in (4, 3):  # delta^3 = disc
            for i in range(3):
                if acc[i][j]:
                    acc[i][j - 3] = acc[i][j - 3] + acc[i][j] * self.disc
                    acc[i][j] = RatFunc(0)
        for j in range(3):  # w^2 = -1 - w
            if acc[2][j]:
                acc[0][j] = acc[0][j] - acc[2][j]
                acc[1][j] = acc[1][j] - acc[2][j]
        return TowerElem((tuple(acc[0][:3]), tuple(acc[1][:3])), self.disc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> TowerElem:
        out = TowerElem.scalar(1, self.disc)
        for _ in range(k):
            out = out * self
        return out

    def __bool__(self):
        return any(x for r in self.coords for x in r)

    def __eq__(self, o):
        if not isinstance(o, TowerElem):
            try:
                o = self._lift(o)
            except InputError:
                return NotImplemented
        return self.disc == o.disc and self.coords == o.coords

    def __hash__(self):
        return hash(self.coords)

    def rational_part(self) -> RatFunc | None:
        """The element as a member of Q(t), or None if it is not in Q(t)."""
        if any(x for i, r in enumerate(self.coords) for j, x in enumerate(r) if (i, j) != (0, 0)):
            return None
        return self.coords[0][0]

    def rotate_delta(self) -> TowerElem:
        """Image under the automorphism delta -> w delta fixing w."""
        return self.substitute(TowerElem.omega(self.disc), TowerElem.omega(self.disc) * TowerElem.delta(self.disc))

    def conjugate_omega(self) -> TowerElem:
        """Image under the automorphism w -> w^2 fixing delta."""
        w = TowerElem.omega(self.disc)
        return self.substitute(w * w, TowerElem.delta(self.disc))

    def substitute(self, w_image: TowerElem, delta_image: TowerElem) -> TowerElem:
        out = TowerElem.zero(self.disc)
        for i in range(2):
            for j in range(3):
                x = self.coords[i][j]
                if x:
                    out = out + (w_image**i) * (delta_image**j) * x
        return out


# ---------------------------------------------------------------------------
# the family


def family_model() -> tuple[RatFunc, RatFunc]:
    """a(t) = 3t(1 - 4t^3), b(t) = (1 - 4t^3)(1/2 - 4t^3)."""
    t = RatFunc.t()
    u = 1 - 4 * t**3
    return 3 * t * u, u * (Fraction(1, 2) - 4 * t**3)


def standard_discriminant(a, b):
    """-16(4a^3 + 27b^2); works on numbers and on rational functions."""
    return -16 * (4 * a**3 + 27 * b**2)


def j_invariant(a, b):
    disc = standard_discriminant(a, b)
    return J_NUMERATOR * a**3 / disc


def j_of_t(t) -> Fraction:
    t = to_fraction(t)
    return J_SCALE * t**3 * (1 - 4 * t**3)


def c4(a):
    return -48 * a


@lru_cache(maxsize=None)
def family_discriminant() -> RatFunc:
    a, b = family_model()
    return standard_discriminant(a, b)


def _u() -> RatFunc:
    t = RatFunc.t()
    return 1 - 4 * t**3


def verify_model_identities() -> Report:
    rep = Report()
    a, b = family_model()
    t = RatFunc.t()
    u = _u()
    disc = standard_discriminant(a, b)
    j = j_invariant(a, b)
    rep.check(
        "model.j_formula",
        j == J_SCALE * t**3 * u,
        f"j(t) = {J_SCALE} t^3 (1 - 4t^3) exactly; j(1/2) = {format_rational(j(Fraction(1, 2)))}",
        "j-invariant formula of the family",
    )
    std = DISC_CONSTANT_STANDARD * u**2
    printed = DISC_CONSTANT_PRINTED * u**2
    rep.check(
        "model.discriminant",
        disc == std,
        f"disc(t) = {DISC_CONSTANT_STANDARD} (1 - 4t^3)^2; printed constant {DISC_CONSTANT_PRINTED} "
        f"{'agrees' if disc == printed else 'differs'} (ratio {format_rational(Fraction(DISC_CONSTANT_PRINTED, DISC_CONSTANT_STANDARD))})",
        "discriminant of the family",
    )
    rep.check("model.c4", c4(a) == -144 * t * u, "c4 = -48 a = -144 t (1 - 4t^3)")
    # j(t) = j0  <=>  4*J_SCALE t^6 - J_SCALE t^3 + j0 = 0
    sextic_ok = all(
        sextic_for_j(j_of_t(s))(s) == 0 for s in (Fraction(1), Fraction(-2, 3), Fraction(5, 7), Fraction(0))
    )
    rep.check("model.degree6", sextic_ok and sextic_for_j(0).degree == 6, "j is a degree-6 map: 110592 t^6 - 27648 t^3 + j0")
    return rep


def sextic_for_j(j0) -> Poly:
    j0 = to_fraction(j0)
    return Poly.from_coeffs([j0, 0, 0, -J_SCALE, 0, 0, 4 * J_SCALE])


# ---------------------------------------------------------------------------
# roots of the 2-division polynomial


def two_torsion_roots(disc: RatFunc | None = None) -> tuple[TowerElem, TowerElem, TowerElem]:
    """e_k = w^k delta / 6 + w^{2k} t delta^2 / (18 (1 - 4t^3)), k = 0, 1, 2."""
    disc = family_discriminant() if disc is None else disc
    t = RatFunc.t()
    w = TowerElem.omega(disc)
    d = TowerElem.delta(disc)
    first = d * Fraction(1, 6)
    second = d * d * (t / (18 * _u()))
    return tuple(first * w**k + second * w ** (2 * k % 3) for k in range(3))


def verify_factorization(disc: RatFunc | None = None) -> Report:
    """Vieta identities for the three roots, checked coefficientwise in the tower."""
    rep = Report()
    disc = family_discriminant() if disc is None else disc
    a, b = family_model()
    e1, e2, e3 = two_torsion_roots(disc)
    s1 = e1 + e2 + e3
    s2 = e1 * e2 + e1 * e3 + e2 * e3
    s3 = e1 * e2 * e3
    rep.check("roots.sum", not s1, "e1 + e2 + e3 = 0", "factorisation of the 2-division polynomial")
    rep.check("roots.pairs", s2 == a, "e1e2 + e1e3 + e2e3 = a(t)", "factorisation of the 2-division polynomial")
    rep.check("roots.product", s3 == -b, "e1e2e3 = -b(t)", "factorisation of the 2-division polynomial")
    t = RatFunc.t()
    d = TowerElem.delta(disc)
    cardano = 3 * (d * Fraction(1, 6)) * (d * d * (t / (18 * _u())))
    rep.check("roots.cardano", cardano == -a, "3 (delta/6)(t delta^2 / (18(1-4t^3))) = -a(t)")
    return rep


def galois_action_check(disc: RatFunc | None = None) -> Report:
    rep = Report()
    disc = family_discriminant() if disc is None else disc
    e = two_torsion_roots(disc)
    rot = [x.rotate_delta() for x in e]
    rep.check("galois.rotate", rot == [e[1], e[2], e[0]], "delta -> w delta sends e1 -> e2 -> e3 -> e1")
    cube = [x.rotate_delta().rotate_delta().rotate_delta() for x in e]
    rep.check("galois.rotate_order3", cube == list(e), "(delta -> w delta)^3 fixes every root")
    conj = [x.conjugate_omega() for x in e]
    rep.check("galois.conjugate", conj == [e[0], e[2], e[1]], "w -> w^2 fixes e1 and swaps e2, e3")
    return rep


def verify_symbolic() -> Report:
    rep = verify_model_identities()
    rep.extend(verify_factorization())
    rep.extend(galois_action_check())
    # Against the printed discriminant constant the roots no longer factor the cubic.
    printed = DISC_CONSTANT_PRINTED * _u() ** 2
    alt = verify_factorization(printed)
    rep.check(
        "roots.printed_constant",
        not alt.ok,
        "with delta^3 = " + f"{DISC_CONSTANT_PRINTED}(1-4t^3)^2 the identities fail: "
        + ", ".join(s.id for s in alt.steps if not s.passed),
    )
    return rep


# ---------------------------------------------------------------------------
# inverting j and rational roots


def _integer_coefficients(coeffs) -> list[int]:
    """Scale rational coefficients to a primitive integer vector."""
    fr = [to_fraction(c) for c in coeffs]
    den = math.lcm(*(c.denominator for c in fr)) if fr else 1
    ints = [int(c * den) for c in fr]
    g = math.gcd(*ints) if any(ints) else 1
    return [x // g for x in ints]


def rational_roots(coeffs) -> set[Fraction]:
    """Rational roots of a polynomial given by coefficients low to high.

    Clears denominators, strips the power of t, and tests p/q with p dividing
    the constant term and q dividing the leading coefficient.
    """
    c = _integer_coefficients(coeffs)
    while c and c[-1] == 0:
        c.pop()
    if not c:
        raise InputError("the zero polynomial has every rational number as a root")
    roots = set()
    k = 0
    while c[k] == 0:
        k += 1
    if k:
        roots.add(Fraction(0))
    c = c[k:]
    if len(c) == 1:
        return roots
    lead, const = abs(c[-1]), abs(c[0])
    qs = sympy.divisors(lead)
    ps = sympy.divisors(const)
    for q in qs:
        for p in ps:
            if math.gcd(p, q) != 1:
                continue
            for s in (p, -p):
                if _eval_scaled(c, s, q) == 0:
                    roots.add(Fraction(s, q))
    return roots


def _eval_scaled(c: list[int], p: int, q: int) -> int:
    """q^deg * f(p/q) for integer coefficients c (low to high)."""
    n = len(c) - 1
    total = 0
    for k, a in enumerate(c):
        total += a * p**k * q ** (n - k)
    return total


def _exact_root(x: int, k: int) -> int | None:
    """Integer k-th root of x if x is a perfect k-th power (k odd for x < 0)."""
    if x < 0:
        if k % 2 == 0:
            return None
        r = _exact_root(-x, k)
        return None if r is None else -r
    r = sympy.integer_nthroot(x, k)
    return int(r[0]) if r[1] else None


def _rational_root_of(x: Fraction, k: int) -> Fraction | None:
    p = _exact_root(x.numerator, k)
    q = _exact_root(x.denominator, k)
    return None if p is None or q is None else Fraction(p, q)


def invert_j(j0) -> set[Fraction]:
    """All rational t with 27648 t^3 (1 - 4t^3) = j0.

    The sextic 110592 t^6 - 27648 t^3 + j0 is a quadratic in s = t^3, so a
    rational root t forces a rational s; solve for s exactly, then take
    exact cube roots.
    """
    j0 = to_fraction(j0)
    A, B = 4 * J_SCALE, -J_SCALE
    disc = Fraction(B * B) - 4 * A * j0
    if disc < 0:
        return set()
    r = _rational_root_of(disc, 2)
    if r is None:
        return set()
    out = set()
    for s in {(-B + r) / (2 * A), (-B - r) / (2 * A)}:
        t = _rational_root_of(s, 3)
        if t is not None:
            out.add(t)
    return out


def invert_j_by_divisors(j0) -> set[Fraction]:
    """Same as :func:`invert_j`, by generic rational-root search (slow; oracle)."""
    return rational_roots(sextic_for_j(j0).coeffs())
