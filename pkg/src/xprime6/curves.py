"""Short Weierstrass curves over Q and their reductions modulo primes.

Everything mod p is done by brute force over all residues with numpy, which
is plenty for p up to a few times 10^4.  The point of this module is the
sampling test for Q(E[2]) being inside Q(E[3]): at a prime where Frobenius
acts trivially on E[3] it must act trivially on E[2] as well, so the cubic
x^3 + a x + b splits completely mod p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
import sympy

from .errors import InputError
from .funcfield import family_model, format_rational, j_of_t, rational_roots, to_fraction

# j-invariants of the elliptic curves over Q with complex multiplication.
CM_J_INVARIANTS = frozenset(
    {
        0,
        1728,
        -3375,
        8000,
        -32768,
        54000,
        287496,
        -884736,
        -12288000,
        16581375,
        -884736000,
        -147197952000,
        -262537412640768000,
    }
)

SPLIT_TYPES = ((1, 1, 1), (1, 2), (3,))


def format_split(kind: tuple[int, ...]) -> str:
    return "(" + ",".join(map(str, kind)) + ")"


@dataclass(frozen=True)
class CurveQ:
    """y^2 = x^3 + a x + b over Q."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", to_fraction(self.a))
        object.__setattr__(self, "b", to_fraction(self.b))
        if self.discriminant == 0:
            raise InputError(f"singular curve: a={self.a}, b={self.b}")

    @classmethod
    def parse(cls, text: str) -> CurveQ:
        """Parse ``"a,b"`` with rational entries such as ``"-9,21/2"``."""
        parts = text.split(",")
        if len(parts) != 2:
            raise InputError(f"curve {text!r}: expected 'a,b'")
        return cls(to_fraction(parts[0]), to_fraction(parts[1]))

    @property
    def discriminant(self) -> Fraction:
        return -16 * (4 * self.a**3 + 27 * self.b**2)

    @property
    def cubic_discriminant(self) -> Fraction:
        return -4 * self.a**3 - 27 * self.b**2

    @property
    def j(self) -> Fraction:
        return -110592 * self.a**3 / self.discriminant

    @property
    def has_cm(self) -> bool:
        return self.j.denominator == 1 and self.j.numerator in CM_J_INVARIANTS

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    @cached_property
    def integral_model(self) -> IntegralModel:
        return integral_model(self)

    def __str__(self):
        return f"y^2 = x^3 + ({format_rational(self.a)})x + ({format_rational(self.b)})"


@dataclass(frozen=True)
class IntegralModel:
    """The scaled curve y^2 = x^3 + s^4 a x + s^6 b with the least such s."""

    curve: CurveQ
    scale: int
    source: CurveQ

    @property
    def a(self) -> int:
        return self.curve.a.numerator

    @property
    def b(self) -> int:
        return self.curve.b.numerator


def _least_scale(a: Fraction, b: Fraction) -> int:
    need: dict[int, int] = {}
    for den, k in ((a.denominator, 4), (b.denominator, 6)):
        for q, e in sympy.factorint(den).items():
            need[q] = max(need.get(q, 0), -(-e // k))
    return math.prod(q**v for q, v in need.items())


def integral_model(E: CurveQ) -> IntegralModel:
    s = _least_scale(E.a, E.b)
    return IntegralModel(CurveQ(E.a * s**4, E.b * s**6), s, E)


def family_curve(t) -> CurveQ:
    a, b = family_model()
    t = to_fraction(t)
    return CurveQ(a(t), b(t))


def specialize_integral(t) -> IntegralModel:
    """Integral model of the family member at t.  1 - 4t^3 never vanishes on Q,
    so every rational t gives an elliptic curve."""
    model = integral_model(family_curve(t))
    if model.curve.j != j_of_t(t):
        raise AssertionError("j changed under scaling")
    return model


# ---------------------------------------------------------------------------
# reduction mod p


@dataclass(frozen=True)
class CurveFp:
    p: int
    a: int
    b: int
    good: bool

    @classmethod
    def reduce(cls, E: CurveQ, p: int) -> CurveFp:
        if p < 2 or not sympy.isprime(p):
            raise InputError(f"{p} is not prime")
        if E.a.denominator % p == 0 or E.b.denominator % p == 0:
            return cls(p, 0, 0, False)
        a = E.a.numerator * pow(E.a.denominator, -1, p) % p
        b = E.b.numerator * pow(E.b.denominator, -1, p) % p
        good = p > 3 and (4 * a**3 + 27 * b**2) % p != 0
        return cls(p, a, b, good)

    def _require_good(self):
        if not self.good:
            raise InputError(f"bad reduction (or p <= 3) at p = {self.p}")


@dataclass(frozen=True)
class FrobeniusRecord:
    p: int
    count: int
    two_split_type: tuple[int, ...] | None = None
    three_full: bool | None = None

    @property
    def ap(self) -> int:
        return self.p + 1 - self.count

    @property
    def violation(self) -> bool:
        return bool(self.three_full) and self.two_split_type != (1, 1, 1)

    def line(self) -> str:
        return (
            f"p={self.p} split={format_split(self.two_split_type)} "
            f"full3={str(self.three_full).lower()} violation={str(self.violation).lower()}"
        )


def _residues(p: int):
    x = np.arange(p, dtype=np.int64)
    squares = np.zeros(p, dtype=bool)
    squares[x * x % p] = True
    return x, squares


def _cubic_values(x, a, b, p):
    return ((x * x % p) * x % p + a * x + b) % p


def count_points(E: CurveFp) -> FrobeniusRecord:
    """#E(F_p) = 1 + sum_x (1 + chi(x^3 + a x + b))."""
    E._require_good()
    p = E.p
    x, squares = _residues(p)
    f = _cubic_values(x, E.a, E.b, p)
    count = 1 + int(np.count_nonzero(f == 0)) + 2 * int(np.count_nonzero(squares[f] & (f != 0)))
    rec = FrobeniusRecord(p, count)
    if rec.ap**2 > 4 * p:
        raise AssertionError(f"Hasse bound violated at p={p}: a_p={rec.ap}")
    return rec


def _split_type(num_roots: int) -> tuple[int, ...]:
    # a cubic with exactly two roots in F_p is impossible (the third is forced)
    return {3: (1, 1, 1), 1: (1, 2), 0: (3,)}[num_roots]


def frobenius_signature(E: CurveQ | CurveFp, p: int | None = None) -> FrobeniusRecord:
    """Point count, splitting type of the 2-division cubic, and whether all of
    E[3] is rational over F_p."""
    Ep = E if isinstance(E, CurveFp) else CurveFp.reduce(E, p)
    Ep._require_good()
    p, a, b = Ep.p, Ep.a, Ep.b
    x, squares = _residues(p)
    f = _cubic_values(x, a, b, p)
    count = 1 + int(np.count_nonzero(f == 0)) + 2 * int(np.count_nonzero(squares[f] & (f != 0)))
    # double roots would mean p | disc, excluded by good reduction
    split = _split_type(int(np.count_nonzero(f == 0)))
    three_full = False
    if p % 3 == 1:
        x2 = x * x % p
        psi3 = (3 * x2 * x2 + 6 * a * x2 + 12 * b * x - a * a) % p
        roots = np.flatnonzero(psi3 == 0)
        three_full = roots.size == 4 and bool(np.all(squares[f[roots]] & (f[roots] != 0)))
    rec = FrobeniusRecord(p, count, split, three_full)
    if rec.ap**2 > 4 * p:
        raise AssertionError(f"Hasse bound violated at p={p}: a_p={rec.ap}")
    return rec


# ---------------------------------------------------------------------------
# scans


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(n) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).astype(np.int64)


@dataclass
class ScanResult:
    curve: CurveQ
    p_max: int
    records: list[FrobeniusRecord] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)

    @property
    def violations(self) -> list[int]:
        return [r.p for r in self.records if r.violation]

    @property
    def three_full_primes(self) -> list[int]:
        return [r.p for r in self.records if r.three_full]

    def summary(self) -> str:
        v = self.violations
        head = (
            f"curve {self.curve} (j={format_rational(self.curve.j)}{', CM' if self.curve.has_cm else ''}): "
            f"{len(self.records)} good primes <= {self.p_max}, {len(self.skipped)} skipped, "
            f"{len(self.three_full_primes)} with full 3-torsion, {len(v)} violations"
        )
        if v:
            return head + f"; smallest violation p={v[0]}: Q(E[2]) is not inside Q(E[3])"
        return head + f"; consistent with Q(E[2]) inside Q(E[3]) up to {self.p_max}"


MAX_SCAN_PRIME = 10**6


def entanglement_scan(E: CurveQ, p_max: int, *, stop_at_first: bool = False) -> ScanResult:
    """Look for primes where E[3] is fully rational mod p but E[2] is not.

    Any such prime proves Q(E[2]) is not contained in Q(E[3]); none up to
    p_max is evidence, not proof.  Primes 2, 3 and primes of bad reduction
    of the integral model are skipped.
    """
    if p_max > MAX_SCAN_PRIME:
        raise InputError(f"p_max {p_max} exceeds the naive-counting budget {MAX_SCAN_PRIME}")
    model = E.integral_model.curve
    out = ScanResult(E, p_max)
    disc = model.discriminant.numerator
    for p in primes_up_to(p_max).tolist():
        if p <= 3 or disc % p == 0:
            out.skipped.append(p)
            continue
        rec = frobenius_signature(model, p)
        out.records.append(rec)
        if stop_at_first and rec.violation:
            break
    return out


def two_division_field_analysis(E: CurveQ) -> str:
    """Galois group of x^3 + a x + b over Q: 'trivial', 'C2', 'C3' or 'S3'."""
    roots = rational_roots([E.b, E.a, 0, 1])
    if len(roots) == 3:
        return "trivial"
    if len(roots) == 1:
        return "C2"
    d = E.cubic_discriminant
    if d > 0 and _is_square(d.numerator) and _is_square(d.denominator):
        return "C3"
    return "S3"


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


# ---------------------------------------------------------------------------
# brute-force group law, used as an independent check on the fast tests


def affine_points(E: CurveFp) -> list[tuple[int, int]]:
    p = E.p
    return [(x, y) for x in range(p) for y in range(p) if (y * y - x**3 - E.a * x - E.b) % p == 0]


def add_points(E: CurveFp, P, Q):
    """Chord-and-tangent addition; None is the point at infinity."""
    p = E.p
    if P is None:
        return Q
    if Q is None:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2 and (y1 + y2) % p == 0:
        return None
    if P == Q:
        lam = (3 * x1 * x1 + E.a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def torsion_count(E: CurveFp, n: int) -> int:
    """Number of F_p-points P with nP = 0 (including infinity), by brute force."""
    total = 1
    for P in affine_points(E):
        Q = None
        for _ in range(n):
            Q = add_points(E, Q, P)
        total += Q is None
    return total
