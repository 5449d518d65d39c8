"""The cyclicity density and its entanglement correction factor.

Under GRH the density of primes p for which E(F_p) is cyclic is

    delta(E) = sum_n mu(n) / [Q(E[n]) : Q],

and when the adelic image of E is the full preimage of a group H at level M
the sum factors as an exact finite part over n | rad(M) times an Euler
product over the primes not dividing M.  Truncating that product at L leaves
a tail that is bounded above by 1 and below by 1 - T(L), where

    T(L) = 1/L^4 + 1/(3 L^3) >= sum_{l > L} 1/((l^2 - 1)(l^2 - l)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import InputError
from .groups import FinGroup, GoursatDatum, GroupHom, det_surjective, from_product, gl2, goursat_fiber, quotient, reduce_group, sl2
from .modring import factorize, gl2_order
from .catalog import h6_prime, sign_character

GRH_NOTE = "GRH"


@dataclass(frozen=True)
class ImageSpec:
    """A level M and a group H <= GL_2(Z/M) standing for its full adelic preimage."""

    level: int
    group: FinGroup

    def __post_init__(self):
        if self.level < 1:
            raise InputError(f"level must be positive, got {self.level}")
        if self.group.modulus != self.level:
            raise InputError(f"group has modulus {self.group.modulus}, spec level is {self.level}")
        if not det_surjective(self.group):
            raise InputError("the image must have surjective determinant")

    @classmethod
    def full(cls, level: int = 1) -> ImageSpec:
        return cls(level, gl2(level))

    @cached_property
    def primes(self) -> tuple[int, ...]:
        return tuple(sorted(factorize(self.level))) if self.level > 1 else ()

    @cached_property
    def radical(self) -> int:
        return math.prod(self.primes)


def _squarefree_primes(n: int) -> list[int]:
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    f = factorize(n) if n > 1 else {}
    if any(e > 1 for e in f.values()):
        raise InputError(f"{n} is not squarefree")
    return sorted(f)


def division_degree(spec: ImageSpec, n: int) -> int:
    """[Q(E[n]) : Q] for squarefree n under the full-preimage convention."""
    primes = _squarefree_primes(n)
    g = math.gcd(n, spec.level)
    deg = reduce_group(spec.group, g).order if g > 1 else 1
    for ell in primes:
        if spec.level % ell:
            deg *= gl2_order(ell)
    return deg


def mobius_divisors(m: int) -> list[tuple[int, int]]:
    """(d, mu(d)) for the squarefree divisors d of m."""
    ps = sorted(factorize(m)) if m > 1 else []
    out = []
    for mask in range(1 << len(ps)):
        chosen = [p for i, p in enumerate(ps) if mask >> i & 1]
        out.append((math.prod(chosen), -1 if len(chosen) % 2 else 1))
    return sorted(out)


def entangled_part(spec: ImageSpec) -> Fraction:
    return sum((Fraction(mu, division_degree(spec, d)) for d, mu in mobius_divisors(spec.radical)), Fraction(0))


def euler_factor(ell: int) -> Fraction:
    return 1 - Fraction(1, gl2_order(ell))


def tail_bound(L: int) -> Fraction:
    """Upper bound for sum over primes l > L of 1/|GL_2(F_l)|, valid for L >= 2.

    Each term 1/(n(n-1)^2(n+1)) is at most 1/(n-1)^4, and the sum of 1/m^4
    over m >= L is at most 1/L^4 plus the integral from L.
    """
    return Fraction(1, L**4) + Fraction(1, 3 * L**3)


def _primes_up_to(n: int) -> list[int]:
    from .curves import primes_up_to

    return primes_up_to(n).tolist()


@dataclass(frozen=True)
class DensityResult:
    value: Fraction  # exact, with the Euler product truncated at L
    lower: Fraction
    upper: Fraction
    cutoff: int
    note: str = GRH_NOTE

    def render(self, digits: int = 10) -> str:
        lo = _decimal(self.lower, digits, down=True)
        hi = _decimal(self.upper, digits, down=False)
        # the exact truncated product has hundreds of digits; show the midpoint
        mid = _decimal((self.lower + self.upper) / 2, digits, down=True)
        return f"value~{mid} in [{lo}, {hi}] (L={self.cutoff}, {self.note})"

    def contains(self, x) -> bool:
        x = Fraction(x)
        return self.lower <= x <= self.upper

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower


def _decimal(x: Fraction, digits: int, *, down: bool) -> str:
    scale = 10**digits
    q = math.floor(x * scale) if down else math.ceil(x * scale)
    sign = "-" if q < 0 else ""
    q = abs(q)
    return f"{sign}{q // scale}.{q % scale:0{digits}d}"


def _check_cutoff(spec: ImageSpec, L: int) -> None:
    if L < 2:
        raise InputError(f"cutoff must be at least 2, got {L}")
    if spec.primes and L < max(spec.primes):
        raise InputError(f"cutoff {L} is below the largest prime {max(spec.primes)} dividing the level")


def hooley_delta(spec: ImageSpec, L: int) -> DensityResult:
    """The cyclicity density with a rigorous interval for the Euler tail."""
    _check_cutoff(spec, L)
    value = entangled_part(spec)
    for ell in _primes_up_to(L):
        if spec.level % ell:
            value *= euler_factor(ell)
    lower = value * (1 - tail_bound(L)) if value >= 0 else value
    return DensityResult(value, min(lower, value), max(lower, value), L)


def correction_factor(spec: ImageSpec, L: int) -> DensityResult:
    """C_E = entangled part / prod_{l | M} (1 - 1/|pi_l(H)|); exact."""
    _check_cutoff(spec, L)
    naive = math.prod((1 - Fraction(1, division_degree(spec, ell)) for ell in spec.primes), start=Fraction(1))
    if naive == 0:
        raise InputError("some mod-l image is trivial; the correction factor is undefined")
    c = entangled_part(spec) / naive
    return DensityResult(c, c, c, L)


# ---------------------------------------------------------------------------
# sample specs


def h6_spec() -> ImageSpec:
    return ImageSpec(6, h6_prime())


def sign_det_group() -> FinGroup:
    """Index-2 subgroup of GL_2(Z/6): sign(g mod 2) = det(g mod 3) as +-1.

    This is the fibered product over Z/2 that every curve with
    Q(sqrt(disc)) = Q(sqrt(-3)) has at level 6.
    """
    G2, G3 = gl2(2), gl2(3)
    Q, p3 = quotient(G3, sl2(3))
    odd = [x for x in Q.elements.tolist() if x != Q.identity][0]
    images0 = np.where(sign_character(G2.elements) == 1, Q.identity, odd)
    return from_product(goursat_fiber(GoursatDatum(Q, GroupHom(G2, Q, images0), p3)))


def sign_det_spec() -> ImageSpec:
    return ImageSpec(6, sign_det_group())
