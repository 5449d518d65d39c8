"""How the level-6 entanglement changes the cyclicity density.

The density of primes p with E(F_p) cyclic is a product of local factors,
except at primes where the division fields are entangled.  For the
family below the factors at 2 and 3 merge into one: since Q(E[2]) lies in
Q(E[3]), full 3-torsion mod p forces full 2-torsion mod p.

The part of the density coming from 2 and 3 is the share of primes where
E mod p has neither full 2-torsion nor full 3-torsion.  We compare the
exact value with prime counts.
"""

from fractions import Fraction

from xprime6.curves import CurveQ, entanglement_scan, specialize_integral
from xprime6.density import ImageSpec, correction_factor, entangled_part, h6_spec, hooley_delta

P_MAX = 50000

for name, spec in (("GL2(Z/6)", ImageSpec.full(6)), ("level-6 graph", h6_spec())):
    d = hooley_delta(spec, 100)
    print(f"{name:>14}: part at 2,3 = {entangled_part(spec)}  C_E = {correction_factor(spec, 100).value}")
    print(f"{'':>14}  delta {d.render()}")


def observed(E):
    res = entanglement_scan(E, P_MAX)
    bad = sum(1 for r in res.records if r.two_split_type == (1, 1, 1) or r.three_full)
    return Fraction(len(res.records) - bad, len(res.records)), len(res.records)


print(f"\nprimes up to {P_MAX} with neither full 2- nor full 3-torsion:")
for label, E, spec in (
    ("y^2 = x^3 + x + 1", CurveQ(1, 1), ImageSpec.full(6)),
    ("family at t = 1", specialize_integral(1).curve, h6_spec()),
):
    frac, n = observed(E)
    print(f"  {label:<18} observed {float(frac):.4f} over {n} primes, expected {float(entangled_part(spec)):.4f}")
