"""The level-6 group that forces Q(E[2]) inside Q(E[3]).

GL2(Z/3) has a unique normal subgroup N of index 6, and the quotient is
GL2(Z/2).  The graph of that quotient map is a subgroup of
GL2(Z/6) = GL2(Z/2) x GL2(Z/3).  A curve whose mod-6 image sits inside it
has its 2-torsion field determined by its 3-torsion field.
"""

from xprime6.catalog import h6_prime, theta, unique_index6_normal
from xprime6.groups import commutator_subgroup, direct_product, gl2, goursat_decompose, normal_subgroups

G2, G3 = gl2(2), gl2(3)

print("normal subgroups of GL2(Z/3), by order:", [N.order for N in normal_subgroups(G3)])
N = unique_index6_normal().group
print("the index-6 one:")
for m in N.matrices():
    print("   ", m)

th = theta()
print(f"\nquotient map GL2(Z/3) -> GL2(Z/2): image order {th.hom.image().order}, kernel order {th.kernel.order}")

H = h6_prime()
datum = goursat_decompose(H, G2, G3)
print(f"its graph H has order {H.order} (index {gl2(6).order // H.order} in GL2(Z/6))")
print(f"Goursat quotient of H: order {datum.q.order}; kernels {datum.psi0.kernel().order} and {datum.psi1.kernel().order}")

# The commutator is where H differs from a generic fibered product.
ch = commutator_subgroup(H).order
cp = direct_product(commutator_subgroup(G2), commutator_subgroup(G3)).order
print(f"|[H,H]| = {ch}, while the product of the factor commutators has order {cp}")
