"""Every level-36 image with the right commutator lies over the level-6 group.

Enumerates all fibered products GL2(Z/4) x_Q GL2(Z/9) with surjective
projections, keeps the ones with surjective determinant and a proper
commutator subgroup, and tests each for containment in a conjugate of the
preimage of the level-6 group.  Takes about 15 seconds.
"""

import time
from collections import Counter

from xprime6.catalog import class_representative, goursat_scan_36

t0 = time.perf_counter()
scan = goursat_scan_36()
print(f"{len(scan.records)} fibered products in {time.perf_counter() - t0:.1f}s")

by_q = Counter((r.q_order, r.q_cyclic) for r in scan.records)
for (q, cyc), k in sorted(by_q.items()):
    print(f"  |Q| = {q:>2}{' (cyclic)' if cyc else '':<9}: {k}")

surv = scan.survivors
print(f"\n{len(surv)} have surjective determinant and a proper commutator")
target = class_representative("X'(6)")
print(f"{sum(1 for r in surv if r.contained)} of them lie in a conjugate of the level-6 preimage (order {target.order})")
print()
print(scan.report())
