"""
Delay frontier of the two-state academic example
=================================================

For each lower bound h1 we search the largest h2 for which the LMIs admit a
certificate that survives independent eigenvalue verification, with the
full coupling matrix X and with its block-diagonal restriction.

Both matrices are lower triangular, so the second state obeys its own
scalar recurrence.  A certificate for the pair restricts to one for that
scalar channel, so the scalar frontier caps the two-state one.
"""

import numpy as np

from delaycert.frontier import sweep_table, table_sweep
from delaycert.systems import EXAMPLE1_A, EXAMPLE1_AD

h1s = [2, 4, 6, 10, 15, 20, 25, 30]
target_full = [26, 27, 28, 31, 34, 35, 36, 39]

full = table_sweep(EXAMPLE1_A, EXAMPLE1_AD, h1s, "full", search_limit=60, jobs=4)
block = table_sweep(EXAMPLE1_A, EXAMPLE1_AD, h1s, "blockdiag", search_limit=60, jobs=4)
print(sweep_table(full + block))

scalar = table_sweep(np.array([[0.9]]), np.array([[-0.1]]), h1s, "full", search_limit=60, jobs=4)
print("\n  h1  full  blockdiag  scalar channel  target")
for f, b, s, p in zip(full, block, scalar, target_full):
    print(f"{f.h1:4d}  {f.h2_max:4d}  {b.h2_max:9d}  {s.h2_max:14d}  {p:9d}")

# the certificate behind the first entry, with its margins
cert = full[0].certificate
print("\nh1=%d, h2=%d: max eig Pi(h1) %.3e, Pi(h2) %.3e, min eig P %.3e"
      % (cert.system.h1, cert.system.h2, cert.margins.pi_h1_max, cert.margins.pi_h2_max,
         cert.margins.pos["P"]))
