"""Two-site Pauli transition kernels of the five gate ensembles.

A Haar-random two-qubit gate maps a Pauli operator to a random mixture of
Pauli operators.  Averaged over the ensemble, the squared weights form a
16 x 16 stochastic matrix.  This script prints a few rows and then checks
them against a Monte Carlo estimate built from sampled gates.
"""
import numpy as np

from symcirc.haar import compare, estimate_kernel
from symcirc.kernels import SymmetryClass, kernel, rates
from symcirc.pauli import TWO_SITE_LABELS, parse_two_site, sympl_parity, transpose_parity

# closed-form rates at d = 4
for cls in SymmetryClass:
    print(cls.value, rates(cls, 4))

# the CSE row of XI: stays put with 1/3, otherwise moves to an anticommuting string
row = kernel("cse").exact[parse_two_site("XI")]
print("\nCSE, XI ->", {TWO_SITE_LABELS[a]: str(v) for a, v in enumerate(row) if v})

# orthogonal gates conserve transpose parity, symplectic gates the J-twisted one
yi = parse_two_site("YI")
print("O(4), YI ->", {TWO_SITE_LABELS[a]: str(v) for a, v in enumerate(kernel("orthogonal").exact[yi]) if v})
print("odd under transposition:", [TWO_SITE_LABELS[a] for a in range(1, 16) if transpose_parity(a).name == "ODD"])
print("even under the symplectic map:", [TWO_SITE_LABELS[a] for a in range(1, 16) if sympl_parity(a).name == "EVEN"])

# independent check: sample gates and average the squared traces
rng = np.random.default_rng(0)
for cls in SymmetryClass:
    est = estimate_kernel(cls, 20_000, rng)
    c = compare(est)
    print(f"{cls.value:<11} oracle: max |dev| {c.max_abs_dev:.1e}, max z {c.max_z:.2f}")
