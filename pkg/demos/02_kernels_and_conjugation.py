"""Reproducing kernels, conjugate kernels and the conjugation.

The model space of a finite Blaschke product is spanned by rational kernels;
evaluation is an inner product against them, even at boundary points.  The
antilinear conjugation swaps kernels with conjugate kernels and fixes every
modified Clark basis vector.
"""

import numpy as np

from attokit import (ModelVector, build_basis, conj_kernel, conjugation,
                     inner_product, kernel)
from attokit.instances import random_blaschke, random_unimodular, random_vector
from attokit.rankone import boundary_kernel_identity_check

rng = np.random.default_rng(2)
b = random_blaschke(rng, 3)
print("zeros:", np.round(np.array(b.zeros), 4))

f = random_vector(rng, build_basis(b, "tm"))
w = 0.3 - 0.45j
print("f(w) via evaluation:   ", f(w))
print("f(w) via kernel pairing:", inner_product(f, kernel(b, w)))

eta = random_unimodular(rng)
print()
print("boundary point:", np.round(eta, 6))
print("identity k = conj(B(w)) w ktilde on the circle, defect:",
      boundary_kernel_identity_check(b, eta))

print()
cf = conjugation(f)
print("conjugation is an involution, defect:", (conjugation(cf) - f).norm())
print("it swaps pairings: <Cf, Cg> = <g, f>")
g = random_vector(rng, build_basis(b, "tm"))
print("  defect:", abs(inner_product(cf, conjugation(g)) - inner_product(g, f)))
print("kernel goes to conjugate kernel, defect:",
      np.max(np.abs(conjugation(kernel(b, w)).tm() - conj_kernel(b, w).tm())))

print()
mb = build_basis(b, "modified-clark", 1.0)
worst = max((conjugation(ModelVector(mb, np.eye(3)[j])) - ModelVector(mb, np.eye(3)[j])).norm()
            for j in range(3))
print("modified Clark vectors are fixed points, worst defect:", worst)
