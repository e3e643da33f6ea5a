"""Finite Blaschke products and their Clark points.

A degree-m Blaschke product maps the unit circle m-to-1 onto itself, so for
any unimodular target the boundary equation has exactly m distinct solutions.
Those points, weighted by |B'|, carry the whole spectral story of the
rank-one unitary perturbations of the compressed shift.
"""

import numpy as np

from attokit import (BlaschkeProduct, build_basis, clark_points,
                     clark_unitary, evaluate, monomial)
from attokit.instances import random_blaschke, random_unimodular

rng = np.random.default_rng(1)

print("== the monomial z^2 ==")
b = monomial(2)
cp = clark_points(b, 1.0)
print("solutions of z^2 = 1:", np.round(cp.points, 12))
print("weights |B'|:", cp.weights)

print()
print("== a random degree-4 product ==")
b = random_blaschke(rng, 4)
lam = random_unimodular(rng)
cp = clark_points(b, lam)
print("zeros:", np.round(np.array(b.zeros), 4))
print("spectral parameter:", np.round(lam, 4), " boundary target:", np.round(cp.target, 4))
print("points:", np.round(cp.points, 6))
print("max |B(eta) - target|:", np.max(np.abs(evaluate(b, cp.points) - cp.target)))

basis = build_basis(b, "clark", lam)
print("Clark basis Gram defect:", np.max(np.abs(basis.gram - np.eye(4))))

u = clark_unitary(b, lam).entries
print("unitarity defect:", np.max(np.abs(u.conj().T @ u - np.eye(4))))
eigs = np.sort_complex(np.linalg.eigvals(u))
print("eigenvalues match Clark points:",
      np.max(np.abs(eigs - np.sort_complex(cp.points))))
