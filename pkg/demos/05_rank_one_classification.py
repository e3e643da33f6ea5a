"""Rank-one members and the counterexample.

When both degrees exceed one, every rank-one member is a scalar multiple of
(conjugate kernel) (x) (kernel) or (kernel) (x) (conjugate kernel) at a single
point of the closed disk, and the decomposition recovers that point.  When one
space is a line and the other has dimension three or more, genuinely
non-standard rank-one members appear; the classic one is 1 (x) (1 + k_a) over
the pair (-z (a-z)(a+z) / ((1-conj(a)z)(1+conj(a)z)), z).
"""

import numpy as np

from attokit import (classify_vector, clark_pairing, decompose_rank_one,
                     example_4_1, example_4_1_candidates, run_all,
                     standard_rank_one)
from attokit.instances import random_blaschke, shared_clark_instance

rng = np.random.default_rng(5)

print("== round trip of a standard rank-one at degrees (3, 2) ==")
alpha, beta, *_ = shared_clark_instance(rng, 3, 2, 0)
w = 0.4 - 0.2j
mat = (2.0 + 1.0j) * standard_rank_one(alpha, beta, w, "kernel-conjk")
dec = decompose_rank_one(mat)
print(f"recovered variant={dec.variant}, w error={abs(dec.w - w):.2e}, scale={dec.scale}")

print()
print("== classification dichotomy ==")
b2 = random_blaschke(rng, 2)
from attokit.instances import random_vector
from attokit import build_basis, ModelVector
f = random_vector(rng, build_basis(b2, "tm"))
print("dimension 2, random vector:", classify_vector(f, 1.0).tag)
b3 = random_blaschke(rng, 3)
witness = ModelVector(build_basis(b3, "clark", 1.0), np.array([1.0, 1.0, 0.0]))
print("dimension 3, two live Clark coefficients:", classify_vector(witness, 1.0).tag)

print()
print("== the non-standard example at a = 1/2 ==")
ea, eb, mat = example_4_1(0.5)
pairing = clark_pairing(ea, eb, 1.0, 1.0)
print("member under all tests:", run_all(mat, pairing)["member"])
print("decomposition:", decompose_rank_one(mat).tag)
cands = example_4_1_candidates(0.5)
print("inconsistent kernel-branch candidates:", cands["kernel"], "(2/7 vs 2/9)")
print("conjugate-branch candidates:", cands["conj-kernel"], "(both outside the disk)")
