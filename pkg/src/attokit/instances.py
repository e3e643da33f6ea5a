"""Seeded random instances for property runs and the self-test.

Besides plain random products and symbols, this module can run the Clark
construction backwards: given distinct unimodular points eta_1..eta_m and a
unimodular target u, the Herglotz sum

    G(z) = sum_j c_j (eta_j + z)/(eta_j - z),    c_j > 0,

yields a degree-m Blaschke product B = u (G - 1)/(G + 1) with B(eta_j) = u
for every j.  That makes it easy to engineer two products whose Clark point
sets share exactly l prescribed points.
"""

from __future__ import annotations

import numpy as np
import numpy.polynomial.polynomial as npoly

from .blaschke import BlaschkeProduct, clark_points, evaluate
from .config import DEFAULT, Tolerances
from .membership import ClarkPairing, clark_pairing
from .modelspace import ModelBasis, ModelVector, build_basis, tm_vector
from .operators import OperatorMatrix, SymbolSpec, atto_matrix


def random_unimodular(rng) -> complex:
    return complex(np.exp(2j * np.pi * rng.random()))


def random_points_in_disk(rng, count: int, radius: float = 0.8,
                          min_sep: float = 0.05) -> np.ndarray:
    """Rejection-sample ``count`` pairwise-separated points, |z| <= radius."""
    pts: list[complex] = []
    for _ in range(10000):
        z = radius * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        if all(abs(z - p) >= min_sep for p in pts):
            pts.append(complex(z))
        if len(pts) == count:
            return np.array(pts)
    raise RuntimeError("could not place separated points; lower min_sep")


def random_blaschke(rng, degree: int, radius: float = 0.8, min_sep: float = 0.05,
                    random_front: bool = True) -> BlaschkeProduct:
    zeros = random_points_in_disk(rng, degree, radius, min_sep)
    front = random_unimodular(rng) if random_front else 1.0
    return BlaschkeProduct(tuple(zeros), front)


def random_vector(rng, basis: ModelBasis) -> ModelVector:
    m = basis.dim
    coeffs = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return ModelVector(basis, coeffs)


def random_symbol(rng, alpha: BlaschkeProduct, beta: BlaschkeProduct) -> SymbolSpec:
    """Random structured symbol conj(chi) + psi."""
    chi = random_vector(rng, build_basis(alpha, "tm"))
    psi = random_vector(rng, build_basis(beta, "tm"))
    return SymbolSpec(co_analytic=chi, analytic=psi)


def lambda_for_target(b: BlaschkeProduct, u: complex) -> complex:
    """The spectral parameter lam whose Moebius image is u."""
    b0 = evaluate(b, 0.0)
    return complex((complex(u) - b0) / (1.0 - np.conj(b0) * complex(u)))


def separated_boundary_points(rng, count: int, min_angle: float = 0.3) -> np.ndarray:
    for _ in range(10000):
        angles = np.sort(rng.random(count) * 2.0 * np.pi)
        gaps = np.diff(np.concatenate([angles, [angles[0] + 2.0 * np.pi]]))
        if np.min(gaps) >= min_angle:
            return np.exp(1j * angles)
    raise RuntimeError("could not separate boundary points; lower min_angle")


def blaschke_through_points(points, u: complex, weights=None,
                            tol: Tolerances = DEFAULT) -> BlaschkeProduct:
    """Degree-len(points) product B with B(eta_j) = u at every given point."""
    points = np.asarray(points, dtype=complex)
    u = complex(u)
    mdeg = len(points)
    if weights is None:
        weights = np.ones(mdeg)
    num = np.zeros(mdeg + 1, dtype=complex)     # A(z) = sum c_j (eta_j + z) prod_{i!=j} (eta_i - z)
    den = np.array([1.0 + 0.0j])                # B(z) = prod (eta_j - z)
    for j in range(mdeg):
        term = np.array([weights[j] * points[j], weights[j]], dtype=complex)
        for i in range(mdeg):
            if i != j:
                term = npoly.polymul(term, [points[i], -1.0])
        num[: len(term)] += term
    for j in range(mdeg):
        den = npoly.polymul(den, [points[j], -1.0])
    diff = npoly.polysub(num, den)              # zeros of B
    zeros = npoly.polyroots(diff)
    if np.max(np.abs(zeros)) >= 1.0:
        raise RuntimeError("interpolation produced a zero outside the open disk")
    shell = BlaschkeProduct(tuple(zeros))
    probe = 0.1234 + 0.0567j
    gsum = np.sum(np.asarray(weights) * (points + probe) / (points - probe))
    target_val = u * (gsum - 1.0) / (gsum + 1.0)
    front = target_val / evaluate(shell, probe)
    out = BlaschkeProduct(tuple(zeros), front)
    resid = np.max(np.abs(evaluate(out, points) - u))
    if resid > 1e-8:
        raise RuntimeError(f"interpolation residual {resid:.3e} too large")
    return out


def shared_clark_instance(rng, m: int, n: int, shared: int,
                          tol: Tolerances = DEFAULT):
    """Products and parameters whose Clark sets share exactly ``shared`` points.

    Returns (alpha, beta, lam1, lam2).  For shared = 0 the points are sampled
    independently but still kept separated so that greedy matching is clean.
    """
    total = m + n - shared
    pts = separated_boundary_points(rng, total, min_angle=min(0.25, 5.0 / total))
    pts_a = np.concatenate([pts[:shared], pts[shared: m]])
    pts_b = np.concatenate([pts[:shared], pts[m: total]])
    u_a = random_unimodular(rng)
    u_b = random_unimodular(rng)
    alpha = blaschke_through_points(pts_a, u_a, weights=0.5 + rng.random(m), tol=tol)
    beta = blaschke_through_points(pts_b, u_b, weights=0.5 + rng.random(n), tol=tol)
    return alpha, beta, lambda_for_target(alpha, u_a), lambda_for_target(beta, u_b)


def generic_clark_instance(rng, m: int, n: int, min_cross: float = 0.05,
                           tol: Tolerances = DEFAULT):
    """Random products with random spectral parameters, resampled until the
    two Clark point sets are disjoint AND uniformly separated.

    Near-collisions of Clark points across the two spaces make one matrix
    entry nearly free, so a perturbation there is almost a member and every
    operator-level test legitimately lands in its indeterminate band; keeping
    the sets ``min_cross`` apart keeps test instances well conditioned.
    """
    for _ in range(200):
        alpha = random_blaschke(rng, m)
        beta = random_blaschke(rng, n)
        lam1 = random_unimodular(rng)
        lam2 = random_unimodular(rng)
        pa = clark_points(alpha, lam1, tol).points
        pb = clark_points(beta, lam2, tol).points
        if np.min(np.abs(pa[:, None] - pb[None, :])) >= min_cross:
            return alpha, beta, lam1, lam2
    raise RuntimeError("could not sample a separated generic instance")


def constrained_entries(m: int, n: int, shared: int) -> list[tuple[int, int]]:
    """0-indexed entries (s, p) genuinely constrained by the recurrences,
    i.e. safe targets for perturbing a member into a non-member."""
    out = []
    if shared == 0:
        out = [(s, p) for s in range(1, n) for p in range(1, m)]
    else:
        for s in range(1, shared):
            out.extend((s, p) for p in range(m) if p != s)
        for s in range(shared, n):
            out.extend((s, p) for p in range(1, m))
    return out


def member_matrix(rng, alpha: BlaschkeProduct, beta: BlaschkeProduct,
                  lam1: complex, lam2: complex,
                  tol: Tolerances = DEFAULT) -> OperatorMatrix:
    """A random member of the class, presented in the two Clark bases."""
    sym = random_symbol(rng, alpha, beta)
    return atto_matrix(alpha, beta, sym,
                       build_basis(alpha, "clark", lam1, tol=tol),
                       build_basis(beta, "clark", lam2, tol=tol), tol=tol)


def perturbed_nonmember(rng, member: OperatorMatrix, pairing: ClarkPairing,
                        delta: float = 1e-3) -> OperatorMatrix:
    """Bump one constrained entry of a member by ``delta`` (times a random
    phase and the matrix scale), producing a clean non-member."""
    n, m = member.entries.shape
    choices = constrained_entries(m, n, pairing.shared)
    if not choices:
        raise ValueError("no constrained entries at this size: every matrix is a member")
    s_pos, p_pos = choices[rng.integers(len(choices))]
    s, p = int(pairing.perm_b[s_pos]), int(pairing.perm_a[p_pos])
    bumped = member.entries.copy()
    bumped[s, p] += delta * (1.0 + member.max_abs) * random_unimodular(rng)
    return OperatorMatrix(bumped, member.in_basis, member.out_basis)
