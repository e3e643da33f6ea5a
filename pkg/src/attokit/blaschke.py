"""Finite Blaschke products and the Clark boundary equation.

A finite Blaschke product of degree m is

    B(z) = c0 * prod_j (a_j - z) / (1 - conj(a_j) z),      |a_j| < 1, |c0| = 1.

All poles sit at 1/conj(a_j), strictly outside the closed unit disk, so the
closed disk is always a safe evaluation domain.  For a unimodular target u
the equation B(eta) = u has exactly m distinct unimodular solutions; these
are the Clark points that drive everything else in this package.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly

from . import serialize
from .config import DEFAULT, Tolerances


class PoleProximityError(ValueError):
    """Evaluation point too close to a pole at 1/conj(a_j)."""


class RootCollisionError(RuntimeError):
    """Two polished boundary roots collided: numerical breakdown, since the
    boundary equation of a finite Blaschke product has distinct roots."""


@dataclass(frozen=True)
class BlaschkeProduct:
    """Immutable finite Blaschke product: zeros in the open disk plus a
    unimodular front constant (default 1)."""

    zeros: tuple
    front: complex = 1.0 + 0.0j

    def __post_init__(self):
        zeros = tuple(complex(a) for a in self.zeros)
        if len(zeros) < 1:
            raise ValueError("a finite Blaschke product needs at least one zero")
        for a in zeros:
            if abs(a) >= 1.0:
                raise ValueError(f"zero {a} is not inside the open unit disk")
        front = complex(self.front)
        if abs(abs(front) - 1.0) > 1e-9:
            raise ValueError(f"front constant {front} is not unimodular")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "front", front / abs(front))

    @property
    def degree(self) -> int:
        return len(self.zeros)

    def __call__(self, z):
        return evaluate(self, z)

    def to_json(self) -> dict:
        return {"front": serialize.cpx(self.front),
                "zeros": serialize.cpx_seq(self.zeros)}

    @classmethod
    def from_json(cls, obj: dict) -> "BlaschkeProduct":
        return cls(tuple(serialize.uncpx_seq(obj["zeros"])),
                   serialize.uncpx(obj["front"]))


def monomial(n: int) -> BlaschkeProduct:
    """The product z^n (n-fold zero at the origin)."""
    if n < 1:
        raise ValueError("degree must be positive")
    return BlaschkeProduct((0.0,) * n, (-1.0) ** n)


@dataclass(eq=False, frozen=True)
class ClarkPointSet:
    """Solutions of B(eta) = target on the circle, with weights |B'(eta_j)|.

    ``target`` is the Moebius image (lam + B(0)) / (1 + conj(B(0)) lam) of the
    spectral parameter ``lam``; the points are sorted by principal argument.
    """

    lam: complex
    target: complex
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if abs(abs(self.lam) - 1.0) > 1e-9 or abs(abs(self.target) - 1.0) > 1e-9:
            raise ValueError("lam and target must be unimodular")
        if np.any(self.weights <= 0.0):
            raise ValueError("Clark weights must be strictly positive")

    @property
    def size(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {"lambda": serialize.cpx(self.lam),
                "target": serialize.cpx(self.target),
                "points": serialize.cpx_seq(self.points),
                "weights": list(map(float, self.weights))}


def _pole_guard(b: BlaschkeProduct, z: np.ndarray, eps: float = 1e-9):
    for a in b.zeros:
        if a == 0:
            continue
        if np.any(np.abs(z - 1.0 / np.conj(a)) < eps):
            raise PoleProximityError(f"evaluation point within {eps} of pole {1/np.conj(a)}")


def evaluate(b: BlaschkeProduct, z):
    """Evaluate B(z).  Vectorized; z may be a scalar or an array."""
    zarr = np.asarray(z, dtype=complex)
    _pole_guard(b, zarr)
    out = np.full(zarr.shape, b.front, dtype=complex)
    for a in b.zeros:
        out = out * (a - zarr) / (1.0 - np.conj(a) * zarr)
    return out if out.shape else complex(out)


def derivative(b: BlaschkeProduct, z):
    """Evaluate B'(z) by the product rule over Moebius factors.

    Each factor has derivative (|a|^2 - 1)/(1 - conj(a) z)^2, which is regular
    on the closed disk, so no removable-singularity branch is needed even when
    z coincides with a zero of B.
    """
    zarr = np.asarray(z, dtype=complex)
    _pole_guard(b, zarr)
    m = b.degree
    fac = np.empty((m,) + zarr.shape, dtype=complex)
    dfac = np.empty_like(fac)
    for j, a in enumerate(b.zeros):
        den = 1.0 - np.conj(a) * zarr
        fac[j] = (a - zarr) / den
        dfac[j] = (abs(a) ** 2 - 1.0) / den ** 2
    # prefix/suffix products give prod_{i != j} fac[i] without dividing
    pre = np.ones_like(fac)
    suf = np.ones_like(fac)
    for j in range(1, m):
        pre[j] = pre[j - 1] * fac[j - 1]
        suf[m - 1 - j] = suf[m - j] * fac[m - j]
    out = b.front * np.sum(dfac * pre * suf, axis=0)
    return out if out.shape else complex(out)


@functools.lru_cache(maxsize=None)
def numerator_denominator(b: BlaschkeProduct):
    """Power-basis coefficients (low to high) of P(z) = prod (a_j - z) and
    q(z) = prod (1 - conj(a_j) z), so that B = front * P / q."""
    p = np.array([1.0 + 0.0j])
    q = np.array([1.0 + 0.0j])
    for a in b.zeros:
        p = npoly.polymul(p, [a, -1.0])
        q = npoly.polymul(q, [1.0, -np.conj(a)])
    return p, q


def boundary_solve(b: BlaschkeProduct, u: complex, tol: Tolerances = DEFAULT) -> np.ndarray:
    """All m distinct unimodular solutions of B(eta) = u, |u| = 1.

    Roots of front*P - u*q come from the companion matrix, are polished by
    Newton iteration on B(eta) - u, then radially projected onto the circle.
    Raises RootCollisionError if two polished roots land within ``tol.distinct``.
    """
    u = complex(u)
    if abs(abs(u) - 1.0) > 1e-9:
        raise ValueError("target must be unimodular")
    p, q = numerator_denominator(b)
    m = b.degree
    r = npoly.polysub(b.front * p, u * q)
    # degree is m exactly: |front| = 1 dominates |u * prod conj(a_j)| < 1
    assert len(r) == m + 1 and abs(r[-1]) > 0
    roots = npoly.polyroots(r)

    for _ in range(3):
        fz = evaluate(b, roots) - u
        dz = derivative(b, roots)
        roots = roots - fz / dz
    roots = roots / np.abs(roots)
    # one more corrective pass after the projection
    fz = evaluate(b, roots) - u
    dz = derivative(b, roots)
    roots = roots - fz / dz
    roots = roots / np.abs(roots)

    resid = np.abs(evaluate(b, roots) - u)
    if np.max(resid) > tol.residual:
        raise RuntimeError(
            f"boundary roots failed to polish below {tol.residual}: max residual {np.max(resid):.3e}")
    diff = np.abs(roots[:, None] - roots[None, :]) + np.eye(m)
    if np.min(diff) < tol.distinct:
        raise RootCollisionError(
            f"two boundary roots collided within {tol.distinct}: numerical breakdown")
    order = np.argsort(np.angle(roots) % (2.0 * np.pi))
    return roots[order]


def mobius_target(b: BlaschkeProduct, lam: complex) -> complex:
    """(lam + B(0)) / (1 + conj(B(0)) lam), the boundary value shared by all
    eigenvectors of the rank-one unitary perturbation with parameter lam."""
    lam = complex(lam)
    b0 = evaluate(b, 0.0)
    return (lam + b0) / (1.0 + np.conj(b0) * lam)


def clark_points(b: BlaschkeProduct, lam: complex, tol: Tolerances = DEFAULT) -> ClarkPointSet:
    """Clark point set for spectral parameter lam: the m unimodular solutions
    of B(eta) = target together with the weights |B'(eta_j)|."""
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-9:
        raise ValueError("lam must be unimodular")
    target = mobius_target(b, lam)
    pts = boundary_solve(b, target, tol)
    wts = np.abs(derivative(b, pts))
    return ClarkPointSet(lam, target, pts, wts)
