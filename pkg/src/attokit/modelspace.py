"""Elements and bases of the model space attached to a finite Blaschke product.

The model space of a degree-m product B with zeros a_1..a_m and denominator
q(z) = prod (1 - conj(a_j) z) is exactly the m-dimensional rational family

    K_B = { p(z) / q(z) : deg p <= m - 1 },

which this module coordinatizes through the Takenaka-Malmquist (TM) basis

    phi_k(z) = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z) * prod_{j<k} (z - a_j)/(1 - conj(a_j) z).

The TM basis is orthonormal for any zero configuration (multiplicities
included) and reduces to the monomial basis when all zeros sit at the origin;
it is the internal canonical coordinate system.  Kernel, Clark and modified
Clark bases are carried as coordinate matrices over it.

Four facts do most of the work here:

* kernel coordinates are conjugated TM values:  <k_w, phi_k> = conj(phi_k(w));
* the conjugation acts on numerators by coefficient reversal:
      C(p/q) = front * (-1)^m * rev(p) / q,   rev(p)_i = conj(p_{m-1-i}),
  which is the boundary formula B(z) conj(z) conj(f(z)) made exact;
* the conjugate kernel is an exact polynomial division,
      (B(z) - B(w)) / (z - w) = [front*P(z) - B(w) q(z)] / ((z - w) q(z));
* multiplication by z stays inside K_B exactly when the numerator has degree
  at most m - 2, equivalently when f is orthogonal to the conjugate kernel
  at the origin.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import serialize
from .blaschke import (BlaschkeProduct, ClarkPointSet, clark_points, evaluate,
                       numerator_denominator)
from .config import DEFAULT, Tolerances

BASIS_KINDS = ("tm", "kernel-zeros", "clark", "modified-clark")


class QuadratureError(RuntimeError):
    """Adaptive circle quadrature failed to converge (pole too close)."""


# ---------------------------------------------------------------------------
# circle quadrature
# ---------------------------------------------------------------------------

def circle_nodes(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def adaptive_circle_mean(fn, tol: float = DEFAULT.quadrature,
                         n_start: int = 256, n_max: int = 1 << 15):
    """Trapezoid rule on the unit circle with node doubling.

    ``fn(nodes)`` must return an array whose last axis runs over the nodes;
    the mean over that axis approximates (1/2pi) * integral over the circle.
    Node count doubles until two successive levels agree to ``tol``
    (geometric convergence holds for rational integrands with poles off the
    circle, so this terminates quickly at desk scale).
    """
    prev = None
    n = n_start
    while n <= n_max:
        val = np.mean(fn(circle_nodes(n)), axis=-1)
        if prev is not None:
            scale = 1.0 + float(np.max(np.abs(val)))
            if float(np.max(np.abs(val - prev))) <= tol * scale:
                return val
        prev = val
        n *= 2
    raise QuadratureError(f"circle quadrature did not converge below {tol} at {n_max} nodes")


# ---------------------------------------------------------------------------
# per-space cached data
# ---------------------------------------------------------------------------

class _SpaceData:
    """TM numerator polynomials and the conjugation matrix of one space."""

    def __init__(self, b: BlaschkeProduct):
        self.product = b
        m = b.degree
        p_all, q = numerator_denominator(b)
        self.q_coeffs = q
        self.p_coeffs = p_all
        # numerator of phi_k: sqrt(1-|a_k|^2) * prod_{j<k}(z-a_j) * prod_{j>k}(1-conj(a_j)z)
        numer = np.zeros((m, m), dtype=complex)
        for k in range(m):
            poly = np.array([np.sqrt(1.0 - abs(b.zeros[k]) ** 2)], dtype=complex)
            for j in range(k):
                poly = np.polynomial.polynomial.polymul(poly, [-b.zeros[j], 1.0])
            for j in range(k + 1, m):
                poly = np.polynomial.polynomial.polymul(poly, [1.0, -np.conj(b.zeros[j])])
            numer[: len(poly), k] = poly
        self.numerators = numer          # column k = power coefficients of phi_k numerator
        # coefficient reversal realizes the boundary conjugation on numerators
        rev = np.conj(numer[::-1, :])
        sign = b.front * (-1.0) ** m
        self.conj_tm = np.linalg.solve(numer, sign * rev)

    def poly_to_tm(self, coeffs: np.ndarray) -> np.ndarray:
        """TM coordinates of a numerator polynomial (power basis, length <= m)."""
        m = self.product.degree
        padded = np.zeros(m, dtype=complex)
        padded[: len(coeffs)] = coeffs
        return np.linalg.solve(self.numerators, padded)

    def tm_to_poly(self, coords: np.ndarray) -> np.ndarray:
        return self.numerators @ coords


@functools.lru_cache(maxsize=None)
def space_data(b: BlaschkeProduct) -> _SpaceData:
    return _SpaceData(b)


def tm_values(b: BlaschkeProduct, z) -> np.ndarray:
    """Values of the TM basis at z, stacked as shape (m,) + shape(z).

    Evaluated in product form, so every factor has modulus <= 1 on the closed
    disk and boundary points are perfectly admissible.
    """
    zarr = np.asarray(z, dtype=complex)
    m = b.degree
    vals = np.empty((m,) + zarr.shape, dtype=complex)
    running = np.ones_like(zarr)
    for k, a in enumerate(b.zeros):
        vals[k] = np.sqrt(1.0 - abs(a) ** 2) / (1.0 - np.conj(a) * zarr) * running
        running = running * (zarr - a) / (1.0 - np.conj(a) * zarr)
    return vals


@functools.lru_cache(maxsize=None)
def _tm_node_values(b: BlaschkeProduct, n: int) -> np.ndarray:
    return tm_values(b, circle_nodes(n))


# ---------------------------------------------------------------------------
# bases and vectors
# ---------------------------------------------------------------------------

@dataclass(eq=False, frozen=True)
class ModelBasis:
    """Ordered basis of a model space.

    ``matrix`` holds the basis vectors as columns of TM coordinates, so a
    coefficient vector c over this basis has TM coordinates ``matrix @ c``.
    """

    space: BlaschkeProduct
    kind: str
    matrix: np.ndarray
    clark: ClarkPointSet | None = None
    omega: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.space.degree

    @property
    def gram(self) -> np.ndarray:
        """Pairwise inner products; identity for the orthonormal kinds."""
        return self.matrix.conj().T @ self.matrix

    @property
    def lam(self):
        return None if self.clark is None else self.clark.lam

    def same(self, other: "ModelBasis") -> bool:
        if self.space != other.space or self.kind != other.kind:
            return False
        if (self.clark is None) != (other.clark is None):
            return False
        if self.clark is not None and self.clark.lam != other.clark.lam:
            return False
        return True

    def descriptor(self) -> dict:
        out = {"basis": self.kind}
        if self.clark is not None:
            out["lambda"] = serialize.cpx(self.clark.lam)
        return out


def build_basis(b: BlaschkeProduct, kind: str, lam: complex | None = None,
                arg_branch: float = 0.0, tol: Tolerances = DEFAULT) -> ModelBasis:
    """Construct one of the four supported bases.

    kernel-zeros requires distinct zeros; the Clark kinds require the spectral
    parameter ``lam``.  Clark points are ordered by principal argument.  For
    the modified Clark basis the phases

        omega_j = exp(-i/2 (arg eta_j - arg target))

    make every basis vector a fixed point of the conjugation; arguments are
    reduced to [arg_branch, arg_branch + 2*pi), and either branch works since
    the fixed-point property is insensitive to the sign of omega_j.
    """
    m = b.degree
    if kind == "tm":
        return ModelBasis(b, kind, np.eye(m, dtype=complex))
    if kind == "kernel-zeros":
        zeros = np.array(b.zeros)
        sep = np.abs(zeros[:, None] - zeros[None, :]) + np.eye(m)
        if np.min(sep) < tol.distinct:
            raise ValueError("kernel-zeros basis requires distinct zeros")
        cols = np.conj(tm_values(b, zeros))          # (m, m): column j = k_{a_j}
        return ModelBasis(b, kind, cols)
    if kind in ("clark", "modified-clark"):
        if lam is None:
            raise ValueError(f"{kind} basis requires the spectral parameter lam")
        cp = clark_points(b, lam, tol)
        cols = np.conj(tm_values(b, cp.points)) / np.sqrt(cp.weights)[None, :]
        if kind == "clark":
            return ModelBasis(b, kind, cols, clark=cp)
        args = (np.angle(cp.points) - arg_branch) % (2.0 * np.pi) + arg_branch
        arg_t = (np.angle(cp.target) - arg_branch) % (2.0 * np.pi) + arg_branch
        omega = np.exp(-0.5j * (args - arg_t))
        return ModelBasis(b, kind, cols * omega[None, :], clark=cp, omega=omega)
    raise ValueError(f"unknown basis kind {kind!r}; expected one of {BASIS_KINDS}")


def change_of_basis(src: ModelBasis, dst: ModelBasis) -> np.ndarray:
    """Invertible T with coeffs_dst = T @ coeffs_src.  Requires one space."""
    if src.space != dst.space:
        raise ValueError("change of basis requires a single underlying space")
    return np.linalg.solve(dst.matrix, src.matrix)


@dataclass(eq=False, frozen=True)
class ModelVector:
    """Element of a model space as coefficients over a declared basis."""

    basis: ModelBasis
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.basis.dim,):
            raise ValueError(f"expected {self.basis.dim} coefficients, got {coeffs.shape}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def space(self) -> BlaschkeProduct:
        return self.basis.space

    def tm(self) -> np.ndarray:
        return self.basis.matrix @ self.coeffs

    def to(self, basis: ModelBasis) -> "ModelVector":
        if basis.space != self.space:
            raise ValueError("cannot convert between different model spaces")
        return ModelVector(basis, np.linalg.solve(basis.matrix, self.tm()))

    def __call__(self, z):
        vals = tm_values(self.space, z)
        return np.tensordot(self.tm(), vals, axes=(0, 0))

    def norm(self) -> float:
        return float(np.linalg.norm(self.tm()))

    def __add__(self, other: "ModelVector") -> "ModelVector":
        if other.basis.same(self.basis):
            return ModelVector(self.basis, self.coeffs + other.coeffs)
        return ModelVector(self.basis, self.coeffs + other.to(self.basis).coeffs)

    def __sub__(self, other: "ModelVector") -> "ModelVector":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "ModelVector":
        return ModelVector(self.basis, complex(scalar) * self.coeffs)

    def to_json(self) -> dict:
        out = {"alpha": self.space.to_json(),
               "basis": self.basis.kind,
               "coeffs": serialize.cpx_seq(self.coeffs)}
        if self.basis.clark is not None:
            out["lambda"] = serialize.cpx(self.basis.clark.lam)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ModelVector":
        b = BlaschkeProduct.from_json(obj["alpha"])
        lam = serialize.uncpx(obj["lambda"]) if "lambda" in obj else None
        basis = build_basis(b, obj["basis"], lam)
        return cls(basis, np.array(serialize.uncpx_seq(obj["coeffs"])))


def tm_vector(b: BlaschkeProduct, coords) -> ModelVector:
    return ModelVector(build_basis(b, "tm"), np.asarray(coords, dtype=complex))


# ---------------------------------------------------------------------------
# kernels, conjugation, pairings
# ---------------------------------------------------------------------------

def kernel(b: BlaschkeProduct, w: complex, basis: ModelBasis | None = None) -> ModelVector:
    """Reproducing kernel k_w = (1 - conj(B(w)) B(z)) / (1 - conj(w) z).

    Valid on the closed disk; boundary points are genuine members because a
    finite Blaschke product has an angular derivative everywhere.
    """
    w = complex(w)
    if abs(w) > 1.0 + 1e-12:
        raise ValueError("kernel point must lie in the closed unit disk")
    coords = np.conj(tm_values(b, w))
    vec = tm_vector(b, coords)
    return vec if basis is None else vec.to(basis)


def conj_kernel(b: BlaschkeProduct, w: complex, basis: ModelBasis | None = None) -> ModelVector:
    """Conjugate kernel (B(z) - B(w)) / (z - w), value B'(w) at z = w.

    Computed by exact synthetic division of front*P - B(w) q by (z - w).
    """
    w = complex(w)
    if abs(w) > 1.0 + 1e-12:
        raise ValueError("kernel point must lie in the closed unit disk")
    sd = space_data(b)
    bw = evaluate(b, w)
    m = b.degree
    num = np.zeros(m + 1, dtype=complex)             # degree m, vanishes at w
    num[: len(sd.p_coeffs)] += b.front * sd.p_coeffs
    num[: len(sd.q_coeffs)] -= bw * sd.q_coeffs
    quot = np.zeros(m, dtype=complex)
    carry = num[m]
    for i in range(m - 1, -1, -1):                   # divide by (z - w)
        quot[i] = carry
        carry = num[i] + w * carry
    # carry is the remainder num(w); it vanishes up to rounding
    vec = tm_vector(b, sd.poly_to_tm(quot))
    return vec if basis is None else vec.to(basis)


def conjugation(f: ModelVector, method: str = "boundary") -> ModelVector:
    """Apply the antilinear conjugation of the model space to f.

    method="boundary" uses the exact numerator-reversal form of
    B(z) conj(z) conj(f(z)); method="kernel" extends C k_w = conj-kernel_w
    antilinearly over a kernel basis at m interior points.  The two agree to
    quadrature accuracy and are cross-checked in the test suite.
    """
    b = f.space
    sd = space_data(b)
    if method == "boundary":
        coords = sd.conj_tm @ np.conj(f.tm())
    elif method == "kernel":
        m = b.degree
        pts = 0.4 * np.exp(2j * np.pi * np.arange(m) / m) + 0.11
        kmat = np.column_stack([kernel(b, w).tm() for w in pts])
        ktil = np.column_stack([conj_kernel(b, w).tm() for w in pts])
        c = np.linalg.solve(kmat, f.tm())
        coords = ktil @ np.conj(c)
    else:
        raise ValueError("method must be 'boundary' or 'kernel'")
    return tm_vector(b, coords).to(f.basis)


def inner_product(f: ModelVector, g: ModelVector) -> complex:
    """Hermitian pairing <f, g>, linear in f.  Both arguments must live in the
    same model space; bases are reconciled through TM coordinates."""
    if f.space != g.space:
        raise ValueError("inner product requires vectors from the same model space")
    return complex(np.vdot(g.tm(), f.tm()))


def project(b: BlaschkeProduct, values_fn, tol: Tolerances = DEFAULT) -> ModelVector:
    """Orthogonal projection onto the model space of a circle function given
    by ``values_fn(nodes)``, expanded in TM coordinates by quadrature."""
    def integrand(z):
        vals = tm_values(b, z)
        return values_fn(z)[None, :] * np.conj(vals)

    coords = adaptive_circle_mean(integrand, tol.quadrature)
    return tm_vector(b, coords)


def multiply_by_z(f: ModelVector, tol: Tolerances = DEFAULT) -> ModelVector:
    """The function z f(z), defined only when it stays in the model space.

    Membership is equivalent to the numerator of f having degree <= m - 2
    (equivalently, f orthogonal to the conjugate kernel at 0); raises
    ValueError otherwise.
    """
    b = f.space
    sd = space_data(b)
    p = sd.tm_to_poly(f.tm())
    m = b.degree
    scale = np.linalg.norm(p)
    if scale > 0 and abs(p[m - 1]) > 1e-7 * scale:
        raise ValueError("z*f leaves the model space: f is not orthogonal to the "
                         "conjugate kernel at 0")
    shifted = np.zeros(m, dtype=complex)
    shifted[1:] = p[: m - 1]
    return tm_vector(b, sd.poly_to_tm(shifted)).to(f.basis)
