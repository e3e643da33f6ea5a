"""Matrices of asymmetric truncated Toeplitz operators and their relatives.

The operator with symbol phi maps f in K_alpha to the projection of phi*f
onto K_beta.  Matrix entries with respect to bases {f_p} of K_alpha and
{g_s} of K_beta follow the convention

    r[s, p] = <A f_p, g_s>        (row = output index, column = input index)

for orthonormal output bases; in general ``entries`` is the coefficient
matrix, i.e. coefficients of A f_p over the output basis sit in column p.

Two computation paths are provided.  The canonical one evaluates the pairing
<phi f_p, g_s> by adaptive trapezoid quadrature on the unit circle (the
projection is absorbed because g_s already lies in K_beta).  For structured
symbols conj(chi) + psi with distinct zeros the closed form

    A_psi f = sum_i psi(b_i)/beta'(b_i) * f(b_i) * conj-kernel at b_i,

an interpolation across the zeros b_i of beta, plus the adjoint of the mirror
operator for the co-analytic part, gives an independent exact route; the two
paths agree to quadrature accuracy.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly

from . import serialize
from .blaschke import BlaschkeProduct, derivative, evaluate, mobius_target
from .config import DEFAULT, Tolerances
from .modelspace import (ModelBasis, ModelVector, adaptive_circle_mean,
                         build_basis, circle_nodes, conj_kernel, kernel,
                         space_data, tm_values, tm_vector)


@dataclass(eq=False, frozen=True)
class RationalSymbol:
    """Rational boundary function num(z)/den(z), usable on |z| = 1."""

    num: tuple
    den: tuple = (1.0 + 0.0j,)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return npoly.polyval(z, np.asarray(self.num, dtype=complex)) / \
            npoly.polyval(z, np.asarray(self.den, dtype=complex))

    def to_json(self) -> dict:
        return {"num": serialize.cpx_seq(self.num), "den": serialize.cpx_seq(self.den)}

    @classmethod
    def from_json(cls, obj: dict) -> "RationalSymbol":
        return cls(tuple(serialize.uncpx_seq(obj["num"])),
                   tuple(serialize.uncpx_seq(obj["den"])))


IDENTITY_SYMBOL = RationalSymbol((0.0, 1.0))        # the symbol z


@dataclass(eq=False, frozen=True)
class SymbolSpec:
    """Symbol phi = conj(chi) + psi with chi in K_alpha, psi in K_beta, or a
    raw boundary function (callable on circle nodes, or a RationalSymbol).

    When both the structured and the raw forms are present they must agree
    pointwise on the circle; this is checked on 64 samples at construction.
    """

    co_analytic: ModelVector | None = None
    analytic: ModelVector | None = None
    raw: object | None = None

    def __post_init__(self):
        if self.co_analytic is None and self.analytic is None and self.raw is None:
            raise ValueError("symbol needs a structured part or a raw boundary function")
        if self.raw is not None and (self.co_analytic is not None or self.analytic is not None):
            z = circle_nodes(64)
            diff = np.max(np.abs(self._structured_values(z) - self.raw(z)))
            if diff > 1e-9:
                raise ValueError(f"structured and raw symbol forms disagree by {diff:.3e}")

    @property
    def structured(self) -> bool:
        return self.co_analytic is not None or self.analytic is not None

    def _structured_values(self, z):
        out = np.zeros(np.shape(z), dtype=complex)
        if self.co_analytic is not None:
            out = out + np.conj(self.co_analytic(np.asarray(z)))
        if self.analytic is not None:
            out = out + self.analytic(np.asarray(z))
        return out

    def values(self, z):
        """Boundary values on |z| = 1 (structured form wins when present)."""
        if self.structured:
            return self._structured_values(z)
        return self.raw(np.asarray(z, dtype=complex))

    def conjugated_pair(self) -> "SymbolSpec":
        """The symbol conj(phi) for the operator between swapped spaces."""
        if not self.structured:
            raise ValueError("conjugated_pair requires a structured symbol")
        return SymbolSpec(co_analytic=self.analytic, analytic=self.co_analytic)

    def to_json(self) -> dict:
        out = {}
        if self.co_analytic is not None:
            out["co_analytic"] = self.co_analytic.to_json()
        if self.analytic is not None:
            out["analytic"] = self.analytic.to_json()
        if isinstance(self.raw, RationalSymbol):
            out["raw"] = self.raw.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SymbolSpec":
        chi = ModelVector.from_json(obj["co_analytic"]) if "co_analytic" in obj else None
        psi = ModelVector.from_json(obj["analytic"]) if "analytic" in obj else None
        raw = RationalSymbol.from_json(obj["raw"]) if "raw" in obj else None
        return cls(chi, psi, raw)


@dataclass(eq=False, frozen=True)
class OperatorMatrix:
    """Complex matrix tagged with its input and output bases."""

    entries: np.ndarray
    in_basis: ModelBasis
    out_basis: ModelBasis

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (self.out_basis.dim, self.in_basis.dim):
            raise ValueError(f"entry shape {entries.shape} does not match bases "
                             f"({self.out_basis.dim}, {self.in_basis.dim})")
        if not np.all(np.isfinite(entries.view(float))):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "entries", entries)

    @property
    def alpha(self) -> BlaschkeProduct:
        return self.in_basis.space

    @property
    def beta(self) -> BlaschkeProduct:
        return self.out_basis.space

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries)))

    def tm_entries(self) -> np.ndarray:
        """The same operator as a matrix between TM coordinates."""
        t_in = self.in_basis.matrix
        t_out = self.out_basis.matrix
        return np.linalg.solve(t_in.T, (t_out @ self.entries).T).T

    def in_bases(self, in_basis: ModelBasis, out_basis: ModelBasis) -> "OperatorMatrix":
        if in_basis.space != self.alpha or out_basis.space != self.beta:
            raise ValueError("target bases belong to different spaces")
        ent = np.linalg.solve(out_basis.matrix, self.tm_entries() @ in_basis.matrix)
        return OperatorMatrix(ent, in_basis, out_basis)

    def apply(self, f: ModelVector) -> ModelVector:
        if f.space != self.alpha:
            raise ValueError("vector lives in the wrong model space")
        coeffs = self.entries @ f.to(self.in_basis).coeffs
        return ModelVector(self.out_basis, coeffs)

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.tm_entries().conj().T,
                              build_basis(self.beta, "tm"),
                              build_basis(self.alpha, "tm"))

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        other = other.in_bases(self.in_basis, self.out_basis)
        return OperatorMatrix(self.entries + other.entries, self.in_basis, self.out_basis)

    def __rmul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(complex(scalar) * self.entries, self.in_basis, self.out_basis)

    def to_json(self) -> dict:
        return {"alpha": self.alpha.to_json(),
                "beta": self.beta.to_json(),
                "in_basis": self.in_basis.descriptor(),
                "out_basis": self.out_basis.descriptor(),
                "entries": serialize.cpx_matrix(self.entries)}

    @classmethod
    def from_json(cls, obj: dict) -> "OperatorMatrix":
        alpha = BlaschkeProduct.from_json(obj["alpha"])
        beta = BlaschkeProduct.from_json(obj["beta"])

        def mk(space, desc):
            lam = serialize.uncpx(desc["lambda"]) if "lambda" in desc else None
            return build_basis(space, desc["basis"], lam)

        return cls(serialize.uncpx_matrix(obj["entries"]),
                   mk(alpha, obj["in_basis"]), mk(beta, obj["out_basis"]))


def _default_bases(alpha, beta, in_basis, out_basis):
    if in_basis is None:
        in_basis = build_basis(alpha, "tm")
    if out_basis is None:
        out_basis = build_basis(beta, "tm")
    if in_basis.space != alpha or out_basis.space != beta:
        raise ValueError("bases do not belong to the declared spaces")
    return in_basis, out_basis


def atto_matrix(alpha: BlaschkeProduct, beta: BlaschkeProduct, symbol: SymbolSpec,
                in_basis: ModelBasis | None = None, out_basis: ModelBasis | None = None,
                method: str = "quadrature", tol: Tolerances = DEFAULT) -> OperatorMatrix:
    """Matrix of the truncated multiplication-by-phi operator K_alpha -> K_beta.

    method="quadrature" (canonical) integrates <phi f_p, g_s> on the circle;
    method="closed" uses the structured interpolation formula and requires a
    structured symbol and distinct zeros in both products.
    """
    in_basis, out_basis = _default_bases(alpha, beta, in_basis, out_basis)
    if method == "closed":
        m_tm = _structured_tm_matrix(alpha, beta, symbol)
        tm_op = OperatorMatrix(m_tm, build_basis(alpha, "tm"), build_basis(beta, "tm"))
        return tm_op.in_bases(in_basis, out_basis)
    if method != "quadrature":
        raise ValueError("method must be 'quadrature' or 'closed'")

    t_in = in_basis.matrix.T.copy()
    t_out = out_basis.matrix.T.copy()

    def integrand(z):
        base_a = tm_values(alpha, z)
        base_b = tm_values(beta, z)
        fvals = t_in @ base_a                     # (m, N) values of input basis
        gvals = t_out @ base_b                    # (n, N) values of output basis
        phi = symbol.values(z)
        return np.conj(gvals)[:, None, :] * (phi[None, None, :] * fvals[None, :, :])

    pairings = adaptive_circle_mean(integrand, tol.quadrature)
    gram = out_basis.gram
    entries = np.linalg.solve(gram, pairings)     # pairing matrix -> coefficient matrix
    return OperatorMatrix(entries, in_basis, out_basis)


def _distinct_zero_data(b: BlaschkeProduct):
    zeros = np.array(b.zeros)
    sep = np.abs(zeros[:, None] - zeros[None, :]) + np.eye(b.degree)
    if np.min(sep) < 1e-10:
        raise ValueError("closed-form path requires distinct zeros")
    return zeros, derivative(b, zeros)


def _structured_tm_matrix(alpha: BlaschkeProduct, beta: BlaschkeProduct,
                          symbol: SymbolSpec) -> np.ndarray:
    if not symbol.structured:
        raise ValueError("closed-form path requires a structured symbol")
    m, n = alpha.degree, beta.degree
    out = np.zeros((n, m), dtype=complex)
    psi = symbol.analytic
    chi = symbol.co_analytic
    if psi is not None:
        zb, dzb = _distinct_zero_data(beta)
        weights = psi(zb) / dzb
        ktil = np.column_stack([conj_kernel(beta, w).tm() for w in zb])
        out += ktil @ (weights[:, None] * tm_values(alpha, zb).T)
    if chi is not None:
        za, dza = _distinct_zero_data(alpha)
        weights = chi(za) / dza
        ktil = np.column_stack([conj_kernel(alpha, w).tm() for w in za])
        mirror = ktil @ (weights[:, None] * tm_values(beta, za).T)   # K_beta -> K_alpha
        out += mirror.conj().T
    return out


def compressed_shift(alpha: BlaschkeProduct, basis: ModelBasis | None = None,
                     tol: Tolerances = DEFAULT) -> OperatorMatrix:
    """The compression of multiplication by z to the model space."""
    basis, _ = _default_bases(alpha, alpha, basis, basis)
    tm = _shift_tm(alpha, tol)
    op = OperatorMatrix(tm, build_basis(alpha, "tm"), build_basis(alpha, "tm"))
    return op.in_bases(basis, basis)


@functools.lru_cache(maxsize=None)
def _shift_tm(alpha: BlaschkeProduct, tol: Tolerances = DEFAULT) -> np.ndarray:
    spec = SymbolSpec(raw=IDENTITY_SYMBOL)
    return atto_matrix(alpha, alpha, spec, tol=tol).entries


def rank_one(g: ModelVector, f: ModelVector, in_basis: ModelBasis | None = None,
             out_basis: ModelBasis | None = None) -> OperatorMatrix:
    """The operator h -> <h, f> g from the space of f to the space of g."""
    in_basis, out_basis = _default_bases(f.space, g.space, in_basis, out_basis)
    tm = np.outer(g.tm(), np.conj(f.tm()))
    op = OperatorMatrix(tm, build_basis(f.space, "tm"), build_basis(g.space, "tm"))
    return op.in_bases(in_basis, out_basis)


def modified_shift(alpha: BlaschkeProduct, c: complex, basis: ModelBasis | None = None,
                   tol: Tolerances = DEFAULT) -> OperatorMatrix:
    """Compressed shift plus c times the rank-one term (kernel at 0) tensor
    (conjugate kernel at 0)."""
    basis, _ = _default_bases(alpha, alpha, basis, basis)
    shift = compressed_shift(alpha, basis, tol)
    bump = rank_one(kernel(alpha, 0.0), conj_kernel(alpha, 0.0), basis, basis)
    return shift + complex(c) * bump


def clark_coefficient(alpha: BlaschkeProduct, lam: complex) -> complex:
    """(lam + B(0)) / (1 - |B(0)|^2): the modified-shift coefficient whose
    perturbation of the compressed shift is unitary."""
    a0 = evaluate(alpha, 0.0)
    return (complex(lam) + a0) / (1.0 - abs(a0) ** 2)


def clark_unitary(alpha: BlaschkeProduct, lam: complex, basis: ModelBasis | None = None,
                  tol: Tolerances = DEFAULT) -> OperatorMatrix:
    """The rank-one unitary perturbation of the compressed shift whose
    eigenpairs are the Clark points and normalized boundary kernels."""
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-9:
        raise ValueError("lam must be unimodular")
    return modified_shift(alpha, clark_coefficient(alpha, lam), basis, tol)


VARIANTS = ("conjk-kernel", "kernel-conjk")


def standard_rank_one(alpha: BlaschkeProduct, beta: BlaschkeProduct, w: complex,
                      variant: str, in_basis: ModelBasis | None = None,
                      out_basis: ModelBasis | None = None) -> OperatorMatrix:
    """The two standard rank-one members at a point w of the closed disk:

    conjk-kernel:  (conjugate kernel in K_beta) tensor (kernel in K_alpha)
    kernel-conjk:  (kernel in K_beta) tensor (conjugate kernel in K_alpha)
    """
    w = complex(w)
    if variant == "conjk-kernel":
        g, f = conj_kernel(beta, w), kernel(alpha, w)
    elif variant == "kernel-conjk":
        g, f = kernel(beta, w), conj_kernel(alpha, w)
    else:
        raise ValueError(f"variant must be one of {VARIANTS}")
    return rank_one(g, f, in_basis, out_basis)


def conjugate_operator(a: OperatorMatrix) -> OperatorMatrix:
    """The operator C_beta A C_alpha (a linear map again, since the two
    antilinear conjugations cancel)."""
    ca = space_data(a.alpha).conj_tm
    cb = space_data(a.beta).conj_tm
    tm = cb @ np.conj(a.tm_entries()) @ np.conj(ca)
    op = OperatorMatrix(tm, build_basis(a.alpha, "tm"), build_basis(a.beta, "tm"))
    return op.in_bases(a.in_basis, a.out_basis)


def symbol_family(alpha: BlaschkeProduct, beta: BlaschkeProduct):
    """The m + n structured generators: conj(chi) over a TM basis of K_alpha
    and psi over a TM basis of K_beta."""
    fam = []
    for k in range(alpha.degree):
        coeffs = np.zeros(alpha.degree, dtype=complex)
        coeffs[k] = 1.0
        fam.append(SymbolSpec(co_analytic=tm_vector(alpha, coeffs)))
    for k in range(beta.degree):
        coeffs = np.zeros(beta.degree, dtype=complex)
        coeffs[k] = 1.0
        fam.append(SymbolSpec(analytic=tm_vector(beta, coeffs)))
    return fam


def symbol_span_dimension(alpha: BlaschkeProduct, beta: BlaschkeProduct,
                          tol: Tolerances = DEFAULT):
    """Numerical rank of the span of the structured-symbol operator family,
    with the singular values backing the rank call."""
    mats = [atto_matrix(alpha, beta, spec, tol=tol).entries.ravel()
            for spec in symbol_family(alpha, beta)]
    stack = np.array(mats)
    svals = np.linalg.svd(stack, compute_uv=False)
    rank = int(np.sum(svals > tol.rank * svals[0]))
    return rank, svals
