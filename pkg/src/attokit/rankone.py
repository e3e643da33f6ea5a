"""Rank-one members of the truncated-Toeplitz class and their classification.

Over a Clark basis the coefficients of a kernel k_w are

    c_j = const / (1 - conj(w) eta_j) / sqrt(w_j),

and those of a conjugate kernel are const / (eta_j - w) / sqrt(w_j), so a
kernel multiple is detected by eliminating w from the ratio of two nonzero
coefficients (a linear equation in conj(w) or w) and then verifying the
candidate against all m coefficients.  For dimension <= 2 one of the two
candidates is guaranteed to land in the closed disk (they are reflections
w -> 1/conj(w) of each other); for dimension >= 3 vectors with a zero
coefficient next to two nonzero ones are classifiable as neither.

A rank-one operator g (x) f in the class is either a scalar multiple of a
standard pair, (conjugate kernel) (x) (kernel) or (kernel) (x) (conjugate
kernel) at one point w of the closed disk, or, only when one space is a line
and the other has dimension > 2, a genuinely non-standard example.  The
classic counterexample lives over the degree pair (3, 1):

    alpha(z) = -z (a-z)/(1-conj(a)z) (a+z)/(1+conj(a)z),   beta(z) = z,

with the operator 1 (x) (1 + k_a).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import serialize
from .blaschke import BlaschkeProduct, evaluate
from .config import DEFAULT, Tolerances
from .membership import test_rank_two_residual
from .modelspace import (ModelVector, build_basis, conj_kernel, kernel,
                         tm_vector)
from .operators import OperatorMatrix, rank_one

TAG_KERNEL = "kernel"
TAG_CONJ_KERNEL = "conj-kernel"
TAG_NEITHER = "neither"


@dataclass(eq=False, frozen=True)
class VectorClassification:
    """Outcome of testing a vector for being a (conjugate) kernel multiple.

    ``boundary`` marks |w| = 1, where the two tags coincide up to a
    unimodular factor and the kernel tag is reported.
    """

    tag: str
    w: complex | None = None
    scale: complex | None = None
    boundary: bool = False

    def to_json(self) -> dict:
        out = {"tag": self.tag, "boundary": bool(self.boundary)}
        if self.w is not None:
            out["w"] = serialize.cpx(self.w)
        if self.scale is not None:
            out["scale"] = serialize.cpx(self.scale)
        return out


@dataclass(eq=False, frozen=True)
class RankOneDecomposition:
    tag: str                      # "standard" | "nonstandard"
    variant: str | None = None    # "conjk-kernel" | "kernel-conjk"
    w: complex | None = None
    scale: complex | None = None
    boundary: bool = False

    def to_json(self) -> dict:
        out = {"tag": self.tag}
        if self.variant is not None:
            out["variant"] = self.variant
        if self.w is not None:
            out["w"] = serialize.cpx(self.w)
        if self.scale is not None:
            out["scale"] = serialize.cpx(self.scale)
        if self.boundary:
            out["boundary"] = True
        return out


def _fit_scalar(target: np.ndarray, model: np.ndarray, tol: Tolerances):
    """Least-squares c with target ~ c * model; returns (c, relative residual)."""
    denom = np.vdot(model, model)
    if denom == 0:
        return 0j, np.inf
    c = np.vdot(model, target) / denom
    resid = np.linalg.norm(target - c * model) / max(np.linalg.norm(target), 1e-300)
    return complex(c), float(resid)


def classify_vector(f: ModelVector, lam: complex, tol: Tolerances = DEFAULT,
                    boundary_pad: float = 1e-9) -> VectorClassification:
    """Classify f as a kernel multiple, a conjugate-kernel multiple or neither.

    Works over the Clark basis for ``lam``: a single surviving coefficient
    means a boundary kernel at that Clark point; otherwise w-candidates come
    from the first two nonzero coefficients and are accepted only when inside
    the closed disk and consistent with every coefficient.  For spaces of
    dimension <= 2 a non-classification is impossible and treated as an
    internal error.
    """
    alpha = f.space
    cb = build_basis(alpha, "clark", lam, tol=tol)
    c = f.to(cb).coeffs
    scale_c = np.linalg.norm(c)
    if scale_c == 0:
        raise ValueError("cannot classify the zero vector")
    eta = cb.clark.points
    sq = np.sqrt(cb.clark.weights)
    nz = np.nonzero(np.abs(c) > tol.fit * scale_c)[0]

    if len(nz) == 1:
        j = int(nz[0])
        return VectorClassification(TAG_KERNEL, complex(eta[j]),
                                    complex(c[j] / sq[j]), boundary=True)

    d = c * sq                       # d_j proportional to 1/(1 - conj(w) eta_j), resp. 1/(eta_j - w)
    i, j = int(nz[0]), int(nz[1])
    target = cb.clark.target

    def try_kernel(w):
        if abs(w) > 1.0 + boundary_pad:
            return None
        boundary = abs(w) > 1.0 - boundary_pad
        if boundary:
            w = w / abs(w)
        kvec = (1.0 - np.conj(evaluate(alpha, w)) * target) / (1.0 - np.conj(w) * eta) / sq
        cfit, resid = _fit_scalar(c, kvec, tol)
        if resid <= tol.fit:
            return VectorClassification(TAG_KERNEL, complex(w), cfit, boundary)
        return None

    def try_conj_kernel(w):
        if abs(w) > 1.0 + boundary_pad:
            return None
        boundary = abs(w) > 1.0 - boundary_pad
        if boundary:
            w = w / abs(w)
        kvec = (target - evaluate(alpha, w)) / (eta - w) / sq
        cfit, resid = _fit_scalar(c, kvec, tol)
        if resid <= tol.fit:
            return VectorClassification(TAG_CONJ_KERNEL, complex(w), cfit, boundary)
        return None

    # kernel candidate: d_i (1 - conj(w) eta_i) = d_j (1 - conj(w) eta_j)
    den = d[i] * eta[i] - d[j] * eta[j]
    if abs(den) > 0:
        out = try_kernel(np.conj((d[i] - d[j]) / den))
        if out is not None:
            return out
    # conjugate-kernel candidate: d_i (eta_i - w) = d_j (eta_j - w)
    den = d[i] - d[j]
    if abs(den) > 0:
        out = try_conj_kernel((d[i] * eta[i] - d[j] * eta[j]) / den)
        if out is not None:
            return out
    if alpha.degree <= 2:
        raise AssertionError("classification cannot fail in dimension <= 2: "
                             "one reflected candidate always lies in the closed disk")
    return VectorClassification(TAG_NEITHER)


def decompose_rank_one(a: OperatorMatrix, lam: complex = 1.0 + 0j,
                       tol: Tolerances = DEFAULT) -> RankOneDecomposition:
    """Factor a rank-one member of the class into a standard form if one exists.

    The dominant singular triple gives a = g (x) f (g carries the singular
    value; f is unit norm with its largest coefficient rotated to the positive
    real axis).  The vector living in the space of dimension >= 2 is
    classified, its partner verified at the same point w.  A failed partner
    check yields "nonstandard", which the dichotomy only permits when one
    degree is 1 and the other exceeds 2; anything else raises.
    """
    alpha, beta = a.alpha, a.beta
    m, n = alpha.degree, beta.degree
    tm = a.tm_entries()
    u, s, vh = np.linalg.svd(tm)
    if s[0] == 0:
        raise ValueError("the zero operator has no rank-one factorization")
    if len(s) > 1 and s[1] > tol.rank * s[0]:
        raise ValueError(f"matrix is not numerically rank one: sigma2/sigma1 = {s[1]/s[0]:.2e}")
    if not test_rank_two_residual(a, tol=tol).is_member:
        raise ValueError("matrix is not a member of the truncated-Toeplitz class")

    # a = g (x) f; f unit norm, largest coefficient rotated positive real
    fvec = np.conj(vh[0])
    k = int(np.argmax(np.abs(fvec)))
    phase = fvec[k] / abs(fvec[k])
    f = tm_vector(alpha, fvec * np.conj(phase))
    g = tm_vector(beta, s[0] * u[:, 0] * np.conj(phase))

    def standard_form(primary: ModelVector, partner: ModelVector, primary_is_g: bool):
        """If primary ~ (conj-)kernel at w and partner matches the mate at the
        same w, rebuild g (x) f = c_g conj(c_f) * (standard pair at w)."""
        cls = classify_vector(primary, lam, tol)
        if cls.tag == TAG_NEITHER:
            return None
        tags = [cls.tag]
        if cls.boundary:
            tags.append(TAG_CONJ_KERNEL if cls.tag == TAG_KERNEL else TAG_KERNEL)
        for tag in tags:
            w = cls.w
            model = kernel if tag == TAG_KERNEL else conj_kernel
            mate = conj_kernel if tag == TAG_KERNEL else kernel
            c_primary, resid_p = _fit_scalar(primary.tm(), model(primary.space, w).tm(), tol)
            c_partner, resid_q = _fit_scalar(partner.tm(), mate(partner.space, w).tm(), tol)
            if resid_p > tol.fit or resid_q > tol.fit:
                continue
            if primary_is_g:
                c_g, c_f = c_primary, c_partner
                variant = "kernel-conjk" if tag == TAG_KERNEL else "conjk-kernel"
            else:
                c_g, c_f = c_partner, c_primary
                variant = "conjk-kernel" if tag == TAG_KERNEL else "kernel-conjk"
            return RankOneDecomposition("standard", variant, complex(w),
                                        complex(c_g * np.conj(c_f)), cls.boundary)
        return None

    if n >= 2:
        out = standard_form(g, f, primary_is_g=True)
    elif m >= 2:
        out = standard_form(f, g, primary_is_g=False)
    else:
        # both spaces are lines: everything is conjk-kernel at the origin
        c_g, _ = _fit_scalar(g.tm(), conj_kernel(beta, 0.0).tm(), tol)
        c_f, _ = _fit_scalar(f.tm(), kernel(alpha, 0.0).tm(), tol)
        return RankOneDecomposition("standard", "conjk-kernel", 0j,
                                    complex(c_g * np.conj(c_f)), False)

    if out is not None:
        return out
    if min(m, n) == 1 and max(m, n) > 2:
        return RankOneDecomposition("nonstandard")
    raise AssertionError(
        "non-standard rank-one member found outside the permitted degree "
        "dichotomy; this contradicts the classification and signals a bug")


def example_4_1(a: complex) -> tuple[BlaschkeProduct, BlaschkeProduct, OperatorMatrix]:
    """The counterexample triple over degrees (3, 1).

    alpha has zeros {0, a, -a} with front -1, beta(z) = z, and the operator
    is 1 (x) (1 + k_a); it belongs to the class but is no scalar multiple of
    either standard rank-one form.
    """
    a = complex(a)
    if a == 0 or abs(a) >= 1:
        raise ValueError("the construction requires 0 < |a| < 1; at a = 0 the "
                         "two kernel candidates coincide")
    alpha = BlaschkeProduct((0.0, a, -a), front=-1.0)
    beta = BlaschkeProduct((0.0,), front=-1.0)      # beta(z) = z
    f = kernel(alpha, 0.0) + kernel(alpha, a)       # 1 + k_a
    g = kernel(beta, 0.0)                           # constant 1
    return alpha, beta, rank_one(g, f)


def example_4_1_candidates(a: complex) -> dict:
    """The four mutually inconsistent point candidates for the counterexample:
    matching different coefficients forces different w, so no single w works.
    """
    a = complex(a)
    r2 = abs(a) ** 2
    return {
        "kernel": [a / (2.0 - r2), a / (2.0 + r2)],
        "conj-kernel": [(2.0 - r2) / a.conjugate(), (2.0 + r2) / a.conjugate()],
    }


def boundary_kernel_identity_check(alpha: BlaschkeProduct, w: complex) -> float:
    """Relative defect of k_w = conj(B(w)) w ktilde_w at a boundary point."""
    w = complex(w)
    if abs(abs(w) - 1.0) > 1e-9:
        raise ValueError("the boundary identity requires |w| = 1")
    kw = kernel(alpha, w).tm()
    ktw = conj_kernel(alpha, w).tm()
    lhs = kw - np.conj(evaluate(alpha, w)) * w * ktw
    return float(np.linalg.norm(lhs) / np.linalg.norm(kw))
