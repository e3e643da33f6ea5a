"""Command-line surface.

Subcommands: clark, atto, shift, unitary, membership, rankone, dim,
example-4-1, selftest.  All results are JSON on stdout (complex scalars as
[re, im] pairs); diagnostics go to stderr.  Exit codes: 0 success or member,
2 usage/config error, 3 negative verdict, 4 indeterminate or internal
inconsistency.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import serialize
from .blaschke import BlaschkeProduct, clark_points, monomial
from .config import DEFAULT, Tolerances
from .instances import (member_matrix, perturbed_nonmember, random_blaschke,
                        random_unimodular, random_vector, shared_clark_instance)
from .membership import (IndeterminateError, MethodDisagreement,
                         clark_pairing, recover_chi_psi_clark, run_all,
                         test_clark_recurrence, test_conjugate_residual,
                         test_rank_two_residual, test_shift_invariance)
from .modelspace import build_basis, inner_product, kernel
from .operators import (OperatorMatrix, SymbolSpec, atto_matrix, clark_unitary,
                        compressed_shift, rank_one, standard_rank_one,
                        symbol_span_dimension)
from .rankone import (boundary_kernel_identity_check, decompose_rank_one,
                      example_4_1, example_4_1_candidates)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NEGATIVE = 3
EXIT_INDETERMINATE = 4


def parse_complex(text: str) -> complex:
    text = text.strip()
    if text.startswith("["):
        return serialize.uncpx(json.loads(text))
    return complex(text.replace("i", "j"))


def parse_blaschke(text: str) -> BlaschkeProduct:
    text = text.strip()
    if text.startswith("zn:"):
        return monomial(int(text[3:]))
    if text.startswith("z") and text[1:].isdigit():
        return monomial(int(text[1:]))
    if text.startswith("{"):
        return BlaschkeProduct.from_json(json.loads(text))
    with open(text, "r", encoding="utf-8") as fh:
        return BlaschkeProduct.from_json(json.load(fh))


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def config_tolerances(cfg: dict) -> Tolerances:
    fields = {f.name for f in dataclasses.fields(Tolerances)}
    given = cfg.get("tolerances", {})
    bad = set(given) - fields
    if bad:
        raise ValueError(f"unknown tolerance keys: {sorted(bad)}")
    for key, val in given.items():
        if float(val) <= 0:
            raise ValueError(f"tolerance {key} must be positive")
    return dataclasses.replace(DEFAULT, **{k: float(v) for k, v in given.items()})


def _resolve(cfg: dict, args, key: str, flag_value, parser, required=True):
    if flag_value is not None:
        return parser(flag_value) if isinstance(flag_value, str) else flag_value
    if key in cfg:
        raw = cfg[key]
        if isinstance(raw, str):
            return parser(raw)
        if isinstance(raw, list):
            return serialize.uncpx(raw)
        return BlaschkeProduct.from_json(raw) if key in ("alpha", "beta") else raw
    if required:
        raise ValueError(f"missing required parameter {key!r} (flag or config)")
    return None


def _emit(obj) -> None:
    sys.stdout.write(serialize.dumps(obj) + "\n")


def _basis_for(space, name, lam, tol):
    return build_basis(space, name, lam, tol=tol)


def cmd_clark(args) -> int:
    cfg = load_config(args.config)
    tol = config_tolerances(cfg)
    alpha = _resolve(cfg, args, "alpha", args.alpha, parse_blaschke)
    lam1 = _resolve(cfg, args, "lambda1", args.lam, parse_complex)
    out = {"alpha": clark_points(alpha, lam1, tol).to_json()}
    beta = _resolve(cfg, args, "beta", args.beta, parse_blaschke, required=False)
    if beta is not None:
        lam2 = _resolve(cfg, args, "lambda2", args.lam2, parse_complex)
        out["beta"] = clark_points(beta, lam2, tol).to_json()
    _emit(out)
    return EXIT_OK


def cmd_atto(args) -> int:
    cfg = load_config(args.config)
    tol = config_tolerances(cfg)
    alpha = _resolve(cfg, args, "alpha", args.alpha, parse_blaschke)
    beta = _resolve(cfg, args, "beta", args.beta, parse_blaschke)
    with open(args.symbol, "r", encoding="utf-8") as fh:
        symbol = SymbolSpec.from_json(json.load(fh))
    lam1 = _resolve(cfg, args, "lambda1", args.lam, parse_complex,
                    required=args.in_basis in ("clark", "modified-clark"))
    lam2 = _resolve(cfg, args, "lambda2", args.lam2, parse_complex,
                    required=args.out_basis in ("clark", "modified-clark"))
    mat = atto_matrix(alpha, beta, symbol,
                      _basis_for(alpha, args.in_basis, lam1, tol),
                      _basis_for(beta, args.out_basis, lam2, tol),
                      method=args.method, tol=tol)
    _emit(mat.to_json())
    return EXIT_OK


def cmd_shift(args) -> int:
    cfg = load_config(args.config)
    tol = config_tolerances(cfg)
    alpha = _resolve(cfg, args, "alpha", args.alpha, parse_blaschke)
    lam1 = _resolve(cfg, args, "lambda1", args.lam, parse_complex,
                    required=args.basis in ("clark", "modified-clark"))
    basis = _basis_for(alpha, args.basis, lam1, tol)
    if args.c is not None:
        from .operators import modified_shift
        mat = modified_shift(alpha, parse_complex(args.c), basis, tol)
    else:
        mat = compressed_shift(alpha, basis, tol)
    _emit(mat.to_json())
    return EXIT_OK


def cmd_unitary(args) -> int:
    cfg = load_config(args.config)
    tol = config_tolerances(cfg)
    alpha = _resolve(cfg, args, "alpha", args.alpha, parse_blaschke)
    lam1 = _resolve(cfg, args, "lambda1", args.lam, parse_complex)
    basis = _basis_for(alpha, args.basis, lam1, tol)
    _emit(clark_unitary(alpha, lam1, basis, tol).to_json())
    return EXIT_OK


def cmd_membership(args) -> int:
    cfg = load_config(args.config)
    tol = config_tolerances(cfg)
    with open(args.matrix, "r", encoding="utf-8") as fh:
        mat = OperatorMatrix.from_json(json.load(fh))
    lam1 = _resolve(cfg, args, "lambda1", args.lam, parse_complex, required=False)
    lam2 = _resolve(cfg, args, "lambda2", args.lam2, parse_complex, required=False)
    pairing = None
    if mat.in_basis.kind == "clark" and mat.out_basis.kind == "clark":
        pairing = clark_pairing(mat.alpha, mat.beta,
                                mat.in_basis.lam, mat.out_basis.lam, tol)
    elif lam1 is not None and lam2 is not None:
        pairing = clark_pairing(mat.alpha, mat.beta, lam1, lam2, tol)

    a = parse_complex(args.a) if args.a else 0j
    b = parse_complex(args.b) if args.b else 0j
    if args.method == "all":
        result = run_all(mat, pairing, residual_pairs=((a, b),), tol=tol)
        methods = {k: v.to_json() for k, v in result["methods"].items()}
        worst = max(v["max_residual"] for v in methods.values())
        _emit({"member": result["member"], "method": "all",
               "max_residual": worst, "methods": methods})
        return EXIT_OK if result["member"] else EXIT_NEGATIVE
    if args.method == "clark":
        if pairing is None:
            raise ValueError("clark method needs Clark bases or lambda1/lambda2")
        mat_clark = mat.in_bases(
            build_basis(mat.alpha, "clark", pairing.clark_a.lam, tol=tol),
            build_basis(mat.beta, "clark", pairing.clark_b.lam, tol=tol))
        verdict = test_clark_recurrence(mat_clark, pairing, tol)
    elif args.method == "residual":
        verdict = test_rank_two_residual(mat, a, b, tol)
    elif args.method == "conjugate":
        verdict = test_conjugate_residual(mat, a, b, tol)
    else:
        verdict = test_shift_invariance(mat, tol)
    _emit(verdict.to_json())
    return EXIT_OK if verdict.is_member else EXIT_NEGATIVE


def cmd_rankone(args) -> int:
    cfg = load_config(args.config)
    tol = config_tolerances(cfg)
    if args.example_4_1:
        a = parse_complex(args.a) if args.a else 0.5 + 0j
        alpha, beta, mat = example_4_1(a)
        dec = decompose_rank_one(mat, tol=tol)
        cands = example_4_1_candidates(a)
        _emit({"decomposition": dec.to_json(),
               "candidates": {k: serialize.cpx_seq(v) for k, v in cands.items()},
               "matrix": mat.to_json()})
        return EXIT_OK
    with open(args.matrix, "r", encoding="utf-8") as fh:
        mat = OperatorMatrix.from_json(json.load(fh))
    lam = parse_complex(args.lam) if args.lam else 1.0 + 0j
    dec = decompose_rank_one(mat, lam, tol)
    _emit(dec.to_json())
    return EXIT_OK


def cmd_dim(args) -> int:
    cfg = load_config(args.config)
    tol = config_tolerances(cfg)
    alpha = _resolve(cfg, args, "alpha", args.alpha, parse_blaschke)
    beta = _resolve(cfg, args, "beta", args.beta, parse_blaschke)
    rank, svals = symbol_span_dimension(alpha, beta, tol)
    out = {"dim": rank}
    if min(alpha.degree, beta.degree) == 1:
        out["note"] = "T = L: every linear operator carries a symbol"
    _emit(out)
    return EXIT_OK


def cmd_example_4_1(args) -> int:
    cfg = load_config(args.config)
    tol = config_tolerances(cfg)
    a = parse_complex(args.a) if args.a else 0.5 + 0j
    alpha, beta, mat = example_4_1(a)
    pairing = clark_pairing(alpha, beta, 1.0, 1.0, tol)
    verdicts = run_all(mat, pairing, tol=tol)
    dec = decompose_rank_one(mat, tol=tol)
    _emit({"alpha": alpha.to_json(), "beta": beta.to_json(),
           "matrix": mat.to_json(),
           "member": verdicts["member"],
           "methods": {k: v.to_json() for k, v in verdicts["methods"].items()},
           "decomposition": dec.to_json(),
           "candidates": {k: serialize.cpx_seq(v)
                          for k, v in example_4_1_candidates(a).items()}})
    return EXIT_OK


def _selftest_report(seed: int, trials: int, tol: Tolerances) -> dict:
    rng = np.random.default_rng(seed)
    report = {"seed": seed, "trials": trials}

    worst_circle = 0.0
    worst_reproducing = 0.0
    for _ in range(trials):
        b = random_blaschke(rng, int(rng.integers(1, 5)))
        z = random_unimodular(rng)
        worst_circle = max(worst_circle, abs(abs(b(z)) - 1.0))
        basis = build_basis(b, "tm")
        f = random_vector(rng, basis)
        w = 0.7 * np.sqrt(rng.random()) * random_unimodular(rng)
        kw = kernel(b, w)
        worst_reproducing = max(
            worst_reproducing,
            abs(inner_product(f, kw) - f(w)) / (1.0 + f.norm()))
    report["boundary_modulus_defect"] = worst_circle
    report["reproducing_defect"] = worst_reproducing

    checks = max(2, trials // 50)
    member_worst = 0.0
    nonmember_best = np.inf
    agree = True
    for _ in range(checks):
        alpha, beta, lam1, lam2 = shared_clark_instance(rng, 3, 2, int(rng.integers(0, 2)))
        pairing = clark_pairing(alpha, beta, lam1, lam2, tol)
        mem = member_matrix(rng, alpha, beta, lam1, lam2, tol)
        res = run_all(mem, pairing, tol=tol)
        agree = agree and res["member"]
        member_worst = max(member_worst,
                           max(v.max_residual for v in res["methods"].values()))
        non = perturbed_nonmember(rng, mem, pairing)
        res2 = run_all(non, pairing, tol=tol)
        agree = agree and not res2["member"]
        nonmember_best = min(nonmember_best,
                             min(v.max_residual for v in res2["methods"].values()))
        chi, psi = recover_chi_psi_clark(mem, pairing, psi1=0j, tol=tol)
        report["witness_norms"] = [chi.norm(), psi.norm()]
    report["membership_agreement"] = agree
    report["member_worst_residual"] = member_worst
    report["nonmember_best_residual"] = float(nonmember_best)

    alpha, beta, lam1, lam2 = shared_clark_instance(rng, 3, 2, 0)
    rank, _ = symbol_span_dimension(alpha, beta, tol)
    report["dimension_3_2"] = rank

    w = 0.3 + 0.1j
    sro = standard_rank_one(alpha, beta, w, "conjk-kernel")
    dec = decompose_rank_one(sro, tol=tol)
    report["rankone_roundtrip"] = {"variant": dec.variant,
                                   "w_error": abs(dec.w - w)}
    report["example_4_1"] = {
        "decomposition": decompose_rank_one(example_4_1(0.5)[2], tol=tol).to_json(),
        "candidates": {k: serialize.cpx_seq(v)
                       for k, v in example_4_1_candidates(0.5).items()}}
    return report


def cmd_selftest(args) -> int:
    cfg = load_config(args.config)
    tol = config_tolerances(cfg)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 42))
    report = _selftest_report(seed, args.trials, tol)
    _emit(report)
    ok = (report["membership_agreement"]
          and report["boundary_modulus_defect"] <= 1e-12
          and report["reproducing_defect"] <= 1e-9
          and report["dimension_3_2"] == 4)
    return EXIT_OK if ok else EXIT_INDETERMINATE


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="attokit")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="JSON config file")

    p = sub.add_parser("clark", help="Clark points and weights")
    common(p)
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--lambda2", dest="lam2")
    p.set_defaults(fn=cmd_clark)

    p = sub.add_parser("atto", help="matrix of a truncated multiplication operator")
    common(p)
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--symbol", required=True, help="SymbolSpec JSON file")
    p.add_argument("--in-basis", default="tm", dest="in_basis")
    p.add_argument("--out-basis", default="tm", dest="out_basis")
    p.add_argument("--method", default="quadrature", choices=["quadrature", "closed"])
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--lambda2", dest="lam2")
    p.set_defaults(fn=cmd_atto)

    p = sub.add_parser("shift", help="compressed (or modified) shift matrix")
    common(p)
    p.add_argument("--alpha")
    p.add_argument("--basis", default="tm")
    p.add_argument("--c", default=None, help="modified-shift coefficient")
    p.add_argument("--lambda", dest="lam")
    p.set_defaults(fn=cmd_shift)

    p = sub.add_parser("unitary", help="rank-one unitary perturbation of the shift")
    common(p)
    p.add_argument("--alpha")
    p.add_argument("--basis", default="tm")
    p.add_argument("--lambda", dest="lam")
    p.set_defaults(fn=cmd_unitary)

    p = sub.add_parser("membership", help="decide membership of a matrix")
    common(p)
    p.add_argument("--matrix", required=True, help="OperatorMatrix JSON file")
    p.add_argument("--method", default="all",
                   choices=["all", "clark", "residual", "conjugate", "shift"])
    p.add_argument("--a", default=None)
    p.add_argument("--b", default=None)
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--lambda2", dest="lam2")
    p.set_defaults(fn=cmd_membership)

    p = sub.add_parser("rankone", help="decompose a rank-one member")
    common(p)
    p.add_argument("--matrix")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--example-4-1", action="store_true", dest="example_4_1")
    p.add_argument("--a", default=None)
    p.set_defaults(fn=cmd_rankone)

    p = sub.add_parser("dim", help="dimension of the operator class")
    common(p)
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.set_defaults(fn=cmd_dim)

    p = sub.add_parser("example-4-1", help="the non-standard rank-one example")
    common(p)
    p.add_argument("--a", default=None)
    p.set_defaults(fn=cmd_example_4_1)

    p = sub.add_parser("selftest", help="seeded deterministic self-check")
    common(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(fn=cmd_selftest)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (IndeterminateError, MethodDisagreement) as exc:
        print(f"indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
