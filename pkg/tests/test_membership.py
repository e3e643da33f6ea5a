import numpy as np
import pytest

from attokit.blaschke import clark_points, evaluate, monomial
from attokit.config import DEFAULT
from attokit.instances import (constrained_entries, member_matrix,
                               perturbed_nonmember, random_blaschke,
                               random_symbol, random_unimodular,
                               shared_clark_instance)
from attokit.membership import (IndeterminateError, MembershipVerdict,
                                clark_pairing, match_clark_points,
                                recover_chi_psi_clark, run_all,
                                shift_domain_basis)
from attokit.membership import test_clark_recurrence as check_recurrence
from attokit.membership import test_conjugate_residual as check_conjugate
from attokit.membership import test_rank_two_residual as check_residual
from attokit.membership import test_shift_invariance as check_shift
from attokit.modelspace import (ModelVector, build_basis, conj_kernel,
                                inner_product, kernel, tm_vector)
from attokit.operators import (OperatorMatrix, SymbolSpec, atto_matrix,
                               clark_coefficient, clark_unitary,
                               compressed_shift, rank_one)


def clark_member(rng, m, n, shared, seed_symbols=1):
    alpha, beta, lam1, lam2 = shared_clark_instance(rng, m, n, shared)
    pairing = clark_pairing(alpha, beta, lam1, lam2)
    mat = member_matrix(rng, alpha, beta, lam1, lam2)
    return alpha, beta, lam1, lam2, pairing, mat


class TestMatching:
    def test_roots_of_unity_intersection(self):
        ca = clark_points(monomial(2), 1.0)
        cb = clark_points(monomial(3), 1.0)
        pairing = match_clark_points(ca, cb)
        assert pairing.shared == 1
        assert pairing.eta[0] == pytest.approx(1.0)
        assert pairing.zeta[0] == pytest.approx(1.0)

    def test_identical_spaces_share_everything(self):
        ca = clark_points(monomial(2), 1.0)
        pairing = match_clark_points(ca, ca)
        assert pairing.shared == 2

    def test_different_parameters_share_nothing(self):
        ca = clark_points(monomial(2), 1.0)
        cb = clark_points(monomial(2), 1j)
        assert match_clark_points(ca, cb).shared == 0

    def test_engineered_share_counts(self, rng):
        for (m, n, l) in [(3, 2, 1), (3, 2, 2), (4, 3, 2), (3, 3, 3)]:
            alpha, beta, lam1, lam2 = shared_clark_instance(rng, m, n, l)
            assert clark_pairing(alpha, beta, lam1, lam2).shared == l

    def test_shared_points_lead_in_both_orders(self, rng):
        alpha, beta, lam1, lam2 = shared_clark_instance(rng, 4, 3, 2)
        pairing = clark_pairing(alpha, beta, lam1, lam2)
        assert np.max(np.abs(pairing.eta[:2] - pairing.zeta[:2])) <= DEFAULT.match


class TestClarkRecurrence:
    def test_member_passes_generic(self, rng):
        *_, pairing, mat = clark_member(rng, 3, 2, 0)
        verdict = check_recurrence(mat, pairing)
        assert verdict.is_member and verdict.max_residual <= 1e-8

    def test_perturbed_entry_fails(self, rng):
        *_, pairing, mat = clark_member(rng, 3, 2, 0)
        bad = perturbed_nonmember(rng, mat, pairing)
        verdict = check_recurrence(bad, pairing)
        assert not verdict.is_member
        assert verdict.max_residual >= 1e-4

    def test_symmetric_toeplitz_sanity(self):
        # alpha = beta = z^2, same parameter: compressed shift passes with l = 2
        b = monomial(2)
        pairing = clark_pairing(b, b, 1.0, 1.0)
        cb = build_basis(b, "clark", 1.0)
        mat = compressed_shift(b, cb)
        assert check_recurrence(mat, pairing).is_member

    def test_requires_clark_bases(self, rng):
        alpha, beta, lam1, lam2 = shared_clark_instance(rng, 3, 2, 0)
        pairing = clark_pairing(alpha, beta, lam1, lam2)
        mat = atto_matrix(alpha, beta, random_symbol(rng, alpha, beta))
        with pytest.raises(ValueError):
            check_recurrence(mat, pairing)

    def test_shared_instances(self, rng):
        for (m, n, l) in [(3, 2, 1), (3, 3, 2), (4, 3, 3)]:
            *_, pairing, mat = clark_member(rng, m, n, l)
            assert check_recurrence(mat, pairing).is_member
            bad = perturbed_nonmember(rng, mat, pairing)
            assert not check_recurrence(bad, pairing).is_member


class TestRankTwoResidual:
    def test_member_for_default_and_clark_coefficients(self, rng):
        alpha, beta, lam1, lam2, pairing, mat = clark_member(rng, 3, 2, 0)
        v0 = check_residual(mat)
        assert v0.is_member and v0.witness is not None
        a1 = clark_coefficient(alpha, lam1)
        b1 = clark_coefficient(beta, lam2)
        v1 = check_residual(mat, a1, b1)
        assert v1.is_member

    def test_generic_rank_one_outside(self, rng):
        # cross Clark vectors, degrees (3, 2): generic rank-one is not a member
        alpha, beta, lam1, lam2 = shared_clark_instance(rng, 3, 2, 0)
        ca = build_basis(alpha, "clark", lam1)
        cb = build_basis(beta, "clark", lam2)
        g = ModelVector(cb, np.eye(2)[0])
        f = ModelVector(ca, np.eye(3)[0])
        mat = rank_one(g, f)
        verdict = check_residual(mat)
        pairing = clark_pairing(alpha, beta, lam1, lam2)
        cross = check_recurrence(mat.in_bases(ca, cb), pairing)
        assert not verdict.is_member and not cross.is_member

    def test_witness_reconstructs_residual(self, rng):
        alpha, beta, *_, mat = clark_member(rng, 3, 2, 0)
        a, b = 0.3 - 0.2j, 1.1j
        verdict = check_residual(mat, a, b)
        from attokit.operators import modified_shift
        d = (mat.tm_entries()
             - modified_shift(beta, b).entries @ mat.tm_entries()
             @ modified_shift(alpha, a).entries.conj().T)
        k0a = kernel(alpha, 0.0).tm()
        k0b = kernel(beta, 0.0).tm()
        w = verdict.witness
        rec = np.outer(w.psi.tm(), np.conj(k0a)) + np.outer(k0b, np.conj(w.chi.tm()))
        assert np.max(np.abs(d - rec)) <= 1e-9 * (1 + np.max(np.abs(d)))
        # normalization: psi orthogonal to the kernel at 0
        assert abs(inner_product(w.psi, kernel(beta, 0.0))) <= 1e-10

    def test_choice_independence(self, rng):
        *_, pairing, mat = clark_member(rng, 3, 2, 1)
        bad = perturbed_nonmember(rng, mat, pairing)
        for _ in range(10):
            a = complex(rng.standard_normal() + 1j * rng.standard_normal())
            b = complex(rng.standard_normal() + 1j * rng.standard_normal())
            assert check_residual(mat, a, b).is_member
            assert not check_residual(bad, a, b).is_member


class TestConjugateResidual:
    def test_agrees_with_plain_residual(self, rng):
        for _ in range(25):
            m = int(rng.integers(2, 5))
            n = int(rng.integers(2, 5))
            l = int(rng.integers(0, min(m, n) + 1))
            *_, pairing, mat = clark_member(rng, m, n, l)
            probe = mat if rng.random() < 0.5 else perturbed_nonmember(rng, mat, pairing)
            assert (check_conjugate(probe).is_member
                    == check_residual(probe).is_member)

    def test_zero_operator_member_with_zero_witness(self, rng):
        alpha = random_blaschke(rng, 3)
        beta = random_blaschke(rng, 2)
        mat = OperatorMatrix(np.zeros((2, 3)), build_basis(alpha, "tm"),
                             build_basis(beta, "tm"))
        verdict = check_conjugate(mat)
        assert verdict.is_member
        assert verdict.witness.chi.norm() <= 1e-12
        assert verdict.witness.psi.norm() <= 1e-12

    def test_example_counterexample_is_member(self):
        from attokit.rankone import example_4_1
        _, _, mat = example_4_1(0.5)
        assert check_conjugate(mat).is_member


class TestShiftInvariance:
    def test_domain_characterization(self, rng):
        for _ in range(20):
            b = random_blaschke(rng, int(rng.integers(2, 6)))
            for f in shift_domain_basis(b):
                assert abs(inner_product(f, conj_kernel(b, 0.0))) <= 1e-10

    def test_compressed_shift_is_member(self, rng):
        b = random_blaschke(rng, 4)
        assert check_shift(compressed_shift(b)).is_member

    def test_member_and_perturbation(self, rng):
        *_, pairing, mat = clark_member(rng, 3, 3, 1)
        assert check_shift(mat).is_member
        bad = perturbed_nonmember(rng, mat, pairing)
        assert not check_shift(bad).is_member


class TestEquivalenceSuite:
    def test_three_way_equivalence(self, rng):
        for _ in range(10):
            m = int(rng.integers(2, 5))
            n = int(rng.integers(2, 5))
            l = int(rng.integers(0, min(m, n) + 1))
            *_, pairing, mat = clark_member(rng, m, n, l)
            res = run_all(mat, pairing)
            assert res["member"]
            bad = perturbed_nonmember(rng, mat, pairing)
            res2 = run_all(bad, pairing)
            assert not res2["member"]

    def test_verdict_invariant_under_basis_change(self, rng):
        alpha, beta, lam1, lam2, pairing, mat = clark_member(rng, 3, 2, 0)
        other = mat.in_bases(build_basis(alpha, "modified-clark", lam1),
                             build_basis(beta, "tm"))
        assert check_residual(other).is_member == check_residual(mat).is_member
        bad = perturbed_nonmember(rng, mat, pairing)
        bad_other = bad.in_bases(build_basis(alpha, "kernel-zeros"),
                                 build_basis(beta, "tm"))
        assert not check_residual(bad_other).is_member

    def test_kernel_at_zero_constant_on_clark_points(self, rng):
        for _ in range(20):
            b = random_blaschke(rng, int(rng.integers(1, 6)))
            lam = random_unimodular(rng)
            cp = clark_points(b, lam)
            vals = kernel(b, 0.0)(cp.points)
            expect = 1.0 - np.conj(evaluate(b, 0.0)) * cp.target
            assert np.max(np.abs(vals - expect)) <= 1e-10

    def test_tolerance_breakdown_on_near_collision(self, rng):
        # two cross points 1e-9 apart: too far to match at match-tol 1e-12,
        # too close for stable recurrence denominators at the default tol
        import dataclasses
        from attokit.blaschke import clark_points
        from attokit.instances import (blaschke_through_points,
                                       lambda_for_target,
                                       separated_boundary_points)
        from attokit.membership import ToleranceBreakdown
        pts = separated_boundary_points(rng, 5, min_angle=0.4)
        alpha = blaschke_through_points(pts[:3], 1.0)
        beta = blaschke_through_points(np.array([pts[0] * np.exp(1e-9j), pts[3], pts[4]]), 1.0)
        lam1 = lambda_for_target(alpha, 1.0)
        lam2 = lambda_for_target(beta, 1.0)
        tight = dataclasses.replace(DEFAULT, match=1e-12)
        pairing = clark_pairing(alpha, beta, lam1, lam2, tight)
        assert pairing.shared == 0
        mat = member_matrix(rng, alpha, beta, lam1, lam2)
        with pytest.raises(ToleranceBreakdown):
            check_recurrence(mat, pairing, DEFAULT)

    def test_ambiguous_match_raises(self):
        # one point of one set within match-tol of two points of the other
        import dataclasses
        from attokit.blaschke import ClarkPointSet
        ca = ClarkPointSet(1.0, 1.0, np.array([1.0 + 0j, -1.0 + 0j]), np.ones(2))
        cb = ClarkPointSet(1.0, 1.0,
                           np.array([np.exp(1e-8j), np.exp(-1e-8j), -1.0 + 0j]),
                           np.ones(3))
        loose = dataclasses.replace(DEFAULT, match=1e-6)
        with pytest.raises(ValueError, match="ambiguous"):
            match_clark_points(ca, cb, loose)

    def test_indeterminate_band_raises(self, rng):
        *_, pairing, mat = clark_member(rng, 3, 2, 0)
        entries = mat.entries.copy()
        s, p = constrained_entries(3, 2, 0)[0]
        entries[pairing.perm_b[s], pairing.perm_a[p]] += 3e-6 * (1 + mat.max_abs)
        shady = OperatorMatrix(entries, mat.in_basis, mat.out_basis)
        with pytest.raises(IndeterminateError):
            check_recurrence(shady, pairing)

    def test_trivial_class_when_one_space_is_a_line(self, rng):
        alpha = random_blaschke(rng, 1)
        beta = random_blaschke(rng, 3)
        for _ in range(10):
            entries = rng.standard_normal((3, 1)) + 1j * rng.standard_normal((3, 1))
            mat = OperatorMatrix(entries, build_basis(alpha, "tm"),
                                 build_basis(beta, "tm"))
            res = run_all(mat, clark_pairing(alpha, beta, 1.0, 1.0))
            assert res["member"]


class TestWitnessRecovery:
    def test_zero_operator(self):
        b = monomial(2)
        pairing = clark_pairing(b, b, 1.0, 1.0)
        cb = build_basis(b, "clark", 1.0)
        zero = OperatorMatrix(np.zeros((2, 2)), cb, cb)
        chi, psi = recover_chi_psi_clark(zero, pairing, psi1=0.0)
        assert chi.norm() <= 1e-12 and psi.norm() <= 1e-12

    def test_compressed_shift_hand_solution(self):
        # alpha = beta = z^2, lam = 1, psi1 = 0: chi = 1 - z, psi = z - 1
        b = monomial(2)
        pairing = clark_pairing(b, b, 1.0, 1.0)
        cb = build_basis(b, "clark", 1.0)
        mat = compressed_shift(b, cb)
        assert np.allclose(mat.entries, [[0.5, 0.5], [-0.5, -0.5]], atol=1e-12)
        chi, psi = recover_chi_psi_clark(mat, pairing, psi1=0.0)
        assert np.allclose(chi.tm(), [1.0, -1.0], atol=1e-10)
        assert np.allclose(psi.tm(), [-1.0, 1.0], atol=1e-10)

    def test_reconstructs_clark_residual(self, rng):
        for _ in range(10):
            m = int(rng.integers(2, 5))
            n = int(rng.integers(2, 5))
            l = int(rng.integers(0, min(m, n) + 1))
            alpha, beta, lam1, lam2, pairing, mat = clark_member(rng, m, n, l)
            ua = clark_unitary(alpha, lam1).entries
            ub = clark_unitary(beta, lam2).entries
            mtm = mat.tm_entries()
            d = mtm - ub @ mtm @ ua.conj().T
            for psi1 in (0.0, 0.5 - 0.25j):
                chi, psi = recover_chi_psi_clark(mat, pairing, psi1=psi1)
                rec = (np.outer(psi.tm(), np.conj(kernel(alpha, 0.0).tm()))
                       + np.outer(kernel(beta, 0.0).tm(), np.conj(chi.tm())))
                assert np.max(np.abs(d - rec)) <= 1e-8 * (1 + np.max(np.abs(d)))

    def test_rejects_nonmember(self, rng):
        *_, pairing, mat = clark_member(rng, 3, 2, 0)
        bad = perturbed_nonmember(rng, mat, pairing)
        with pytest.raises(ValueError):
            recover_chi_psi_clark(bad, pairing)
