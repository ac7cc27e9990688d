import numpy as np
import pytest

from speccert import HermitianOperator, check_nonresonant, sample_nonresonant
from speccert.operators import ControlHamiltonian
from conftest import make_family


def family_with_fixed_spectrum(diag_entries):
    """Controls act as zero matrices, freezing the spectrum at the drift's."""
    n = len(diag_entries)
    return make_family(
        np.diag(np.asarray(diag_entries, dtype=float)),
        [np.zeros((n, n)), np.zeros((n, n))],
        [[-1, 1], [-1, 1]],
    )


class TestCheckNonresonant:
    def test_distinct_gaps_pass(self):
        # gaps of {0,1,3} are {1,2,3}; closest pair differs by 1
        H = family_with_fixed_spectrum([0.0, 1.0, 3.0])
        report = check_nonresonant(H, [0.0, 0.0])
        assert report.passed
        assert report.simple
        assert report.min_gap_separation == pytest.approx(1.0)

    def test_equally_spaced_fails(self):
        H = family_with_fixed_spectrum([0.0, 1.0, 2.0])
        report = check_nonresonant(H, [0.0, 0.0])
        assert not report.passed
        assert report.min_gap_separation == pytest.approx(0.0, abs=1e-12)

    def test_two_levels_vacuous(self, two_level_cone):
        report = check_nonresonant(two_level_cone, [0.3, 0.4])
        assert report.passed
        assert report.min_gap_separation == np.inf

    def test_degenerate_point_fails_simplicity(self, two_level_cone):
        report = check_nonresonant(two_level_cone, [0.0, 0.0])
        assert not report.simple
        assert not report.passed

    def test_small_perturbation_keeps_distinct_gaps(self):
        rng = np.random.default_rng(17)
        a = rng.standard_normal((3, 3))
        b = rng.standard_normal((3, 3))
        H = make_family(
            np.diag([0.0, 1.0, 3.0]),
            [0.01 * (a + a.T), 0.01 * (b + b.T)],
            [[-1, 1], [-1, 1]],
        )
        assert check_nonresonant(H, [0.0, 0.0]).passed

    def test_frame_independent(self, three_level_chain):
        # the decision uses eigenvalues only; recomputing must agree exactly
        r1 = check_nonresonant(three_level_chain, [0.2, 0.1])
        r2 = check_nonresonant(three_level_chain, [0.2, 0.1])
        assert r1.min_gap_separation == r2.min_gap_separation
        assert r1.passed == r2.passed

    def test_scaling_covariance(self, three_level_chain):
        s = 3.7
        scaled = ControlHamiltonian(
            drift=HermitianOperator(s * three_level_chain.drift.matrix),
            controlled=tuple(
                HermitianOperator(s * h.matrix) for h in three_level_chain.controlled
            ),
            box=three_level_chain.box,
        )
        rng = np.random.default_rng(23)
        for _ in range(25):
            u = rng.uniform(-0.5, 0.5, 2)
            base = check_nonresonant(three_level_chain, u)
            big = check_nonresonant(scaled, u)
            assert big.min_gap_separation == pytest.approx(
                s * base.min_gap_separation, rel=1e-9
            )
            assert big.passed == base.passed


class TestSampleNonresonant:
    def test_two_level_found_immediately(self, two_level_cone):
        out = sample_nonresonant(two_level_cone, budget=20, rng_seed=1)
        assert out.found
        assert out.acceptance_rate > 0.9  # only u = 0 is degenerate

    def test_generic_family_found(self, three_level_chain):
        out = sample_nonresonant(three_level_chain, budget=50, rng_seed=1)
        assert out.found
        assert out.report.passed

    def test_frozen_equally_spaced_not_found(self):
        H = family_with_fixed_spectrum([0.0, 1.0, 2.0])
        out = sample_nonresonant(H, budget=30, rng_seed=1)
        assert not out.found
        assert out.acceptance_rate == 0.0
        assert out.tried == 30

    def test_deterministic_for_fixed_seed(self, three_level_chain):
        a = sample_nonresonant(three_level_chain, budget=25, rng_seed=7)
        b = sample_nonresonant(three_level_chain, budget=25, rng_seed=7)
        assert np.array_equal(a.report.u_bar, b.report.u_bar)

    def test_report_json(self, three_level_chain):
        out = sample_nonresonant(three_level_chain, budget=25, rng_seed=7)
        doc = out.to_json_dict()
        assert doc["found"]
        assert "acceptance_rate" in doc
        assert "min_gap_separation" in doc["report"]
        assert "rational independence" in doc["report"]["certified_property"]
