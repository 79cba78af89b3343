"""Empirical spectra: covariance, singular triples, Stieltjes sums, overlaps."""

import math

import numpy as np
import pytest

from spikedwide.ensemble import stream
from spikedwide.errors import NumericalError, PoleError, ValidationError
from spikedwide.spectra import (
    empirical_stieltjes,
    overlap_matrix,
    right_projection_energy,
    sample_covariance,
    top_spectrum,
)

SEED = 20260808


class TestSampleCovariance:
    def test_zero(self):
        assert np.array_equal(sample_covariance(np.zeros((3, 5))), np.zeros((3, 3)))

    def test_row_vector(self):
        assert sample_covariance(np.ones((1, 4))) == pytest.approx(np.array([[1.0]]))

    def test_against_triple_loop(self):
        x = stream(SEED, "noise").standard_normal((3, 5))
        s = sample_covariance(x)
        brute = np.zeros((3, 3))
        for i in range(3):
            for j in range(3):
                for k in range(5):
                    brute[i, j] += x[i, k] * x[j, k] / 5
        assert np.abs(s - brute).max() < 1e-12

    def test_exactly_symmetric(self):
        x = stream(SEED, "noise").standard_normal((6, 9))
        s = sample_covariance(x)
        assert np.array_equal(s, s.T)


class TestTopSpectrum:
    def test_diagonal(self):
        spec = top_spectrum(np.diag([3.0, 2.0]), 2)
        assert spec.eigenvalues == pytest.approx([4.5, 2.0], abs=1e-12)
        assert np.abs(np.abs(spec.left_vectors) - np.eye(2)).max() < 1e-12
        # sign canonicalization makes the vectors exactly the standard basis
        assert spec.left_vectors[0, 0] > 0 and spec.left_vectors[1, 1] > 0

    def test_rank_one(self):
        rng = stream(SEED, "signal")
        u = rng.standard_normal(5); u /= np.linalg.norm(u)
        v = rng.standard_normal(8); v /= np.linalg.norm(v)
        x = math.sqrt(8) * 2.0 * np.outer(u, v)
        spec = top_spectrum(x, 1)
        assert spec.eigenvalues[0] == pytest.approx(4.0, abs=1e-10)
        assert abs(abs(spec.left_vectors[:, 0] @ u) - 1) < 1e-10

    def test_eigenvalues_against_characteristic_polynomial(self):
        x = stream(SEED, "noise").standard_normal((4, 6))
        spec = top_spectrum(x, 2)
        roots = np.sort(np.real(np.roots(np.poly(sample_covariance(x)))))[::-1]
        assert np.abs(spec.eigenvalues - roots).max() < 1e-8

    def test_svd_consistency(self):
        x = stream(SEED, "noise").standard_normal((8, 20))
        spec = top_spectrum(x, 8)
        sing = np.linalg.svd(x / math.sqrt(20), compute_uv=False)
        assert np.abs(spec.eigenvalues - sing ** 2).max() < 1e-8 * sing[0] ** 2

    def test_trace_identity(self):
        x = stream(SEED, "noise").standard_normal((10, 25))
        spec = top_spectrum(x, 3)
        tr = np.trace(sample_covariance(x))
        assert abs(spec.eigenvalues.sum() - tr) < 1e-10 * tr

    def test_unit_norms_and_triple_consistency(self):
        x = stream(SEED, "noise").standard_normal((10, 25))
        spec = top_spectrum(x, 5)
        assert np.abs(np.linalg.norm(spec.left_vectors, axis=0) - 1).max() < 1e-10
        assert np.abs(np.linalg.norm(spec.right_vectors, axis=0) - 1).max() < 1e-10
        for j in range(5):
            sigma = math.sqrt(spec.eigenvalues[j])
            resid = x @ spec.right_vectors[:, j] / math.sqrt(25) - sigma * spec.left_vectors[:, j]
            assert np.abs(resid).max() < 1e-10

    def test_k_validation(self):
        x = np.eye(3)
        for k in (0, 4):
            with pytest.raises(ValidationError):
                top_spectrum(x, k)


class TestEmpiricalStieltjes:
    def test_single_eigenvalue(self):
        s, ds = empirical_stieltjes([1.0], 2.0)
        assert s == -1.0 and ds == 1.0

    def test_identity_spectrum_at_zero(self):
        s, ds = empirical_stieltjes(np.ones(7), 0.0)
        assert s == 1.0 and ds == 1.0

    def test_extended_precision_oracle(self):
        lam = stream(SEED, "noise").uniform(0.5, 3.0, size=50)
        z = 5.0 + 0.1j
        s, ds = empirical_stieltjes(lam, z)
        acc = np.clongdouble(0); dacc = np.clongdouble(0)
        for v in lam:
            term = 1.0 / (np.clongdouble(v) - np.clongdouble(z))
            acc += term
            dacc += term * term
        assert abs(s - complex(acc / 50)) < 1e-12
        assert abs(ds - complex(dacc / 50)) < 1e-12

    def test_pole(self):
        with pytest.raises(PoleError):
            empirical_stieltjes([1.0, 2.0], 2.0 + 1e-16)

    def test_conjugate_symmetry(self):
        lam = stream(SEED, "noise").uniform(0.5, 3.0, size=9)
        z = 1.7 + 0.4j
        s, _ = empirical_stieltjes(lam, z)
        sc, _ = empirical_stieltjes(lam, np.conj(z))
        assert s == pytest.approx(np.conj(sc), abs=1e-14)

    def test_real_branch_signs(self):
        lam = stream(SEED, "noise").uniform(0.5, 3.0, size=9)
        s, ds = empirical_stieltjes(lam, lam.max() + 1.0)
        assert s < 0 and ds > 0


class TestOverlapMatrix:
    def test_identity_block(self):
        q = np.linalg.qr(stream(SEED, "signal").standard_normal((7, 3)))[0]
        assert np.abs(overlap_matrix(q, q) - np.eye(3)).max() < 1e-12

    def test_orthogonal_columns(self):
        q = np.linalg.qr(stream(SEED, "signal").standard_normal((7, 4)))[0]
        assert np.abs(overlap_matrix(q[:, :2], q[:, 2:])).max() < 1e-12

    def test_against_brute_force(self):
        rng = stream(SEED, "noise")
        a = rng.standard_normal((6, 2)); b = rng.standard_normal((6, 3))
        got = overlap_matrix(a, b)
        for i in range(2):
            for j in range(3):
                assert abs(got[i, j] - np.dot(a[:, i], b[:, j])) < 1e-14

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            overlap_matrix(np.zeros((5, 2)), np.zeros((6, 2)))


class TestRightProjectionEnergy:
    def test_row_space_vector(self):
        x = stream(SEED, "noise").standard_normal((4, 9))
        v = x.T @ np.array([0.3, -1.0, 0.2, 0.5])
        v /= np.linalg.norm(v)
        assert right_projection_energy(x, v) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal_vector(self):
        x = stream(SEED, "noise").standard_normal((4, 9))
        g = stream(SEED, "probe").standard_normal(9)
        # remove row-space component
        q = np.linalg.qr(x.T)[0]
        v = g - q @ (q.T @ g)
        v /= np.linalg.norm(v)
        assert right_projection_energy(x, v) < 1e-12

    def test_matches_svd_oracle(self):
        x = stream(SEED, "noise").standard_normal((5, 12))
        v = stream(SEED, "probe").standard_normal(12)
        want = np.linalg.norm(np.linalg.svd(x, full_matrices=False)[2] @ v) ** 2
        assert right_projection_energy(x, v) == pytest.approx(want, rel=1e-10)

    def test_gaussian_concentration(self):
        # value approximately beta = n/m; all of 40 seeds inside [0.002, 0.05]
        hits = 0
        for seed in range(40):
            x = stream(seed, "noise").standard_normal((50, 5000))
            v = stream(seed, "probe").standard_normal(5000)
            v /= np.linalg.norm(v)
            hits += 0.002 <= right_projection_energy(x, v) <= 0.05
        assert hits >= 40 * 0.99

    def test_bounded_by_norm(self):
        x = stream(SEED, "noise").standard_normal((6, 30))
        v = stream(SEED, "probe").standard_normal(30) * 2.0
        e = right_projection_energy(x, v)
        assert 0.0 <= e <= np.dot(v, v) + 1e-12

    def test_rank_deficient_rejected(self):
        x = stream(SEED, "noise").standard_normal((4, 9))
        x[3] = x[0] + x[1]
        with pytest.raises(NumericalError):
            right_projection_energy(x, np.ones(9))
