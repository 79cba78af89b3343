"""Marchenko-Pastur analytics: closed-form values, branch choice, quadrature."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from spikedwide import mp
from spikedwide.errors import DomainError, ValidationError

BETAS = (0.5, 0.1, 0.01, 0.001)


class TestBulkEdges:
    def test_small_beta_limit(self):
        a, b = mp.bulk_edges(1e-12)
        assert abs(a - 1) < 3e-6 and abs(b - 1) < 3e-6

    def test_quarter(self):
        assert mp.bulk_edges(0.04) == pytest.approx((0.64, 1.44), abs=1e-14)

    def test_square(self):
        assert mp.bulk_edges(1.0) == pytest.approx((0.0, 4.0), abs=1e-14)

    def test_rejects_bad_beta(self):
        for beta in (0.0, -0.1, 1.5):
            with pytest.raises(ValidationError):
                mp.bulk_edges(beta)


class TestStieltjes:
    def test_far_field_asymptote(self):
        for beta in BETAS:
            s, _ = mp.stieltjes(1e6, beta)
            assert abs(s - (-1e-6)) / 1e-6 < 1e-5

    def test_edge_value(self):
        # At the upper edge the discriminant vanishes; s = -1/(sqrt(b)(1+sqrt(b)))
        s, _ = mp.stieltjes(2.25, 0.25)
        assert s == pytest.approx(-4.0 / 3.0, abs=1e-12)

    def test_quadratic_residual(self):
        worst = 0.0
        for beta in BETAS:
            _, b = mp.bulk_edges(beta)
            for z in np.concatenate([
                np.linspace(b + 0.01 * math.sqrt(beta), b + 10, 60),
                np.linspace(b + 0.1, b + 2, 20) + 0.3j,
                -np.linspace(0.1, 3, 10),
            ]):
                s, _ = mp.stieltjes(z, beta)
                res = abs(beta * z * s * s + (z + beta - 1) * s + 1)
                worst = max(worst, res / (1 + abs(z)))
        assert worst < 1e-12

    def test_inside_bulk_rejected(self):
        with pytest.raises(DomainError):
            mp.stieltjes(1.0, 0.25)

    def test_conjugate_symmetry(self):
        for beta in (0.3, 0.02):
            for z in (2.0 + 0.5j, 1.4 - 0.2j, 3.0 + 1e-3j):
                s, ds = mp.stieltjes(z, beta)
                sc, dsc = mp.stieltjes(np.conj(z), beta)
                assert s == pytest.approx(np.conj(sc), abs=1e-13)
                assert ds == pytest.approx(np.conj(dsc), abs=1e-13)

    def test_herglotz_property(self):
        # Transforms of measures map the upper half plane to itself.
        rng = np.random.default_rng(0)
        for _ in range(200):
            beta = rng.uniform(0.001, 1.0)
            z = complex(rng.uniform(-2, 5), rng.choice([-1, 1]) * rng.uniform(1e-6, 2))
            s, _ = mp.stieltjes(z, beta)
            assert s.imag * z.imag > 0

    def test_real_branch_signs(self):
        for beta in BETAS:
            _, b = mp.bulk_edges(beta)
            for z in np.linspace(b + 0.05 * math.sqrt(beta), b + 5, 25):
                s, ds = mp.stieltjes(z, beta)
                assert s < 0
                assert ds > 0  # calculus convention: mean of 1/(lam-z)^2

    def test_derivative_vs_finite_differences(self):
        for beta in BETAS:
            _, b = mp.bulk_edges(beta)
            h = 1e-6 * math.sqrt(beta)
            for z in (b + 0.5 * math.sqrt(beta), b + 1.0, b + 0.1):
                _, ds = mp.stieltjes(z, beta)
                sp, _ = mp.stieltjes(z + h, beta)
                sm, _ = mp.stieltjes(z - h, beta)
                assert ds == pytest.approx((sp - sm) / (2 * h), abs=1e-6)

    def test_quadrature_consistency(self):
        # s(z) equals the integral of density/(x - z) at two real points.
        for beta in (0.25, 0.04):
            a, b = mp.bulk_edges(beta)
            for z in (b + math.sqrt(beta), b + 1.0):
                s, _ = mp.stieltjes(z, beta)
                val, _ = quad(lambda x: mp.density(x, beta) / (x - z), a, b,
                              limit=200)
                assert abs(s - val) < 1e-6


class TestDTransform:
    def test_edge(self):
        assert mp.d_transform(1.44, 0.04) == pytest.approx(5.0, abs=1e-10)

    def test_known_point(self):
        assert mp.d_transform(2.02, 0.01) == pytest.approx(1.0, abs=1e-12)

    def test_vanishes_at_infinity(self):
        d = mp.d_transform(1e9, 0.2)
        assert 0 < d < 2e-9

    def test_two_form_identity(self):
        # Closed form equals beta*z*s^2 - (1-beta)*s built from the transform.
        for beta in BETAS:
            _, b = mp.bulk_edges(beta)
            for z in np.linspace(b + 0.01 * math.sqrt(beta), b + 6, 50):
                s, _ = mp.stieltjes(z, beta)
                other = beta * z * s * s - (1 - beta) * s
                assert abs(mp.d_transform(z, beta) - other) < 1e-10

    def test_monotone_decreasing_beyond_edge(self):
        for beta in BETAS:
            _, b = mp.bulk_edges(beta)
            zs = np.linspace(b + 1e-9, b + 20, 200)
            ds = [mp.d_transform(z, beta) for z in zs]
            assert all(x > y for x, y in zip(ds, ds[1:]))
            assert ds[0] < beta ** -0.5 + 1e-6

    def test_inside_bulk_rejected(self):
        with pytest.raises(DomainError):
            mp.d_transform(1.0, 0.04)


class TestDTransformInverse:
    def test_known_point(self):
        assert mp.d_transform_inverse(1.0, 0.01) == pytest.approx(2.02, abs=1e-14)

    def test_boundary_approach(self):
        beta = 0.09
        _, b = mp.bulk_edges(beta)
        z = mp.d_transform_inverse(beta ** -0.5 * (1 - 1e-9), beta)
        assert abs(z - b) < 1e-6

    def test_outlier_location(self):
        # t = 1/theta^2 with theta^2 = 0.2 lands on the predicted eigenvalue.
        assert mp.d_transform_inverse(5.0, 0.01) == pytest.approx(1.26, abs=1e-14)

    def test_domain(self):
        for t in (0.0, -1.0, 10.0 + 1e-9):
            with pytest.raises(DomainError):
                mp.d_transform_inverse(t, 0.01)

    def test_round_trip(self):
        for beta in BETAS:
            hi = beta ** -0.5
            for t in np.geomspace(0.01 * hi, 0.99 * hi, 200):
                z = mp.d_transform_inverse(t, beta)
                assert abs(mp.d_transform(z, beta) - t) < 1e-9 * t


class TestDensity:
    def test_outside_support(self):
        assert mp.density(0.5, 0.04) == 0.0
        assert mp.density(2.0, 0.04) == 0.0

    def test_interior_value(self):
        want = math.sqrt(1.25 * 0.75) / (2 * math.pi * 0.25)
        assert mp.density(1.0, 0.25) == pytest.approx(want, rel=1e-12)
        assert want == pytest.approx(0.61640, abs=1e-5)

    def test_normalization(self):
        for beta in (0.5, 0.25, 0.04):
            a, b = mp.bulk_edges(beta)
            total, _ = quad(lambda x: mp.density(x, beta), a, b, limit=200)
            assert abs(total - 1.0) < 1e-8

    def test_vectorized(self):
        x = np.array([0.0, 1.0, 3.0])
        out = mp.density(x, 0.25)
        assert out.shape == (3,)
        assert out[0] == 0.0 and out[2] == 0.0 and out[1] > 0
