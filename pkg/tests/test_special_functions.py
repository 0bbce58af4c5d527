"""Tests for the Jacobi theta functions and layer image kernels."""

import math

import numpy as np
import pytest

from mlheat.special_functions import eta_kernel, theta3, theta3_dz, theta3_dzz


def _theta3_image(z, q):
    # Poisson-dual (image/Gaussian) representation of theta3, used as an
    # independent oracle: with q = exp(-pi^2 s) and z = pi a / 2,
    # theta3(z, q) = (1/sqrt(pi s)) sum_n exp(-(a + 2n)^2 / (4 s))
    s = -math.log(q) / math.pi**2
    a = 2.0 * z / math.pi
    total = 0.0
    for n in range(-200, 201):
        total += math.exp(-((a + 2.0 * n) ** 2) / (4.0 * s))
    return total / math.sqrt(math.pi * s)


class TestTheta3:
    def test_q_zero_is_one(self):
        assert theta3(0.7, 0.0) == 1.0
        assert theta3(0.0, 0.0) == 1.0

    def test_point_values(self):
        # truncated series by hand: 1 + 2 sum q^(n^2) cos(2nz)
        assert abs(theta3(math.pi / 2.0, 0.1) - 0.8002000) < 1e-6
        assert abs(theta3(0.0, 0.1) - 1.2002000) < 1e-6

    def test_even_and_periodic(self):
        zs = np.linspace(-3.0, 3.0, 41)
        for q in (0.05, 0.3, 0.9):
            v = theta3(zs, q)
            assert np.max(np.abs(v - theta3(-zs, q))) <= 1e-14
            assert np.max(np.abs(v - theta3(zs + 2.0 * math.pi, q))) <= 1e-13

    def test_poisson_duality(self):
        # series form vs Gaussian-image form across the whole nome range
        for q in np.linspace(0.01, 0.99, 50):
            for z in (0.0, 0.3, 1.1, math.pi / 2.0):
                a = theta3(z, q)
                b = _theta3_image(z, q)
                assert abs(a - b) <= 1e-10 * max(1.0, abs(b))

    def test_array_arguments_broadcast(self):
        zs = np.linspace(0.0, 1.0, 5)
        qs = np.array([0.1, 0.5])
        v = theta3(zs[:, None], qs[None, :])
        assert v.shape == (5, 2)
        for i, z in enumerate(zs):
            for j, q in enumerate(qs):
                assert v[i, j] == pytest.approx(theta3(float(z), float(q)), rel=1e-14)

    def test_invalid_nome(self):
        with pytest.raises(ValueError):
            theta3(0.0, 1.0)
        with pytest.raises(ValueError):
            theta3(0.0, -0.1)
        with pytest.raises(ValueError):
            theta3(0.0, float("nan"))
        with pytest.raises(ValueError):
            theta3(float("inf"), 0.5)


class TestTheta3Derivatives:
    def test_dz_point_values(self):
        assert theta3_dz(0.0, 0.5) == 0.0
        assert abs(theta3_dz(math.pi / 2.0, 0.5)) <= 1e-14
        assert abs(theta3_dz(math.pi / 4.0, 0.1) - (-0.4)) < 1e-6

    def test_dz_matches_finite_difference(self):
        h = 1e-5
        for q in (0.1, 0.5, 0.9):
            for z in (0.2, 0.9, 2.0):
                fd = (theta3(z + h, q) - theta3(z - h, q)) / (2.0 * h)
                assert abs(theta3_dz(z, q) - fd) <= 1e-8 * max(1.0, abs(fd))

    def test_dzz_point_values(self):
        assert theta3_dzz(0.3, 0.0) == 0.0
        assert abs(theta3_dzz(0.0, 0.1) - (-0.8032)) < 1e-4
        assert abs(theta3_dzz(math.pi / 2.0, 0.1) - 0.7968) < 1e-4

    def test_dzz_matches_finite_difference_of_dz(self):
        h = 1e-5
        for q in (0.1, 0.6):
            for z in (0.1, 1.3):
                fd = (theta3_dz(z + h, q) - theta3_dz(z - h, q)) / (2.0 * h)
                assert abs(theta3_dzz(z, q) - fd) <= 1e-7

    def test_dz_odd(self):
        zs = np.linspace(0.1, 2.0, 9)
        assert np.max(np.abs(theta3_dz(zs, 0.4) + theta3_dz(-zs, 0.4))) <= 1e-14


class TestEtaKernel:
    def test_small_dt_even_limit(self):
        # as dt -> 0 only the n=0 image survives: eta_even ~ 1/(sigma sqrt(pi dt))
        dt, sigma = 1e-6, 0.5
        v = eta_kernel(dt, 1.0, sigma, "even")
        assert v * sigma * math.sqrt(math.pi * dt) == pytest.approx(1.0, rel=1e-12)

    def test_small_dt_odd_vanishes(self):
        assert eta_kernel(1e-6, 1.0, 0.5, "odd") == 0.0

    def test_large_dt_limits(self):
        # nome -> 0: theta3(0, q) and theta3(pi/2, q) both -> 1, so both
        # kernels approach the equilibrium density 1/l
        assert eta_kernel(50.0, 1.0, 0.5, "even") == pytest.approx(1.0, rel=1e-12)
        assert eta_kernel(50.0, 1.0, 0.5, "odd") == pytest.approx(1.0, rel=1e-12)

    def test_image_theta_agreement_across_switch(self):
        # evaluate both representations explicitly on both sides of the
        # regime switch and compare against eta_kernel
        l, sigma = 1.0, 0.5
        for dt in np.linspace(0.3, 3.0, 25):
            v = eta_kernel(dt, l, sigma, "even")
            img = sum(
                math.exp(-((2.0 * n * l) ** 2) / (4.0 * sigma**2 * dt))
                for n in range(-60, 61)
            ) / (sigma * math.sqrt(math.pi * dt))
            q = math.exp(-math.pi**2 * sigma**2 * dt / l**2)
            tht = theta3(0.0, q) / l
            assert v == pytest.approx(img, rel=1e-12)
            assert v == pytest.approx(tht, rel=1e-12)

    def test_odd_agreement_across_switch(self):
        l, sigma = 0.7, 0.9
        for dt in np.linspace(0.1, 2.0, 25):
            v = eta_kernel(dt, l, sigma, "odd")
            img = sum(
                math.exp(-(((2.0 * n + 1.0) * l) ** 2) / (4.0 * sigma**2 * dt))
                for n in range(-60, 60)
            ) / (sigma * math.sqrt(math.pi * dt))
            assert v == pytest.approx(img, rel=1e-11, abs=1e-300)

    def test_validation(self):
        with pytest.raises(ValueError):
            eta_kernel(0.0, 1.0, 0.5, "even")
        with pytest.raises(ValueError):
            eta_kernel(1.0, -1.0, 0.5, "even")
        with pytest.raises(ValueError):
            eta_kernel(1.0, 1.0, 0.0, "even")
        with pytest.raises(ValueError):
            eta_kernel(1.0, 1.0, 0.5, "mixed")
