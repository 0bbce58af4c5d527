"""Tests for the closed-form constant-coefficient strip Green's function."""

import numpy as np
import pytest

from mlheat.analytic import StripProblem, strip_green
from mlheat.fd import FdGrid, fd_solve
from mlheat.layered import GreensProblem, LayeredMedium


def table1_problem(x0=0.0):
    return StripProblem(y0=-1.0, yN=1.0, sigma=0.5, x0=x0, T=1.0)


class TestStripGreen:
    def test_boundary_values_are_zero(self):
        p = table1_problem(0.3)
        assert strip_green(p, -1.0) == pytest.approx(0.0, abs=1e-15)
        assert strip_green(p, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_center_point_value(self):
        # independent image-series evaluation at x = x0 = 0 gives ~0.5436
        v = strip_green(table1_problem(0.0), 0.0)
        assert abs(v - 0.5436) < 1e-4

    def test_source_field_symmetry(self):
        # u(T; x, x0) = u(T; x0, x)
        a = strip_green(table1_problem(-0.2), 0.3)
        b = strip_green(table1_problem(0.3), -0.2)
        assert a == pytest.approx(b, rel=1e-12)

    def test_outside_strip_rejected(self):
        p = table1_problem(0.0)
        with pytest.raises(ValueError):
            strip_green(p, 1.5)
        with pytest.raises(ValueError):
            StripProblem(y0=-1.0, yN=1.0, sigma=0.5, x0=2.0, T=1.0)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            StripProblem(y0=1.0, yN=-1.0, sigma=0.5, x0=0.0, T=1.0)
        with pytest.raises(ValueError):
            StripProblem(y0=-1.0, yN=1.0, sigma=-0.5, x0=0.0, T=1.0)
        with pytest.raises(ValueError):
            StripProblem(y0=-1.0, yN=1.0, sigma=0.5, x0=0.0, T=0.0)


class TestAgainstFineFd:
    def test_matches_fine_finite_differences(self):
        # a 401 x 400 Crank-Nicolson solve agrees to 0.2% of the peak
        p = table1_problem(0.05)
        med = LayeredMedium.uniform(-1.0, 1.0, np.array([0.5]))
        prob = GreensProblem(medium=med, x0=0.05, T=1.0)
        grid = FdGrid.for_problem(prob, 401, 400)
        fd = fd_solve(prob, grid)
        exact = np.array([strip_green(p, x) for x in grid.xs])
        peak = exact.max()
        assert np.max(np.abs(fd.values - exact)) <= 0.002 * peak


class TestConservation:
    def test_short_time_mass(self):
        # for T -> 0 almost no mass has left through the boundaries
        p = StripProblem(y0=-1.0, yN=1.0, sigma=0.5, x0=0.1, T=1e-4)
        xs = np.linspace(-1.0, 1.0, 2001)
        u = np.array([strip_green(p, x) for x in xs])
        mass = np.trapezoid(u, xs)
        assert 0.999 <= mass <= 1.0 + 1e-9

    def test_nonnegative(self):
        p = table1_problem(0.3)
        xs = np.linspace(-1.0, 1.0, 201)
        u = np.array([strip_green(p, x) for x in xs])
        assert np.min(u) >= -1e-14
