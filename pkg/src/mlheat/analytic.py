"""Closed-form Green's function of the constant-coefficient strip problem."""

import math
from dataclasses import dataclass

import numpy as np

from .special_functions import theta3


@dataclass(frozen=True)
class StripProblem:
    """Dirichlet strip [y0, yN] with constant diffusion and a Dirac source."""

    y0: float
    yN: float
    sigma: float
    x0: float
    T: float

    def __post_init__(self):
        if not self.y0 < self.x0 < self.yN:
            raise ValueError(
                f"source x0={self.x0} must lie strictly inside ({self.y0}, {self.yN})"
            )
        if not (np.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not (np.isfinite(self.T) and self.T > 0.0):
            raise ValueError(f"horizon T must be positive, got {self.T}")


def strip_green(problem, x):
    """Green's function of the strip at time T, via the theta-series form.

    u(T, x) = (1/2l) [theta3(pi(x - x0)/2l, q) - theta3(pi(x + x0 - 2 y0)/2l, q)]
    with l = yN - y0 and q = exp(-pi^2 sigma^2 T / l^2).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < problem.y0) or np.any(x > problem.yN):
        raise ValueError("evaluation point outside the strip")
    l = problem.yN - problem.y0
    q = math.exp(-math.pi ** 2 * problem.sigma ** 2 * problem.T / l ** 2)
    direct = theta3(np.pi * (x - problem.x0) / (2.0 * l), q)
    image = theta3(np.pi * (x + problem.x0 - 2.0 * problem.y0) / (2.0 * l), q)
    return (direct - image) / (2.0 * l)
