"""Jacobi theta functions and the dual-series layer kernels.

The third Jacobi theta function

    theta3(z, q) = 1 + 2 sum_{n>=1} q^(n^2) cos(2 n z),   0 <= q < 1,

and its first two z-derivatives are evaluated by direct summation with
adaptive truncation.  The layer kernels ``eta_even`` / ``eta_odd`` admit two
complementary series (Gaussian images and theta form, related by Poisson
summation); we pick whichever converges faster.
"""

import math

import numpy as np

# Truncation: stop once the next term bound drops below REL_TOL times the
# running sum.  Both series converge super-geometrically, so the hard cap
# is never reached for valid arguments.
MAX_TERMS = 10_000
REL_TOL = 1e-16

# Nome at which the image series and the theta series converge at the same
# rate: q = exp(-pi).  Below it the image series wins.
NOME_SWITCH = math.exp(-math.pi)


def _check_args(z, q):
    z = np.asarray(z, dtype=float)
    q = np.asarray(q, dtype=float)
    if not np.all(np.isfinite(q)):
        raise ValueError("nome q must be finite")
    if np.any(q < 0.0) or np.any(q >= 1.0):
        raise ValueError("nome q must lie in [0, 1)")
    if not np.all(np.isfinite(z)):
        raise ValueError("phase z must be finite")
    return z, q


def _scalar_or_array(total, z, q):
    if np.ndim(z) == 0 and np.ndim(q) == 0:
        return float(total)
    return total


def theta3(z, q):
    """Third Jacobi theta function theta3(z, q).

    Parameters
    ----------
    z : float or ndarray
        Phase in radians.
    q : float or ndarray
        Nome(s), 0 <= q < 1; broadcast against ``z``.

    Returns
    -------
    float or ndarray
    """
    z, q = _check_args(z, q)
    qmax = float(np.max(q, initial=0.0))
    total = np.ones(np.broadcast_shapes(z.shape, q.shape))
    if qmax > 0.0:
        for n in range(1, MAX_TERMS + 1):
            total = total + 2.0 * q ** (n * n) * np.cos(2.0 * n * z)
            # the next term is bounded by 2 q^((n+1)^2)
            if 2.0 * qmax ** ((n + 1) ** 2) < REL_TOL * np.max(np.abs(total)):
                break
    return _scalar_or_array(total, z, q)


def theta3_dz(z, q):
    """d/dz of theta3: -4 sum_{n>=1} n q^(n^2) sin(2 n z)."""
    z, q = _check_args(z, q)
    qmax = float(np.max(q, initial=0.0))
    total = np.zeros(np.broadcast_shapes(z.shape, q.shape))
    if qmax > 0.0:
        scale = 1.0
        for n in range(1, MAX_TERMS + 1):
            total = total - 4.0 * n * q ** (n * n) * np.sin(2.0 * n * z)
            scale = max(scale, np.max(np.abs(total)))
            if 4.0 * (n + 1) * qmax ** ((n + 1) ** 2) < REL_TOL * scale:
                break
    return _scalar_or_array(total, z, q)


def theta3_dzz(z, q):
    """d^2/dz^2 of theta3: -8 sum_{n>=1} n^2 q^(n^2) cos(2 n z)."""
    z, q = _check_args(z, q)
    qmax = float(np.max(q, initial=0.0))
    total = np.zeros(np.broadcast_shapes(z.shape, q.shape))
    if qmax > 0.0:
        scale = 1.0
        for n in range(1, MAX_TERMS + 1):
            total = total - 8.0 * n * n * q ** (n * n) * np.cos(2.0 * n * z)
            scale = max(scale, np.max(np.abs(total)))
            if 8.0 * (n + 1) ** 2 * qmax ** ((n + 1) ** 2) < REL_TOL * scale:
                break
    return _scalar_or_array(total, z, q)


def _eta_image(dt, l, sigma, parity):
    # sum of Gaussian images: (sigma sqrt(pi dt))^-1 sum_n exp(-(k l)^2 / (4 sigma^2 dt))
    # with k = 2n (even) or k = 2n+1 (odd).
    pref = 1.0 / (sigma * math.sqrt(math.pi * dt))
    denom = 4.0 * sigma * sigma * dt
    if parity == "even":
        total = 1.0  # n = 0 image
        for n in range(1, MAX_TERMS + 1):
            term = 2.0 * math.exp(-(2.0 * n * l) ** 2 / denom)
            total += term
            if term < REL_TOL * total:
                break
    else:
        total = 0.0
        for n in range(0, MAX_TERMS + 1):
            term = 2.0 * math.exp(-((2.0 * n + 1.0) * l) ** 2 / denom)
            total += term
            if term != 0.0 and term < REL_TOL * abs(total):
                break
            if term == 0.0:
                break
    return pref * total


def eta_kernel(dt, l, sigma, parity):
    """Layer kernel eta_even / eta_odd for a strip of width ``l``.

    eta_even(dt) = (sigma sqrt(pi dt))^-1 sum_n exp(-(2 n l)^2 / (4 sigma^2 dt))
    eta_odd(dt)  = same with images at (2n+1) l.

    Evaluated via the image series for small ``dt`` and via the equivalent
    theta-series form ``theta3(0 or pi/2, q) / l`` with
    q = exp(-pi^2 sigma^2 dt / l^2) for large ``dt``.
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    if not (np.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be positive and finite, got {dt}")
    if not (np.isfinite(l) and l > 0.0):
        raise ValueError(f"layer width l must be positive, got {l}")
    if not (np.isfinite(sigma) and sigma > 0.0):
        raise ValueError(f"sigma must be positive, got {sigma}")

    q = math.exp(-math.pi ** 2 * sigma ** 2 * dt / l ** 2)
    if q > NOME_SWITCH:
        # nome close to 1 (small dt): the Gaussian image series converges fast
        return _eta_image(dt, l, sigma, parity)
    z = 0.0 if parity == "even" else math.pi / 2.0
    return theta3(z, q) / l
