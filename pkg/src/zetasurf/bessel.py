"""Self-contained modified Bessel function K0, accurate to ~1e-14 relative.

Two regimes split at z = 2:

* z <= 2: the ascending series
      K0(z) = -(ln(z/2) + gamma) I0(z) + sum_{n>=1} H_n (z^2/4)^n / (n!)^2
  whose terms are all positive, so there is no cancellation;
* z > 2: the integral representation
      K0(z) = 2 e^{-z} (2z)^{-1/2} int_0^inf e^{-w^2} (1 + w^2/(2z))^{-1/2} dw
  evaluated by Gauss-Hermite quadrature (even integrand, 96 nodes), which
  converges geometrically since the integrand's complex singularities sit at
  |w| = sqrt(2z) >= 2.
"""
from __future__ import annotations

import numpy as np

__all__ = ["k0"]

_EULER = float(np.euler_gamma)
_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(96)
_GH_NODES_SQ = _GH_NODES**2


def _k0_series(z: np.ndarray) -> np.ndarray:
    # fixed term count: at z = 2 the last term is ~1e-65, far below one ulp,
    # so the result is bit-identical regardless of batch composition
    zh = 0.25 * z * z
    term = np.ones_like(z)
    i0 = np.ones_like(z)
    hsum = np.zeros_like(z)
    hn = 0.0
    for n in range(1, 31):
        term = term * zh / (n * n)
        i0 += term
        hn += 1.0 / n
        hsum += term * hn
    return -(np.log(0.5 * z) + _EULER) * i0 + hsum


def _k0_integral(z: np.ndarray) -> np.ndarray:
    # rows: z values; columns: quadrature nodes; the axis-1 reduction keeps a
    # fixed pairwise order, so values do not depend on the batch size
    g = (1.0 + _GH_NODES_SQ[None, :] / (2.0 * z[:, None])) ** -0.5
    half = 0.5 * np.sum(g * _GH_WEIGHTS, axis=1)
    return 2.0 * np.exp(-z) / np.sqrt(2.0 * z) * half


def k0(z):
    """K0(z) for z > 0 (scalar or array)."""
    arr = np.asarray(z, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("k0 requires z > 0")
    out = np.empty_like(arr)
    small = arr <= 2.0
    if np.any(small):
        out[small] = _k0_series(arr[small])
    if np.any(~small):
        big = arr[~small]
        vals = np.zeros_like(big)
        live = big < 700.0  # e^{-z} underflows beyond; K0 < 1e-300 there
        if np.any(live):
            vals[live] = _k0_integral(big[live])
        out[~small] = vals
    return float(out[0]) if scalar else out
