"""Covariance-side quantities for C = (Laplacian + m0^2)^{-1}: the log-kernel
ordering constant gamma0, the Hilbert-Schmidt regularized determinant
det_2(1 + m1^2 C), the diagonal finite part of the Green's function, and
pointwise Green's-function oracles.

The Green's function on a surface splits as

    C(x, y) = -(1/2 pi) ln(m0 d(x, y)) + C_f(x, y) + o(1),   y -> x,

and on the homogeneous models C_f(x, x) is a constant.  Two independent
routes compute it:

* heat route: C_f = I/A + (ln(2 m0) - gamma_E)/(2 pi), where I is the
  resolvent-trace finite part from `heat.heat_integral`.  The matching
  constant is fixed by the flat-space kernel: (1/2 pi) K0(m0 r) =
  -(1/2 pi) ln(m0 r) + (1/2 pi)(ln 2 - gamma_E) + o(1).
* image route (torus only): periodizing the free kernel gives exactly
  C_f = (ln 2 - gamma_E)/(2 pi) + (1/2 pi) sum_{v != 0} K0(m0 |v|)
  over the nonzero lattice vectors v = (a L1, b L2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import k0
from .heat import heat_integral
from .sumtools import stable_sum
from .surfaces import SurfaceModel, eigen_arrays, geodesic_distance, make_surface

__all__ = [
    "Det2Result",
    "FinitePart",
    "gamma0",
    "det2",
    "cf_mean",
    "torus_cf_image_sum",
    "green_pointwise",
]

_EULER = float(np.euler_gamma)
_TWO_PI = 2.0 * math.pi
_FOUR_PI = 4.0 * math.pi
# small-z matching constant of K0: K0(z) = -ln(z/2) - gamma_E + o(1)
_FREE_SPACE_CF = (math.log(2.0) - _EULER) / _TWO_PI


def gamma0(m0: float) -> float:
    """(1/2 pi)(ln(m0/4) + gamma_E); vanishes at the bare mass 4 e^{-gamma_E}."""
    if m0 <= 0:
        raise ValueError("m0 must be positive")
    return (math.log(0.25 * m0) + _EULER) / _TWO_PI


@dataclass(frozen=True)
class Det2Result:
    log_value: float          # truncated sum plus tail correction
    lam_max: float
    tail_correction: float
    tail_bound: float
    truncated_log: float      # sum over lambda <= lam_max only

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def _weyl_fluctuation_coeff(model: SurfaceModel) -> float:
    # |N(lam) - A lam / 4 pi| <= c sqrt(lam) + 8 on the model surfaces
    if model.kind == "sphere":
        return 2.0 * model.radius
    return 0.5 * (model.l1 + model.l2)


def det2(model: SurfaceModel, m0sq: float, m1sq: float, lam_max: float = 2e5) -> Det2Result:
    """Hilbert-Schmidt regularized determinant det_2(1 + m1^2 C) in log space.

    Factors (1 + x_k) e^{-x_k} with x_k = m1^2/(m0^2 + lambda_k) all lie in
    (0, 1], so log_value <= 0.  Eigenvalues above lam_max are replaced by the
    Weyl-density integral of -x^2/2 (the tail correction), with a certified
    bound covering the x^3 term and the lattice-count fluctuation.
    """
    if m0sq <= 0:
        raise ValueError("m0sq must be positive")
    if m1sq < 0:
        raise ValueError("m1sq must be >= 0")
    if lam_max < 0:
        raise ValueError("lam_max must be >= 0")
    lams, mults = eigen_arrays(model, lam_max)
    x = m1sq / (m0sq + lams)
    truncated = stable_sum(mults * (np.log1p(x) - x))
    a_m1 = model.area / _FOUR_PI
    edge = m0sq + lam_max
    tail_correction = -0.5 * m1sq * m1sq * a_m1 / edge
    c_fluct = _weyl_fluctuation_coeff(model)
    delta_edge = c_fluct * math.sqrt(lam_max) + 8.0
    tail_bound = (
        (model.area / (24.0 * math.pi)) * m1sq ** 3 / edge ** 2      # x^3 term
        + delta_edge * 0.5 * m1sq ** 2 / edge ** 2                   # boundary count
        + c_fluct * m1sq ** 2 * (2.0 / 3.0) * max(lam_max, 1.0) ** -1.5
        + 8.0 * m1sq ** 2 * 0.5 / edge ** 2
    )
    return Det2Result(log_value=truncated + tail_correction, lam_max=lam_max,
                      tail_correction=tail_correction, tail_bound=tail_bound,
                      truncated_log=truncated)


@dataclass(frozen=True)
class FinitePart:
    gamma0: float
    cf_mean: float
    source: str  # "heat_integral" | "image_sum"


def cf_mean(model: SurfaceModel, m0sq: float) -> FinitePart:
    """Diagonal Green's-function finite part via the heat route."""
    if m0sq <= 0:
        raise ValueError("m0sq must be positive")
    m0 = math.sqrt(m0sq)
    integral = heat_integral(model, m0sq)
    value = integral.value / model.area + (math.log(2.0 * m0) - _EULER) / _TWO_PI
    return FinitePart(gamma0=gamma0(m0), cf_mean=value, source="heat_integral")


def torus_cf_image_sum(l1: float, l2: float, m0: float) -> FinitePart:
    """Diagonal finite part on the torus by the lattice Bessel image sum."""
    model = make_surface("torus", L1=l1, L2=l2)
    if m0 <= 0:
        raise ValueError("m0 must be positive")
    # K0 terms below ~1e-18 are dropped: m0 r > 44 suffices.
    nmax_a = int(44.0 / (m0 * l1)) + 1
    nmax_b = int(44.0 / (m0 * l2)) + 1
    a = np.arange(-nmax_a, nmax_a + 1, dtype=float)
    b = np.arange(-nmax_b, nmax_b + 1, dtype=float)
    ra, rb = np.meshgrid(a * l1, b * l2, indexing="ij")
    r = np.hypot(ra, rb).ravel()
    r = r[(r > 0.0) & (m0 * r < 44.0)]
    total = stable_sum(k0(m0 * np.sort(r)))
    value = _FREE_SPACE_CF + total / _TWO_PI
    return FinitePart(gamma0=gamma0(m0), cf_mean=value, source="image_sum")


# ------------------------------------------------------- pointwise diagnostics

def _legendre_series_green(model: SurfaceModel, m0: float, cos_theta: float) -> float:
    # sum_k (2k+1) P_k(cos) / (4 pi R^2 (m0^2 + k(k+1)/R^2)), accelerated by
    # repeated averaging of the oscillating partial sums.
    rsq = model.radius * model.radius
    nmax = 20000
    p_prev, p_curr = 1.0, cos_theta
    partial = 1.0 / (_FOUR_PI * rsq * m0 * m0)
    partial += 3.0 * cos_theta / (_FOUR_PI * rsq * (m0 * m0 + 2.0 / rsq))
    tail_window = []
    for k in range(2, nmax + 1):
        p_next = ((2 * k - 1) * cos_theta * p_curr - (k - 1) * p_prev) / k
        p_prev, p_curr = p_curr, p_next
        partial += (2 * k + 1) * p_curr / (_FOUR_PI * rsq * (m0 * m0 + k * (k + 1) / rsq))
        if k > nmax - 64:
            tail_window.append(partial)
    # three rounds of pairwise averaging damp the P_k oscillation
    window = np.asarray(tail_window)
    for _ in range(3):
        window = 0.5 * (window[1:] + window[:-1])
    return float(window[-1])


def green_pointwise(model: SurfaceModel, m0: float, x, y) -> float:
    """Green's function C(x, y) of Laplacian + m0^2; diagnostic accuracy.

    Torus: exact lattice K0 image sum.  Sphere: Legendre mode sum with
    averaging acceleration (needs d(x,y) away from 0 and from the antipode).
    """
    if m0 <= 0:
        raise ValueError("m0 must be positive")
    d = geodesic_distance(model, x, y)
    if model.kind == "torus":
        scale = min(model.l1, model.l2)
        if d < 1e-2 * scale:
            raise ValueError("points too close for the pointwise oracle")
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        nmax_a = int(44.0 / (m0 * model.l1)) + 2
        nmax_b = int(44.0 / (m0 * model.l2)) + 2
        a = np.arange(-nmax_a, nmax_a + 1, dtype=float)
        b = np.arange(-nmax_b, nmax_b + 1, dtype=float)
        base = np.mod(x - y, [model.l1, model.l2])
        ra, rb = np.meshgrid(base[0] + a * model.l1, base[1] + b * model.l2, indexing="ij")
        r = np.hypot(ra, rb).ravel()
        r = r[m0 * r < 44.0]
        return stable_sum(k0(m0 * np.sort(r))) / _TWO_PI
    theta = d / model.radius
    if d < 1e-2 * model.radius or (math.pi - theta) * model.radius < 1e-2 * model.radius:
        raise ValueError("points too close to coincidence or the antipodal cut")
    return _legendre_series_green(model, m0, math.cos(theta))
