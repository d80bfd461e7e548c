"""Model closed surfaces with exact Laplacian spectra.

Two homogeneous geometries are supported, because they are the ones with
closed-form spectral data:

* round sphere of radius R:  eigenvalues k(k+1)/R^2 with multiplicity 2k+1,
  area 4 pi R^2, Euler characteristic 2;
* rectangular flat torus L1 x L2:  eigenvalues 4 pi^2 (p^2/L1^2 + q^2/L2^2)
  over integer pairs (p, q), area L1*L2, Euler characteristic 0.

Torus multiplicities are combinatorial facts (ties of the quadratic form on
the integer lattice), so the grouping of lattice points into spectral lines
is done in exact rational arithmetic on the float-valued side lengths; only
the final eigenvalue is rounded once to a float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "SurfaceModel",
    "SpectralLine",
    "make_surface",
    "parse_surface",
    "spectrum",
    "eigen_arrays",
    "first_positive_eigenvalue",
    "geodesic_distance",
]

_TWO_PI = 2.0 * math.pi
_FOUR_PI_SQ = 4.0 * math.pi**2


@dataclass(frozen=True)
class SurfaceModel:
    """Geometry record for a model surface; all lengths in one global unit."""

    kind: str                  # "sphere" | "torus"
    radius: float | None = None
    l1: float | None = None
    l2: float | None = None
    area: float = 0.0
    euler_char: int = 0

    def label(self) -> str:
        if self.kind == "sphere":
            return f"sphere:R={self.radius:g}"
        return f"torus:L1={self.l1:g},L2={self.l2:g}"


@dataclass(frozen=True)
class SpectralLine:
    eigenvalue: float
    multiplicity: int


def make_surface(kind: str, **params) -> SurfaceModel:
    """Build a surface record, validating strict positivity of parameters."""
    kind = kind.lower()
    if kind == "sphere":
        radius = params.pop("radius", params.pop("R", None))
        if params:
            raise ValueError(f"unexpected sphere parameters: {sorted(params)}")
        if radius is None:
            raise ValueError("sphere requires parameter R")
        radius = float(radius)
        if not (radius > 0.0) or not math.isfinite(radius):
            raise ValueError("R (radius) must be positive")
        return SurfaceModel(kind="sphere", radius=radius,
                            area=4.0 * math.pi * radius * radius, euler_char=2)
    if kind in ("torus", "recttorus", "rect_torus"):
        l1 = params.pop("l1", params.pop("L1", None))
        l2 = params.pop("l2", params.pop("L2", None))
        if params:
            raise ValueError(f"unexpected torus parameters: {sorted(params)}")
        if l1 is None or l2 is None:
            raise ValueError("torus requires parameters L1 and L2")
        l1, l2 = float(l1), float(l2)
        if not (l1 > 0.0) or not math.isfinite(l1):
            raise ValueError("L1 must be positive")
        if not (l2 > 0.0) or not math.isfinite(l2):
            raise ValueError("L2 must be positive")
        return SurfaceModel(kind="torus", l1=l1, l2=l2, area=l1 * l2, euler_char=0)
    raise ValueError(f"unknown surface kind: {kind!r}")


def parse_surface(spec: str) -> SurfaceModel:
    """Parse a CLI surface string: sphere:R=<float> or torus:L1=<f>,L2=<f>."""
    try:
        kind, _, rest = spec.partition(":")
        if not rest:
            raise ValueError("missing parameter list")
        params = {}
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ValueError(f"malformed parameter {item!r}")
            params[key.strip()] = float(val)
    except ValueError as exc:
        raise ValueError(f"malformed surface spec {spec!r}: {exc}") from None
    return make_surface(kind, **params)


# ----------------------------------------------------------------- spectrum

_SPECTRUM_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _sphere_lines(radius: float, lam_max: float):
    rsq = radius * radius
    lams, mults = [], []
    k = 0
    while True:
        lam = (k * (k + 1)) / rsq
        if lam > lam_max:
            break
        lams.append(lam)
        mults.append(2 * k + 1)
        k += 1
    return np.asarray(lams, dtype=float), np.asarray(mults, dtype=float)


def _torus_lines(l1: float, l2: float, lam_max: float):
    # Exact grouping: lambda(p,q) = 4 pi^2 (p^2 L2^2 + q^2 L1^2) / (L1 L2)^2.
    # Two lattice points coincide iff p^2 L2^2 + q^2 L1^2 agree exactly; with
    # L1^2, L2^2 taken as exact rationals of the stored floats this is integer
    # arithmetic on p^2*n2*d1 + q^2*n1*d2.
    n1, d1 = Fraction(l1 * l1).as_integer_ratio()
    n2, d2 = Fraction(l2 * l2).as_integer_ratio()
    w1 = n2 * d1  # weight of p^2
    w2 = n1 * d2  # weight of q^2
    nn = n1 * n2
    pmax = int(math.floor(math.sqrt(lam_max) * l1 / _TWO_PI)) + 1
    qmax = int(math.floor(math.sqrt(lam_max) * l2 / _TWO_PI)) + 1
    al = _FOUR_PI_SQ / (l1 * l1)
    be = _FOUR_PI_SQ / (l2 * l2)
    counts: dict[int, int] = {}
    for p in range(-pmax, pmax + 1):
        lp = al * p * p
        if lp > lam_max:
            continue
        kp = p * p * w1
        qlim = int(math.floor(math.sqrt(max(0.0, (lam_max - lp) / be)))) + 1
        for q in range(-qlim, qlim + 1):
            if lp + be * q * q > lam_max:
                continue
            key = kp + q * q * w2
            counts[key] = counts.get(key, 0) + 1
    keys = sorted(counts)
    lams = np.array([_FOUR_PI_SQ * (k / nn) for k in keys], dtype=float)
    mults = np.array([counts[k] for k in keys], dtype=float)
    return lams, mults


def eigen_arrays(model: SurfaceModel, lam_max: float) -> tuple[np.ndarray, np.ndarray]:
    """(eigenvalues, multiplicities) with eigenvalue <= lam_max, cached.

    The cache stores the spectrum up to the next power-of-two bucket so that
    repeated calls with growing cutoffs don't recompute from scratch.
    """
    if lam_max < 0:
        raise ValueError("lam_max must be >= 0")
    bucket = 1.0
    while bucket < lam_max:
        bucket *= 2.0
    key = (model.kind, model.radius, model.l1, model.l2, bucket)
    if key not in _SPECTRUM_CACHE:
        if model.kind == "sphere":
            _SPECTRUM_CACHE[key] = _sphere_lines(model.radius, bucket)
        else:
            _SPECTRUM_CACHE[key] = _torus_lines(model.l1, model.l2, bucket)
    lams, mults = _SPECTRUM_CACHE[key]
    n = int(np.searchsorted(lams, lam_max, side="right"))
    return lams[:n], mults[:n]


def spectrum(model: SurfaceModel, lam_max: float) -> list[SpectralLine]:
    """Ordered spectral lines (eigenvalue, multiplicity) with eigenvalue <= lam_max."""
    lams, mults = eigen_arrays(model, lam_max)
    return [SpectralLine(float(l), int(m)) for l, m in zip(lams, mults)]


def first_positive_eigenvalue(model: SurfaceModel) -> float:
    if model.kind == "sphere":
        return 2.0 / (model.radius * model.radius)
    return _FOUR_PI_SQ / max(model.l1, model.l2) ** 2


# ----------------------------------------------------------------- distance

def geodesic_distance(model: SurfaceModel, x, y) -> float:
    """Geodesic distance between two points.

    Sphere points are 3-vectors of norm R; torus points are coordinate pairs,
    reduced to the fundamental domain before minimizing over the 3x3 block of
    lattice translates.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if model.kind == "sphere":
        if x.shape != (3,) or y.shape != (3,):
            raise ValueError("sphere points must be 3-vectors")
        r = model.radius
        nx, ny = float(np.linalg.norm(x)), float(np.linalg.norm(y))
        if abs(nx - r) > 1e-8 * r or abs(ny - r) > 1e-8 * r:
            raise ValueError("sphere points must lie on the sphere (|x| = R)")
        c = float(np.dot(x, y)) / (nx * ny)
        return r * math.acos(min(1.0, max(-1.0, c)))
    if x.shape != (2,) or y.shape != (2,):
        raise ValueError("torus points must be coordinate pairs")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("torus points must be finite")
    sides = np.array([model.l1, model.l2])
    d = np.mod(x - y, sides)
    best = math.inf
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            shift = d + np.array([a, b]) * sides
            best = min(best, float(np.hypot(shift[0], shift[1])))
    return best
