"""Truncated Gaussian free field in mode space and Monte Carlo verification
of the change-of-mass measure identity.

A field truncated at lambda <= Lambda is a vector of independent centered
Gaussians, one coefficient per eigenfunction, with Var(phi_k) = 1/(m^2 +
lambda_k).  At fixed truncation the reweighting identity

    E_{m0}[ exp(-m1^2/2 * W_C) ] = prod_{lambda <= Lambda}
        ((1 + m1^2/(m0^2 + lambda)) e^{-m1^2/(m0^2 + lambda)})^{-1/2}

with W_C = sum_k (phi_k^2 - 1/(m0^2 + lambda_k)) is an exact
finite-dimensional Gaussian integral, so the Monte Carlo estimate must agree
with the closed-form product within statistical error.

Reproducibility contract: every chunk of samples draws from a counter-based
Philox stream keyed by (seed, chunk index), and chunk statistics are reduced
in chunk order, so results are bit-identical for a fixed (seed, chunk size)
regardless of how many workers evaluate the chunks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .green import cf_mean
from .sumtools import stable_sum
from .surfaces import SurfaceModel, eigen_arrays

__all__ = [
    "FieldSample",
    "MCEstimate",
    "sample_fields",
    "wick_mass_term",
    "smoothed_wick",
    "verify_measure_identity",
    "reweighted_mode_variance",
]


@dataclass(frozen=True)
class FieldSample:
    coeffs: np.ndarray        # one Gaussian coefficient per mode
    lambdas: np.ndarray       # eigenvalue of each mode (multiplicity-expanded)
    msq: float
    model: SurfaceModel
    seed: int
    stream_index: int         # chunk index within the (seed)-keyed stream


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n_samples: int
    target: float
    z_score: float


def _mode_lambdas(model: SurfaceModel, lam_max: float) -> np.ndarray:
    lams, mults = eigen_arrays(model, lam_max)
    if lams.size < 2:
        raise ValueError("lam_max must cover at least 2 spectral lines")
    return np.repeat(lams, mults.astype(int))


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, chunk_index))))


def sample_fields(model: SurfaceModel, msq: float, lam_max: float, seed: int, n: int,
                  chunk_size: int = 65536):
    """Yield n independent truncated-field samples (deterministic in seed)."""
    if msq <= 0:
        raise ValueError("msq must be positive (the zero mode has infinite "
                         "variance in the massless measure)")
    if n < 1:
        raise ValueError("n must be >= 1")
    lambdas = _mode_lambdas(model, lam_max)
    std = 1.0 / np.sqrt(msq + lambdas)
    produced = 0
    chunk_index = 0
    while produced < n:
        take = min(chunk_size, n - produced)
        rng = _chunk_rng(seed, chunk_index)
        block = rng.standard_normal((take, lambdas.size)) * std
        for row in block:
            yield FieldSample(coeffs=row, lambdas=lambdas, msq=msq, model=model,
                              seed=seed, stream_index=chunk_index)
        produced += take
        chunk_index += 1


def wick_mass_term(sample: FieldSample, m0sq: float, ordering: str = "C") -> float:
    """Wick-ordered squared field, summed over the truncated modes.

    ordering "C": subtract the per-mode variance 1/(m0^2 + lambda).
    ordering "C0": additionally add A * C_f(m0), the diagonal finite part
    times the area (the log-kernel ordering constant).
    """
    if ordering not in ("C", "C0"):
        raise ValueError("ordering must be 'C' or 'C0'")
    if m0sq <= 0:
        raise ValueError("m0sq must be positive")
    w = stable_sum(sample.coeffs ** 2 - 1.0 / (m0sq + sample.lambdas))
    if ordering == "C0":
        w += sample.model.area * cf_mean(sample.model, m0sq).cf_mean
    return w


def smoothed_wick(sample: FieldSample, m0sq: float, t: float) -> float:
    """Heat-smoothed Wick square: sum e^{-2 t lambda} (phi^2 - 1/(m0^2+lambda))."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if m0sq <= 0:
        raise ValueError("m0sq must be positive")
    damp = np.exp(-2.0 * t * sample.lambdas)
    return stable_sum(damp * (sample.coeffs ** 2 - 1.0 / (m0sq + sample.lambdas)))


# ----------------------------------------------------------- MC verification

def _chunk_plan(n: int, chunk_size: int):
    full, rem = divmod(n, chunk_size)
    sizes = [chunk_size] * full + ([rem] if rem else [])
    return list(enumerate(sizes))


def _measure_chunk_stats(model, m0sq, m1sq, lambdas, seed, idx, size, mode):
    rng = _chunk_rng(seed, idx)
    std = 1.0 / np.sqrt(m0sq + lambdas)
    block = rng.standard_normal((size, lambdas.size)) * std
    counter = 1.0 / (m0sq + lambdas)
    logw = -0.5 * m1sq * ((block ** 2).sum(axis=1) - counter.sum())
    shift = float(np.max(logw))
    e = np.exp(logw - shift)
    phi2 = block[:, mode] ** 2
    return {
        "shift": shift,
        "s_w": float(np.sum(e)),
        "s_w2": float(np.sum(e * e)),
        "s_a": float(np.sum(e * phi2)),          # w * phi^2
        "s_a2": float(np.sum((e * phi2) ** 2)),
        "s_ab": float(np.sum(e * e * phi2)),     # (w phi^2) * w
    }


def _collect_stats(model, m0, m1, lam_max, n, seed, chunk_size, threads, mode):
    m0sq, m1sq = m0 * m0, m1 * m1
    lambdas = _mode_lambdas(model, lam_max)
    plan = _chunk_plan(n, chunk_size)
    worker = lambda item: _measure_chunk_stats(
        model, m0sq, m1sq, lambdas, seed, item[0], item[1], mode)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            stats = list(pool.map(worker, plan))
    else:
        stats = [worker(item) for item in plan]
    big = max(st["shift"] for st in stats)
    scale1 = [math.exp(st["shift"] - big) for st in stats]
    scale2 = [math.exp(2.0 * (st["shift"] - big)) for st in stats]
    sums = {
        "w": math.fsum(c * st["s_w"] for c, st in zip(scale1, stats)),
        "w2": math.fsum(c * st["s_w2"] for c, st in zip(scale2, stats)),
        "a": math.fsum(c * st["s_a"] for c, st in zip(scale1, stats)),
        "a2": math.fsum(c * st["s_a2"] for c, st in zip(scale2, stats)),
        "ab": math.fsum(c * st["s_ab"] for c, st in zip(scale2, stats)),
    }
    return lambdas, big, sums


def _truncated_product_target(m0sq: float, m1sq: float, lambdas: np.ndarray) -> float:
    x = m1sq / (m0sq + lambdas)
    return math.exp(-0.5 * stable_sum(np.log1p(x) - x))


def verify_measure_identity(model: SurfaceModel, m0: float, m1: float, lam_max: float,
                            n: int, seed: int, chunk_size: int = 65536,
                            threads: int | None = None) -> MCEstimate:
    """MC estimate of E[exp(-m1^2 W_C / 2)] against the exact truncated product."""
    if m0 <= 0:
        raise ValueError("m0 must be positive")
    if m1 < 0:
        raise ValueError("m1 must be >= 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    lambdas, shift, sums = _collect_stats(model, m0, m1, lam_max, n, seed,
                                          chunk_size, threads, mode=0)
    mean = math.exp(shift) * sums["w"] / n
    second = math.exp(2.0 * shift) * sums["w2"]
    var = max(0.0, (second - n * mean * mean) / max(1, n - 1))
    stderr = math.sqrt(var / n)
    target = _truncated_product_target(m0 * m0, m1 * m1, lambdas)
    z = 0.0 if stderr == 0.0 else (mean - target) / stderr
    return MCEstimate(mean=mean, stderr=stderr, n_samples=n, target=target, z_score=z)


def reweighted_mode_variance(model: SurfaceModel, m0: float, m1: float, lam_max: float,
                             n: int, seed: int, mode: int = 0,
                             chunk_size: int = 65536,
                             threads: int | None = None) -> MCEstimate:
    """Reweighted second moment E[w phi_mode^2]/E[w] vs 1/(m0^2 + m1^2 + lambda)."""
    lambdas, shift, sums = _collect_stats(model, m0, m1, lam_max, n, seed,
                                          chunk_size, threads, mode=mode)
    mu_b = sums["w"] / n
    mu_a = sums["a"] / n
    ratio = mu_a / mu_b
    # delta method on the ratio of means (the e^shift scales cancel)
    var_a = max(0.0, sums["a2"] / n - mu_a ** 2)
    var_b = max(0.0, sums["w2"] / n - mu_b ** 2)
    cov = sums["ab"] / n - mu_a * mu_b
    var_r = (var_a - 2.0 * ratio * cov + ratio ** 2 * var_b) / (mu_b ** 2)
    stderr = math.sqrt(max(0.0, var_r) / n)
    target = 1.0 / (m0 * m0 + m1 * m1 + float(lambdas[mode]))
    z = 0.0 if stderr == 0.0 else (ratio - target) / stderr
    return MCEstimate(mean=ratio, stderr=stderr, n_samples=n, target=target, z_score=z)
