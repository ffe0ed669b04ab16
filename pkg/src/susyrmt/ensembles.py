r"""Monte Carlo oracle: Gaussian and circular ensembles and their statistics.

Ensemble conventions (weights refer to the matrix-element density):

=========== ====================================== ============== =====
class       matrix                                  weight         beta
=========== ====================================== ============== =====
GOE         real symmetric ``N x N``               exp(-tr H^2/2)   1
GUE         Hermitean ``N x N``                    exp(-tr H^2)     2
GSE         self-dual Hermitean ``2N x 2N``        exp(-2 tr H^2)   4
COE         symmetric unitary ``U^T U``            Haar-induced     1
CUE         unitary ``N x N``                      Haar             2
CSE         self-dual unitary ``U^D U``            Haar-induced     4
=========== ====================================== ============== =====

i.e. the Gaussian classes carry ``P(H) ~ exp(-beta tr H^2 / 2)`` with the
trace taken in the defining (for beta=4: ``2N``-dimensional) representation.
With this normalization the mean level density has support
``|x| <= sqrt(2 N / gamma)`` (``gamma = 1`` for beta=1,2 and ``2`` for
beta=4) and equals twice the imaginary part of the saddle point of the
self-consistent resolvent equation divided by pi; see
:func:`semicircle_density`.

Haar sampling uses QR orthonormalization of a Gaussian matrix with the phase
of the R diagonal divided out; plain orthonormalization alone is biased
toward the real axis and is not used.

GSE/CSE spectra are doubly degenerate by construction; batches store the
collapsed (distinct) levels together with a flag recording that the
degeneracy was verified numerically.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "EnsembleSpec",
    "SpectrumBatch",
    "CorrelationEstimate",
    "UnfoldingMap",
    "StatisticsError",
    "UnfoldingError",
    "sample",
    "estimate_R1",
    "resolvent_R1",
    "unfold",
    "local_statistics",
    "spacing_histogram",
    "y2_estimate",
    "zk_direct",
    "semicircle_edge",
    "semicircle_density",
    "semicircle_cdf",
    "sine_kernel_y2",
    "wigner_surmise",
    "ks_distance",
    "BatchCache",
]

GAUSSIAN_CLASSES = {"GOE": 1, "GUE": 2, "GSE": 4}
CIRCULAR_CLASSES = {"COE": 1, "CUE": 2, "CSE": 4}


class StatisticsError(RuntimeError):
    """Monte Carlo estimate failed a requested accuracy."""


class UnfoldingError(RuntimeError):
    """An unfolding map failed its monotonicity requirement."""


@dataclass(frozen=True)
class EnsembleSpec:
    """Symmetry class, dimension, seed and sample count."""

    ensemble: str
    N: int
    seed: int
    samples: int

    def __post_init__(self):
        if self.ensemble not in {**GAUSSIAN_CLASSES, **CIRCULAR_CLASSES}:
            raise ValueError(f"unknown ensemble {self.ensemble!r}")
        if self.N < 1 or self.samples < 1:
            raise ValueError("need N >= 1 and samples >= 1")

    @property
    def beta(self) -> int:
        return {**GAUSSIAN_CLASSES, **CIRCULAR_CLASSES}[self.ensemble]

    @property
    def gamma(self) -> int:
        return 2 if self.beta == 4 else 1

    @property
    def circular(self) -> bool:
        return self.ensemble in CIRCULAR_CLASSES

    def to_json(self) -> str:
        return json.dumps(
            {"ensemble": self.ensemble, "N": self.N, "seed": self.seed,
             "samples": self.samples},
            sort_keys=True,
        )


@dataclass
class SpectrumBatch:
    """Sorted eigenvalues (or eigenphases) per sample plus metadata."""

    spec: EnsembleSpec
    levels: np.ndarray          # shape (samples, n_levels)
    is_phases: bool
    degeneracy_verified: bool | None = None
    unfolded: bool = False
    window: tuple | None = None  # fixed analysis window on the unfolded scale

    @property
    def n_levels(self) -> int:
        return self.levels.shape[1]


@dataclass
class CorrelationEstimate:
    """Binned estimator with standard errors."""

    kind: str                  # "R1" | "spacing" | "Y2"
    grid: np.ndarray           # bin centers
    values: np.ndarray
    stderr: np.ndarray
    metadata: dict = field(default_factory=dict)

    def warn_flags(self) -> list[str]:
        flags = list(self.metadata.get("warnings", []))
        return flags


@dataclass
class UnfoldingMap:
    """Strictly monotone map to unit local mean spacing."""

    method: str                         # "semicircle-cdf" | "polynomial-fit"
    degree: int = 7
    keep_fraction: float = 0.8
    coefficients: np.ndarray | None = None


# -- sampling -----------------------------------------------------------------


def _gaussian_matrix(rng, spec: EnsembleSpec) -> np.ndarray:
    N = spec.N
    if spec.ensemble == "GOE":
        a = rng.standard_normal((N, N))
        return (a + a.T) / 2.0
    if spec.ensemble == "GUE":
        a = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2.0)
        return (a + a.conj().T) / 2.0
    # GSE in the 2N representation: H = [[P, Q], [Q^dag, P^T]],
    # P Hermitean, Q antisymmetric, element variance 1/8 from exp(-2 tr H^2)
    a = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    p = (a + a.conj().T) / math.sqrt(32.0)
    bqq = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    q = (bqq - bqq.T) / math.sqrt(32.0)
    top = np.concatenate([p, q], axis=1)
    bot = np.concatenate([q.conj().T, p.T], axis=1)
    return np.concatenate([top, bot], axis=0)


def _haar_unitary(rng, n: int) -> np.ndarray:
    a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(a)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _circular_matrix(rng, spec: EnsembleSpec) -> np.ndarray:
    N = spec.N
    if spec.ensemble == "CUE":
        return _haar_unitary(rng, N)
    if spec.ensemble == "COE":
        u = _haar_unitary(rng, N)
        return u.T @ u
    # CSE: S = U^D U with U Haar on U(2N), U^D = J U^T J^T
    u = _haar_unitary(rng, 2 * N)
    j = np.zeros((2 * N, 2 * N))
    j[:N, N:] = np.eye(N)
    j[N:, :N] = -np.eye(N)
    return (j @ u.T @ j.T) @ u


def sample(spec: EnsembleSpec, chunk_size: int = 256) -> SpectrumBatch:
    """Draw the batch and return sorted spectra (phases for circular classes).

    Sampling is partitioned into chunks with independent child streams spawned
    from the master seed, so the result is reproducible bit-for-bit and the
    chunk loop could run in parallel without changing the output.
    """
    n_levels = spec.N
    mem = spec.samples * (2 * spec.N if spec.ensemble in ("GSE",) else spec.N) * 16
    if mem > 2e9:
        raise MemoryError("batch exceeds the memory budget; reduce samples or N")
    out = np.empty((spec.samples, n_levels))
    n_chunks = (spec.samples + chunk_size - 1) // chunk_size
    children = np.random.SeedSequence(spec.seed).spawn(n_chunks)
    deg_ok = True if spec.ensemble in ("GSE", "CSE") else None
    row = 0
    for chunk in range(n_chunks):
        rng = np.random.default_rng(children[chunk])
        count = min(chunk_size, spec.samples - row)
        for i in range(count):
            if spec.circular:
                mat = _circular_matrix(rng, spec)
                lev = np.sort(np.angle(np.linalg.eigvals(mat)))
            else:
                lev = np.linalg.eigvalsh(_gaussian_matrix(rng, spec))
            if spec.ensemble in ("GSE", "CSE"):
                pairs = lev.reshape(-1, 2)
                if np.max(np.abs(pairs[:, 0] - pairs[:, 1])) > 1e-8:
                    deg_ok = False
                lev = pairs.mean(axis=1)
            out[row + i] = lev
        row += count
    return SpectrumBatch(spec, out, is_phases=spec.circular,
                         degeneracy_verified=deg_ok)


# -- analytic reference curves -------------------------------------------------


def semicircle_edge(N: int, gamma: int = 1) -> float:
    return math.sqrt(2.0 * N / gamma)


def semicircle_density(x, N: int, gamma: int = 1):
    """Mean level density for the Gaussian classes above.

    The saddle point ``s0`` of the resolvent self-consistency equation obeys
    ``s0 (x - s0) = N / (2 gamma)`` while the full resolvent trace is
    ``G = 2 s0``; hence the density is ``Im G / pi = (2 / pi) Im s0`` (checked
    against the second-moment convention of the samplers).  Total mass is N.
    """
    x = np.asarray(x, dtype=float)
    r2 = 2.0 * N / gamma - x * x
    dens = np.where(r2 > 0, np.sqrt(np.maximum(r2, 0.0)) / math.pi, 0.0) * gamma
    return dens


def semicircle_cdf(x, N: int, gamma: int = 1):
    """Integrated density (counting function) of :func:`semicircle_density`."""
    r = semicircle_edge(N, gamma)
    x = np.clip(np.asarray(x, dtype=float), -r, r)
    inner = x * np.sqrt(r * r - x * x) + r * r * (np.arcsin(x / r) + math.pi / 2.0)
    return gamma * inner / (2.0 * math.pi)


def sine_kernel_y2(xi):
    """Unitary-class two-level cluster function ``(sin pi xi / pi xi)^2``.

    Frozen reference curve; rederived by an independent large-N circular
    ensemble run in the test suite before being trusted (see
    tests/test_ensembles.py).
    """
    xi = np.asarray(xi, dtype=float)
    out = np.ones_like(xi)
    nz = xi != 0
    out[nz] = (np.sin(math.pi * xi[nz]) / (math.pi * xi[nz])) ** 2
    return out


def wigner_surmise(s, beta: int = 2):
    s = np.asarray(s, dtype=float)
    if beta == 1:
        return (math.pi / 2.0) * s * np.exp(-math.pi * s * s / 4.0)
    if beta == 2:
        return (32.0 / math.pi**2) * s * s * np.exp(-4.0 * s * s / math.pi)
    if beta == 4:
        return (2.0**18 / (3.0**6 * math.pi**3)) * s**4 * np.exp(-64.0 * s * s / (9.0 * math.pi))
    raise ValueError("beta must be 1, 2 or 4")


# -- estimators ----------------------------------------------------------------


def _fd_bins(data: np.ndarray) -> int:
    iqr = np.subtract(*np.percentile(data, [75, 25]))
    if iqr <= 0:
        return 32
    width = 2.0 * iqr / len(data) ** (1.0 / 3.0)
    return max(8, int(math.ceil((data.max() - data.min()) / width)))


def estimate_R1(batch: SpectrumBatch, bins=None) -> CorrelationEstimate:
    """Histogram estimate of the one-point function with Poisson errors.

    Normalized so that the integral over the grid equals the number of levels
    per sample (N for Gaussian classes).
    """
    data = batch.levels.ravel()
    if bins is None:
        bins = _fd_bins(data)
    counts, edges = np.histogram(data, bins=bins)
    widths = np.diff(edges)
    centers = (edges[:-1] + edges[1:]) / 2.0
    samples = batch.levels.shape[0]
    values = counts / (samples * widths)
    stderr = np.sqrt(np.maximum(counts, 1.0)) / (samples * widths)
    integral = float(np.sum(values * widths))
    return CorrelationEstimate(
        "R1", centers, values, stderr,
        metadata={
            "spec": batch.spec.to_json(),
            "binning": "freedman-diaconis" if isinstance(bins, int) else "explicit",
            "integral": integral,
        },
    )


def resolvent_R1(batch: SpectrumBatch, x: float, eps) -> float | np.ndarray:
    """Monte Carlo average of ``Im tr (x - i eps - H)^-1 / pi``.

    ``eps`` may be a sequence; a linear fit in eps is extrapolated to 0 and
    returned last in that case.
    """
    lam = batch.levels
    def smeared(e):
        return float(np.mean(np.sum(e / ((x - lam) ** 2 + e * e), axis=1)) / math.pi)
    if np.isscalar(eps):
        return smeared(float(eps))
    eps = np.asarray(eps, dtype=float)
    vals = np.array([smeared(e) for e in eps])
    slope, intercept = np.polyfit(eps, vals, 1)
    return np.append(vals, intercept)


def unfold(batch: SpectrumBatch, mapping: UnfoldingMap | None = None) -> SpectrumBatch:
    """Map spectra to unit mean spacing, keeping the central window.

    Default is the analytic semicircle counting function for Gaussian classes
    and the trivial linear map for circular classes (constant density); the
    polynomial fallback fits the pooled empirical counting function and
    refuses non-monotone fits.
    """
    spec = batch.spec
    if mapping is None:
        mapping = UnfoldingMap("linear" if batch.is_phases else "semicircle-cdf")
    lev = batch.levels
    if mapping.method == "linear" or batch.is_phases:
        scaled = (lev + math.pi) * (spec.N / (2.0 * math.pi))
    elif mapping.method == "semicircle-cdf":
        scaled = semicircle_cdf(lev, spec.N, spec.gamma)
    elif mapping.method == "polynomial-fit":
        pooled = np.sort(lev.ravel())
        # empirical per-sample counting function
        counts = np.arange(1, pooled.size + 1) / batch.levels.shape[0]
        coeff = np.polyfit(pooled, counts, mapping.degree)
        deriv = np.polyder(coeff)
        grid = np.linspace(pooled[0], pooled[-1], 512)
        if np.any(np.polyval(deriv, grid) <= 0):
            raise UnfoldingError("fitted counting function is not monotone")
        scaled = np.polyval(coeff, lev)
        mapping.coefficients = coeff
    else:
        raise ValueError(f"unknown unfolding method {mapping.method!r}")
    keep = mapping.keep_fraction
    n = scaled.shape[1]
    lo = int(math.floor(n * (1.0 - keep) / 2.0))
    hi = n - lo
    kept = np.sort(scaled, axis=1)[:, lo:hi]
    # deterministic pair-counting window strictly inside the kept range
    # (one mean spacing of buffer at each end); order-statistic endpoints
    # would otherwise condition the pair counts
    w_lo = n * (1.0 - keep) / 2.0 + 1.0
    w_hi = n * (1.0 + keep) / 2.0 - 1.0
    return SpectrumBatch(spec, kept, is_phases=False,
                         degeneracy_verified=batch.degeneracy_verified,
                         unfolded=True, window=(w_lo, w_hi))


def spacing_histogram(batch: SpectrumBatch, grid=None) -> CorrelationEstimate:
    """Nearest-neighbor spacing density of an unfolded batch."""
    if not batch.unfolded:
        raise ValueError("spacing statistics need an unfolded batch")
    sp = np.diff(batch.levels, axis=1)
    flat = sp.ravel()
    if grid is None:
        edges = np.linspace(0.0, 4.0, 41)
    else:
        edges = np.asarray(grid)
    counts, edges = np.histogram(flat, bins=edges)
    widths = np.diff(edges)
    centers = (edges[:-1] + edges[1:]) / 2.0
    total = flat.size
    values = counts / (total * widths)
    stderr = np.sqrt(np.maximum(counts, 1.0)) / (total * widths)
    return CorrelationEstimate(
        "spacing", centers, values, stderr,
        metadata={"spec": batch.spec.to_json(), "mean_spacing": float(flat.mean())},
    )


def y2_estimate(batch: SpectrumBatch, xi_grid=None) -> CorrelationEstimate:
    """Two-level cluster function ``Y2 = 1 - R2`` on the unfolded scale.

    Pair distances are histogrammed per sample with a flat edge correction
    for the finite window; standard errors come from the sample-to-sample
    scatter.
    """
    if not batch.unfolded:
        raise ValueError("Y2 needs an unfolded batch")
    if xi_grid is None:
        xi_grid = np.linspace(0.0, 3.2, 33)
    edges = np.asarray(xi_grid, dtype=float)
    centers = (edges[:-1] + edges[1:]) / 2.0
    widths = np.diff(edges)
    samples = batch.levels.shape[0]
    if batch.window is None:
        raise ValueError("Y2 needs the fixed analysis window set by unfold()")
    w_lo, w_hi = batch.window
    per_sample = np.empty((samples, centers.size))
    for s in range(samples):
        lev = batch.levels[s]
        lev = lev[(lev >= w_lo) & (lev <= w_hi)]
        diffs = lev[None, :] - lev[:, None]
        diffs = diffs[diffs > 0]
        counts, _ = np.histogram(diffs, bins=edges)
        # unit density after unfolding: the expected count in a bin is the
        # total overlap of [e_i + xi1, e_i + xi2) with the window over all
        # reference levels i
        overlap = np.minimum(np.maximum(w_hi - (lev[:, None] + edges[:-1]), 0.0),
                             widths[None, :])
        expect = overlap.sum(axis=0)
        per_sample[s] = counts / np.maximum(expect, 1e-12)
    r2 = per_sample.mean(axis=0)
    err = per_sample.std(axis=0, ddof=1) / math.sqrt(samples)
    values = 1.0 - r2
    warnings = []
    rel = err / np.maximum(np.abs(values), 1e-12)
    if np.mean(rel > 0.5) > 0.2:
        warnings.append("insufficient statistics: >20% of bins above 50% relative error")
    return CorrelationEstimate(
        "Y2", centers, values, err,
        metadata={"spec": batch.spec.to_json(), "warnings": warnings},
    )


def local_statistics(batch: SpectrumBatch, xi_grid=None):
    """Spacing density and Y2 of an unfolded batch (the paired estimators)."""
    return spacing_histogram(batch), y2_estimate(batch, xi_grid)


def zk_direct(
    batch_or_spec,
    x: Sequence[float],
    J: Sequence[float],
    eps: float,
    L: Sequence[int] | None = None,
    rel_tol: float | None = None,
):
    """Monte Carlo determinant-ratio generating function.

    Averages ``prod_p (det(H - x_p + i L_p eps - J_p) / det(H - x_p +
    i L_p eps + J_p))^gamma`` over the batch; returns ``(mean, stderr)``.
    Raises :class:`StatisticsError` when a requested relative tolerance is
    exceeded.
    """
    batch = batch_or_spec if isinstance(batch_or_spec, SpectrumBatch) else sample(batch_or_spec)
    spec = batch.spec
    k = len(x)
    if k > 2:
        raise ValueError("zk_direct is intended for k <= 2")
    L = [1] * k if L is None else list(L)
    lam = batch.levels if spec.gamma == 1 else np.repeat(batch.levels, 2, axis=1)
    vals = np.ones(lam.shape[0], dtype=complex)
    for p in range(k):
        if J[p] == 0:
            # numerator and denominator coincide identically
            continue
        shift = x[p] - 1j * L[p] * eps
        num = np.prod(lam - shift - J[p], axis=1)
        den = np.prod(lam - shift + J[p], axis=1)
        vals = vals * (num / den)
    mean = complex(np.mean(vals))
    stderr = float(np.std(vals) / math.sqrt(len(vals)))
    if rel_tol is not None and stderr > rel_tol * max(abs(mean), 1e-300):
        raise StatisticsError(
            f"relative error {stderr/abs(mean):.2e} above requested {rel_tol:.2e}"
        )
    return mean, stderr


def ks_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    a = np.sort(np.asarray(a).ravel())
    b = np.sort(np.asarray(b).ravel())
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


class BatchCache:
    """Binary spectrum cache keyed by the spec hash, for pipeline reuse."""

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def _path(self, spec: EnsembleSpec) -> str:
        digest = hashlib.sha256(spec.to_json().encode()).hexdigest()[:24]
        return os.path.join(self.directory, f"batch_{digest}.npz")

    def load_or_sample(self, spec: EnsembleSpec) -> SpectrumBatch:
        path = self._path(spec)
        if os.path.exists(path):
            data = np.load(path, allow_pickle=False)
            return SpectrumBatch(
                spec, data["levels"], bool(data["is_phases"]),
                degeneracy_verified=bool(data["deg"]) if data["deg"] >= 0 else None,
            )
        batch = sample(spec)
        deg = -1 if batch.degeneracy_verified is None else int(batch.degeneracy_verified)
        np.savez(path, levels=batch.levels, is_phases=batch.is_phases, deg=deg)
        return batch
