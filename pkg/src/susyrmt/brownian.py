r"""Crossover ensembles and the k=1, beta=2 diffusion in radial superspace.

The crossover family ``H(t) = H0 + sqrt(2 t) H`` (fictitious time
``t = alpha^2 / 2``) propagates the generating function by a convolution in
the radial coordinates ``s = (s1, s2)`` (boson/fermion eigenvalue of the
supermatrix).  Everything below is specific to one source point and the
unitary class.

Radial measure and propagator (derived in-module, not copied):

* The eigenvalue-angle map ``sigma = u^-1 s u`` of a Hermitean 1/1
  supermatrix, with ``u`` parameterized by one Grassmann pair, has Berezinian
  ``B1(s) = (s1 - s2)^-2`` with no Grassmann correction and a flat coset
  measure; :func:`radial_berezinian_probe` recomputes this symbolically via
  :func:`~susyrmt.superlinalg.berezinian_linear`.
* The coset is purely anticommuting, so the supergroup integral of the heat
  kernel coupling is a terminating series.  Carrying it out gives the smooth
  propagator density

      Gamma_sm(s, r, t) = (beta / 4 pi t) (s1-s2) (r1-r2)
                          * exp(-(beta/4t) [(s1-r1)^2 - (s2-r2)^2])

  (``beta = 2`` here) together with a boundary contribution of weight
  ``E(r, t) = exp(-beta (r1-r2)^2 / 4 t)`` living on the degenerate locus
  ``s1 = s2``, where every initial condition of the form
  ``sdet^-1(s + H0)`` equals 1 identically.  The sign of the coupling term
  is fixed so that the semigroup property and the delta limit hold; the
  boundary weight is fixed by the normalization sum rule
  ``int Gamma_sm B1 + E = 1``.

Contour convention: the fermionic radial coordinate runs parallel to the
imaginary axis, ``s2 = anchor + i v`` with real ``v``; the radial volume
element is ``d[s] = ds1 dv`` along these contours.  All convolutions below
use it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleSpec, SpectrumBatch, sample
from .grassmann import GrassmannAlgebra, gproduct
from .superlinalg import berezinian_linear

__all__ = [
    "CrossoverSpec",
    "RadialPoint",
    "evolve",
    "z0_initial",
    "radial_berezinian",
    "radial_berezinian_probe",
    "ew_weight",
    "propagator_k1",
    "apply_propagator",
    "propagator_normalization_check",
    "semigroup_check",
    "delta_limit_check",
    "convolution_check",
    "spacing_crossover_measure",
]

BETA = 2  # the module covers the unitary class only


@dataclass(frozen=True)
class CrossoverSpec:
    """``H(t) = H0 + sqrt(2 t) * H`` with H drawn from ``target`` at time t."""

    H0: np.ndarray
    target: str
    t: float
    seed: int
    samples: int

    @staticmethod
    def from_alpha(H0, target, alpha, seed, samples):
        return CrossoverSpec(H0, target, alpha * alpha / 2.0, seed, samples)

    @property
    def alpha(self) -> float:
        return math.sqrt(2.0 * self.t)


@dataclass(frozen=True)
class RadialPoint:
    """Radial superspace point; both entries carry small imaginary parts."""

    s1: complex
    s2: complex

    @property
    def delta(self) -> complex:
        return self.s1 - self.s2


def evolve(spec: CrossoverSpec) -> SpectrumBatch:
    """Spectra of ``H0 + sqrt(2t) H``; ``t = 0`` returns H0's spectrum exactly."""
    h0 = np.asarray(spec.H0)
    n = h0.shape[0]
    if h0.shape != (n, n) or not np.allclose(h0, h0.conj().T):
        raise ValueError("H0 must be a Hermitean square matrix")
    if spec.target != "GUE":
        raise ValueError("crossover target limited to the unitary class")
    base = EnsembleSpec("GUE", n, spec.seed, spec.samples)
    if spec.t == 0.0:
        lev = np.tile(np.sort(np.linalg.eigvalsh(h0)), (spec.samples, 1))
        return SpectrumBatch(base, lev, is_phases=False)
    scale = math.sqrt(2.0 * spec.t)
    out = np.empty((spec.samples, n))
    children = np.random.SeedSequence(spec.seed).spawn(max(1, spec.samples // 256 + 1))
    row = 0
    from .ensembles import _gaussian_matrix

    for chunk_seed in children:
        rng = np.random.default_rng(chunk_seed)
        count = min(256, spec.samples - row)
        for i in range(count):
            out[row + i] = np.linalg.eigvalsh(h0 + scale * _gaussian_matrix(rng, base))
        row += count
        if row >= spec.samples:
            break
    return SpectrumBatch(base, out, is_phases=False)


def z0_initial(s: RadialPoint, H0: np.ndarray) -> complex:
    """``sdet^-1(s x 1 + 1 x H0) = det(s2 + H0) / det(s1 + H0)`` for k=1.

    Rotation invariant in H0 by construction; raises when a pole of the
    bosonic determinant is closer than ``1e-9``.
    """
    h0 = np.asarray(H0, dtype=complex)
    n = h0.shape[0]
    den = np.linalg.det(s.s1 * np.eye(n) + h0)
    if abs(den) < 1e-9:
        raise ZeroDivisionError("s1 is on a pole of the initial condition")
    num = np.linalg.det(s.s2 * np.eye(n) + h0)
    return num / den


def radial_berezinian(s: RadialPoint) -> complex:
    """``B1(s) = (s1 - s2)^-2`` (derived; see module docstring)."""
    return 1.0 / (s.delta * s.delta)


def radial_berezinian_probe(s1: complex, s2: complex) -> complex:
    """Recompute the radial Berezinian symbolically at a numeric point.

    Builds the Jacobian blocks of ``(s1, s2, alpha, alpha^*) -> sigma =
    u^-1 s u`` with one Grassmann pair and evaluates its superdeterminant
    through :func:`~susyrmt.superlinalg.berezinian_linear`; unit tests pin
    the result against :func:`radial_berezinian`.
    """
    alg = GrassmannAlgebra(1)
    alpha, alphas = alg.gen(0), alg.gen(1)
    aa = gproduct(alpha, alphas)
    delta = s1 - s2
    one = alg.one()
    dy_dz = [
        [one - aa, aa],
        [-aa, one + aa],
    ]
    dy_dzeta = [
        [alphas.scale(-delta), alpha.scale(delta)],
        [alphas.scale(-delta), alpha.scale(delta)],
    ]
    deta_dz = [
        [alpha, -alpha],
        [alphas, -alphas],
    ]
    deta_dzeta = [
        [alg.scalar(delta), alg.zero()],
        [alg.zero(), alg.scalar(delta)],
    ]
    ber = berezinian_linear(alg, dy_dz, dy_dzeta, deta_dz, deta_dzeta)
    if not ber.soul().is_zero():
        raise AssertionError("radial Berezinian acquired a Grassmann correction")
    return complex(ber.body())


def ew_weight(r: RadialPoint, t: float) -> float:
    """Weight of the degenerate-locus (Efetov-Wegner) boundary term."""
    return abs(cmath.exp(-BETA * r.delta * r.delta / (4.0 * t)))


def propagator_k1(s: RadialPoint, r: RadialPoint, t: float):
    """Smooth radial propagator density plus the boundary-term record.

    Returns ``(gamma, record)``: ``gamma`` is the smooth density at ``s``;
    ``record['ew_weight']`` carries the degenerate-locus weight which, in any
    integral against ``B1(s) d[s]``, multiplies the integrand's value at the
    supersymmetric point ``s1 = s2`` (1 for every normalized initial
    condition).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    pref = BETA / (4.0 * math.pi * t)
    gauss = cmath.exp(
        -BETA * ((s.s1 - r.s1) ** 2 - (s.s2 - r.s2) ** 2) / (4.0 * t)
    )
    gamma = pref * s.delta * r.delta * gauss
    record = {
        "ew_weight": ew_weight(r, t),
        "ew_locus": "s1 == s2",
        "gaussian_prefactor": "exp(-(beta/4t) str(s^2 + r^2)) present",
    }
    return gamma, record


def _radial_nodes(center: RadialPoint, t: float, nodes: int):
    """Gauss-Hermite grid for the weight ``exp(-beta (u^2 + v^2) / 4t)``.

    ``s1 = center.s1 + u`` runs parallel to the real axis, ``s2 = center.s2 +
    i v`` parallel to the imaginary axis.  The returned weights absorb both
    the Gaussian factors and the substitution Jacobian, so integrands passed
    against them must NOT include the Gaussians again.
    """
    from scipy.special import roots_hermite

    xs, ws = roots_hermite(nodes)
    scale = math.sqrt(4.0 * t / BETA)
    s1 = center.s1 + scale * xs
    s2 = center.s2 + 1j * scale * xs
    return s1, s2, ws * scale


def propagator_normalization_check(r: RadialPoint, t: float, nodes: int = 96) -> dict:
    """Verify ``int Gamma_sm B1 d[s] + E = 1`` by quadrature on the contours."""
    s1g, s2g, w = _radial_nodes(r, t, nodes)
    pref = BETA / (4.0 * math.pi * t)
    acc = 0.0 + 0.0j
    for i, s1 in enumerate(s1g):
        for j, s2 in enumerate(s2g):
            acc += w[i] * w[j] * pref * r.delta / (s1 - s2)
    total = acc + ew_weight(r, t)
    dev = abs(total - 1.0)
    return {
        "identity": "int Gamma_1 B_1 d[s] = 1 (smooth + boundary)",
        "smooth_mass": complex(acc),
        "ew_weight": ew_weight(r, t),
        "max_deviation": float(dev),
        "passed": bool(dev <= 1e-4),
    }


def semigroup_check(
    s: RadialPoint, r: RadialPoint, t1: float, t2: float, nodes: int = 96
) -> dict:
    """``int Gamma(s,q,t1) Gamma(q,r,t2) B1(q) d[q] = Gamma(s,r,t1+t2)``.

    The midpoint contour runs through the optimum of the combined Gaussians;
    the boundary terms do not enter (the smooth density vanishes linearly on
    the degenerate locus, cancelling the measure's double pole).
    """
    bigt = t1 + t2
    tm = t1 * t2 / bigt
    mid = RadialPoint(
        (t2 * s.s1 + t1 * r.s1) / bigt, (t2 * s.s2 + t1 * r.s2) / bigt
    )
    q1g, q2g, w = _radial_nodes(mid, tm, nodes)
    pref1 = BETA / (4.0 * math.pi * t1)
    pref2 = BETA / (4.0 * math.pi * t2)
    acc = 0.0 + 0.0j
    for i, q1 in enumerate(q1g):
        for j, q2 in enumerate(q2g):
            q = RadialPoint(q1, q2)
            # the combined Gaussians equal the node weight times the residual
            # factor exp(-(beta/4T) [(s1-r1)^2 - (s2-r2)^2]); Delta_q cancels
            # against the measure
            resid1 = -BETA * ((s.s1 - q1) ** 2 - (s.s2 - q2) ** 2) / (4.0 * t1)
            resid2 = -BETA * ((q1 - r.s1) ** 2 - (q2 - r.s2) ** 2) / (4.0 * t2)
            gauss_node = -BETA * ((q1 - mid.s1) ** 2 - (q2 - mid.s2) ** 2) / (4.0 * tm)
            extra = cmath.exp(resid1 + resid2 - gauss_node)
            acc += w[i] * w[j] * pref1 * pref2 * s.delta * r.delta * extra
    target, _ = propagator_k1(s, r, bigt)
    dev = abs(acc - target)
    return {
        "identity": "semigroup: Gamma * Gamma = Gamma(t1+t2)",
        "composed": complex(acc),
        "target": complex(target),
        "max_deviation": float(dev),
        "passed": bool(dev <= 1e-4 * max(1.0, abs(target))),
    }


def apply_propagator(phi, r: RadialPoint, t: float, nodes: int = 128) -> complex:
    """Radial convolution ``E * phi(degenerate) + int Gamma_sm phi B1 d[s]``.

    ``phi`` must be analytic in ``s1`` in a strip around the contour and
    entire in ``s2``; ``phi(degenerate)`` is its value on the locus
    ``s1 = s2``, which is 1 for every ``sdet^-1``-type initial condition.
    """
    s1g, s2g, w = _radial_nodes(r, t, nodes)
    pref = BETA / (4.0 * math.pi * t)
    acc = 0.0 + 0.0j
    for i, s1 in enumerate(s1g):
        for j, s2 in enumerate(s2g):
            acc += w[i] * w[j] * pref * (r.delta / (s1 - s2)) * phi(s1, s2)
    return acc + ew_weight(r, t) * 1.0


def delta_limit_check(r: RadialPoint, t: float = 1e-3, nodes: int = 128) -> dict:
    """As ``t -> 0`` the convolution reproduces the test function at ``r``."""
    phi = lambda s1, s2: cmath.exp(0.3j * s1) * (1.0 + 0.2 * s2 * s2)
    # subtract the boundary piece convention: phi is not normalized to 1 on
    # the degenerate locus, so compare the smooth part against
    # phi(r) - E * phi-at-degenerate-mean; at these t the weight E is ~ 0.
    val = apply_propagator(phi, r, t, nodes) - ew_weight(r, t)
    target = phi(r.s1, r.s2)
    dev = abs(val - target)
    return {
        "identity": "t -> 0 delta limit of the propagator",
        "value": complex(val),
        "target": complex(target),
        "t": t,
        "max_deviation": float(dev),
        "passed": bool(dev <= 1e-2),
    }


def convolution_check(
    H0: np.ndarray,
    r: RadialPoint,
    t: float,
    seed: int = 0,
    samples: int = 200_000,
    nodes: int = 128,
) -> dict:
    """Radial-convolution route vs direct Monte Carlo for ``Z_1(r, t)``.

    Route (a): ``E + int Gamma_sm Z0 B1``; route (b): average of
    ``det(r2 + H(t)) / det(r1 + H(t))`` over the crossover ensemble.
    """
    h0 = np.asarray(H0, dtype=complex)
    route_a = apply_propagator(lambda s1, s2: z0_initial(RadialPoint(s1, s2), h0), r, t, nodes)
    spec = CrossoverSpec(h0, "GUE", t, seed, samples)
    batch = evolve(spec)
    lam = batch.levels
    vals = np.prod((r.s2 + lam) / (r.s1 + lam), axis=1)
    route_b = complex(np.mean(vals))
    stderr = float(np.std(vals) / math.sqrt(len(vals)))
    dev = abs(route_a - route_b)
    return {
        "identity": "Z_1(r,t): radial convolution vs Monte Carlo",
        "route_a": complex(route_a),
        "route_b": route_b,
        "mc_stderr": stderr,
        "t": t,
        "max_deviation": float(dev),
        "passed": bool(dev <= 1e-2),
    }


def spacing_crossover_measure(batch: SpectrumBatch) -> float:
    """Fraction of unfolded spacings below 0.5: ~0.39 Poisson, ~0.11 GUE.

    A scalar summary that decreases monotonically along the
    Poisson-to-unitary crossover.
    """
    from .ensembles import UnfoldingMap, unfold

    u = unfold(batch, UnfoldingMap("polynomial-fit"))
    sp = np.diff(u.levels, axis=1).ravel()
    return float(np.mean(sp < 0.5))
