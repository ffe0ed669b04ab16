r"""Supersymmetric representation of the Gaussian generating function.

Measure conventions
-------------------
The chain of identities verified here (determinants as Gaussian integrals,
the keystone identity, Hubbard-Stratonovich, the superspace Gaussian and the
final sigma-integral representation) needs one coherent set of measures.  The
package fixes them once:

* commuting pair ``z``: ``dnu_b = dRe(z) dIm(z) / pi``, so that
  ``int exp(i lam |z|^2) dnu_b = 1 / (-i lam)`` for ``Im(lam) > 0``;
* anticommuting pair ``(zeta, zeta^*)``: Berezin integration normalized so
  that ``iint zeta zeta^* dnu_f = 1``, hence
  ``iint exp(i q zeta^* zeta) dnu_f = -i q``.

With equal numbers of commuting and anticommuting pairs the ``-i`` phases
cancel pairwise and the superspace Gaussian identity reads exactly

    int exp(i Psi^dag (M x 1_N) Psi) dnu(Psi) = sdet^(-N) M ,

with no constant.  The auxiliary supermatrix integral ``d[sigma]`` after the
Wick rotation ``b -> i b`` is ``da db`` times Berezin with the default
``1/sqrt(2 pi)`` normalization per differential; the rotation Jacobian is
absorbed into this convention and the ``k=1`` Hubbard-Stratonovich constant
is then exactly 1 (``c = 2^(k(k-1))``).

Evaluation strategy for the ``k=1``, ``beta=2`` generating function: in
Cartesian supermatrix coordinates the anticommuting entries integrate out
exactly and the two commuting entries separate,

    Z_1 = (1/2pi) [ 2 A_N B_N - N A_(N+1) B_(N-1) ],
    A_m = int exp(-a^2) (a - xt1)^(-m) da,
    B_m = int exp(-b^2) (i b - xt2)^m db,

with ``xt1 = x - i eps - J`` (boson sector) and ``xt2 = x - i eps + J``
(fermion sector).  No eigenvalue-angle change of variables is performed, so
no Efetov-Wegner boundary terms arise for ``k=1``; the returned record keeps
an explicit (zero) slot for them.  ``B_m`` is a polynomial integral and is
evaluated exactly by Gauss-Hermite quadrature; ``A_m`` converges like a
smooth Gaussian integral as long as the pole at ``x - i eps`` stays
resolvable, which is checked and otherwise reported as a resolution error.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .duality import VectorBundle, build_dual_pair
from .grassmann import (
    GrassmannAlgebra,
    GrassmannElement,
    QComplex,
    gexp,
    gexp_factored,
    gproduct,
    max_coeff_deviation,
)
from .superlinalg import SuperMatrix, sdet, supertrace

__all__ = [
    "SourceConfig",
    "HSConfig",
    "QuadratureError",
    "DivergenceError",
    "ResolutionError",
    "DifferentiationError",
    "pastur_saddle",
    "keystone_check",
    "hs_verify",
    "gaussian_superintegral_check",
    "z_super_k1",
    "correlations_from_sources",
    "delta_representation_check",
    "ingham_siegel_check",
    "identity_suite",
]


class QuadratureError(RuntimeError):
    """Node doubling did not converge below the requested residual."""


class DivergenceError(RuntimeError):
    """A bosonic Gaussian diverges: the increment sign violates the metric rule."""


class ResolutionError(RuntimeError):
    """The increment is too small for the quadrature grid to resolve the pole."""


class DifferentiationError(RuntimeError):
    """Richardson levels of a source derivative disagree."""


@dataclass
class SourceConfig:
    """Energies, sources and increments entering the generating function."""

    k: int
    x: list
    J: list
    eps: float = 0.1
    L: list = None
    beta: int = 2

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.L is None:
            self.L = [1] * self.k
        if not (len(self.x) == len(self.J) == len(self.L) == self.k):
            raise ValueError("x, J, L must all have length k")

    @property
    def gamma(self) -> int:
        return 2 if self.beta == 4 else 1


@dataclass
class HSConfig:
    """Wick rotation flag, quadrature size and the symmetry-class constant."""

    wick_rotation: bool = True
    nodes: int = 48
    tol: float = 1e-7
    k: int = 1
    beta: int = 2

    @property
    def c_beta(self) -> float:
        if self.beta == 2:
            return 2.0 ** (self.k * (self.k - 1))
        return 2.0 ** (self.k * (4 * self.k - 3) / 2)


def pastur_saddle(xbar: float, N: int, gamma: int = 1):
    """Saddle points ``s0`` of ``s0 (xbar - s0) = N / (2 gamma)``.

    Inside the spectrum (``|xbar| <= sqrt(2N/gamma)``) the pair is complex
    conjugate and ``Im s0`` is proportional to the semicircle; outside, the
    two real branches are returned.
    """
    disc = 2.0 * N / gamma - xbar * xbar
    if disc >= 0:
        root = 1j * math.sqrt(disc)
    else:
        root = complex(math.sqrt(-disc))
    return ((xbar + root) / 2.0, (xbar - root) / 2.0)


# -- keystone ---------------------------------------------------------------


def _trace_k2(K):
    n = len(K)
    acc = None
    for i in range(n):
        for j in range(n):
            t = gproduct(K[i][j], K[j][i])
            acc = t if acc is None else acc + t
    return acc


def keystone_check(bundle: VectorBundle, exact: bool | None = None) -> dict:
    """Verify ``Phi(K) = exp(-tr K^2 / 2 beta) = exp(-str B^2 / 2 beta)``.

    Both exponents are computed independently (ordinary product for K,
    supermatrix product for B) and the exponentials compared coefficient by
    coefficient.  In exact (rational) mode the comparison factorises as
    ``exp(body) * sum soul^n/n!``: bodies and series are compared exactly,
    sidestepping the transcendental ``exp(body)`` value.
    """
    pair = build_dual_pair(bundle)
    beta = bundle.beta
    tr_k2 = _trace_k2(pair.K)
    str_b2 = supertrace(pair.B @ pair.B)
    if exact is None:
        exact = all(isinstance(c, QComplex) for c in tr_k2.terms.values())
    if exact:
        arg_k = tr_k2.scale(QComplex(Fraction(-1, 2 * beta)))
        arg_b = str_b2.scale(QComplex(Fraction(-1, 2 * beta)))
        body_k, series_k = gexp_factored(arg_k)
        body_b, series_b = gexp_factored(arg_b)
        same = body_k == body_b and series_k == series_b
        dev = 0.0 if same else max(
            abs(body_k - body_b), max_coeff_deviation(series_k, series_b)
        )
    else:
        phi_k = gexp(tr_k2.scale(-1.0 / (2 * beta)))
        phi_b = gexp(str_b2.scale(-1.0 / (2 * beta)))
        dev = max_coeff_deviation(phi_k, phi_b)
        same = dev <= 1e-12
    return {
        "identity": "Phi(K) = exp(-str B^2 / 2 beta)",
        "beta": beta,
        "N": bundle.N,
        "k": bundle.k,
        "exact": exact,
        "max_deviation": float(dev),
        "passed": bool(same),
    }


# -- Hubbard-Stratonovich at k=1, beta=2 ------------------------------------


def _hermgauss(n: int):
    from scipy.special import roots_hermite

    return roots_hermite(n)


def hs_verify(bundle: VectorBundle, cfg: HSConfig | None = None) -> dict:
    """Check the superspace Hubbard-Stratonovich identity for ``k=1, beta=2``.

    The left side is ``exp(-str B^2 / 4)``.  The right side integrates, with
    the module's measure conventions, ``exp(-str sigma_w^2) exp(i str
    sigma_w B)`` over the Wick-rotated Hermitean 1/1 supermatrix ``sigma_w =
    [[a, mu], [mu^*, i b]]``: Gauss-Hermite quadrature in ``(a, b)``, exact
    Berezin integration over ``(mu, mu^*)``.  Node doubling must move the
    result by less than ``cfg.tol`` before the comparison is accepted.
    """
    cfg = HSConfig() if cfg is None else cfg
    if bundle.beta != 2 or bundle.k != 1:
        raise ValueError("hs_verify is specified for k=1, beta=2")
    if not bundle.L.is_trivial():
        raise ValueError("hs_verify requires the trivial metric")
    if not cfg.wick_rotation:
        raise DivergenceError(
            "without the Wick rotation the fermion-fermion Gaussian diverges"
        )
    pair = build_dual_pair(bundle)
    # embed B into a pool extended by the sigma pair
    big = bundle.algebra.extended(1)
    mu_id = 2 * bundle.algebra.n_pairs
    B = [[big.embed(e) for e in row] for row in pair.B.full()]
    lhs_arg = supertrace(pair.B @ pair.B).scale(-0.25)
    lhs = gexp(big.embed(lhs_arg))

    def rhs(nodes: int) -> GrassmannElement:
        xs, ws = _hermgauss(nodes)
        mu = big.gen(mu_id)
        mus = big.gen(mu_id + 1)
        two_mumu = gproduct(mu, mus).scale(-2.0)  # -2 mu mu^*  (= exponent part)
        acc = big.zero()
        # str(sigma_w B) = a B11 + mu B21 - mu^* B12 - i b B22
        odd_part = gproduct(mu, B[1][0]) - gproduct(mus, B[0][1])
        for ia in range(nodes):
            a = xs[ia]
            exp_a = gexp(B[0][0].scale(1j * a))
            for ib in range(nodes):
                b = xs[ib]
                exponent = two_mumu + odd_part.scale(1j) + B[1][1].scale(b)
                integrand = gproduct(gexp(exponent), exp_a)
                acc = acc + integrand.scale(ws[ia] * ws[ib])
        # Berezin over (mu, mu^*): iint mu mu^* dmu dmu^* = -n^2 = -1/(2 pi)
        from .grassmann import berezin_integrate

        return berezin_integrate(acc, [mu_id, mu_id + 1])

    coarse = rhs(cfg.nodes)
    fine = rhs(2 * cfg.nodes)
    drift = max_coeff_deviation(coarse, fine)
    if drift > cfg.tol:
        raise QuadratureError(
            f"node doubling moved the HS integral by {drift:.2e} > {cfg.tol:.2e}"
        )
    dev = max_coeff_deviation(fine, lhs)
    return {
        "identity": "HS: exp(-str B^2/4) = c int exp(-str sigma_w^2 + i str sigma_w B)",
        "c_beta": cfg.c_beta,
        "nodes": cfg.nodes,
        "node_doubling_residual": float(drift),
        "max_deviation": float(dev),
        "passed": bool(dev <= 1e-6),
    }


# -- superspace Gaussian (k=1, beta=2) ---------------------------------------


def _quad_exp_moments(lam: complex, mmax: int, nodes: int):
    """Numeric ``int_0^inf exp(i lam u) u^m du`` for ``m <= mmax``.

    Uses Gauss-Legendre panels over [0, U] with U set by the decay
    ``exp(-Im(lam) u)``; requires ``Im(lam) > 0``.
    """
    decay = lam.imag
    if decay <= 0:
        raise DivergenceError(
            "bosonic Gaussian diverges: increment sign violates the metric rule"
        )
    U = min(45.0 / decay, 1e6)
    osc = abs(lam.real)
    panels = max(8, int(U * max(osc, 0.5) / 3.0))
    panels = min(panels, 4000)
    xs, ws = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, U, panels + 1)
    moments = np.zeros(mmax + 1, dtype=complex)
    for a, b in zip(edges[:-1], edges[1:]):
        half = (b - a) / 2.0
        pts = (a + b) / 2.0 + half * xs
        w = ws * half
        e = np.exp(1j * lam * pts)
        for m in range(mmax + 1):
            moments[m] += np.sum(w * e * pts**m)
    return moments


def gaussian_superintegral_check(
    sigma: SuperMatrix, src: SourceConfig, N: int, nodes: int = 64, tol: float = 1e-6
) -> dict:
    """Verify ``int exp(i Psi^dag (M x 1_N) Psi) dnu = sdet^-N M`` at k=1, beta=2.

    ``M = sigma L - x^pm - J`` for the 1/1 supermatrix ``sigma``.  The left
    side uses the direct-product structure: one commuting/anticommuting pair
    is integrated (radial 1D quadrature for the commuting pair, exact Berezin
    for the anticommuting one) and the result raised to the power N.
    """
    if src.k != 1 or src.beta != 2:
        raise ValueError("specified for k=1, beta=2")
    alg = sigma.algebra
    xt1 = src.x[0] - 1j * src.L[0] * src.eps - src.J[0]
    xt2 = src.x[0] - 1j * src.L[0] * src.eps + src.J[0]
    # sigma L scales the bosonic column (entries a and nu) by L_1
    m11 = sigma.a[0][0].scale(src.L[0]) - alg.scalar(xt1)
    m22 = sigma.b[0][0] - alg.scalar(xt2)
    m12 = sigma.mu[0][0]
    m21 = sigma.nu[0][0].scale(src.L[0])
    lam = complex(m11.body())

    def lhs_pair(nn):
        moments = _quad_exp_moments(lam, 1 + alg.n_pairs, nn)
        # e^{i m11 u} = e^{i lam u} * sum_j (i soul u)^j / j!
        soul = m11 - alg.scalar(lam)
        fermi_const = m22.scale(-1j)
        fermi_lin = gproduct(m12, m21).scale(-1.0)
        acc = alg.zero()
        soul_pow = alg.one()
        fact = 1.0
        for j in range(alg.n_pairs + 1):
            if j > 0:
                soul_pow = gproduct(soul_pow, soul)
                fact *= j
                if soul_pow.is_zero():
                    break
            # int e^{i lam u} u^j [(-i m22) + u * (-m12 m21)] du
            term = fermi_const.scale(moments[j]) + fermi_lin.scale(moments[j + 1])
            acc = acc + gproduct(soul_pow, term).scale((1j) ** j / fact)
        return acc

    one_pair = lhs_pair(nodes)
    fine = lhs_pair(2 * nodes)
    drift = max_coeff_deviation(one_pair, fine)
    if drift > tol * 1e-1:
        raise QuadratureError(
            f"node doubling moved the pair integral by {drift:.2e}"
        )
    lhs = alg.one()
    for _ in range(N):
        lhs = gproduct(lhs, fine)
    shift = SuperMatrix(
        alg,
        [[m11]],
        [[m12]],
        [[m21]],
        [[m22]],
        1,
        1,
    )
    sd = sdet(shift)
    rhs = alg.one()
    inv = None
    from .grassmann import ginv

    inv = ginv(sd)
    for _ in range(N):
        rhs = gproduct(rhs, inv)
    dev = max_coeff_deviation(lhs, rhs)
    return {
        "identity": "superspace Gaussian = sdet^-N(sigma L - x^pm - J)",
        "N": N,
        "max_deviation": float(dev),
        "node_doubling_residual": float(drift),
        "passed": bool(dev <= tol),
    }


# -- Z_1 via the sigma representation ----------------------------------------


def _a_integral(xt: complex, powers, nodes: int):
    """``A_m = int exp(-a^2) (a - xt)^(-m) da`` by composite Gauss-Legendre.

    Panels are sized by the pole distance ``|Im(xt)|`` so that the nearest
    singularity stays at least a panel away, which keeps the per-panel rule
    geometrically convergent; ``nodes`` controls the panel count (doubling
    it halves the panels' width).
    """
    eps = abs(xt.imag)
    if eps == 0:
        raise ResolutionError("pole sits on the integration contour (eps = 0)")
    x0 = xt.real
    lo = min(-7.5, x0 - 12.0 * eps)
    hi = max(7.5, x0 + 12.0 * eps)
    # (a - xt)^-m varies on the scale eps/m near the pole
    mmax = max(powers)
    width = min(0.5, eps / (2.0 * max(1, mmax))) * (200.0 / nodes)
    panels = min(max(8, int(math.ceil((hi - lo) / width))), 40000)
    xs, ws = np.polynomial.legendre.leggauss(12)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    a = (mid[:, None] + half[:, None] * xs[None, :]).ravel()
    w = (half[:, None] * ws[None, :]).ravel()
    weight = np.exp(-a * a) * w
    base = a - xt
    vals = {m: complex(np.sum(weight * base ** (-float(m)))) for m in powers}
    mags = {m: float(np.sum(np.abs(weight * base ** (-float(m))))) for m in powers}
    return vals, mags


def _b_integral(xt: complex, powers, nodes: int):
    """``B_m = int exp(-b^2) (i b - xt)^m db`` (polynomial: GH exact)."""
    xs, ws = _hermgauss(nodes)
    base = 1j * xs - xt
    vals = {m: complex(np.sum(ws * base**m)) for m in powers}
    mags = {m: float(np.sum(np.abs(ws * base**m))) for m in powers}
    return vals, mags


def z_super_k1(src: SourceConfig, N: int, nodes: int = 200, tol: float = 1e-6):
    """Evaluate the k=1, beta=2 sigma-representation of ``Z_1(x + J)``.

    Returns ``(value, record)`` where the record stores the quadrature
    drift and the (identically zero, by the Cartesian coordinate choice)
    Efetov-Wegner boundary contribution.
    """
    if src.k != 1 or src.beta != 2:
        raise ValueError("z_super_k1 handles k=1, beta=2")
    if src.L[0] != 1:
        raise DivergenceError(
            "bosonic increment on the wrong side: flip of L_1 makes the "
            "a-integral contour pass the pole (metric rule)"
        )
    x, J, eps = src.x[0], src.J[0], src.eps
    xt1 = x - 1j * eps - J
    xt2 = x - 1j * eps + J

    def evaluate(nn):
        aa, amag = _a_integral(xt1, [N, N + 1], nn)
        bb, bmag = _b_integral(xt2, [N - 1, N], max(nn, N // 2 + 2))
        # Berezin over the auxiliary odd pair leaves
        #   (q/p)^N [2 - N/(p q)] / (2 pi)
        val = (2.0 * aa[N] * bb[N] - N * aa[N + 1] * bb[N - 1]) / (2.0 * math.pi)
        # float64 cancellation estimate from the absolute sums
        rnd = (
            (2.0 * amag[N] * bmag[N] + N * amag[N + 1] * bmag[N - 1])
            * 1e-16
            / (2.0 * math.pi)
        )
        return val, rnd

    coarse, _ = evaluate(nodes)
    fine, roundoff = evaluate(2 * nodes)
    if roundoff > tol:
        raise ResolutionError(
            f"eps={eps} too small for N={N}: cancellation noise "
            f"{roundoff:.1e} exceeds tolerance {tol:.1e}"
        )
    drift = abs(fine - coarse)
    if drift > max(tol, 10.0 * roundoff):
        raise QuadratureError(
            f"node doubling moved Z_1 by {drift:.2e} > {tol:.2e}"
        )
    record = {
        "efetov_wegner": 0.0,
        "coordinates": "cartesian",
        "node_doubling_residual": float(drift),
        "nodes": nodes,
    }
    return fine, record


def correlations_from_sources(
    zfun,
    src: SourceConfig,
    h: float = 1e-3,
    richardson_tol: float = 5e-2,
):
    """Source derivatives of a generating-function evaluator at ``J = 0``.

    ``zfun(J_list) -> complex`` is differentiated by central differences with
    one Richardson step (h and h/2).  Returns a dict with ``R_hat`` (the
    ``(1/2pi)^k``-normalized derivative) and, for ``k = 1``, the spectral
    density ``R1 = Im R_hat``.
    """
    k = src.k

    def central(step):
        if k == 1:
            return (zfun([step]) - zfun([-step])) / (2 * step)
        if k == 2:
            return (
                zfun([step, step])
                - zfun([step, -step])
                - zfun([-step, step])
                + zfun([-step, -step])
            ) / (4 * step * step)
        raise ValueError("k <= 2 supported")

    d1 = central(h)
    d2 = central(h / 2)
    extr = (4.0 * d2 - d1) / 3.0
    denom = max(abs(extr), 1e-12)
    if abs(d2 - d1) / denom > richardson_tol:
        raise DifferentiationError(
            f"Richardson levels disagree: |d2-d1|/|d| = {abs(d2-d1)/denom:.2e}"
        )
    r_hat = extr / (2.0 * math.pi) ** k
    out = {"R_hat": r_hat, "h": h}
    if k == 1:
        out["R1"] = r_hat.imag
    return out


# -- matrix delta function and Ingham-Siegel ---------------------------------


def _delta_rep_fermion_constant() -> complex:
    """Odd-sector factor of the 1/1 matrix-delta representation, computed
    symbolically.

    The couplings ``exp(-i (sig_mu rho_nu - sig_nu rho_mu))`` are expanded in
    a four-generator pool and Berezin-integrated over all four odd entries;
    together with the two bosonic ``2 pi`` factors from the nascent delta
    functions this must give 1 under the package conventions (``c^2 = 1`` at
    ``k = 1``).
    """
    alg = GrassmannAlgebra(2)
    sig_mu, sig_nu = alg.zeta(0), alg.zeta_star(0)
    rho_mu, rho_nu = alg.zeta(1), alg.zeta_star(1)
    coupling = (gproduct(sig_mu, rho_nu) - gproduct(sig_nu, rho_mu)).scale(-1j)
    from .grassmann import berezin_integrate

    integrated = berezin_integrate(gexp(coupling), [0, 1, 2, 3])
    return complex(integrated.body()) * (2.0 * math.pi) ** 2


def delta_representation_check(
    f_name: str = "str",
    b_value: tuple = (0.35, -0.2),
    reg: float = 5e-3,
    nodes: int = 96,
) -> dict:
    """Round-trip ``f(B) = c^2 iint f(rho) exp(-i str sigma (rho - B))``.

    1/1 case with a numeric diagonal ``B = diag(b1, b2)`` and polynomial
    ``f``.  The oscillatory diagonal sigma integrals are damped by a Gaussian
    regulator ``exp(-reg * sigma^2)``, turning them into nascent deltas of
    variance ``2 * reg``; a two-point Richardson step in ``reg`` removes the
    smearing (exactly, for the polynomial test functions used).  The odd
    sector is evaluated symbolically (:func:`_delta_rep_fermion_constant`),
    not assumed.
    """
    b1, b2 = b_value
    if f_name == "str":
        f = lambda r1, r2: r1 - r2
        target = b1 - b2
    elif f_name == "str2":
        f = lambda r1, r2: (r1 - r2) ** 2
        target = (b1 - b2) ** 2
    else:
        raise ValueError("f_name must be 'str' or 'str2'")
    fermion = _delta_rep_fermion_constant()

    def evaluate(delta):
        # per diagonal slot: int dr dsig f e^{-delta sig^2 - i sig (r - b)}
        # = 2 pi * <f>_smeared; the two 2 pi factors cancel against the
        # (2 pi)^-2 inside the symbolic odd-sector constant
        xs, ws = _hermgauss(nodes)
        scale = math.sqrt(4.0 * delta)
        acc = 0.0
        for i, t1 in enumerate(xs):
            r1 = b1 + scale * t1
            for j, t2 in enumerate(xs):
                r2 = b2 + scale * t2
                acc += ws[i] * ws[j] * f(r1, r2)
        return (acc / math.pi) * fermion

    v1 = evaluate(reg)
    v2 = evaluate(reg / 2)
    extr = 2.0 * v2 - v1
    dev = abs(extr - target)
    return {
        "identity": "f(B) = c^2 iint f(rho) exp(-i str sigma (rho - B))",
        "f": f_name,
        "regulator": reg,
        "fermion_constant": fermion,
        "value": extr,
        "target": target,
        "max_deviation": float(dev),
        "passed": bool(dev <= 1e-8),
    }


def ingham_siegel_check(N: int, m: int, r_values=None, nodes: int = 48) -> dict:
    """Fit the power law of ``int_{S>0} exp(-tr R S) det^m S d[S]``.

    For diagonal ``R`` the positivity domain ``S > 0`` is integrated with the
    off-diagonal disk reduced analytically (N=2) or directly (N=1); the
    log-log slope against ``det R`` must be ``-(m + N)``.
    """
    if N not in (1, 2) or m not in (0, 1):
        raise ValueError("check covers N in {1,2}, m in {0,1}")
    if r_values is None:
        r_values = [0.7, 1.0, 1.6, 2.3, 3.0]
    xs, ws = np.polynomial.laguerre.laggauss(nodes)

    def integral(r1, r2=None):
        if N == 1:
            # int_0^inf e^{-r s} s^m ds
            return float(np.sum(ws * (xs / r1) ** m) / r1)
        # S = [[s1, w],[wbar, s2]], det S = s1 s2 - |w|^2 > 0
        # disk integral: int_{|w|^2 < c} (c - |w|^2)^m dw = pi c^(m+1)/(m+1)
        acc = 0.0
        for i in range(nodes):
            s1 = xs[i] / r1
            for j in range(nodes):
                s2 = xs[j] / r2
                c = s1 * s2
                acc += ws[i] * ws[j] * math.pi * c ** (m + 1) / (m + 1)
        return acc / (r1 * r2)

    dets, vals = [], []
    for r in r_values:
        if N == 1:
            dets.append(r)
            vals.append(integral(r))
        else:
            r2 = 1.3 * r
            dets.append(r * r2)
            vals.append(integral(r, r2))
    slope, intercept = np.polyfit(np.log(dets), np.log(vals), 1)
    target = -(m + N)
    dev = abs(slope - target)
    return {
        "identity": "Ingham-Siegel: I(R) ~ det^-(m+N) R",
        "N": N,
        "m": m,
        "fitted_exponent": float(slope),
        "target_exponent": target,
        "fitted_constant": float(math.exp(intercept)),
        "max_deviation": float(dev),
        "passed": bool(dev < 1e-6),
    }


def identity_suite(nodes: int = 48) -> list[dict]:
    """The delta-representation and Ingham-Siegel checks at desk scale."""
    out = [delta_representation_check("str"), delta_representation_check("str2")]
    for N in (1, 2):
        for m in (0, 1):
            out.append(ingham_siegel_check(N, m, nodes=nodes))
    return out
