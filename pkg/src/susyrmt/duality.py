r"""Ordinary <-> superspace duality from rectangular vector bundles.

For ``k`` source points the commuting vectors ``z_p`` and anticommuting
vectors ``zeta_p`` are packed into a rectangular supermatrix ``A`` whose
columns are, per Dyson index:

* ``beta=2``: ``[z_1 .. z_k | zeta_1 .. zeta_k]``            (``N x 2k``)
* ``beta=1``: ``[z_1 z_1^* .. | zeta_1 zeta_1^* ..]``        (``N x 4k``)
* ``beta=4``: per source two stacked columns
  ``[(z_p; z_p), (-z_p^*; z_p^*) | (zeta_p; zeta_p), (-zeta_p^*; zeta_p^*)]``
  of height ``2N``                                            (``2N x 4k``)

with the column metric ``L`` repeating each source's sign over its commuting
columns and ``+1`` on all anticommuting columns.  The dual pair is

    K = A L A^dag        (ordinary, Hermitean for every L)
    B = L^(1/2) A^dag A L^(1/2)   (supermatrix, Hermitean only for L = 1)

and the crucial identity ``tr K^m = str B^m`` holds as an exact coefficient
identity in the Grassmann algebra.

Adjoint convention for the rectangular ``A``: the rows of ``A^dag`` coming
from anticommuting columns carry an extra minus sign.  This is the sign that
makes ``K`` reproduce the dyadic form ``sum_p (L_p z_p z_p^dag - zeta_p
zeta_p^dag)`` and ``B`` the explicit scalar-product matrix with its minus
signs on the fermionic rows; the square-supermatrix dagger of
:mod:`.superlinalg` stays as defined there.

The same convention induces the adjoint used for the Hermiticity statements
here: ``sigma^ddag = ((a^T, nu^T; -mu^T, b^T))^*``.  It is the adjoint of the
supervector scalar product, differs from :func:`.superlinalg.stranspose`'s
dagger only by the placement of the odd-block sign (both square to the
identity and reverse products), and is the one under which ``B^ddag = B``
holds exactly when ``L = 1``.

Bundles are seeded with Gaussian-integer coordinates by default so that all
duality checks are exact rational-complex identities, not float comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .grassmann import (
    GrassmannAlgebra,
    GrassmannElement,
    QComplex,
    conjugate,
    gproduct,
    max_coeff_deviation,
)
from .superlinalg import Metric, SuperMatrix, stranspose, supertrace

__all__ = [
    "VectorBundle",
    "DualPair",
    "build_dual_pair",
    "verify_trace_duality",
    "hermiticity_check",
    "dual_dagger",
    "explicit_B_beta2",
    "explicit_K_dyadic",
]


@dataclass
class VectorBundle:
    """Commuting and anticommuting vectors feeding the duality construction.

    ``z`` holds one complex vector per source for ``beta=2``; for ``beta=1``
    it holds the combination ``u_p + i v_p`` of the two real vectors (kept
    separately in ``w1``/``w2``); for ``beta=4`` one complex vector per
    source in the paired-column layout.  ``zeta_coeff[p][n]`` scales the
    generator attached to component ``n`` of ``zeta_p``; its conjugate scales
    the starred generator.
    """

    beta: int
    N: int
    k: int
    L: Metric
    z: list           # list over sources of coefficient vectors (len N)
    w1: list | None   # beta=1 only: real vectors
    w2: list | None
    zeta_coeff: list  # list over sources of coefficient vectors (len N)
    algebra: GrassmannAlgebra = field(repr=False)

    @staticmethod
    def random(
        beta: int,
        N: int,
        k: int,
        seed: int,
        L: Sequence[int] | None = None,
        exact: bool = True,
        span: int = 4,
    ) -> "VectorBundle":
        """Seeded bundle; integer coordinates by default for exact checks."""
        if beta not in (1, 2, 4):
            raise ValueError("beta must be 1, 2 or 4")
        rng = np.random.default_rng(seed)
        metric = Metric([1] * k if L is None else L)
        if len(metric) != k:
            raise ValueError("metric length must equal k")

        def draw():
            if exact:
                re = int(rng.integers(-span, span + 1))
                im = int(rng.integers(-span, span + 1))
                return QComplex(re, im)
            return complex(rng.standard_normal(), rng.standard_normal())

        def draw_real():
            if exact:
                return QComplex(int(rng.integers(-span, span + 1)), 0)
            return complex(rng.standard_normal(), 0.0)

        w1 = w2 = None
        if beta == 1:
            w1 = [[draw_real() for _ in range(N)] for _ in range(k)]
            w2 = [[draw_real() for _ in range(N)] for _ in range(k)]
            z = [
                [w1[p][n] + QComplex(0, 1) * w2[p][n] if exact
                 else w1[p][n] + 1j * w2[p][n]
                 for n in range(N)]
                for p in range(k)
            ]
        else:
            z = [[draw() for _ in range(N)] for _ in range(k)]
        zeta_coeff = [[draw() for _ in range(N)] for _ in range(k)]
        algebra = GrassmannAlgebra(N * k)
        return VectorBundle(beta, N, k, metric, z, w1, w2, zeta_coeff, algebra)

    def zeta_gen(self, p: int, n: int) -> GrassmannElement:
        """Generator element for component ``n`` of ``zeta_p`` (scaled)."""
        return self.algebra.zeta(p * self.N + n).scale(self.zeta_coeff[p][n])

    def zeta_star_gen(self, p: int, n: int) -> GrassmannElement:
        c = self.zeta_coeff[p][n]
        conj = c.conjugate() if hasattr(c, "conjugate") else c
        return self.algebra.zeta_star(p * self.N + n).scale(conj)


@dataclass
class DualPair:
    K: list            # nested list of even Grassmann elements
    B: SuperMatrix
    bundle: VectorBundle


def _columns(bundle: VectorBundle):
    """Assemble the columns of A with their metric signs and parities.

    Returns ``(cols, col_metric, n_boson)`` where each column is a list of
    Grassmann elements (length N or 2N) and ``col_metric`` carries the metric
    entry of the column.
    """
    alg = bundle.algebra
    N, k, beta = bundle.N, bundle.k, bundle.beta
    cols: list[list[GrassmannElement]] = []
    sgn: list[int] = []

    def scal(c):
        return alg.scalar(c)

    if beta == 2:
        for p in range(k):
            cols.append([scal(bundle.z[p][n]) for n in range(N)])
            sgn.append(bundle.L[p])
        for p in range(k):
            cols.append([bundle.zeta_gen(p, n) for n in range(N)])
            sgn.append(1)
        return cols, sgn, k
    if beta == 1:
        for p in range(k):
            zc = [scal(bundle.z[p][n]) for n in range(N)]
            cols.append(zc)
            sgn.append(bundle.L[p])
            cols.append([conjugate(e) for e in zc])
            sgn.append(bundle.L[p])
        for p in range(k):
            zet = [bundle.zeta_gen(p, n) for n in range(N)]
            cols.append(zet)
            sgn.append(1)
            cols.append([conjugate(e) for e in zet])
            sgn.append(1)
        return cols, sgn, 2 * k
    # beta = 4: stacked 2N rows, two columns per source and sector
    for p in range(k):
        zc = [scal(bundle.z[p][n]) for n in range(N)]
        zcj = [conjugate(e) for e in zc]
        cols.append(zc + zc)
        sgn.append(bundle.L[p])
        cols.append([-e for e in zcj] + zcj)
        sgn.append(bundle.L[p])
    for p in range(k):
        zet = [bundle.zeta_gen(p, n) for n in range(N)]
        zets = [bundle.zeta_star_gen(p, n) for n in range(N)]
        cols.append(zet + zet)
        sgn.append(1)
        cols.append([-e for e in zets] + zets)
        sgn.append(1)
    return cols, sgn, 2 * k


def build_dual_pair(bundle: VectorBundle) -> DualPair:
    """Construct ``K = A L A^dag`` and ``B = L^(1/2) A^dag A L^(1/2)``."""
    alg = bundle.algebra
    cols, sgn, n_boson = _columns(bundle)
    ncols = len(cols)
    nrows = len(cols[0])
    exact = all(
        isinstance(c, QComplex) for vec in bundle.z for c in vec
    )
    # adjoint rows: conjugate entries, extra minus for anticommuting columns
    adj = []
    for c_idx, col in enumerate(cols):
        row = [conjugate(e) for e in col]
        if c_idx >= n_boson:
            row = [-e for e in row]
        adj.append(row)

    # K = sum_c sgn_c * col_c (x) adj_c
    K = [[alg.zero() for _ in range(nrows)] for _ in range(nrows)]
    for c_idx in range(ncols):
        col, row, s = cols[c_idx], adj[c_idx], sgn[c_idx]
        for i in range(nrows):
            if col[i].is_zero():
                continue
            for j in range(nrows):
                term = gproduct(col[i], row[j]).scale(s)
                K[i][j] = K[i][j] + term

    # M = sqrt(L) A^dag A sqrt(L)
    roots = _metric_sqrt(sgn, exact)
    M = [[alg.zero() for _ in range(ncols)] for _ in range(ncols)]
    for i in range(ncols):
        for j in range(ncols):
            acc = alg.zero()
            for n in range(nrows):
                acc = acc + gproduct(adj[i][n], cols[j][n])
            M[i][j] = acc.scale(roots[i] * roots[j])
    B = SuperMatrix.from_full(alg, M, n_boson, ncols - n_boson)
    return DualPair(K, B, bundle)


def _metric_sqrt(sgn, exact):
    if exact:
        return [QComplex(1) if s == 1 else QComplex(0, 1) for s in sgn]
    return [1.0 + 0.0j if s == 1 else 1.0j for s in sgn]


def _mat_power_trace(K, m):
    """tr K^m for a nested-list matrix of Grassmann elements."""
    n = len(K)
    power = K
    for _ in range(m - 1):
        power = [
            [_row_dot(power[i], [K[l][j] for l in range(n)]) for j in range(n)]
            for i in range(n)
        ]
    acc = K[0][0].algebra.zero()
    for i in range(n):
        acc = acc + power[i][i]
    return acc


def _row_dot(row, col):
    acc = None
    for u, v in zip(row, col):
        t = gproduct(u, v)
        acc = t if acc is None else acc + t
    return acc


def verify_trace_duality(bundle: VectorBundle, mmax: int = 4) -> dict:
    """Check ``tr K^m = str B^m`` for ``m = 1..mmax``; coefficient-level.

    Returns a report dict with the per-m maximal coefficient deviation
    (exactly 0.0 for exact bundles) and a pass flag.
    """
    pair = build_dual_pair(bundle)
    deviations = {}
    exact_all = True
    for m in range(1, mmax + 1):
        tr_k = _mat_power_trace(pair.K, m)
        b_pow = pair.B
        for _ in range(m - 1):
            b_pow = b_pow @ pair.B
        str_b = supertrace(b_pow)
        exact_all = exact_all and tr_k == str_b
        deviations[m] = max_coeff_deviation(tr_k, str_b)
    return {
        "identity": "tr K^m = str B^m",
        "beta": bundle.beta,
        "N": bundle.N,
        "k": bundle.k,
        "mmax": mmax,
        "max_deviation": max(deviations.values()),
        "deviations": deviations,
        "exact": exact_all,
        "passed": exact_all or max(deviations.values()) == 0.0,
    }


def dual_dagger(sigma: SuperMatrix) -> SuperMatrix:
    """Scalar-product adjoint ``((a^T, nu^T; -mu^T, b^T))^*`` (see module doc)."""
    plain = stranspose(sigma, "dagger")
    # flip the sign of both odd blocks relative to the superlinalg dagger
    mu = [[-e for e in row] for row in plain.mu]
    nu = [[-e for e in row] for row in plain.nu]
    return SuperMatrix(sigma.algebra, plain.a, mu, nu, plain.b, plain.k1, plain.k2)


def hermiticity_check(pair: DualPair, metric: Metric | None = None) -> dict:
    """K must be Hermitean for every metric; B only for L = 1."""
    metric = pair.bundle.L if metric is None else metric
    K = pair.K
    n = len(K)
    k_dev = 0.0
    for i in range(n):
        for j in range(n):
            k_dev = max(k_dev, max_coeff_deviation(conjugate(K[j][i]), K[i][j]))
    b_dag = dual_dagger(pair.B)
    b_dev = b_dag.max_deviation(pair.B)
    violating = None
    if b_dev > 0.0:
        full_b, full_d = pair.B.full(), b_dag.full()
        nn = pair.B.k1 + pair.B.k2
        for i in range(nn):
            for j in range(nn):
                if max_coeff_deviation(full_b[i][j], full_d[i][j]) == b_dev:
                    violating = (i, j)
                    break
            if violating:
                break
    return {
        "identity": "K^dag = K; B^dag = B iff L = 1",
        "K_hermitean_deviation": k_dev,
        "B_hermitean_deviation": b_dev,
        "metric_trivial": metric.is_trivial(),
        "violating_entry": violating,
        "passed": k_dev == 0.0 and ((b_dev == 0.0) == metric.is_trivial()),
    }


def explicit_B_beta2(bundle: VectorBundle) -> SuperMatrix:
    """The explicit scalar-product matrix for ``beta=2``, ``L=1``.

    Upper rows ``z_p^dag z_q | z_p^dag zeta_q``, lower rows with a minus:
    ``-zeta_p^dag z_q | -zeta_p^dag zeta_q``.
    """
    if bundle.beta != 2 or not bundle.L.is_trivial():
        raise ValueError("explicit form stated for beta=2 with L=1")
    alg = bundle.algebra
    k, N = bundle.k, bundle.N

    def zvec(p):
        return [alg.scalar(bundle.z[p][n]) for n in range(N)]

    def zetavec(p):
        return [bundle.zeta_gen(p, n) for n in range(N)]

    def dag_dot(u, v):
        acc = alg.zero()
        for a, b in zip(u, v):
            acc = acc + gproduct(conjugate(a), b)
        return acc

    a = [[dag_dot(zvec(p), zvec(q)) for q in range(k)] for p in range(k)]
    mu = [[dag_dot(zvec(p), zetavec(q)) for q in range(k)] for p in range(k)]
    nu = [[-dag_dot(zetavec(p), zvec(q)) for q in range(k)] for p in range(k)]
    b = [[-dag_dot(zetavec(p), zetavec(q)) for q in range(k)] for p in range(k)]
    return SuperMatrix(alg, a, mu, nu, b, k, k)


def explicit_K_dyadic(bundle: VectorBundle):
    """Dyadic form of K.

    ``beta=2``: ``sum_p L_p z_p z_p^dag - zeta_p zeta_p^dag``;
    ``beta=1``: ``sum_p L_p (z_p z_p^dag + z_p^* z_p^T) - zeta_p zeta_p^dag
    + zeta_p^* zeta_p^T`` (real symmetric).
    """
    if bundle.beta not in (1, 2):
        raise ValueError("dyadic oracle implemented for beta in {1, 2}")
    alg = bundle.algebra
    N, k = bundle.N, bundle.k
    K = [[alg.zero() for _ in range(N)] for _ in range(N)]

    def add_dyad(vec_i, vec_j, s=1):
        for i in range(N):
            for j in range(N):
                K[i][j] = K[i][j] + gproduct(vec_i[i], vec_j[j]).scale(s)

    for p in range(k):
        z = [alg.scalar(bundle.z[p][n]) for n in range(N)]
        zd = [conjugate(e) for e in z]
        zet = [bundle.zeta_gen(p, n) for n in range(N)]
        zetd = [conjugate(e) for e in zet]
        add_dyad(z, zd, bundle.L[p])
        add_dyad(zet, zetd, -1)
        if bundle.beta == 1:
            zs = [conjugate(e) for e in z]
            zsT = list(z)
            add_dyad(zs, zsT, bundle.L[p])
            zets = [conjugate(e) for e in zet]
            add_dyad(zets, zet, 1)
    return K
