r"""Supervectors and supermatrices over a Grassmann pool.

A supermatrix has the block form ``[[a, mu], [nu, b]]`` with Grassmann-even
entries in the diagonal blocks ``a`` (boson-boson, ``k1 x k1``) and ``b``
(fermion-fermion, ``k2 x k2``) and Grassmann-odd entries in ``mu``
(``k1 x k2``) and ``nu`` (``k2 x k1``).  Parity is checked on construction.

Conventions:

* transpose: ``(a^T, -nu^T; mu^T, b^T)`` so products transpose contravariantly,
* dagger: transpose followed by entry-wise conjugation (minus-sign star),
* supertrace ``str = tr a - tr b`` (cyclic),
* superdeterminant ``sdet = det(a - mu b^-1 nu) / det b`` (multiplicative).

Even-entry matrices are inverted through a body/soul split: the numeric body
is inverted by partial-pivot elimination and the nilpotent remainder enters a
Neumann series that terminates after at most ``2 * n_pairs`` steps (the soul
degree grows by at least one per factor).  Determinants of the small
even-entry blocks use Leibniz expansion over the commutative even subalgebra,
which is exact and division free.
"""

from __future__ import annotations

import itertools
import math
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .grassmann import (
    ConjugationConvention,
    GrassmannAlgebra,
    GrassmannElement,
    PoolMismatchError,
    QComplex,
    conjugate,
    gproduct,
    max_coeff_deviation,
)

__all__ = [
    "SuperMatrix",
    "SuperVector",
    "VectorLayout",
    "Metric",
    "SingularBlockError",
    "sm_multiply",
    "stranspose",
    "supertrace",
    "sdet",
    "sinverse",
    "sm_exp",
    "check_supergroup",
    "berezinian_linear",
    "even_matrix_det",
    "even_matrix_inverse",
    "sv_dagger_dot",
]


class SingularBlockError(ArithmeticError):
    """An even block has a singular numeric body where an inverse is needed."""


class VectorLayout(Enum):
    BOSON_TOP = "boson-top"
    FERMION_TOP = "fermion-top"


def _as_element(alg: GrassmannAlgebra, entry):
    if isinstance(entry, GrassmannElement):
        if entry.algebra != alg:
            raise PoolMismatchError("entry from a different generator pool")
        return entry
    return alg.scalar(entry)


def _block(alg, rows, nrow, ncol, want_even):
    if len(rows) != nrow:
        raise ValueError("block row count mismatch")
    out = []
    for row in rows:
        if len(row) != ncol:
            raise ValueError("block column count mismatch")
        conv = []
        for entry in row:
            e = _as_element(alg, entry)
            ok = e.is_even() if want_even else e.is_odd()
            if not ok:
                kind = "even" if want_even else "odd"
                raise ValueError(f"block entry {e!r} violates {kind} parity")
            conv.append(e)
        out.append(tuple(conv))
    return tuple(out)


class SuperMatrix:
    """Block supermatrix with parity-disciplined entries."""

    __slots__ = ("algebra", "k1", "k2", "a", "mu", "nu", "b")

    def __init__(self, algebra, a, mu, nu, b, k1=None, k2=None):
        k1 = len(a) if k1 is None else k1
        k2 = len(b) if k2 is None else k2
        self.algebra = algebra
        self.k1 = k1
        self.k2 = k2
        self.a = _block(algebra, a, k1, k1, True)
        self.mu = _block(algebra, mu, k1, k2, False)
        self.nu = _block(algebra, nu, k2, k1, False)
        self.b = _block(algebra, b, k2, k2, True)

    # -- constructors --------------------------------------------------
    @classmethod
    def zeros(cls, algebra, k1, k2):
        z = algebra.zero()
        return cls(
            algebra,
            [[z] * k1 for _ in range(k1)],
            [[z] * k2 for _ in range(k1)],
            [[z] * k1 for _ in range(k2)],
            [[z] * k2 for _ in range(k2)],
            k1,
            k2,
        )

    @classmethod
    def identity(cls, algebra, k1, k2):
        m = cls.zeros(algebra, k1, k2)
        one = algebra.one()
        a = [list(r) for r in m.a]
        b = [list(r) for r in m.b]
        for i in range(k1):
            a[i][i] = one
        for i in range(k2):
            b[i][i] = one
        return cls(algebra, a, m.mu, m.nu, b, k1, k2)

    @classmethod
    def from_full(cls, algebra, full, k1, k2):
        """Build from a dense ``(k1+k2) x (k1+k2)`` nested sequence."""
        a = [[full[i][j] for j in range(k1)] for i in range(k1)]
        mu = [[full[i][k1 + j] for j in range(k2)] for i in range(k1)]
        nu = [[full[k1 + i][j] for j in range(k1)] for i in range(k2)]
        b = [[full[k1 + i][k1 + j] for j in range(k2)] for i in range(k2)]
        return cls(algebra, a, mu, nu, b, k1, k2)

    def full(self):
        rows = []
        for i in range(self.k1):
            rows.append(list(self.a[i]) + list(self.mu[i]))
        for i in range(self.k2):
            rows.append(list(self.nu[i]) + list(self.b[i]))
        return rows

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        if (self.k1, self.k2) != (other.k1, other.k2):
            raise ValueError("dimension mismatch")
        f1, f2 = self.full(), other.full()
        n = self.k1 + self.k2
        return SuperMatrix.from_full(
            self.algebra,
            [[f1[i][j] + f2[i][j] for j in range(n)] for i in range(n)],
            self.k1,
            self.k2,
        )

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        f = self.full()
        n = self.k1 + self.k2
        return SuperMatrix.from_full(
            self.algebra,
            [[f[i][j].scale(c) for j in range(n)] for i in range(n)],
            self.k1,
            self.k2,
        )

    def __matmul__(self, other):
        return sm_multiply(self, other)

    def __eq__(self, other):
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        return (
            (self.k1, self.k2) == (other.k1, other.k2)
            and self.a == other.a
            and self.mu == other.mu
            and self.nu == other.nu
            and self.b == other.b
        )

    def max_deviation(self, other: "SuperMatrix") -> float:
        f1, f2 = self.full(), other.full()
        n = self.k1 + self.k2
        return max(
            max_coeff_deviation(f1[i][j], f2[i][j]) for i in range(n) for j in range(n)
        )

    def max_abs_coeff(self) -> float:
        return max(
            (e.max_abs_coeff() for row in self.full() for e in row), default=0.0
        )

    def dagger(self):
        return stranspose(self, mode="dagger")

    def __repr__(self):
        return f"<SuperMatrix {self.k1}/{self.k2}>"


class SuperVector:
    """One-column supermatrix; parity of entries must match the layout."""

    __slots__ = ("algebra", "k1", "k2", "layout", "entries")

    def __init__(self, algebra, entries, k1, k2, layout=VectorLayout.BOSON_TOP):
        entries = [_as_element(algebra, e) for e in entries]
        if len(entries) != k1 + k2:
            raise ValueError("entry count mismatch")
        for i, e in enumerate(entries):
            boson_slot = i < k1 if layout is VectorLayout.BOSON_TOP else i >= k2
            ok = e.is_even() if boson_slot else e.is_odd()
            if not ok:
                raise ValueError(f"entry {i} violates layout parity")
        self.algebra = algebra
        self.k1 = k1
        self.k2 = k2
        self.layout = layout
        self.entries = tuple(entries)

    def __eq__(self, other):
        return (
            isinstance(other, SuperVector)
            and self.layout == other.layout
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"<SuperVector {self.k1}/{self.k2} {self.layout.value}>"


def sm_multiply(x, y):
    """Product of supermatrices / supervector; parity discipline is rechecked."""
    if isinstance(x, SuperMatrix) and isinstance(y, SuperMatrix):
        if x.k1 != y.k1 or x.k2 != y.k2:
            raise ValueError("dimension mismatch")
        fx, fy = x.full(), y.full()
        n = x.k1 + x.k2
        out = [
            [_dot(fx[i], [fy[l][j] for l in range(n)]) for j in range(n)]
            for i in range(n)
        ]
        return SuperMatrix.from_full(x.algebra, out, x.k1, x.k2)
    if isinstance(x, SuperMatrix) and isinstance(y, SuperVector):
        if y.layout is not VectorLayout.BOSON_TOP:
            raise ValueError("matrix action implemented for boson-top layout")
        if x.k1 != y.k1 or x.k2 != y.k2:
            raise ValueError("dimension mismatch")
        fx = x.full()
        out = [_dot(fx[i], y.entries) for i in range(x.k1 + x.k2)]
        return SuperVector(x.algebra, out, x.k1, x.k2, y.layout)
    raise TypeError("sm_multiply expects supermatrices or matrix @ vector")


def _dot(row, col):
    acc = None
    for u, v in zip(row, col):
        t = gproduct(u, v)
        acc = t if acc is None else acc + t
    return acc


def stranspose(sigma: SuperMatrix, mode: str = "transpose") -> SuperMatrix:
    """Supertranspose ``(a^T, -nu^T; mu^T, b^T)`` or its conjugated dagger."""
    if mode not in ("transpose", "dagger"):
        raise ValueError("mode must be 'transpose' or 'dagger'")
    aT = _transpose_block(sigma.a)
    bT = _transpose_block(sigma.b)
    nuT = _transpose_block(sigma.nu)
    muT = _transpose_block(sigma.mu)
    a = aT
    mu = [[-e for e in row] for row in nuT]
    nu = muT
    b = bT
    out = SuperMatrix(sigma.algebra, a, mu, nu, b, sigma.k1, sigma.k2)
    if mode == "dagger":
        f = out.full()
        n = sigma.k1 + sigma.k2
        out = SuperMatrix.from_full(
            sigma.algebra,
            [[conjugate(f[i][j]) for j in range(n)] for i in range(n)],
            sigma.k1,
            sigma.k2,
        )
    return out


def _transpose_block(block):
    if not block:
        return ()
    nrow, ncol = len(block), len(block[0])
    return tuple(tuple(block[i][j] for i in range(nrow)) for j in range(ncol))


def supertrace(sigma: SuperMatrix) -> GrassmannElement:
    """``tr a - tr b``; cyclic under supermatrix products."""
    acc = sigma.algebra.zero()
    for i in range(sigma.k1):
        acc = acc + sigma.a[i][i]
    for i in range(sigma.k2):
        acc = acc - sigma.b[i][i]
    return acc


# -- even-entry matrix helpers ----------------------------------------------


def even_matrix_det(mat) -> GrassmannElement:
    """Leibniz determinant of a small matrix with Grassmann-even entries."""
    n = len(mat)
    if n == 0:
        raise ValueError("empty matrix has no algebra context")
    alg = mat[0][0].algebra
    if n > 6:
        raise ValueError("Leibniz determinant limited to n <= 6")
    acc = alg.zero()
    for perm in itertools.permutations(range(n)):
        term = alg.one()
        for i, j in enumerate(perm):
            term = gproduct(term, mat[i][j])
            if term.is_zero():
                break
        if term.is_zero():
            continue
        acc = acc + term.scale(_perm_sign(perm))
    return acc


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _body_matrix(mat):
    return [[e.body() for e in row] for row in mat]


def _body_inverse(body):
    """Partial-pivot Gauss-Jordan over complex-like scalars."""
    n = len(body)
    exact = all(isinstance(c, (int, Fraction, QComplex)) for row in body for c in row)
    if exact:
        lift = lambda c: c if isinstance(c, QComplex) else QComplex(Fraction(c))
        one, zero = QComplex(Fraction(1)), QComplex(Fraction(0))
        inv_of = lambda x: one / x
    else:
        lift = complex
        one, zero = 1.0 + 0.0j, 0.0 + 0.0j
        inv_of = lambda x: 1.0 / x
    aug = [
        [lift(body[i][j]) for j in range(n)]
        + [one if j == i else zero for j in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(aug[r][col]))
        if abs(aug[pivot][col]) == 0:
            raise SingularBlockError("singular body in even block")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = inv_of(aug[col][col])
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r == col:
                continue
            f = aug[r][col]
            if f == 0:
                continue
            aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def even_matrix_inverse(mat) -> list:
    """Inverse of an even-entry matrix via body inverse + terminating Neumann series.

    The soul part is nilpotent, so ``(B + S)^-1 = sum_n (-B^-1 S)^n B^-1``
    terminates after at most ``2 * n_pairs`` factors.
    """
    alg = mat[0][0].algebra
    n = len(mat)
    binv = _body_inverse(_body_matrix(mat))
    binv_e = [[alg.scalar(binv[i][j]) for j in range(n)] for i in range(n)]
    soul = [[mat[i][j].soul() for j in range(n)] for i in range(n)]
    if all(e.is_zero() for row in soul for e in row):
        return binv_e
    # X = -B^-1 S ; inverse = (sum_k X^k) B^-1
    x = _mat_mul(binv_e, soul)
    x = [[-e for e in row] for row in x]
    series = _mat_identity(alg, n)
    power = x
    for _ in range(alg.n_pairs):
        if all(e.is_zero() for row in power for e in row):
            break
        series = _mat_add(series, power)
        power = _mat_mul(power, x)
    return _mat_mul(series, binv_e)


def _mat_mul(m1, m2):
    n, k, m = len(m1), len(m2), len(m2[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for l in range(k):
                t = gproduct(m1[i][l], m2[l][j])
                acc = t if acc is None else acc + t
            row.append(acc)
        out.append(row)
    return out


def _mat_add(m1, m2):
    return [[u + v for u, v in zip(r1, r2)] for r1, r2 in zip(m1, m2)]


def _mat_identity(alg, n):
    return [[alg.one() if i == j else alg.zero() for j in range(n)] for i in range(n)]


def sdet(sigma: SuperMatrix, form: str = "b") -> GrassmannElement:
    """Superdeterminant ``det(a - mu b^-1 nu) / det b`` (``form='b'``).

    ``form='a'`` evaluates the alternative ``det a / det(b - nu a^-1 mu)``;
    both agree whenever both bodies are invertible.
    """
    alg = sigma.algebra
    if form == "b":
        b_inv = even_matrix_inverse([list(r) for r in sigma.b])
        inner = _mat_mul(_mat_mul([list(r) for r in sigma.mu], b_inv), [list(r) for r in sigma.nu])
        top = [[sigma.a[i][j] - inner[i][j] for j in range(sigma.k1)] for i in range(sigma.k1)]
        det_top = even_matrix_det(top) if sigma.k1 else alg.one()
        det_b = even_matrix_det([list(r) for r in sigma.b]) if sigma.k2 else alg.one()
        return gproduct(det_top, even_matrix_inverse([[det_b]])[0][0])
    if form == "a":
        a_inv = even_matrix_inverse([list(r) for r in sigma.a])
        inner = _mat_mul(_mat_mul([list(r) for r in sigma.nu], a_inv), [list(r) for r in sigma.mu])
        bot = [[sigma.b[i][j] - inner[i][j] for j in range(sigma.k2)] for i in range(sigma.k2)]
        det_a = even_matrix_det([list(r) for r in sigma.a]) if sigma.k1 else alg.one()
        det_bot = even_matrix_det(bot) if sigma.k2 else alg.one()
        return gproduct(det_a, even_matrix_inverse([[det_bot]])[0][0])
    raise ValueError("form must be 'a' or 'b'")


def sinverse(sigma: SuperMatrix) -> SuperMatrix:
    """Inverse via body inverse plus a finite Neumann series in the soul.

    The series length is bounded by the generator-pool size ``2 * n_pairs``:
    every entry of the nilpotent remainder has Grassmann degree at least one,
    so its matrix powers gain degree per factor and vanish beyond the pool.
    """
    alg = sigma.algebra
    n = sigma.k1 + sigma.k2
    full = sigma.full()
    body = [[e.body() if (i < sigma.k1) == (j < sigma.k1) else 0 for j, e in enumerate(row)] for i, row in enumerate(full)]
    binv = _body_inverse(body)
    binv_e = [[alg.scalar(binv[i][j]) for j in range(n)] for i in range(n)]
    rest = [
        [full[i][j] - alg.scalar(body[i][j]) for j in range(n)] for i in range(n)
    ]
    x = _mat_mul(binv_e, rest)
    x = [[-e for e in row] for row in x]
    series = _mat_identity(alg, n)
    power = x
    for _ in range(alg.n_generators):
        if all(e.is_zero() for row in power for e in row):
            break
        series = _mat_add(series, power)
        power = _mat_mul(power, x)
    inv = _mat_mul(series, binv_e)
    return SuperMatrix.from_full(alg, inv, sigma.k1, sigma.k2)


def sm_exp(sigma: SuperMatrix, terms: int = 24) -> SuperMatrix:
    """Matrix exponential by scaling-and-squaring with a truncated Taylor sum."""
    norm = sigma.max_abs_coeff()
    squarings = 0
    if norm > 0.5:
        squarings = max(0, math.ceil(math.log2(norm / 0.5)))
    scaled = sigma.scale(1.0 / (2 ** squarings)) if squarings else sigma
    acc = SuperMatrix.identity(sigma.algebra, sigma.k1, sigma.k2)
    term = SuperMatrix.identity(sigma.algebra, sigma.k1, sigma.k2)
    for n in range(1, terms + 1):
        term = sm_multiply(term, scaled).scale(1.0 / n)
        acc = acc + term
        if term.max_abs_coeff() < 1e-18:
            break
    for _ in range(squarings):
        acc = sm_multiply(acc, acc)
    return acc


class Metric:
    """Diagonal metric with +/-1 entries; fermionic slots stay at +1."""

    __slots__ = ("diag",)

    def __init__(self, diag: Sequence[int]):
        diag = list(diag)
        if any(v not in (1, -1) for v in diag):
            raise ValueError("metric entries must be +1 or -1")
        self.diag = diag

    def __len__(self):
        return len(self.diag)

    def __getitem__(self, i):
        return self.diag[i]

    def is_trivial(self) -> bool:
        return all(v == 1 for v in self.diag)

    def sqrt_entries(self, exact: bool = False):
        """Principal square roots: 1 for +1, i for -1."""
        if exact:
            return [QComplex(1) if v == 1 else QComplex(0, 1) for v in self.diag]
        return [1.0 + 0.0j if v == 1 else 1.0j for v in self.diag]


def check_supergroup(u: SuperMatrix, family: str, metric: Metric | None = None, tol: float = 1e-10):
    """Residual of the defining relation of a supergroup family.

    ``family`` is one of ``"U"`` (unitary supergroup, ``u^dag u = 1``),
    ``"UOSp"`` (same defining check through the dagger relation on the mixed
    real/quaternion scalar product) or ``"noncompact"`` (``u^dag L u = L``,
    needs ``metric``).  Returns ``(is_member, max_residual)``; report-only.
    """
    alg = u.algebra
    udag = stranspose(u, "dagger")
    n = u.k1 + u.k2
    if family in ("U", "UOSp"):
        resid_m = sm_multiply(udag, u) - SuperMatrix.identity(alg, u.k1, u.k2)
    elif family == "noncompact":
        if metric is None:
            raise ValueError("noncompact family needs a metric")
        lmat = SuperMatrix.from_full(
            alg,
            [
                [alg.scalar(metric[i]) if i == j else alg.zero() for j in range(n)]
                for i in range(n)
            ],
            u.k1,
            u.k2,
        )
        resid_m = sm_multiply(sm_multiply(udag, lmat), u) - lmat
    else:
        raise ValueError(f"unknown family {family!r}")
    residual = resid_m.max_abs_coeff()
    return residual <= tol, residual


def berezinian_linear(
    algebra: GrassmannAlgebra,
    dy_dz,
    dy_dzeta,
    deta_dz,
    deta_dzeta,
) -> GrassmannElement:
    """Berezinian (superspace Jacobian) of a linear block map.

    The blocks are the derivatives of the new coordinates ``(y, eta)`` with
    respect to the old ``(z, zeta)``; the result is the superdeterminant of
    the block matrix, the factor relating the volume elements.
    """
    jac = SuperMatrix(algebra, dy_dz, dy_dzeta, deta_dz, deta_dzeta)
    return sdet(jac)


def sv_dagger_dot(psi: SuperVector, chi: SuperVector) -> GrassmannElement:
    """Scalar product ``psi^dag chi`` with minus-sign-convention conjugation."""
    if psi.layout is not chi.layout or len(psi.entries) != len(chi.entries):
        raise ValueError("layout mismatch")
    acc = psi.algebra.zero()
    for u, v in zip(psi.entries, chi.entries):
        acc = acc + gproduct(conjugate(u), v)
    return acc
