r"""Exact symbolic algebra of complex anticommuting variables.

A pool of ``G`` conjugate pairs provides ``2G`` generators.  Generator ids
follow a fixed pairing convention:

* even id ``2p``   -> ``z(p)``   (the variable itself)
* odd id  ``2p+1`` -> ``zs(p)``  (its complex conjugate)

Elements are sparse multivectors: a map from a generator bitmask (canonically
ordered ascending by id) to a commuting coefficient.  Coefficients may be any
complex-like scalar supporting ``+``, ``*``, ``conjugate()`` and comparison
with ``0``; in practice that means Python ``int``/``float``/``complex``,
``fractions.Fraction`` or :class:`QComplex` for exact rational work.

Sign conventions
----------------
Products merge the two bitmasks; the sign is the parity of the permutation
sorting the concatenated index list, and a repeated generator annihilates the
term.

Complex conjugation comes in the two equivalent flavours:

* ``MINUS_SIGN`` (default): star each factor in place, with a second star
  flipping the sign of the variable.
* ``ORDER_REVERSAL``: star each factor and reverse the factor order, with the
  second star acting trivially.

Both make ``zs(p)*z(p)`` real.  A single expression must stick to one
convention; mixing them within one computation is not supported.

Berezin integration
-------------------
``berezin_integrate(a, [g0, g1, ...])`` treats the list as the written string
of differentials, contracting ``g0`` first (the innermost integral).  Each
contraction drops terms free of the generator and, in the surviving terms,
moves the generator to the rightmost slot of the monomial (collecting the
anticommutation sign) before scaling by the normalization (default
``1/sqrt(2*pi)``).

Worked sign example with unit normalization::

    a = z(0) * zs(0)                 # one term, coefficient +1
    berezin_integrate(a, [z(0)])     # move z(0) right past zs(0): sign -1
                                     # -> -zs(0)
    berezin_integrate(a, [z(0), zs(0)])  # -> -1
    berezin_integrate(a, [zs(0), z(0)])  # -> +1
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Sequence

__all__ = [
    "GrassmannAlgebra",
    "GrassmannElement",
    "ConjugationConvention",
    "QComplex",
    "PoolMismatchError",
    "SeriesDomainError",
    "gproduct",
    "conjugate",
    "apply_even_series",
    "berezin_integrate",
    "superdelta_expand",
    "PowerSeriesSpec",
    "exp_series",
    "inverse_series",
    "log_series",
    "power_series",
    "gexp",
    "gexp_factored",
    "ginv",
    "format_element",
    "parse_element",
    "BEREZIN_NORM",
]

#: Default Berezin normalization: each single integral of the generator
#: itself yields 1/sqrt(2*pi).  Configurable per call since it is "a common,
#: but not the only" choice.
BEREZIN_NORM = 1.0 / math.sqrt(2.0 * math.pi)


class PoolMismatchError(ValueError):
    """Operands belong to different generator pools."""


class SeriesDomainError(ValueError):
    """A power series is not defined at the body of its argument."""


class ConjugationConvention(Enum):
    MINUS_SIGN = "minus-sign"
    ORDER_REVERSAL = "order-reversal"


class QComplex:
    """Exact complex scalar with integer or rational real/imaginary parts.

    Supports the ring operations used by the algebra plus division by exact
    scalars, so identity checks can run without any floating point noise.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re
        self.im = im

    @staticmethod
    def _coerce(value):
        if isinstance(value, QComplex):
            return value
        if isinstance(value, (int, Fraction)):
            return QComplex(value, 0)
        return NotImplemented

    def __add__(self, other):
        other = QComplex._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = QComplex._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = QComplex._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = QComplex._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QComplex._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("division by zero QComplex")
        den = Fraction(den)
        return QComplex(
            Fraction(self.re * other.re + self.im * other.im) / den,
            Fraction(self.im * other.re - self.re * other.im) / den,
        )

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def conjugate(self):
        return QComplex(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.re == other and self.im == 0
        if isinstance(other, QComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((Fraction(self.re), Fraction(self.im)))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __abs__(self):
        return math.hypot(float(self.re), float(self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QComplex({self.re!r}, {self.im!r})"


def _conj_coeff(c):
    if isinstance(c, complex):
        return c.conjugate()
    conj = getattr(c, "conjugate", None)
    if conj is not None:
        return conj()
    return c


def _merge_sign(m1: int, m2: int) -> int:
    """Parity sign of interleaving mask ``m2`` after ``m1`` into sorted order."""
    sign = 1
    bits = m2
    while bits:
        low = bits & -bits
        b = low.bit_length() - 1
        if (m1 >> (b + 1)).bit_count() & 1:
            sign = -sign
        bits ^= low
    return sign


def _sort_sign(ids: Sequence[int]) -> int:
    """Sign of the permutation sorting ``ids`` ascending (ids distinct)."""
    ids = list(ids)
    sign = 1
    for i in range(1, len(ids)):
        key = ids[i]
        j = i - 1
        while j >= 0 and ids[j] > key:
            ids[j + 1] = ids[j]
            j -= 1
            sign = -sign
        ids[j + 1] = key
    return sign


def _mask_ids(mask: int) -> list[int]:
    ids = []
    while mask:
        low = mask & -mask
        ids.append(low.bit_length() - 1)
        mask ^= low
    return ids


class GrassmannAlgebra:
    """A pool of ``n_pairs`` conjugate generator pairs (``2*n_pairs`` generators)."""

    __slots__ = ("n_pairs",)

    def __init__(self, n_pairs: int):
        if n_pairs < 0:
            raise ValueError("n_pairs must be >= 0")
        self.n_pairs = n_pairs

    @property
    def n_generators(self) -> int:
        return 2 * self.n_pairs

    def __eq__(self, other):
        return isinstance(other, GrassmannAlgebra) and other.n_pairs == self.n_pairs

    def __hash__(self):
        return hash(("GrassmannAlgebra", self.n_pairs))

    def __repr__(self):
        return f"GrassmannAlgebra(n_pairs={self.n_pairs})"

    def zero(self) -> "GrassmannElement":
        return GrassmannElement(self, {})

    def scalar(self, c) -> "GrassmannElement":
        return GrassmannElement(self, {0: c} if not _is_zero(c) else {})

    def one(self) -> "GrassmannElement":
        return self.scalar(1)

    def gen(self, gid: int) -> "GrassmannElement":
        if not 0 <= gid < self.n_generators:
            raise ValueError(f"generator id {gid} outside pool of {self.n_generators}")
        return GrassmannElement(self, {1 << gid: 1})

    def zeta(self, p: int) -> "GrassmannElement":
        return self.gen(2 * p)

    def zeta_star(self, p: int) -> "GrassmannElement":
        return self.gen(2 * p + 1)

    def extended(self, extra_pairs: int) -> "GrassmannAlgebra":
        """A larger pool that contains this one's generators with unchanged ids."""
        return GrassmannAlgebra(self.n_pairs + extra_pairs)

    def embed(self, elem: "GrassmannElement") -> "GrassmannElement":
        """Reinterpret an element of a sub-pool inside this pool."""
        if elem.algebra.n_pairs > self.n_pairs:
            raise PoolMismatchError("cannot embed into a smaller pool")
        return GrassmannElement(self, dict(elem.terms))


def _is_zero(c) -> bool:
    try:
        return c == 0
    except TypeError:  # pragma: no cover - exotic coefficient types
        return False


class GrassmannElement:
    """Immutable sparse multivector over a generator pool.

    ``terms`` maps a generator bitmask to its commuting coefficient; the empty
    mask holds the scalar (body) part.  Instances are value objects: all
    operations return new elements.
    """

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: GrassmannAlgebra, terms: dict, prune: float = 0.0):
        clean = {}
        for mask, coeff in terms.items():
            if _is_zero(coeff):
                continue
            if prune and abs(coeff) <= prune:
                continue
            clean[mask] = coeff
        self.algebra = algebra
        self.terms = clean

    # -- basic structure ---------------------------------------------------
    def body(self):
        """Scalar part (coefficient of the empty monomial)."""
        return self.terms.get(0, 0)

    def soul(self) -> "GrassmannElement":
        """Nilpotent part: everything except the body."""
        return GrassmannElement(
            self.algebra, {m: c for m, c in self.terms.items() if m != 0}
        )

    def is_zero(self) -> bool:
        return not self.terms

    def is_even(self) -> bool:
        return all(m.bit_count() % 2 == 0 for m in self.terms)

    def is_odd(self) -> bool:
        return all(m.bit_count() % 2 == 1 for m in self.terms)

    def max_degree(self) -> int:
        return max((m.bit_count() for m in self.terms), default=0)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def coefficient(self, generator_ids: Iterable[int]):
        mask = 0
        for gid in generator_ids:
            bit = 1 << gid
            if mask & bit:
                return 0
            mask |= bit
        sign = _sort_sign(list(generator_ids)) if mask else 1
        c = self.terms.get(mask, 0)
        return c if sign == 1 else -c

    # -- ring operations ---------------------------------------------------
    def _check_pool(self, other: "GrassmannElement"):
        if self.algebra != other.algebra:
            raise PoolMismatchError(
                f"mismatched generator pools: {self.algebra} vs {other.algebra}"
            )

    def __add__(self, other):
        if not isinstance(other, GrassmannElement):
            other = self.algebra.scalar(other)
        self._check_pool(other)
        terms = dict(self.terms)
        for mask, coeff in other.terms.items():
            acc = terms.get(mask)
            terms[mask] = coeff if acc is None else acc + coeff
        return GrassmannElement(self.algebra, terms)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GrassmannElement):
            other = self.algebra.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return GrassmannElement(self.algebra, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GrassmannElement):
            return gproduct(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        # commuting scalars commute with every element
        return self.scale(other)

    def scale(self, c) -> "GrassmannElement":
        if _is_zero(c):
            return self.algebra.zero()
        return GrassmannElement(
            self.algebra, {m: coeff * c for m, coeff in self.terms.items()}
        )

    def __eq__(self, other):
        if isinstance(other, GrassmannElement):
            if self.algebra != other.algebra:
                return False
            return self.terms == other.terms
        # scalar comparison
        if len(self.terms) == 0:
            return _is_zero(other)
        if set(self.terms) == {0}:
            return self.terms[0] == other
        return False

    def __hash__(self):
        return hash((self.algebra, frozenset(self.terms.items())))

    def approx_eq(self, other: "GrassmannElement", tol: float = 1e-12) -> bool:
        return max_coeff_deviation(self, other) <= tol

    def conj(self, convention: ConjugationConvention = ConjugationConvention.MINUS_SIGN):
        return conjugate(self, convention)

    def __repr__(self):
        return f"<GrassmannElement {format_element(self)}>"


def max_coeff_deviation(a: GrassmannElement, b: GrassmannElement) -> float:
    """Largest absolute coefficient difference between two elements."""
    a._check_pool(b)
    dev = 0.0
    for mask in set(a.terms) | set(b.terms):
        dev = max(dev, abs(a.terms.get(mask, 0) - b.terms.get(mask, 0)))
    return dev


def gproduct(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    """Bilinear product; repeated generators annihilate, signs from sorting."""
    a._check_pool(b)
    terms: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            if m1 & m2:
                continue
            coeff = c1 * c2
            if _merge_sign(m1, m2) < 0:
                coeff = -coeff
            mask = m1 | m2
            acc = terms.get(mask)
            terms[mask] = coeff if acc is None else acc + coeff
    return GrassmannElement(a.algebra, terms)


def conjugate(
    a: GrassmannElement,
    convention: ConjugationConvention = ConjugationConvention.MINUS_SIGN,
) -> GrassmannElement:
    """Generator-wise star with the convention's sign/order rule.

    ``MINUS_SIGN``: star factors in place; a starred generator picks up -1
    when starred again.  ``ORDER_REVERSAL``: star factors and reverse their
    order, with no extra sign.  Coefficients are complex conjugated.
    """
    terms: dict = {}
    for mask, coeff in a.terms.items():
        ids = _mask_ids(mask)
        mapped = [g ^ 1 for g in ids]
        sign = 1
        if convention is ConjugationConvention.MINUS_SIGN:
            for g in ids:
                if g & 1:  # (zs)* = -z
                    sign = -sign
            sign *= _sort_sign(mapped)
        else:
            mapped.reverse()
            sign *= _sort_sign(mapped)
        new_mask = 0
        for g in mapped:
            new_mask |= 1 << g
        c = _conj_coeff(coeff)
        terms[new_mask] = c if sign == 1 else -c
    return GrassmannElement(a.algebra, terms)


@dataclass(frozen=True)
class PowerSeriesSpec:
    """A power series around the body of an even element.

    ``taylor(body, nmax)`` returns the coefficients ``[f(b), f'(b)/1!, ...,
    f^(nmax)(b)/nmax!]`` used to sum ``f(body + soul)``.
    """

    name: str
    taylor: Callable[[object, int], Sequence]


def _exp_taylor(body, nmax):
    if isinstance(body, (int, Fraction, QComplex)) and body == 0:
        base = Fraction(1)
    else:
        base = _cexp(body)
    coeffs = []
    fact = 1
    for n in range(nmax + 1):
        if n > 0:
            fact *= n
        coeffs.append(base * Fraction(1, fact) if isinstance(base, (Fraction, QComplex)) else base / fact)
    return coeffs


def _cexp(z):
    if isinstance(z, QComplex):
        z = complex(z)
    if isinstance(z, complex):
        return _complex_exp(z)
    return math.exp(z)


def _complex_exp(z: complex) -> complex:
    r = math.exp(z.real)
    return complex(r * math.cos(z.imag), r * math.sin(z.imag))


def exp_series() -> PowerSeriesSpec:
    return PowerSeriesSpec("exp", _exp_taylor)


def inverse_series() -> PowerSeriesSpec:
    def taylor(body, nmax):
        if _is_zero(body):
            raise SeriesDomainError("1/x undefined at body 0")
        if isinstance(body, (int, Fraction)):
            inv = Fraction(1, 1) / Fraction(body)
        elif isinstance(body, QComplex):
            inv = QComplex(1) / body
        else:
            inv = 1.0 / body
        coeffs = []
        cur = inv
        for n in range(nmax + 1):
            coeffs.append(cur)
            cur = -cur * inv
        return coeffs

    return PowerSeriesSpec("inverse", taylor)


def log_series() -> PowerSeriesSpec:
    def taylor(body, nmax):
        if _is_zero(body):
            raise SeriesDomainError("log undefined at body 0")
        b = complex(body) if not isinstance(body, (int, float)) else body
        coeffs = [_clog(b)]
        # log(b + s) = log b + sum (-1)^(n+1) s^n / (n b^n)
        for n in range(1, nmax + 1):
            coeffs.append(((-1) ** (n + 1)) / (n * (b ** n)))
        return coeffs

    return PowerSeriesSpec("log", taylor)


def _clog(z):
    if isinstance(z, complex):
        return complex(math.log(abs(z)), math.atan2(z.imag, z.real))
    if z <= 0:
        raise SeriesDomainError("log undefined at nonpositive real body")
    return math.log(z)


def power_series(alpha) -> PowerSeriesSpec:
    def taylor(body, nmax):
        if _is_zero(body):
            raise SeriesDomainError("x**alpha undefined at body 0")
        b = complex(body) if not isinstance(body, (int, float)) else body
        coeffs = []
        cur = b ** alpha
        for n in range(nmax + 1):
            coeffs.append(cur)
            cur = cur * (alpha - n) / ((n + 1) * b)
        return coeffs

    return PowerSeriesSpec(f"pow({alpha})", taylor)


def apply_even_series(series: PowerSeriesSpec, a: GrassmannElement) -> GrassmannElement:
    """Sum ``f(body + soul)`` as the finite Taylor series in the nilpotent soul."""
    if not a.is_even():
        raise ValueError("apply_even_series requires a Grassmann-even argument")
    nmax = a.algebra.n_pairs
    coeffs = series.taylor(a.body(), nmax)
    soul = a.soul()
    result = a.algebra.scalar(coeffs[0])
    power = a.algebra.one()
    for n in range(1, nmax + 1):
        power = gproduct(power, soul)
        if power.is_zero():
            break
        result = result + power.scale(coeffs[n])
    return result


def gexp(a: GrassmannElement) -> GrassmannElement:
    return apply_even_series(exp_series(), a)


def gexp_factored(a: GrassmannElement):
    """Return ``(body, sum_n soul^n / n!)`` so that exp(a) = exp(body) * series.

    The series factor has exact coefficients whenever the input does, which is
    what coefficient-exact identity checks compare.
    """
    if not a.is_even():
        raise ValueError("gexp_factored requires a Grassmann-even argument")
    soul = a.soul()
    exact = _wants_exact(a)
    result = a.algebra.scalar(Fraction(1) if exact else 1.0)
    power = a.algebra.one()
    fact = 1
    for n in range(1, a.algebra.n_pairs + 1):
        power = gproduct(power, soul)
        if power.is_zero():
            break
        fact *= n
        factor = Fraction(1, fact) if exact else 1.0 / fact
        result = result + power.scale(factor)
    return a.body(), result


def _wants_exact(a: GrassmannElement) -> bool:
    return all(isinstance(c, (int, Fraction, QComplex)) for c in a.terms.values())


def ginv(a: GrassmannElement) -> GrassmannElement:
    return apply_even_series(inverse_series(), a)


def berezin_integrate(
    a: GrassmannElement,
    order: Sequence[int],
    normalization=None,
) -> GrassmannElement:
    """Berezin-integrate over the listed generators, first-listed innermost.

    See the module docstring for the sign convention.  ``normalization``
    scales each single integral (default ``1/sqrt(2*pi)``).
    """
    seen = set()
    for gid in order:
        if gid in seen:
            raise ValueError(f"duplicate generator {gid} in integration order")
        if not 0 <= gid < a.algebra.n_generators:
            raise ValueError(f"generator {gid} outside pool")
        seen.add(gid)
    norm = BEREZIN_NORM if normalization is None else normalization
    result = a
    for gid in order:
        bit = 1 << gid
        terms: dict = {}
        for mask, coeff in result.terms.items():
            if not mask & bit:
                continue
            # sign of moving the generator to the rightmost slot
            if (mask >> (gid + 1)).bit_count() & 1:
                coeff = -coeff
            terms[mask ^ bit] = coeff * norm
        result = GrassmannElement(a.algebra, terms)
    return result


def superdelta_expand(
    fderivs: Sequence,
    y0,
    bilinear: GrassmannElement,
    k: int,
) -> GrassmannElement:
    """Pair a test function with the superspace delta at ``y0 - bilinear``.

    ``fderivs[kappa]`` supplies the kappa-th derivative of the smeared test
    function at ``y0``; the result is the terminating series
    ``sum_(kappa<=k) (-1)^kappa / kappa! * fderivs[kappa] * bilinear^kappa``.
    """
    if len(fderivs) < k + 1:
        raise ValueError(f"need {k + 1} derivative values, got {len(fderivs)}")
    if not bilinear.is_even():
        raise ValueError("bilinear argument must be Grassmann-even")
    exact = _wants_exact(bilinear) and all(
        isinstance(c, (int, Fraction, QComplex)) for c in fderivs[: k + 1]
    )
    alg = bilinear.algebra
    result = alg.zero()
    power = alg.one()
    fact = 1
    for kappa in range(k + 1):
        if kappa > 0:
            power = gproduct(power, bilinear)
            fact *= kappa
            if power.is_zero():
                break
        scale = Fraction((-1) ** kappa, fact) if exact else ((-1) ** kappa) / fact
        result = result + power.scale(fderivs[kappa] * scale)
    return result


# -- textual round-trip format ---------------------------------------------

_TERM_RE = re.compile(r"^\s*(?P<coeff>[^*]+?)\s*(\*\s*(?P<gens>.*))?$")
_GEN_RE = re.compile(r"(z|zs)\((\d+)\)")


def format_element(a: GrassmannElement) -> str:
    """Emit the ``coeff * z(p) zs(p) ...`` term list (canonical order)."""
    if not a.terms:
        return "0"
    parts = []
    for mask in sorted(a.terms):
        coeff = a.terms[mask]
        if isinstance(coeff, QComplex):
            cstr = repr(complex(coeff))
        elif isinstance(coeff, (int, float, Fraction)):
            cstr = repr(complex(coeff))
        else:
            cstr = repr(coeff)
        gens = " ".join(
            f"z({g // 2})" if g % 2 == 0 else f"zs({g // 2})" for g in _mask_ids(mask)
        )
        parts.append(f"{cstr} * {gens}" if gens else cstr)
    return " + ".join(parts)


def parse_element(text: str, algebra: GrassmannAlgebra) -> GrassmannElement:
    """Parse the format emitted by :func:`format_element`."""
    text = text.strip()
    if text == "0":
        return algebra.zero()
    terms: dict = {}
    for chunk in text.split(" + "):
        m = _TERM_RE.match(chunk)
        if m is None:
            raise ValueError(f"cannot parse term {chunk!r}")
        coeff = complex(m.group("coeff").strip().strip("()"))
        mask = 0
        if m.group("gens"):
            for kind, idx in _GEN_RE.findall(m.group("gens")):
                gid = 2 * int(idx) + (1 if kind == "zs" else 0)
                bit = 1 << gid
                if mask & bit:
                    raise ValueError(f"repeated generator in {chunk!r}")
                mask |= bit
        acc = terms.get(mask)
        terms[mask] = coeff if acc is None else acc + coeff
    return GrassmannElement(algebra, terms)
