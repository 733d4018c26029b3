r"""
Truncated one-variable q-series with exponents in (1/24)Z and exact
rational coefficients, plus the classical series eta, E4, E6 and Delta.

A :class:`QSeries` knows its precision: every coefficient at an exponent
below ``trunc_order`` is exact, and asking for anything at or above it raises
:class:`~lkm3.errors.OutOfTruncation` instead of returning zero.

EXAMPLES::

    >>> from lkm3.exactseries import QSeries, delta
    >>> one_minus_q = QSeries({0: 1, 1: -1}, 10)
    >>> (one_minus_q * QSeries({0: 1, 1: 1}, 10)).terms
    {Fraction(0, 1): 1, Fraction(2, 1): -1}
    >>> delta(3)[2]
    -24
"""

from fractions import Fraction
from math import gcd
from numbers import Rational

from .errors import ExponentError, OutOfTruncation, ZeroSeries

DEN = 24


def norm_q(x):
    """Return ``x`` as an int when it is integral, else as a Fraction."""
    if isinstance(x, int):
        return x
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def to_units(e, den=DEN):
    """``den * e`` as an int; raise ExponentError if it is not integral."""
    e = Fraction(e)
    scaled = e * den
    if scaled.denominator != 1:
        raise ExponentError(f"exponent {e} has denominator not dividing {den}")
    return scaled.numerator


def divisor_sum(k, power=1):
    """Sum of ``d**power`` over the positive divisors ``d`` of ``k``."""
    if k < 1:
        raise ValueError("divisor sums need k >= 1")
    total = 0
    d = 1
    while d * d <= k:
        if k % d == 0:
            total += d**power
            e = k // d
            if e != d:
                total += e**power
        d += 1
    return total


def sigma1(k):
    return divisor_sum(k, 1)


class QSeries:
    """Immutable truncated series ``sum c_e q^e + O(q^trunc_order)``."""

    __slots__ = ("_terms", "_trunc")

    def __init__(self, terms, trunc_order):
        trunc = to_units(trunc_order)
        clean = {}
        for e, c in dict(terms).items():
            k = to_units(e)
            c = norm_q(c)
            if c and k < trunc:
                clean[k] = c
        self._terms = clean
        self._trunc = trunc

    @classmethod
    def _raw(cls, terms, trunc):
        obj = cls.__new__(cls)
        obj._terms = {k: c for k, c in terms.items() if c and k < trunc}
        obj._trunc = trunc
        return obj

    # --- accessors -----------------------------------------------------

    @property
    def trunc_order(self):
        return Fraction(self._trunc, DEN)

    @property
    def terms(self):
        return {Fraction(k, DEN): c for k, c in sorted(self._terms.items())}

    def valuation(self):
        """Smallest exponent with a nonzero coefficient (trunc_order if none)."""
        return Fraction(self._valuation_units(), DEN)

    def _valuation_units(self):
        return min(self._terms) if self._terms else self._trunc

    def __getitem__(self, e):
        k = to_units(e)
        if k >= self._trunc:
            raise OutOfTruncation(f"q^{Fraction(k, DEN)} is beyond O(q^{self.trunc_order})")
        return self._terms.get(k, 0)

    coeff = __getitem__

    def is_zero(self):
        return not self._terms

    def is_integral(self):
        return all(isinstance(c, int) for c in self._terms.values())

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._trunc == other._trunc and self._terms == other._terms

    def __hash__(self):
        return hash((self._trunc, frozenset(self._terms.items())))

    def __repr__(self):
        parts = []
        for k, c in sorted(self._terms.items())[:8]:
            parts.append(f"{c}*q^{Fraction(k, DEN)}")
        if len(self._terms) > 8:
            parts.append("...")
        parts.append(f"O(q^{self.trunc_order})")
        return " + ".join(parts)

    # --- arithmetic ----------------------------------------------------

    def truncate(self, trunc_order):
        trunc = min(self._trunc, to_units(trunc_order))
        return QSeries._raw(self._terms, trunc)

    def __neg__(self):
        return QSeries._raw({k: -c for k, c in self._terms.items()}, self._trunc)

    def __add__(self, other):
        if isinstance(other, (int, Rational)):
            other = QSeries._raw({0: norm_q(other)}, self._trunc)
        if not isinstance(other, QSeries):
            return NotImplemented
        trunc = min(self._trunc, other._trunc)
        out = {k: c for k, c in self._terms.items() if k < trunc}
        for k, c in other._terms.items():
            if k < trunc:
                out[k] = norm_q(out.get(k, 0) + c)
        return QSeries._raw(out, trunc)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scalar_mul(self, c):
        c = norm_q(c)
        return QSeries._raw({k: norm_q(c * x) for k, x in self._terms.items()}, self._trunc)

    def shift(self, e):
        """Multiply by the monomial ``q^e``."""
        k = to_units(e)
        return QSeries._raw({j + k: c for j, c in self._terms.items()}, self._trunc + k)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scalar_mul(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        va, vb = self._valuation_units(), other._valuation_units()
        trunc = min(self._trunc + vb, other._trunc + va)
        out = {}
        b_items = sorted(other._terms.items())
        for ka, ca in sorted(self._terms.items()):
            for kb, cb in b_items:
                k = ka + kb
                if k >= trunc:
                    break
                out[k] = out.get(k, 0) + ca * cb
        return QSeries._raw({k: norm_q(c) for k, c in out.items()}, trunc)

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse, exact up to the guaranteed precision."""
        if not self._terms:
            raise ZeroSeries("series has no terms below its truncation order")
        v = self._valuation_units()
        lead = Fraction(self._terms[v])
        rel = self._trunc - v
        a = {k - v: c for k, c in self._terms.items()}
        a_items = sorted((k, c) for k, c in a.items() if k > 0)
        b = {0: 1 / lead}
        step = 0
        for k, _ in a_items:
            step = gcd(step, k)
        # b_k = -(1/lead) * sum_{j>0} a_j b_{k-j}
        for k in range(step, rel, step) if step else ():
            acc = 0
            for j, c in a_items:
                if j > k:
                    break
                bk = b.get(k - j)
                if bk:
                    acc += c * bk
            if acc:
                b[k] = -acc / lead
        return QSeries._raw({k - v: norm_q(c) for k, c in b.items()}, rel - v)

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scalar_mul(Fraction(1) / Fraction(other))
        return self * other.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return QSeries._raw({0: 1}, self._trunc - self._valuation_units())
        base, result = self, None
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # --- serialization -------------------------------------------------

    def to_records(self):
        t = self.trunc_order
        terms = []
        for k, c in sorted(self._terms.items()):
            e, c = Fraction(k, DEN), Fraction(c)
            terms.append([e.numerator, e.denominator, c.numerator, c.denominator])
        return {"format": "lkm3.qseries/1", "trunc": [t.numerator, t.denominator], "terms": terms}

    @classmethod
    def from_records(cls, data):
        if data.get("format") != "lkm3.qseries/1":
            raise ValueError("not a serialized QSeries")
        tn, td = data["trunc"]
        terms = {}
        prev = None
        for en, ed, cn, cd in data["terms"]:
            e = Fraction(en, ed)
            if prev is not None and e <= prev:
                raise ValueError("records must be sorted by exponent without repeats")
            prev = e
            terms[e] = Fraction(cn, cd)
        return cls(terms, Fraction(tn, td))


def _product_one_minus(order_units, offset=0):
    """Coefficients of prod_{n>=1}(1 - q^n) as a list indexed by integer exponent."""
    nmax = 0
    while offset + DEN * (nmax + 1) < order_units:
        nmax += 1
    coeffs = [0] * (nmax + 1)
    coeffs[0] = 1
    for n in range(1, nmax + 1):
        for k in range(nmax, n - 1, -1):
            coeffs[k] -= coeffs[k - n]
    return coeffs


def eta(order):
    """Dedekind eta ``q^(1/24) prod (1 - q^n)`` up to ``O(q^order)``."""
    order_units = to_units(order)
    coeffs = _product_one_minus(order_units, offset=1)
    return QSeries._raw({1 + DEN * k: c for k, c in enumerate(coeffs)}, order_units)


def _eisenstein(order, scale, power):
    order_units = to_units(order)
    terms = {0: 1}
    n = 1
    while DEN * n < order_units:
        terms[DEN * n] = scale * divisor_sum(n, power)
        n += 1
    return QSeries._raw(terms, order_units)


def e4(order):
    return _eisenstein(order, 240, 3)


def e6(order):
    return _eisenstein(order, -504, 5)


def eta_cubed(order):
    r"""
    ``eta^3`` from Jacobi's identity
    ``sum_{k>=0} (-1)^k (2k+1) q^{(2k+1)^2/8}``, independent of the product.
    """
    order_units = to_units(order)
    terms = {}
    k = 0
    while DEN * (2 * k + 1) ** 2 // 8 < order_units:
        terms[DEN * (2 * k + 1) ** 2 // 8] = (-1) ** k * (2 * k + 1)
        k += 1
    return QSeries._raw(terms, order_units)


def delta(order):
    """Ramanujan's Delta as ``(eta^3)^8`` up to ``O(q^order)``."""
    order_units = to_units(order)
    # (eta^3)^8 loses 7/8 of relative precision
    base = eta_cubed(Fraction(order_units - 7 * DEN // 8, DEN))
    return (base**8).truncate(Fraction(order_units, DEN))
