r"""
Truncated Fourier expansions of weak and nearly holomorphic Jacobi forms.

A :class:`JacobiFourier` stores ``f(n, l)`` for ``n`` in (1/24)Z and ``l`` in
(1/2)Z.  Only the q-direction is truncated: every row ``q^n`` with
``n < q_trunc`` is a complete Laurent polynomial in ``r``, so a coefficient
at an absent ``l`` of a known row is a genuine zero.

The generators are built from theta functions and eta:

- ``phim2_1 = theta^2 / eta^6`` (weight -2, index 1),
- ``phi0_1 = 4 * sum_i theta_i(z)^2 / theta_i(0)^2`` over the three even
  thetas (weight 0, index 1),
- ``phi0_2 .. phi0_4`` and the Eisenstein-Jacobi series ``E4_1 .. E4_3`` by
  exact linear solves inside the span of ``E4^i E6^j phim2_1^b phi0_1^a``,
  pinned by their ``q^0`` parts.

EXAMPLES::

    >>> from lkm3.jacobiforms import phi_weak_generators, q0_part
    >>> gens = phi_weak_generators(3)
    >>> q0_part(gens["phi0_1"])
    {-1: 1, 0: 10, 1: 1}
    >>> q0_part(gens["phim2_1"])
    {-1: 1, 0: -2, 1: 1}
"""

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from numbers import Rational

from . import _kernels
from .errors import (
    ConstructionFailed,
    IndexMismatch,
    InsufficientTruncation,
    OutOfTruncation,
    WeightMismatch,
)
from .exactseries import DEN, QSeries, delta, e4, e6, eta, norm_q, to_units
from .linalg import solve_unique

LDEN = 2
FORMAT = "lkm3.jacobi/1"


def _lcm(a, b):
    return a // gcd(a, b) * b


def _frac_pair(x):
    x = Fraction(x)
    return [x.numerator, x.denominator]


@dataclass(frozen=True, order=True)
class NormClass:
    r"""
    Orbit label ``(4tk - l^2, +-l mod 2t)`` of a Fourier index.

    ``norm`` uses the Fourier sign convention (negative for singular
    coefficients); ``discriminant`` is the positive lattice-side quantity.

    EXAMPLES::

        >>> NormClass.of(36, 5, 27)
        NormClass(t=36, norm=-9, l_residue=27)
        >>> NormClass.from_discriminant(12, 16, 8).norm
        -16
    """

    t: int
    norm: int
    l_residue: int

    @staticmethod
    def reduce_l(t, l):
        r = l % (2 * t)
        return min(r, 2 * t - r)

    @classmethod
    def of(cls, t, n, l):
        n, l = Fraction(n), Fraction(l)
        norm = 4 * t * n - l * l
        if norm.denominator != 1 or l.denominator != 1:
            raise ValueError(f"({n}, {l}) is not an integral Fourier index")
        return cls(t, int(norm), cls.reduce_l(t, int(l)))

    @classmethod
    def from_discriminant(cls, t, D, l):
        return cls(t, -int(D), cls.reduce_l(t, int(l)))

    @property
    def discriminant(self):
        return -self.norm

    def representative(self):
        """The index ``(n0, l0)`` with ``0 <= l0 <= t``, i.e. the smallest ``n``."""
        num = self.norm + self.l_residue**2
        if num % (4 * self.t):
            raise ValueError(f"{self} contains no integral index")
        return num // (4 * self.t), self.l_residue

    def scaled(self, k):
        """The class of ``(k^2 n, k l)`` for any member ``(n, l)``."""
        return NormClass(self.t, k * k * self.norm, self.reduce_l(self.t, k * self.l_residue))


class JacobiFourier:
    r"""
    Immutable truncated expansion ``sum f(n,l) q^n r^l + O(q^q_trunc)``.

    ``terms`` maps ``(n, l)`` to exact rationals.  Weight and index are
    exact rationals too (half-integers in practice).
    """

    __slots__ = ("_terms", "_trunc", "weight", "index")

    def __init__(self, terms, weight, index, q_trunc):
        trunc = to_units(q_trunc)
        clean = {}
        for (n, l), c in dict(terms).items():
            k, j = to_units(n), to_units(l, LDEN)
            c = norm_q(c)
            if c and k < trunc:
                clean[(k, j)] = c
        self._terms = clean
        self._trunc = trunc
        self.weight = norm_q(weight)
        self.index = norm_q(index)

    @classmethod
    def _raw(cls, terms, trunc, weight, index):
        obj = cls.__new__(cls)
        obj._terms = {k: c for k, c in terms.items() if c and k[0] < trunc}
        obj._trunc = trunc
        obj.weight = norm_q(weight)
        obj.index = norm_q(index)
        return obj

    @classmethod
    def from_qseries(cls, qs, weight):
        """A function of ``tau`` alone, seen as an index-0 form."""
        return cls._raw({(k, 0): c for k, c in qs._terms.items()}, qs._trunc, weight, 0)

    # --- accessors -----------------------------------------------------

    @property
    def q_trunc(self):
        return norm_q(Fraction(self._trunc, DEN))

    @property
    def index_t(self):
        return self.index

    @property
    def terms(self):
        return {
            (norm_q(Fraction(k, DEN)), norm_q(Fraction(j, LDEN))): c
            for (k, j), c in sorted(self._terms.items())
        }

    def __len__(self):
        return len(self._terms)

    def is_zero(self):
        return not self._terms

    def q_valuation(self):
        """Smallest ``n`` with a nonzero row (``q_trunc`` for the zero form)."""
        return norm_q(Fraction(self._qval_units(), DEN))

    def _qval_units(self):
        return min(k for k, _ in self._terms) if self._terms else self._trunc

    def coeff(self, n, l):
        k, j = to_units(n), to_units(l, LDEN)
        if k >= self._trunc:
            raise OutOfTruncation(f"q^{n} is beyond O(q^{self.q_trunc})")
        return self._terms.get((k, j), 0)

    __getitem__ = lambda self, nl: self.coeff(*nl)

    def row(self, n):
        """The Laurent polynomial in ``r`` at ``q^n`` as ``{l: c}``."""
        k = to_units(n)
        if k >= self._trunc:
            raise OutOfTruncation(f"q^{n} is beyond O(q^{self.q_trunc})")
        return {
            norm_q(Fraction(j, LDEN)): c for (kk, j), c in sorted(self._terms.items()) if kk == k
        }

    def q0_part(self):
        return self.row(0)

    def has_integral_lattice(self):
        """Integer index and every exponent integral."""
        if not isinstance(self.index, int):
            return False
        return all(k % DEN == 0 and j % LDEN == 0 for k, j in self._terms)

    def _require_integral_lattice(self):
        if not self.has_integral_lattice():
            raise ValueError("norms need an integer index and integral exponents")

    def norm_of(self, n, l):
        if not isinstance(self.index, int):
            raise ValueError("norms need an integer index")
        v = 4 * self.index * Fraction(n) - Fraction(l) ** 2
        if v.denominator != 1:
            raise ValueError(f"({n}, {l}) is not an integral Fourier index")
        return int(v)

    def is_integral(self):
        return all(isinstance(c, int) for c in self._terms.values())

    def integer_terms(self):
        """``((n, l), c)`` pairs with plain int exponents, sorted."""
        self._require_integral_lattice()
        return [((k // DEN, j // LDEN), c) for (k, j), c in sorted(self._terms.items())]

    def min_norm(self):
        """Smallest ``4tn - l^2`` over nonzero terms (None for the zero form)."""
        self._require_integral_lattice()
        t = self.index
        return min((4 * t * n - l * l for (n, l), _ in self.integer_terms()), default=None)

    def norm_lower_bound(self):
        r"""
        A lower bound for the norms of all coefficients, including those
        past the truncation: ``-t^2 + 4t min(0, valuation)``.

        Valid for every form in the ring generated by the weak forms and
        ``1/Delta``: weak forms of index ``t`` have norms ``>= -t^2`` and
        each ``1/Delta`` lowers the bound by ``4t``.
        """
        t = self.index
        return -t * t + 4 * t * min(0, Fraction(self._qval_units(), DEN))

    def certifies_singular_part(self):
        """Whether every class with negative norm has its smallest index in the box."""
        t = self.index
        # smallest index of a class with norm < 0 has n <= (t^2 - 1) / 4t
        return self._trunc * 4 * t > (t * t - 1) * DEN

    def class_coeff(self, cls):
        """Coefficient of a norm class, read at its smallest index."""
        if isinstance(cls, tuple):
            cls = NormClass(self.index, *cls)
        if cls.norm < self.norm_lower_bound():
            return 0
        try:
            n0, l0 = cls.representative()
        except ValueError:
            return 0
        if n0 * DEN >= self._trunc:
            raise InsufficientTruncation(
                f"class {cls} has its smallest index at q^{n0}, beyond O(q^{self.q_trunc})"
            )
        return self._terms.get((n0 * DEN, l0 * LDEN), 0)

    def singular_part(self):
        """Nonzero coefficients of negative norm, one entry per class."""
        self._require_integral_lattice()
        if not self.certifies_singular_part():
            raise InsufficientTruncation(
                f"O(q^{self.q_trunc}) cannot certify every negative-norm class of index {self.index}"
            )
        out = {}
        t = self.index
        for (n, l), c in self.integer_terms():
            if 4 * t * n - l * l < 0:
                out.setdefault(NormClass.of(t, n, l), c)
        return dict(sorted(out.items()))

    # --- structural checks ---------------------------------------------

    def evenness_violations(self):
        return [
            (self._key_out(k), c)
            for k, c in sorted(self._terms.items())
            if self._terms.get((k[0], -k[1]), 0) != c
        ]

    def is_even(self):
        return not self.evenness_violations()

    def _key_out(self, k):
        return (norm_q(Fraction(k[0], DEN)), norm_q(Fraction(k[1], LDEN)))

    def norm_invariance_violations(self):
        r"""
        Pairs of box positions in the same norm class with different
        coefficients.  Zero coefficients count: a class that is nonzero at
        one index must agree at every other index of the box.
        """
        self._require_integral_lattice()
        t = self.index
        nmax = (self._trunc - 1) // DEN
        out = []
        seen = set()
        for (n, l), c in self.integer_terms():
            cls = NormClass.of(t, n, l)
            if cls in seen:
                continue
            seen.add(cls)
            for n2, l2 in _class_members(cls, nmax):
                c2 = self._terms.get((n2 * DEN, l2 * LDEN), 0)
                if c2 != c:
                    out.append(((n, l), (n2, l2), c, c2))
        return out

    def is_norm_invariant(self):
        return not self.norm_invariance_violations()

    def export_check(self):
        """Raise unless the form has integral index, exponents and coefficients."""
        if not self.has_integral_lattice():
            raise ConstructionFailed("form has a fractional index or exponent")
        if not self.is_integral():
            raise ConstructionFailed("form has non-integral coefficients")
        return self

    # --- arithmetic ----------------------------------------------------

    def truncate(self, q_trunc):
        return JacobiFourier._raw(
            self._terms, min(self._trunc, to_units(q_trunc)), self.weight, self.index
        )

    def __eq__(self, other):
        if not isinstance(other, JacobiFourier):
            return NotImplemented
        return (
            self._trunc == other._trunc
            and self._terms == other._terms
            and self.weight == other.weight
            and self.index == other.index
        )

    def __hash__(self):
        return hash((self._trunc, self.weight, self.index, frozenset(self._terms.items())))

    def __repr__(self):
        return (
            f"JacobiFourier(weight={self.weight}, index={self.index}, "
            f"{len(self._terms)} terms, O(q^{self.q_trunc}))"
        )

    def __neg__(self):
        return self.scalar(-1)

    def scalar(self, c):
        c = norm_q(c)
        return JacobiFourier._raw(
            {k: norm_q(c * x) for k, x in self._terms.items()}, self._trunc, self.weight, self.index
        )

    def __add__(self, other):
        if not isinstance(other, JacobiFourier):
            return NotImplemented
        if self.index != other.index:
            raise IndexMismatch(f"cannot add index {self.index} and index {other.index}")
        if self.weight != other.weight:
            raise WeightMismatch(f"cannot add weight {self.weight} and weight {other.weight}")
        trunc = min(self._trunc, other._trunc)
        out = {k: c for k, c in self._terms.items() if k[0] < trunc}
        for k, c in other._terms.items():
            if k[0] < trunc:
                out[k] = norm_q(out.get(k, 0) + c)
        return JacobiFourier._raw(out, trunc, self.weight, self.index)

    def __sub__(self, other):
        if not isinstance(other, JacobiFourier):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scalar(other)
        if isinstance(other, QSeries):
            other = JacobiFourier.from_qseries(other, 0)
        if not isinstance(other, JacobiFourier):
            return NotImplemented
        return _multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        if e == 0:
            return JacobiFourier._raw({(0, 0): 1}, self._trunc - self._qval_units(), 0, 0)
        base, result = self, None
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def shift_q(self, n):
        """Multiply by ``q^n``."""
        k = to_units(n)
        return JacobiFourier._raw(
            {(a + k, b): c for (a, b), c in self._terms.items()},
            self._trunc + k,
            self.weight,
            self.index,
        )

    def rescale(self, s):
        """Substitute ``z -> s z``."""
        if not isinstance(s, int) or s < 1:
            raise ValueError("rescaling factor must be a positive integer")
        return JacobiFourier._raw(
            {(a, s * b): c for (a, b), c in self._terms.items()},
            self._trunc,
            self.weight,
            self.index * s * s,
        )

    # --- serialization -------------------------------------------------

    def to_records(self):
        terms = []
        for (k, j), c in sorted(self._terms.items()):
            n, l = Fraction(k, DEN), Fraction(j, LDEN)
            terms.append(_frac_pair(n) + _frac_pair(l) + _frac_pair(c))
        return {
            "format": FORMAT,
            "weight": _frac_pair(self.weight),
            "index": _frac_pair(self.index),
            "q_trunc": _frac_pair(Fraction(self._trunc, DEN)),
            "terms": terms,
        }

    @classmethod
    def from_records(cls, data):
        if not isinstance(data, dict) or data.get("format") != FORMAT:
            raise ValueError("not a serialized JacobiFourier")
        terms = {}
        prev = None
        for rec in data["terms"]:
            if len(rec) != 6:
                raise ValueError(f"term record {rec!r} must have six fields")
            n, l = Fraction(rec[0], rec[1]), Fraction(rec[2], rec[3])
            if prev is not None and (n, l) <= prev:
                raise ValueError("term records must be sorted without repeats")
            prev = (n, l)
            terms[(n, l)] = Fraction(rec[4], rec[5])
        return cls(
            terms,
            Fraction(*data["weight"]),
            Fraction(*data["index"]),
            Fraction(*data["q_trunc"]),
        )


def _class_members(cls, nmax):
    """All integral indices ``(n, l)`` of a class with ``n <= nmax``."""
    t = cls.t
    out = []
    lam = cls.l_residue
    bound = isqrt(max(0, 4 * t * nmax - cls.norm)) + 1
    for base in {lam, (-lam) % (2 * t)}:
        lo = -((bound + base) // (2 * t)) - 1
        l = base + 2 * t * lo
        while l <= bound:
            num = cls.norm + l * l
            if num % (4 * t) == 0 and num // (4 * t) <= nmax:
                out.append((num // (4 * t), l))
            l += 2 * t
    return sorted(set(out))


def _step(keys, origin):
    g = 0
    for k in keys:
        g = gcd(g, k - origin)
    return g


def _multiply(a, b):
    weight, index = a.weight + b.weight, a.index + b.index
    va, vb = a._qval_units(), b._qval_units()
    trunc = min(a._trunc + vb, b._trunc + va)
    if not a._terms or not b._terms:
        return JacobiFourier._raw({}, trunc, weight, index)
    la = min(j for _, j in a._terms)
    lb = min(j for _, j in b._terms)
    sn = gcd(_step((k for k, _ in a._terms), va), _step((k for k, _ in b._terms), vb)) or DEN
    sl = gcd(_step((j for _, j in a._terms), la), _step((j for _, j in b._terms), lb)) or 1
    nrows = -(-(trunc - va - vb) // sn)
    if nrows <= 0:
        return JacobiFourier._raw({}, trunc, weight, index)
    grid_a, den_a = _to_grid(a, va, la, sn, sl, nrows)
    grid_b, den_b = _to_grid(b, vb, lb, sn, sl, nrows)
    out = _kernels.conv2d(grid_a, grid_b, nrows)
    den = den_a * den_b
    terms = {}
    for i, row in enumerate(out):
        k = va + vb + i * sn
        for jj, x in enumerate(row):
            if x:
                terms[(k, la + lb + jj * sl)] = norm_q(Fraction(x, den)) if den != 1 else x
    return JacobiFourier._raw(terms, trunc, weight, index)


def _to_grid(f, v, lmin, sn, sl, nrows):
    den = 1
    for c in f._terms.values():
        if not isinstance(c, int):
            den = _lcm(den, c.denominator)
    lmax = max(j for _, j in f._terms)
    width = (lmax - lmin) // sl + 1
    rows = min(nrows, (max(k for k, _ in f._terms) - v) // sn + 1)
    grid = [[0] * width for _ in range(rows)]
    for (k, j), c in f._terms.items():
        i = (k - v) // sn
        if i < rows:
            grid[i][(j - lmin) // sl] = int(c * den)
    return grid, den


# --- module-level operations ---------------------------------------------


def jf_mul(a, b):
    return a * b


def jf_add(a, b):
    return a + b


def jf_scalar(a, c):
    return a.scalar(c)


def jf_pow(a, e):
    return a**e


def coeff(a, n, l):
    return a.coeff(n, l)


def q0_part(a):
    return a.q0_part()


def norm_of(a, n, l):
    return a.norm_of(n, l)


def rescale_elliptic(a, s):
    return a.rescale(s)


def modular(qs, weight):
    return JacobiFourier.from_qseries(qs, weight)


def delta_inverse_power(N, q_trunc):
    """``Delta^-N`` as a weight ``-12N`` form known up to ``O(q^q_trunc)``."""
    order = Fraction(q_trunc) + N + 1
    inv = delta(order).inverse() ** N
    return modular(inv.truncate(q_trunc), -12 * N)


def jf_div_by_power_of_delta(a, N=1):
    r"""
    Multiply by ``Delta^-N``.

    The result is exact below ``q_trunc(a) - N``.

    EXAMPLES::

        >>> from lkm3.exactseries import delta
        >>> from lkm3.jacobiforms import modular, jf_div_by_power_of_delta
        >>> one = jf_div_by_power_of_delta(modular(delta(5), 12), 1)
        >>> one.terms, one.q_trunc
        ({(0, 0): 1}, 4)
    """
    if not isinstance(N, int) or N < 1:
        raise ValueError("N must be a positive integer")
    target = Fraction(a._trunc, DEN) - N
    need = target - Fraction(a._qval_units(), DEN) + 1
    return (a * delta_inverse_power(N, need - N)).truncate(target)


# --- theta functions -------------------------------------------------------


def _times_binomial(terms, k, j, trunc):
    """Multiply a raw term map by ``1 - q^k r^j``, dropping rows past ``trunc``."""
    out = dict(terms)
    for (a, b), c in terms.items():
        key = (a + k, b + j)
        if key[0] < trunc:
            out[key] = out.get(key, 0) - c
    return {key: c for key, c in out.items() if c}


def theta_odd(q_order):
    r"""
    The odd theta function with index 1/2 and weight 1/2, expanded by the
    Jacobi triple product.

    EXAMPLES::

        >>> th = theta_odd(2)
        >>> th.coeff(Fraction(1, 8), Fraction(1, 2)), th.coeff(Fraction(1, 8), Fraction(-1, 2))
        (1, -1)
    """
    trunc = to_units(q_order)
    lead = 3  # q^(1/8)
    body = {(0, 0): 1}
    rel = trunc - lead
    n = 1
    while DEN * n < rel:
        body = _times_binomial(body, DEN * n, 2, rel)
        body = _times_binomial(body, DEN * n, -2, rel)
        body = _times_binomial(body, DEN * n, 0, rel)
        n += 1
    terms = {}
    for (a, b), c in body.items():
        for sgn, db in ((1, 1), (-1, -1)):
            key = (a + lead, b + db)
            terms[key] = terms.get(key, 0) + sgn * c
    return JacobiFourier._raw(terms, trunc, Fraction(1, 2), Fraction(1, 2))


def _theta_series(q_order, half, signed):
    """``sum (+-1)^m q^(m^2/2) r^m`` over ``m`` in ``Z + half/2``."""
    trunc = to_units(q_order)
    terms = {}
    a = half  # a = |2m|; the exponent m^2/2 is 3 a^2 in 1/24 units
    while 3 * a * a < trunc:
        for mm in {a, -a}:
            terms[(3 * mm * mm, mm)] = 1 - 2 * ((mm // 2) % 2) if signed else 1
        a += 2
    return JacobiFourier._raw(terms, trunc, Fraction(1, 2), Fraction(1, 2))


def theta_even(i, q_order):
    """``theta_2``, ``theta_3`` or ``theta_4`` in ``(tau, z)``."""
    if i == 2:
        return _theta_series(q_order, 1, False)
    if i == 3:
        return _theta_series(q_order, 0, False)
    if i == 4:
        return _theta_series(q_order, 0, True)
    raise ValueError("even theta index must be 2, 3 or 4")


def _theta_null(th):
    terms = {}
    for (k, _), c in th._terms.items():
        terms[k] = terms.get(k, 0) + c
    return QSeries._raw(terms, th._trunc)


def _build_phim2_1(q_order):
    work = Fraction(q_order) + 1
    th = theta_odd(work)
    inv_eta6 = eta(work + 1).inverse() ** 6
    out = (th * th) * modular(inv_eta6, -3)
    return out.truncate(q_order)


def _build_phi0_1(q_order):
    work = Fraction(q_order) + 1
    total = None
    for i in (2, 3, 4):
        th = theta_even(i, work)
        null = _theta_null(th)
        piece = (th * th) * modular(null.inverse() ** 2, -1)
        total = piece if total is None else total + piece
    return total.scalar(4).truncate(q_order)


# --- weak Jacobi forms ---------------------------------------------------


def modular_monomials(k):
    """Exponent pairs ``(i, j)`` with ``4i + 6j = k``."""
    if k < 0 or k % 2:
        return []
    return [(i, (k - 4 * i) // 6) for i in range(k // 4 + 1) if (k - 4 * i) % 6 == 0]


class _Ring:
    """Powers of the two basic weak forms and of E4, E6 at one q-order."""

    def __init__(self, q_order):
        self.q_order = q_order
        self.phim2 = _build_phim2_1(q_order)
        self.phi0 = _build_phi0_1(q_order)
        self.E4 = modular(e4(q_order), 4)
        self.E6 = modular(e6(q_order), 6)
        self._pw = {}

    def power(self, name, e):
        if e == 0:
            return JacobiFourier._raw({(0, 0): 1}, to_units(self.q_order), 0, 0)
        key = (name, e)
        if key not in self._pw:
            base = getattr(self, name)
            prev = self.power(name, e - 1) if e > 1 else None
            self._pw[key] = base if prev is None else prev * base
        return self._pw[key]

    def weak_basis(self, weight, index):
        r"""
        Labelled spanning monomials ``E4^i E6^j phim2_1^b phi0_1^(t-b)``
        of the weak forms of even ``weight`` and integer ``index``.
        """
        out = []
        for b in range(index + 1):
            for i, j in modular_monomials(weight + 2 * b):
                f = self.power("phim2", b) * self.power("phi0", index - b)
                f = f * (self.power("E4", i) * self.power("E6", j))
                label = f"E4^{i}*E6^{j}*phim2_1^{b}*phi0_1^{index - b}"
                out.append((label, f))
        return out


def combine(forms, coeffs):
    total = None
    for f, c in zip(forms, coeffs):
        if c == 0:
            continue
        piece = f.scalar(c)
        total = piece if total is None else total + piece
    if total is None:
        f = forms[0]
        return JacobiFourier._raw({}, f._trunc, f.weight, f.index)
    return total


def _solve_from_q0(ring, weight, index, target):
    """Unique weak form whose ``q^0`` row equals ``target`` (a map ``l -> c``)."""
    basis = ring.weak_basis(weight, index)
    forms = [f for _, f in basis]
    ls = set(target)
    for f in forms:
        ls.update(l for (n, l), _ in f.integer_terms() if n == 0)
    ls = sorted(ls)
    rows = [[f.coeff(0, l) for f in forms] for l in ls]
    rhs = [target.get(l, 0) for l in ls]
    x = solve_unique(rows, rhs)
    return combine(forms, x)


_PHI0_Q0 = {2: {-1: 1, 0: 4, 1: 1}, 3: {-1: 1, 0: 2, 1: 1}, 4: {-1: 1, 0: 1, 1: 1}}


class _GeneratorCache:
    """Initialization-once cache of the generator set, keyed by q-order."""

    def __init__(self):
        self._lock = threading.Lock()
        self._store = {}

    def get(self, q_order):
        q_order = norm_q(q_order)
        with self._lock:
            best = min((o for o in self._store if o >= q_order), default=None)
            if best is None:
                self._store[q_order] = _build_generators(q_order)
                best = q_order
            gens = self._store[best]
        if best == q_order:
            return gens
        return {k: v.truncate(q_order) for k, v in gens.items()}

    def clear(self):
        with self._lock:
            self._store.clear()


def _build_generators(q_order):
    ring = _Ring(q_order)
    gens = {"phim2_1": ring.phim2, "phi0_1": ring.phi0}
    for t, target in _PHI0_Q0.items():
        f = _solve_from_q0(ring, 0, t, target)
        _check_contract(f"phi0_{t}", f, target)
        gens[f"phi0_{t}"] = f
    for m in (1, 2, 3):
        f = _solve_from_q0(ring, 4, m, {0: 1})
        _check_contract(f"E4_{m}", f, {0: 1})
        for (n, l), c in f.integer_terms():
            if 4 * m * n - l * l < 0:
                raise ConstructionFailed(f"E4_{m} has a negative-norm coefficient at {(n, l)}")
        gens[f"E4_{m}"] = f
    gens["E4"] = ring.E4
    gens["E6"] = ring.E6
    return gens


def _check_contract(name, f, target):
    if f.q0_part() != dict(sorted(target.items())):
        raise ConstructionFailed(f"{name} has q^0 part {f.q0_part()}, expected {target}")
    if not f.is_integral():
        raise ConstructionFailed(f"{name} has non-integral coefficients")


_CACHE = _GeneratorCache()


def generators(q_order):
    r"""
    All named building blocks at the given q-order: ``phim2_1``,
    ``phi0_1 .. phi0_4``, ``E4_1 .. E4_3`` and the index-0 forms ``E4``,
    ``E6``.  Results are cached; calls are thread-safe.
    """
    if Fraction(q_order) < 1:
        raise ValueError("q_order must be at least 1")
    return _CACHE.get(q_order)


def phi_weak_generators(q_order):
    """The weak generators ``phim2_1`` and ``phi0_1 .. phi0_4``."""
    if Fraction(q_order) < 3:
        raise ValueError("q_order must be at least 3")
    g = generators(q_order)
    return {k: g[k] for k in ("phim2_1", "phi0_1", "phi0_2", "phi0_3", "phi0_4")}


def eisenstein_jacobi(m, q_order):
    """The weight-4 index-``m`` Eisenstein-Jacobi series, ``m`` in 1..3."""
    if m not in (1, 2, 3):
        raise ValueError("m must be 1, 2 or 3")
    if Fraction(q_order) < 3:
        raise ValueError("q_order must be at least 3")
    return generators(q_order)[f"E4_{m}"]


def weak_space(weight, index, q_order):
    """Labelled spanning monomials of the weak forms of given weight and index."""
    return _Ring(q_order).weak_basis(weight, index)
