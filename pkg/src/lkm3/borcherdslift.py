r"""
The multiplicative lift of a weight-0 Jacobi form.

For ``phi = sum f(n, l) q^n r^l`` of index ``t`` with integral
coefficients,

.. MATH::

    B_\phi = q^A r^B s^C \prod_{(n,l,m) > 0} (1 - q^n r^l s^m)^{f(nm, l)},

with ``(n,l,m) > 0`` meaning ``m > 0``, or ``m = 0, n > 0``, or
``m = n = 0, l < 0``, and

.. MATH::

    A = \frac{1}{24}\sum_l f(0,l),\quad
    B = \frac12\sum_{l>0} l f(0,l),\quad
    C = \frac{1}{4t}\sum_l l^2 f(0,l).

The weight is ``f(0,0)/2``.  The divisor attached to a root class
``(D, b mod 2t)`` has multiplicity ``sum_{n>0} f(n^2 ac, nb)`` with
``b^2 - 4tac = D``.

EXAMPLES::

    >>> from lkm3.jacobiforms import generators
    >>> from lkm3.borcherdslift import prefactor_exponents, lift_weight
    >>> phi = generators(3)["phi0_1"]
    >>> prefactor_exponents(phi)
    (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
    >>> lift_weight(phi)
    5
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import InsufficientTruncation
from .exactseries import norm_q, sigma1
from .hyperlattice import is_root, orbit, pair2t
from .jacobiforms import NormClass

FORMAT = "lkm3.triple/1"


def _integral_form(phi):
    if not isinstance(phi.index, int) or phi.index < 1:
        raise ValueError("the lift needs a positive integer index")
    if not phi.has_integral_lattice():
        raise ValueError("the lift needs integral exponents")
    if not phi.is_integral():
        raise ValueError("the lift needs integral coefficients")


def prefactor_exponents(phi):
    """The Weyl vector ``(A, B, C)`` from the ``q^0`` row."""
    t = phi.index
    row = phi.row(0)
    A = Fraction(sum(row.values()), 24)
    B = Fraction(sum(l * c for l, c in row.items() if l > 0), 2)
    C = Fraction(sum(l * l * c for l, c in row.items()), 4 * t)
    return A, B, C


def lift_weight(phi):
    return norm_q(Fraction(phi.coeff(0, 0), 2))


def divisor_multiplicity(phi, cls):
    r"""
    Multiplicity of the divisor of a root class.

    ``cls`` is a :class:`NormClass` or a vector ``(a, b, c)``.

    EXAMPLES::

        >>> from lkm3.jacobiforms import generators
        >>> phi = generators(3)["phi0_1"]
        >>> divisor_multiplicity(phi, (0, 1, 0))
        1
    """
    t = phi.index
    if not isinstance(cls, NormClass):
        a, b, c = cls
        cls = NormClass.from_discriminant(t, b * b - 4 * t * a * c, b)
    if cls.norm >= 0:
        raise ValueError("divisor classes have positive discriminant")
    bound = phi.norm_lower_bound()
    total = 0
    k = 1
    while k * k * cls.norm >= bound:
        total += phi.class_coeff(cls.scaled(k))
        k += 1
    return total


def divisor_table(phi, classes):
    return {c: divisor_multiplicity(phi, c) for c in classes}


def parity(phi):
    r"""
    ``sum_{k<0} sigma_1(-k) f(k, l)``; the lift picks up ``(-1)`` to this
    power under the swap ``q <-> s``.
    """
    if phi.q_trunc <= 0:
        raise InsufficientTruncation("the box does not contain the polar rows")
    total = 0
    for (k, _), c in phi.integer_terms():
        if k < 0:
            total += sigma1(-k) * c
    return total


# --- triple series -----------------------------------------------------------


@dataclass
class TripleSeries:
    r"""
    Finite map ``(n, l, m) -> c`` with a box on the ``q`` and ``s``
    exponents: every coefficient with ``n <= n_max`` and ``m <= m_max`` is
    present (zeros are not stored).
    """

    terms: dict
    n_max: Fraction
    m_max: Fraction
    l_range: tuple = (0, 0)

    def coeff(self, n, l, m):
        n, l, m = Fraction(n), Fraction(l), Fraction(m)
        if n > self.n_max or m > self.m_max:
            raise InsufficientTruncation(f"({n}, {l}, {m}) is outside the box")
        return self.terms.get((n, l, m), 0)

    def in_box(self, u):
        return u[0] <= self.n_max and u[2] <= self.m_max

    def __len__(self):
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items())

    def to_records(self):
        recs = []
        for (n, l, m), c in self.items():
            recs.append([n.numerator, n.denominator, l.numerator, l.denominator, m.numerator, m.denominator, c])
        return {
            "format": FORMAT,
            "box": [[self.n_max.numerator, self.n_max.denominator], [self.m_max.numerator, self.m_max.denominator]],
            "terms": recs,
        }

    @classmethod
    def from_records(cls, data):
        if data.get("format") != FORMAT:
            raise ValueError("not a serialized triple series")
        (nn, nd), (mn, md) = data["box"]
        terms = {}
        for n1, n2, l1, l2, m1, m2, c in data["terms"]:
            terms[(Fraction(n1, n2), Fraction(l1, l2), Fraction(m1, m2))] = c
        ls = [k[1] for k in terms]
        return cls(terms, Fraction(nn, nd), Fraction(mn, md), (min(ls, default=0), max(ls, default=0)))


def _series_terms(f, cap):
    """Coefficients of ``(1 - x)^f`` for ``x``-powers ``0..cap``."""
    if f >= 0:
        return [(j, comb(f, j) * (-1) ** j) for j in range(min(f, cap) + 1)]
    g = -f
    return [(j, comb(g + j - 1, j)) for j in range(cap + 1)]


def _divide_one_minus(row, a, g):
    r"""
    Divide the Laurent polynomial ``row`` (``{l: c}``) by ``(1 - r^{-a})^g``
    exactly; return None when the quotient is not a polynomial.
    """
    for _ in range(g):
        if not row:
            return row
        # in x = r^{-1}: q_e = p_e + q_{e-a}
        es = sorted(-l for l in row)
        lo, hi = es[0], es[-1]
        q = {}
        for e in range(lo, hi + 1):
            v = row.get(-e, 0) + q.get(e - a, 0)
            if v:
                q[e] = v
        if any(e > hi - a for e in q):
            return None
        row = {-e: v for e, v in q.items()}
    return row


def required_q_order(phi, n_max, m_max):
    """How far the Fourier box of ``phi`` must reach to feed :func:`expand_product`."""
    A, _, C = prefactor_exponents(phi)
    k0 = max(0, -phi.q_valuation())
    nb, mb = _floor(n_max - A), _floor(m_max - C)
    W = nb + k0 * mb
    top = 0
    for m in range(0, mb + 1):
        nmax = W - k0 * m
        if m == 0:
            continue
        top = max(top, nmax * m)
    return max(top, W) + 1


def _floor(x):
    x = Fraction(x)
    return x.numerator // x.denominator


def expand_product(phi, n_max, m_max):
    r"""
    Expand ``B_phi`` for all exponents with ``n <= n_max`` and
    ``m <= m_max`` (the prefactor included).

    Every factor has ``n + k0 m >= 0`` and ``m >= 0`` with ``k0`` the pole
    order of ``phi``, so truncating on those two quantities is exact.
    Inverse factors from ``r``-only terms are divided out exactly at the
    end; a remainder means the lift is not a polynomial in ``r`` at that
    ``(n, m)`` and raises :class:`InsufficientTruncation`.

    EXAMPLES::

        >>> from lkm3.jacobiforms import generators
        >>> phi = generators(3)["phi0_1"]
        >>> B = expand_product(phi.truncate(3), 1, 1)
        >>> B.coeff(Fraction(1, 2), Fraction(-1, 2), Fraction(1, 2))
        -1
    """
    _integral_form(phi)
    A, B, C = prefactor_exponents(phi)
    k0 = max(0, -phi.q_valuation())
    nb, mb = _floor(Fraction(n_max) - A), _floor(Fraction(m_max) - C)
    if nb < 0 or mb < 0:
        return TripleSeries({}, Fraction(n_max), Fraction(m_max))
    W = nb + k0 * mb
    need = required_q_order(phi, n_max, m_max)
    if phi.q_trunc < need:
        raise InsufficientTruncation(
            f"box ({n_max}, {m_max}) needs the form to O(q^{need}), have O(q^{phi.q_trunc})"
        )

    # poly: {(vn, vm): {l: c}}, relative to the prefactor
    poly = {(0, 0): {0: 1}}

    def mul_factor(n, l, m, f):
        nonlocal poly
        w = n + k0 * m
        caps = []
        if m > 0:
            caps.append(mb // m)
        if w > 0:
            caps.append(W // w)
        # r-only factors reach here only with f > 0, a finite polynomial
        cap = min(caps) if caps else f
        series = _series_terms(f, cap)
        out = {}
        for (vn, vm), row in poly.items():
            for j, bj in series:
                if not bj:
                    continue
                wn, wm = vn + j * n, vm + j * m
                if wm > mb or wn + k0 * wm > W:
                    break
                tgt = out.setdefault((wn, wm), {})
                dl = j * l
                for ll, c in row.items():
                    key = ll + dl
                    v = tgt.get(key, 0) + c * bj
                    if v:
                        tgt[key] = v
                    else:
                        tgt.pop(key, None)
        poly = {k: v for k, v in out.items() if v}

    inverse_r = []
    for m in range(0, mb + 1):
        if m == 0:
            ns = range(0, W + 1)
        else:
            ns = range(-(k0 // m), W - k0 * m + 1)
        for n in ns:
            k = n * m
            row = phi.row(k)
            for l in sorted(row):
                f = row[l]
                if m == 0 and n == 0:
                    if l >= 0:
                        continue
                    if f < 0:
                        inverse_r.append((-l, -f))
                        continue
                mul_factor(n, l, m, f)

    for a, g in inverse_r:
        nxt = {}
        for key, row in poly.items():
            q = _divide_one_minus(row, a, g)
            if q is None:
                raise InsufficientTruncation(
                    f"the coefficient of q^{key[0]} s^{key[1]} is an infinite series in r^-1"
                )
            if q:
                nxt[key] = q
        poly = nxt

    terms = {}
    for (vn, vm), row in poly.items():
        if vn > nb:
            continue
        for l, c in row.items():
            terms[(A + vn, B + l, C + vm)] = c
    ls = [k[1] for k in terms]
    return TripleSeries(terms, Fraction(n_max), Fraction(m_max), (min(ls, default=0), max(ls, default=0)))


# --- symmetry checks ---------------------------------------------------------


@dataclass
class SymmetryReport:
    tested: int = 0
    untested: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def check_swap(expansion, par):
    r"""``c(n, l, m) = (-1)^par c(m, l, n)`` wherever both sides are in the box."""
    sign = -1 if par % 2 else 1
    rep = SymmetryReport()
    keys = set(expansion.terms)
    for n, l, m in sorted(keys):
        if not expansion.in_box((m, l, n)):
            rep.untested += 1
            continue
        rep.tested += 1
        c, d = expansion.terms[(n, l, m)], expansion.terms.get((m, l, n), 0)
        if c != sign * d:
            rep.violations.append(((n, l, m), c, d))
    return rep


def _reflect_exp(t, root, u):
    c = Fraction(2 * pair2t(t, u, root), pair2t(t, root, root))
    return tuple(Fraction(x) - c * r for x, r in zip(u, root))


def check_antiinvariance(expansion, t, chamber_roots, word_len=0):
    r"""
    ``c(s(u)) = -c(u)`` for every stored exponent ``u`` and every
    reflection ``s`` in a chamber root, or in its images under words of
    length ``<= word_len``, with ``s(u)`` inside the box.  Only meaningful
    for algebras without odd simple roots.

    EXAMPLES::

        >>> from lkm3.jacobiforms import generators
        >>> B = expand_product(generators(9)["phi0_1"], 3, 3)
        >>> rep = check_antiinvariance(B, 1, [(0, -1, 0), (1, 1, 0), (0, 1, 1)])
        >>> rep.ok, rep.tested > 0
        (True, True)
    """
    rep = SymmetryReport()
    for root in chamber_roots:
        if not is_root(t, root):
            raise ValueError(f"{root} is not a root")
    roots = list(chamber_roots)
    if word_len:
        roots = orbit(t, chamber_roots, chamber_roots, word_len).vectors
    for u, c in expansion.items():
        for root in roots:
            v = _reflect_exp(t, root, u)
            if not expansion.in_box(v):
                rep.untested += 1
                continue
            rep.tested += 1
            d = expansion.terms.get(v, 0)
            if d != -c:
                rep.violations.append((u, tuple(root), c, d))
    return rep


# --- result bundle -----------------------------------------------------------


@dataclass
class LiftResult:
    t: int
    weyl_vector: tuple
    weight: Fraction
    parity_D: int
    divisor_table: dict
    expansion: TripleSeries = None

    def header(self):
        A, B, C = self.weyl_vector
        return {
            "t": self.t,
            "A": str(A),
            "B": str(B),
            "C": str(C),
            "weight": str(self.weight),
            "parity": self.parity_D,
        }


def lift(phi, classes=(), box=None):
    """Bundle the lift data; ``box = (n_max, m_max)`` also expands the product."""
    _integral_form(phi)
    exp = expand_product(phi, *box) if box is not None else None
    return LiftResult(
        t=phi.index,
        weyl_vector=prefactor_exponents(phi),
        weight=lift_weight(phi),
        parity_D=parity(phi),
        divisor_table=divisor_table(phi, classes),
        expansion=exp,
    )
