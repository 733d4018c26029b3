r"""
The rank-three hyperbolic lattice ``S_t = U + <2t>`` and its dual.

A vector is a triple ``(n, l, m)`` meaning ``n f_2 - l f_3^ + m f_{-2}``;
the pairing is

.. MATH::

    (a, b) = -(n_a m_b + m_a n_b) + l_a l_b / (2t),

and the discriminant of ``a`` is ``D(a) = 2t a^2 = l^2 - 4tnm``.

EXAMPLES::

    >>> from lkm3.hyperlattice import pair2t, reflect, orbit
    >>> pair2t(1, (1, 2, 0), (-1, 0, 1))
    -2
    >>> reflect(1, (0, -1, 0), (1, 2, 0))
    (1, -2, 0)
    >>> orbit(1, [(1, 2, 0), (-1, 0, 1)], [(0, -1, 0)], 6).vectors
    [(0, -1, 0), (0, 1, 1), (1, 1, 0)]
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd

from .errors import DepthExceeded, NonPrimitive, NotARoot, SolveFailed
from .exactseries import norm_q
from .jacobiforms import NormClass
from .linalg import solve_unique_fractions


def _vec(a):
    if len(a) != 3:
        raise ValueError(f"lattice vectors are triples, got {a!r}")
    return tuple(norm_q(x) for x in a)


def pair(t, a, b):
    """The bilinear form of ``S_t`` (exact rational)."""
    na, la, ma = _vec(a)
    nb, lb, mb = _vec(b)
    return norm_q(-(na * mb + ma * nb) + Fraction(la * lb) / (2 * t))


def pair2t(t, a, b):
    """``2t (a, b)``; an integer for integral inputs."""
    na, la, ma = _vec(a)
    nb, lb, mb = _vec(b)
    return norm_q(-2 * t * (na * mb + ma * nb) + la * lb)


def discriminant(t, a):
    n, l, m = _vec(a)
    return norm_q(l * l - 4 * t * n * m)


def is_integral(a):
    return all(isinstance(x, int) for x in _vec(a))


def is_root(t, a):
    r"""
    ``a`` is a root of ``S_t^*``: ``D > 0`` and ``2(x, a)/a^2`` is integral
    for all ``x`` in the dual lattice, i.e. ``D`` divides ``4tn``, ``4tm``
    and ``2l``.

    EXAMPLES::

        >>> is_root(1, (-1, 0, 1)), is_root(2, (0, 3, 0))
        (True, False)
    """
    if not is_integral(a):
        return False
    n, l, m = _vec(a)
    D = l * l - 4 * t * n * m
    if D <= 0:
        return False
    return (4 * t * n) % D == 0 and (4 * t * m) % D == 0 and (2 * l) % D == 0


def _require_root(t, a):
    if not is_root(t, a):
        raise NotARoot(f"{tuple(a)} is not a root of S_{t}^*")


def reflect(t, root, x):
    """``s_root(x) = x - 2 (x, root)/root^2 * root``."""
    _require_root(t, root)
    root, x = _vec(root), _vec(x)
    c = Fraction(2 * pair2t(t, x, root), pair2t(t, root, root))
    return tuple(norm_q(xi - c * ri) for xi, ri in zip(x, root))


def primitive(a):
    a = _vec(a)
    if not is_integral(a):
        return False
    return gcd(*a) == 1


def class_of(t, a):
    r"""
    The class ``(D, +-l mod 2t)`` of a primitive integral vector.

    EXAMPLES::

        >>> c = class_of(12, (1, 8, 1))
        >>> (c.discriminant, c.l_residue)
        (16, 8)
    """
    if not primitive(a):
        raise NonPrimitive(f"{tuple(a)} is not a primitive integral vector")
    n, l, m = _vec(a)
    return NormClass.from_discriminant(t, l * l - 4 * t * n * m, l)


def classes_match_table(ds):
    """Compare the class of every ``P(M_0)`` root with the printed class column."""
    out = []
    for t, idx in ds.indices.items():
        for row, printed in zip(idx.chamber.pm0_rows, idx.chamber.pm0_classes):
            c = class_of(t, row)
            got = (c.discriminant, c.l_residue)
            out.append((t, row, tuple(printed), got, got == tuple(printed)))
    return out


@dataclass(frozen=True)
class Orbit:
    """Orbit sample: ``vectors`` sorted lexicographically, with the word-length horizon."""

    vectors: list
    horizon: int
    closed: bool

    def __iter__(self):
        return iter(self.vectors)

    def __len__(self):
        return len(self.vectors)


def orbit(t, generators, seeds, max_word_len):
    r"""
    Images of ``seeds`` under all words of length ``<= max_word_len`` in the
    reflections ``s_g``.  ``closed`` is True when the breadth-first search
    stopped producing new vectors before the horizon, so the orbit is the
    full (finite) orbit.
    """
    gens = [_vec(g) for g in generators]
    for g in gens:
        _require_root(t, g)
    seen = set()
    frontier = deque()
    for s in seeds:
        s = _vec(s)
        if s not in seen:
            seen.add(s)
            frontier.append(s)
    closed = True
    for depth in range(max_word_len + 1):
        if not frontier:
            break
        if depth == max_word_len:
            # one more step only to learn whether the orbit is already closed
            closed = all(reflect(t, g, x) in seen for x in frontier for g in gens)
            break
        nxt = deque()
        for x in frontier:
            for g in gens:
                y = reflect(t, g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return Orbit(sorted(seen), max_word_len, closed)


def gram_matrix(t, roots):
    return [[pair2t(t, a, b) for b in roots] for a in roots]


def cartan_matrix(t, roots):
    r"""
    ``A_ij = 2 (a_i, a_j) / a_i^2`` for an ordered list of roots.

    EXAMPLES::

        >>> cartan_matrix(1, [(1, 2, 0), (0, -1, 0), (-1, 0, 1)])
        [[2, -1, -1], [-4, 2, 0], [-1, 0, 2]]
    """
    for a in roots:
        _require_root(t, a)
    out = []
    for a in roots:
        aa = pair2t(t, a, a)
        out.append([norm_q(Fraction(2 * pair2t(t, a, b), aa)) for b in roots])
    return out


@dataclass
class WeylCheck:
    ok: bool
    failures: list

    def __bool__(self):
        return self.ok


def check_weyl_vector(t, rho, roots):
    """Check ``(rho, a) = -a^2/2`` exactly for every root."""
    rho = _vec(rho)
    failures = []
    for a in roots:
        lhs = pair(t, rho, a)
        rhs = -Fraction(pair(t, a, a)) / 2
        if lhs != rhs:
            failures.append((tuple(a), norm_q(lhs), norm_q(rhs)))
    return WeylCheck(not failures, failures)


def interior_point(t, chamber_roots, rho=None):
    r"""
    A point of the chamber ``{x : (x, a) <= 0 for a in chamber_roots}``.

    With a Weyl vector at hand it is used directly, since ``(rho, a) < 0``
    for every real simple root.  Otherwise ``(x, a_i) = -w_i`` is solved
    for three independent chamber roots and small weights ``w``, in a fixed
    order, until ``x`` is timelike (``x^2 < 0``) and strictly inside.
    """
    if rho is not None:
        p = _vec(rho)
        if all(pair(t, p, a) < 0 for a in chamber_roots):
            return p
    roots = [_vec(a) for a in chamber_roots]

    def row(a):
        # (x, a) as a linear form in the coordinates of x
        n, l, m = a
        return [-m, Fraction(l, 2 * t), -n]

    for triple in combinations(range(len(roots)), 3):
        rows = [row(roots[i]) for i in triple]
        for w in product((1, 2, 3), repeat=3):
            try:
                x = tuple(norm_q(v) for v in solve_unique_fractions(rows, [-v for v in w]))
            except SolveFailed:
                break
            if pair(t, x, x) < 0 and all(pair(t, x, a) < 0 for a in roots):
                return x
    raise DepthExceeded("no interior point found from the chamber roots")


def positive_real_root(t, chamber_roots, a, max_word_len=8, rho=None):
    r"""
    Whether ``a`` is a positive multiple of a Weyl-group image of a chamber
    root that lies on the negative side of the chamber.

    EXAMPLES::

        >>> P = [(1, 2, 0), (0, -1, 0), (-1, 0, 1)]
        >>> positive_real_root(1, P, (0, -1, 0)), positive_real_root(1, P, (0, 1, 0))
        (True, False)
    """
    a = _vec(a)
    if not is_root(t, a):
        return False
    x = interior_point(t, chamber_roots, rho)
    if pair(t, x, a) >= 0:
        return False
    orb = orbit(t, chamber_roots, chamber_roots, max_word_len)
    prims = set()
    for v in orb.vectors:
        g = gcd(*v)
        prims.add(tuple(c // g for c in v))
    g = gcd(*a)
    if tuple(c // g for c in a) in prims:
        return True
    if orb.closed:
        return False
    # the group orbit of a root class is infinite; decide by discriminant class
    D = discriminant(t, a)
    if D > 0 and any(discriminant(t, r) * (gcd(*a) ** 2) == D * (gcd(*r) ** 2) for r in chamber_roots):
        raise DepthExceeded(
            f"{a} not reached within word length {max_word_len}; increase the search depth"
        )
    return False
