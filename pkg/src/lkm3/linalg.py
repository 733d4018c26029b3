r"""
Exact linear solves over the rationals.

:func:`solve_unique` is the workhorse.  It scales every equation to integer
form, row-reduces modulo word-sized primes (numpy int64), rebuilds the
solution by Chinese remaindering and rational reconstruction, and accepts
it only after checking ``A x = b`` exactly.  Full column rank modulo a
prime implies full column rank over Q, so an accepted solution is the
unique one.

:func:`solve_unique_fractions` is a plain Gauss-Jordan elimination over
:class:`fractions.Fraction`; it is kept as an independent check for small
systems.
"""

from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from .errors import SolveFailed
from .primes import prime_stream

_MAX_PRIMES = 2000


def _lcm(a, b):
    return a // gcd(a, b) * b


def integer_rows(rows, rhs):
    """Scale each equation by the lcm of its denominators."""
    out_rows, out_rhs = [], []
    for row, b in zip(rows, rhs):
        den = 1
        for x in list(row) + [b]:
            if not isinstance(x, int):
                den = _lcm(den, Fraction(x).denominator)
        out_rows.append([int(Fraction(x) * den) for x in row])
        out_rhs.append(int(Fraction(b) * den))
    return out_rows, out_rhs


def _reduce_mod(obj_arr, p):
    return (obj_arr % p).astype(np.int64)


def _row_reduce_mod(aug, p, ncols):
    """Reduced row echelon form of ``aug`` modulo ``p``; returns (rank, pivots, aug)."""
    m = aug.shape[0]
    rank = 0
    pivots = []
    for col in range(ncols):
        if rank == m:
            break
        nz = np.nonzero(aug[rank:, col])[0]
        if nz.size == 0:
            continue
        r = rank + int(nz[0])
        if r != rank:
            aug[[rank, r]] = aug[[r, rank]]
        inv = pow(int(aug[rank, col]), -1, p)
        aug[rank] = (aug[rank] * inv) % p
        factors = aug[:, col].copy()
        factors[rank] = 0
        mask = factors != 0
        if mask.any():
            aug[mask] = (aug[mask] - np.outer(factors[mask], aug[rank]) % p) % p
        pivots.append(col)
        rank += 1
    return rank, pivots, aug


def rank_mod_p(rows, p):
    a = np.array(rows, dtype=object)
    if a.size == 0:
        return 0
    red = _reduce_mod(a, p)
    rank, _, _ = _row_reduce_mod(red, p, red.shape[1])
    return rank


def rational_reconstruct(a, m):
    """Return ``Fraction(n, d)`` with ``n/d = a mod m`` and ``|n|, d <= sqrt(m/2)``, or None."""
    a %= m
    bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _verify(int_rows, int_rhs, x):
    den = 1
    for v in x:
        den = _lcm(den, v.denominator)
    xs = [int(v * den) for v in x]
    for row, b in zip(int_rows, int_rhs):
        if sum(a * v for a, v in zip(row, xs) if a) != b * den:
            return False
    return True


def solve_unique(rows, rhs):
    """Unique rational solution of ``rows @ x = rhs``.

    Raises :class:`SolveFailed` when the system is underdetermined (rank
    deficient for three independent primes) or inconsistent.
    """
    rows = [list(r) for r in rows]
    if not rows:
        raise SolveFailed("empty system")
    n = len(rows[0])
    int_rows, int_rhs = integer_rows(rows, rhs)
    aug_obj = np.array([r + [b] for r, b in zip(int_rows, int_rhs)], dtype=object)
    if len(int_rows) < n:
        raise SolveFailed(f"underdetermined: {len(int_rows)} equations for {n} unknowns")

    residues, primes = [], []
    deficient = inconsistent = 0
    modulus = 1
    previous = None
    for p in prime_stream():
        if len(primes) + deficient + inconsistent > _MAX_PRIMES:
            break
        red = _reduce_mod(aug_obj, p)
        rank, pivots, red = _row_reduce_mod(red, p, n + 1)
        if n in pivots:
            inconsistent += 1
            if inconsistent >= 3 and not primes:
                raise SolveFailed("inconsistent system (augmented rank exceeds rank)")
            continue
        if rank < n:
            deficient += 1
            if deficient >= 3 and not primes:
                raise SolveFailed(f"underdetermined: rank {rank} < {n} unknowns")
            continue
        residues.append(red[:n, n].astype(object))
        primes.append(p)
        modulus *= p
        if len(primes) < 2:
            continue
        combined = _crt(residues, primes, modulus)
        cand = [rational_reconstruct(int(v), modulus) for v in combined]
        if any(c is None for c in cand):
            previous = None
            continue
        if cand == previous and _verify(int_rows, int_rhs, cand):
            return [c.numerator if c.denominator == 1 else c for c in cand]
        previous = cand
    raise SolveFailed("no verified rational solution within the prime budget")


def _crt(residues, primes, modulus):
    total = np.zeros(residues[0].shape, dtype=object)
    for r, p in zip(residues, primes):
        m_i = modulus // p
        total = total + r * (m_i * pow(m_i, -1, p))
    return total % modulus


def solve_unique_fractions(rows, rhs):
    """Gauss-Jordan over Fractions; same contract as :func:`solve_unique`."""
    m = len(rows)
    if m == 0:
        raise SolveFailed("empty system")
    n = len(rows[0])
    aug = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    rank = 0
    pivots = []
    for col in range(n + 1):
        piv = next((r for r in range(rank, m) if aug[r][col] != 0), None)
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = 1 / aug[rank][col]
        aug[rank] = [x * inv for x in aug[rank]]
        for r in range(m):
            if r != rank and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[rank])]
        pivots.append(col)
        rank += 1
        if rank == m:
            break
    if n in pivots:
        raise SolveFailed("inconsistent system (augmented rank exceeds rank)")
    if rank < n:
        raise SolveFailed(f"underdetermined: rank {rank} < {n} unknowns")
    x = [aug[i][n] for i in range(n)]
    return [v.numerator if v.denominator == 1 else v for v in x]
