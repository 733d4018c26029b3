"""Word-sized primes for multi-modular arithmetic."""

from functools import lru_cache


def _is_prime_u32(n):
    # deterministic Miller-Rabin for n < 2**32
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 7, 61):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def _prime_block(k):
    """The ``64 * (k + 1)`` largest primes below ``2**31``, descending."""
    out = list(_prime_block(k - 1)) if k else []
    n = out[-1] - 2 if out else (1 << 31) - 1
    while len(out) < 64 * (k + 1):
        if _is_prime_u32(n):
            out.append(n)
        n -= 2
    return tuple(out)


def prime_stream():
    """Yield distinct primes below ``2**31`` in a fixed order, without end."""
    k = 0
    i = 0
    while True:
        block = _prime_block(k)
        while i < len(block):
            yield block[i]
            i += 1
        k += 1
