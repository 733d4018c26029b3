"""Hot convolution kernel with a compiled core and a pure-Python fallback.

The compiled path works on machine words.  When the coefficient bound of a
product fits in 62 bits it convolves directly in int64; otherwise it runs the
convolution modulo enough 31-bit primes and recombines by the Chinese
remainder theorem.  Both paths return exactly the same integers as the
reference loop in :mod:`._pykernel`.

Set ``LKM3_PURE=1`` to force the fallback.
"""

import os

import numpy as np

from . import _pykernel
from ..primes import prime_stream

conv2d_python = _pykernel.conv2d

try:
    if os.environ.get("LKM3_PURE"):
        raise ImportError("pure-Python kernel forced by LKM3_PURE")
    from . import _ckernel
except ImportError:
    _ckernel = None

_I64_SAFE = 1 << 62


def _max_abs(grid):
    return max((abs(x) for row in grid for x in row), default=0)


def _as_object(grid):
    arr = np.empty((len(grid), len(grid[0])), dtype=object)
    for i, row in enumerate(grid):
        arr[i, :] = row
    return arr


def _crt_pairs(residues, primes):
    """Signed CRT reconstruction of a stack of int64 residue grids."""
    modulus = 1
    for p in primes:
        modulus *= p
    total = np.zeros(residues[0].shape, dtype=object)
    for r, p in zip(residues, primes):
        m_i = modulus // p
        coef = m_i * pow(m_i, -1, p)
        total = total + r.astype(object) * coef
    total = total % modulus
    half = modulus // 2
    return np.where(total > half, total - modulus, total)


def conv2d_compiled(a, b, nrows):
    """Same contract as :func:`conv2d_python`, evaluated in the C core."""
    if _ckernel is None:
        raise RuntimeError("compiled kernel is not built")
    if not a or not b or nrows <= 0:
        return [[] for _ in range(max(nrows, 0))]
    ma, mb = _max_abs(a), _max_abs(b)
    if ma == 0 or mb == 0:
        return [[0] * (len(a[0]) + len(b[0]) - 1) for _ in range(nrows)]
    terms = min(len(a), len(b)) * min(len(a[0]), len(b[0]))
    bound = ma * mb * terms
    if bound < _I64_SAFE:
        out = _ckernel.conv2d_i64(
            np.ascontiguousarray(a, dtype=np.int64),
            np.ascontiguousarray(b, dtype=np.int64),
            nrows,
        )
        return out.tolist()
    ao, bo = _as_object(a), _as_object(b)
    primes, residues, modulus = [], [], 1
    for p in prime_stream():
        if modulus > 2 * bound:
            break
        ra = np.ascontiguousarray((ao % p).astype(np.int64))
        rb = np.ascontiguousarray((bo % p).astype(np.int64))
        residues.append(_ckernel.conv2d_mod(ra, rb, p, nrows))
        primes.append(p)
        modulus *= p
    return _crt_pairs(residues, primes).tolist()


if _ckernel is not None:
    BACKEND = "compiled"
    conv2d = conv2d_compiled
else:
    BACKEND = "python"
    conv2d = conv2d_python

__all__ = ["BACKEND", "conv2d", "conv2d_python", "conv2d_compiled"]
