"""Reference implementation of the grid convolution in plain Python."""


def conv2d(a, b, nrows):
    """Exact truncated convolution of two rectangular integer grids.

    ``a`` and ``b`` are lists of equal-length rows of Python ints.  Row ``k``
    of the result collects ``a[i] * b[j]`` over ``i + j = k`` for ``k < nrows``.
    """
    if not a or not b or nrows <= 0:
        return [[] for _ in range(max(nrows, 0))]
    la, lb = len(a[0]), len(b[0])
    width = la + lb - 1
    out = [[0] * width for _ in range(nrows)]
    b_nz = [[(v, y) for v, y in enumerate(row) if y] for row in b]
    for i, row_a in enumerate(a):
        if i >= nrows:
            break
        a_nz = [(u, x) for u, x in enumerate(row_a) if x]
        if not a_nz:
            continue
        for j, nzb in enumerate(b_nz):
            k = i + j
            if k >= nrows:
                break
            if not nzb:
                continue
            target = out[k]
            for u, x in a_nz:
                for v, y in nzb:
                    target[u + v] += x * y
    return out
