"""Dense Gaussian elimination over an exact field (or complex floats).

Entries may be GaussRat, AlgNum, Fraction/int or complex; the only
requirements are field operations and ``== 0``.  With complex entries the
pivot of largest modulus is taken.
"""

from __future__ import annotations


def _is_float(x) -> bool:
    return isinstance(x, (complex, float))


def _pick_pivot(rows, col, start):
    best = None
    for r in range(start, len(rows)):
        x = rows[r][col]
        if x == 0:
            continue
        if not _is_float(x):
            return r
        if best is None or abs(x) > abs(rows[best][col]):
            best = r
    return best


def row_reduce(a, ncols=None):
    """Reduced row echelon form of a copy of ``a``; returns (rows, pivot_cols)."""
    rows = [list(r) for r in a]
    ncols = len(rows[0]) if rows and ncols is None else (ncols or 0)
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= len(rows):
            break
        p = _pick_pivot(rows, c, r)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(a) -> int:
    if not a:
        return 0
    return len(row_reduce(a)[1])


def solve(a, b):
    """One solution x of a x = b (b a list), or None when inconsistent."""
    n = len(a[0]) if a else 0
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    rows, pivots = row_reduce(aug, n + 1)
    if n in pivots:
        return None
    x = [0] * n
    for i, c in enumerate(pivots):
        x[c] = rows[i][n]
    return x


def solve_many(a, bs):
    """Solve a x = b for several right-hand sides at once; None entries for inconsistent ones."""
    n = len(a[0]) if a else 0
    m = len(bs)
    aug = [list(row) + [b[i] for b in bs] for i, row in enumerate(a)]
    rows, pivots = row_reduce(aug, n)
    out = []
    for k in range(m):
        ok = True
        for i in range(len(pivots), len(rows)):
            if rows[i][n + k] != 0:
                ok = False
                break
        if not ok:
            out.append(None)
            continue
        x = [0] * n
        for i, c in enumerate(pivots):
            x[c] = rows[i][n + k]
        out.append(x)
    return out


def inverse(a):
    n = len(a)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    rows, pivots = row_reduce(aug, n)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in rows]


def det(a):
    rows = [list(r) for r in a]
    n = len(rows)
    d = 1
    for c in range(n):
        p = _pick_pivot(rows, c, c)
        if p is None:
            return 0
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            d = -d
        d = d * rows[c][c]
        inv = 1 / rows[c][c]
        for k in range(c + 1, n):
            if rows[k][c] != 0:
                f = rows[k][c] * inv
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[c])]
    return d


def matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), 0) for j in range(len(b[0]))]
            for i in range(len(a))]
