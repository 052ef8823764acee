"""Exact integer lattice helpers.

Vectors are tuples of Python ints, matrices are lists of rows.  A lattice is
always the row span of a matrix.  Nothing here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple
Matrix = list


def vec(v: Iterable) -> tuple:
    return tuple(int(x) for x in v)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def add(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v: Sequence) -> tuple:
    return tuple(c * a for a in v)


def content(v: Sequence) -> int:
    g = 0
    for a in v:
        g = gcd(g, int(a))
    return g


def primitive(v: Sequence) -> tuple:
    """Smallest positive integer multiple of a rational vector that is integral and primitive."""
    den = 1
    for a in v:
        if isinstance(a, Fraction):
            den = den * a.denominator // gcd(den, a.denominator)
    w = [int(a * den) for a in v]
    g = content(w)
    if g == 0:
        return tuple(w)
    return tuple(a // g for a in w)


def transpose(A: Sequence[Sequence]) -> list:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    Bt = transpose(B)
    return [[dot(row, col) for col in Bt] for row in A]


def vecmat(v: Sequence, A: Sequence[Sequence]) -> tuple:
    """Row vector times matrix."""
    if not A:
        return ()
    n = len(A[0])
    out = [0] * n
    for a, row in zip(v, A):
        if a:
            for j in range(n):
                out[j] += a * row[j]
    return tuple(out)


def identity(n: int) -> list:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


# ----------------------------------------------------------------------------
# rational linear algebra


def rref(A: Sequence[Sequence]) -> tuple[list, list]:
    """Reduced row echelon form over Q.  Returns (rows, pivot columns)."""
    M = [[Fraction(x) for x in row] for row in A]
    pivots = []
    r = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A:
        return 0
    return len(rref(A)[1])


def nullspace(A: Sequence[Sequence], n: int | None = None) -> list:
    """Basis of {x : A x = 0} over Q, as primitive integer vectors."""
    if n is None:
        n = len(A[0])
    if not A:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    R, piv = rref(A)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, p in zip(R, piv):
            x[p] = -row[f]
        basis.append(primitive(x))
    return basis


def solve_rows(B: Sequence[Sequence], v: Sequence):
    """Rational c with c . B = v, or None.  B may be rank deficient; then any solution."""
    m = len(B)
    if m == 0:
        return () if all(x == 0 for x in v) else None
    n = len(v)
    aug = [[Fraction(B[i][j]) for i in range(m)] + [Fraction(v[j])] for j in range(n)]
    R, piv = rref(aug)
    if m in piv:
        return None
    c = [Fraction(0)] * m
    for row, p in zip(R, piv):
        c[p] = row[m]
    return tuple(c)


def det(A: Sequence[Sequence]) -> int:
    """Determinant of a square integer matrix (Bareiss)."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(map(int, row)) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            p = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if p is None:
                return 0
            M[k], M[p] = M[p], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def inverse(A: Sequence[Sequence]) -> list:
    """Rational inverse of a square matrix."""
    n = len(A)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


# ----------------------------------------------------------------------------
# integer normal forms


def hnf(A: Sequence[Sequence]) -> list:
    """Row Hermite normal form; zero rows dropped.

    Pivots are positive and the entries above a pivot lie in [0, pivot).
    Two matrices span the same lattice iff their HNFs agree.
    """
    M = [list(map(int, row)) for row in A if any(row)]
    if not M:
        return []
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        if r == len(M):
            break
        while True:
            nz = [i for i in range(r, len(M)) if M[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(M[i][c]))
            M[r], M[p] = M[p], M[r]
            done = True
            for i in range(r + 1, len(M)):
                if M[i][c]:
                    q = M[i][c] // M[r][c]
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
                    if M[i][c]:
                        done = False
            if done:
                break
        if r < len(M) and M[r][c] != 0:
            if M[r][c] < 0:
                M[r] = [-a for a in M[r]]
            for i in range(r):
                q = M[i][c] // M[r][c]
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
            r += 1
    return [tuple(row) for row in M[:r]]


def column_reduce(A: Sequence[Sequence]) -> tuple[list, list]:
    """Unimodular U with A U in column echelon form.

    Returns (A U, U).  The columns of U beyond rank(A) span the integer kernel.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    H = [list(map(int, row)) for row in A]
    U = identity(n)

    def colop(j, k, q):
        # column j -= q * column k
        for row in H:
            row[j] -= q * row[k]
        for row in U:
            row[j] -= q * row[k]

    def colswap(j, k):
        for row in H:
            row[j], row[k] = row[k], row[j]
        for row in U:
            row[j], row[k] = row[k], row[j]

    c = 0
    for r in range(m):
        if c == n:
            break
        while True:
            nz = [j for j in range(c, n) if H[r][j] != 0]
            if not nz:
                break
            p = min(nz, key=lambda j: abs(H[r][j]))
            colswap(c, p)
            done = True
            for j in range(c + 1, n):
                if H[r][j]:
                    colop(j, c, H[r][j] // H[r][c])
                    if H[r][j]:
                        done = False
            if done:
                break
        if H[r][c] != 0:
            c += 1
    return H, U


def integer_kernel(A: Sequence[Sequence], n: int | None = None) -> list:
    """Basis of the saturated lattice {x in Z^n : A x = 0}, as row vectors."""
    if n is None:
        n = len(A[0])
    if not A:
        return [tuple(int(i == j) for i in range(n)) for j in range(n)]
    H, U = column_reduce(A)
    r = sum(1 for j in range(n) if any(H[i][j] for i in range(len(H))))
    cols = transpose(U)
    return [tuple(cols[j]) for j in range(r, n)]


def saturate_lattice(rows: Sequence[Sequence], n: int) -> list:
    """Basis of (Q-span of rows) intersected with Z^n."""
    if not rows or rank(rows) == 0:
        return []
    ann = integer_kernel(rows, n)
    if not ann:
        return [tuple(int(i == j) for i in range(n)) for j in range(n)]
    return hnf(integer_kernel(ann, n))


def coords(B: Sequence[Sequence], v: Sequence):
    """Integer c with c . B = v for B with independent rows, else None."""
    c = solve_rows(B, v)
    if c is None or any(x.denominator != 1 for x in c):
        return None
    return tuple(int(x) for x in c)


def smith_invariants(A: Sequence[Sequence]) -> list:
    """Nonzero invariant factors of an integer matrix, in divisibility order."""
    M = [list(map(int, row)) for row in A if any(row)]
    if not M:
        return []
    out = []
    while M and M[0]:
        m, n = len(M), len(M[0])
        entries = [(abs(M[i][j]), i, j) for i in range(m) for j in range(n) if M[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        M[0], M[pi] = M[pi], M[0]
        for row in M:
            row[0], row[pj] = row[pj], row[0]
        while True:
            p = M[0][0]
            changed = False
            for i in range(1, m):
                if M[i][0]:
                    q = M[i][0] // p
                    M[i] = [a - q * b for a, b in zip(M[i], M[0])]
                    if M[i][0]:
                        changed = True
            for j in range(1, n):
                if M[0][j]:
                    q = M[0][j] // p
                    for row in M:
                        row[j] -= q * row[0]
                    if M[0][j]:
                        changed = True
            if changed:
                entries = [(abs(M[i][0]), i, 0) for i in range(m) if M[i][0]]
                entries += [(abs(M[0][j]), 0, j) for j in range(n) if M[0][j]]
                _, pi, pj = min(entries)
                M[0], M[pi] = M[pi], M[0]
                for row in M:
                    row[0], row[pj] = row[pj], row[0]
                continue
            bad = next(((i, j) for i in range(1, m) for j in range(1, n) if M[i][j] % p), None)
            if bad is None:
                break
            M[0] = [a + b for a, b in zip(M[0], M[bad[0]])]
        out.append(abs(M[0][0]))
        M = [row[1:] for row in M[1:]]
        M = [row for row in M if any(row)]
    # diagonal to divisibility chain: (a, b) -> (gcd, lcm)
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            a, b = out[i], out[j]
            g = gcd(a, b)
            out[i], out[j] = g, a * b // g
    return out
