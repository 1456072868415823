"""Small exact linear algebra mod a prime: vectors and matrices as int tuples.

Matrices are tuples of rows; everything is reduced mod ell on the way in.
Only the 4x4 (and 2x2) cases needed for torsion work are exercised, but the
routines are written for general small sizes.
"""

from __future__ import annotations

from .errors import InternalInconsistency


def vec(entries, ell):
    return tuple(e % ell for e in entries)


def mat(rows, ell):
    return tuple(tuple(e % ell for e in row) for row in rows)


def identity(n, ell):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zero_vec(n):
    return (0,) * n


def mat_vec(M, v, ell):
    return tuple(sum(a * b for a, b in zip(row, v)) % ell for row in M)


def mat_mul(A, B, ell):
    n, m = len(A), len(B[0])
    k = len(B)
    return tuple(
        tuple(sum(A[i][t] * B[t][j] for t in range(k)) % ell for j in range(m))
        for i in range(n)
    )


def mat_add(A, B, ell):
    return tuple(
        tuple((a + b) % ell for a, b in zip(ra, rb)) for ra, rb in zip(A, B)
    )


def mat_scale(A, c, ell):
    return tuple(tuple(a * c % ell for a in row) for row in A)


def mat_pow(M, e, ell):
    n = len(M)
    result = identity(n, ell)
    while e:
        if e & 1:
            result = mat_mul(result, M, ell)
        M = mat_mul(M, M, ell)
        e >>= 1
    return result


def transpose(M):
    return tuple(zip(*M))


def vec_add(a, b, ell):
    return tuple((x + y) % ell for x, y in zip(a, b))


def vec_scale(a, c, ell):
    return tuple(x * c % ell for x in a)


def dot(a, b, ell):
    return sum(x * y for x, y in zip(a, b)) % ell


def rref(rows, ell):
    """Reduced row echelon form; returns (rows, pivot column list)."""
    rows = [list(r) for r in rows]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][c] % ell), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, ell)
        rows[r] = [x * inv % ell for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] % ell:
                f = rows[i][c]
                rows[i] = [(a - f * b) % ell for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return [tuple(row) for row in rows], pivots


def rank(rows, ell):
    return len(rref(rows, ell)[1])


def solve(M, b, ell):
    """One solution of Mx = b, or None."""
    n = len(M)
    m = len(M[0])
    aug = [list(M[i]) + [b[i]] for i in range(n)]
    red, pivots = rref(aug, ell)
    for row in red:
        if all(x == 0 for x in row[:m]) and row[m] % ell:
            return None
    x = [0] * m
    for i, c in enumerate(pivots):
        if c < m:
            x[c] = red[i][m]
        elif red[i][m] % ell:
            return None
    return tuple(x)


def det(M, ell):
    rows = [list(r) for r in M]
    n = len(rows)
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] % ell), None)
        if piv is None:
            return 0
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            d = -d
        d = d * rows[c][c] % ell
        inv = pow(rows[c][c], -1, ell)
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] * inv % ell
                rows[i] = [(a - f * b) % ell for a, b in zip(rows[i], rows[c])]
    return d % ell


def charpoly(M, ell) -> list[int]:
    """det(X*I - M) as little-endian int coefficients, by cofactor expansion.

    Entries become degree <= 1 polynomials; no divisions, so any prime ell
    works.
    """

    def pmul(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % ell
        return out

    def padd(a, b):
        n = max(len(a), len(b))
        return [
            ((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % ell
            for i in range(n)
        ]

    n = len(M)
    entries = [
        [([(-M[i][j]) % ell, 1] if i == j else [(-M[i][j]) % ell]) for j in range(n)]
        for i in range(n)
    ]

    def pdet(rows, cols):
        if len(rows) == 1:
            return entries[rows[0]][cols[0]]
        acc = [0]
        for k, c in enumerate(cols):
            minor = pdet(rows[1:], cols[:k] + cols[k + 1 :])
            term = pmul(entries[rows[0]][c], minor)
            if k % 2 == 1:
                term = [(-t) % ell for t in term]
            acc = padd(acc, term)
        return acc

    out = pdet(list(range(n)), list(range(n)))
    out += [0] * (n + 1 - len(out))
    if out[n] != 1 % ell:
        raise InternalInconsistency("characteristic polynomial not monic")
    return out


def eigenspace_basis(M, lam, ell):
    """Basis of ker(M - lam*I) as row vectors."""
    n = len(M)
    A = tuple(
        tuple((M[i][j] - (lam if i == j else 0)) % ell for j in range(n))
        for i in range(n)
    )
    red, pivots = rref(A, ell)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-red[i][fc]) % ell
        basis.append(tuple(v))
    return basis
