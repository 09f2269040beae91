"""Small exact linear algebra over Q for integer root vectors.

Everything here works on tuples/lists of ints or Fractions.  The sizes are tiny
(rank <= 8) so plain Gaussian elimination is enough.
"""

from fractions import Fraction
from math import gcd


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def row_reduce(rows):
    """Return (echelon rows, pivot columns) of a rational matrix."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    i = 0
    ncols = len(m[0]) if m else 0
    for j in range(ncols):
        p = next((k for k in range(i, len(m)) if m[k][j] != 0), None)
        if p is None:
            continue
        m[i], m[p] = m[p], m[i]
        piv = m[i][j]
        m[i] = [x / piv for x in m[i]]
        for k in range(len(m)):
            if k != i and m[k][j] != 0:
                f = m[k][j]
                m[k] = [a - f * b for a, b in zip(m[k], m[i])]
        pivots.append(j)
        i += 1
        if i == len(m):
            break
    return m[:i], pivots


def rank(vectors):
    vectors = list(vectors)
    if not vectors:
        return 0
    return len(row_reduce(vectors)[1])


def nullspace(rows, ncols=None):
    """Basis of {x : rows @ x = 0} as lists of Fractions."""
    if not rows:
        n = ncols
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    red, piv = row_reduce(rows)
    n = len(rows[0])
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for r, p in zip(red, piv):
            x[p] = -r[f]
        basis.append(x)
    return basis


def primitive(v):
    """Scale a rational vector to a primitive integer vector (first nonzero > 0)."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        return tuple(ints)
    ints = [x // g for x in ints]
    for x in ints:
        if x != 0:
            if x < 0:
                ints = [-y for y in ints]
            break
    return tuple(ints)


def independent_basis(vectors):
    """Greedy maximal independent subset, in the given order."""
    basis = []
    for v in vectors:
        if rank(basis + [v]) > len(basis):
            basis.append(v)
    return basis


def solve(basis, v):
    """Coefficients c with sum c_i basis_i = v, or None if v is not in the span."""
    k = len(basis)
    if k == 0:
        return [] if all(x == 0 for x in v) else None
    n = len(v)
    aug = [[Fraction(basis[i][r]) for i in range(k)] + [Fraction(v[r])] for r in range(n)]
    red, piv = row_reduce(aug)
    if k in piv:
        return None
    c = [Fraction(0)] * k
    for r, p in zip(red, piv):
        c[p] = r[k]
    return c
