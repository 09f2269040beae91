"""Independent reference computations used to freeze expected values.

Nothing here imports the package: group orders come from plain BFS over
standard (not adjoint) matrix models, quotiented by scalar matrices.
"""

import itertools
from collections import deque


def _matmul(a, b, n, mod):
    k = len(a)
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k)) % mod for j in range(k))
                 for i in range(k))


def _eye(k):
    return tuple(tuple(int(i == j) for j in range(k)) for i in range(k))


def _elem(k, i, j, t, mod):
    m = [list(r) for r in _eye(k)]
    m[i][j] = (m[i][j] + t) % mod
    return tuple(tuple(r) for r in m)


def _bfs(gens, k, mod):
    seen = {_eye(k)}
    queue = deque(seen)
    while queue:
        g = queue.popleft()
        for s in gens:
            h = _matmul(g, s, k, mod)
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return seen


def _mod_scalars(group, k, mod):
    scalars = [c for c in range(mod) if _scalar(c, k) in group]
    classes = {min(_scale(g, c, mod) for c in scalars) for g in group}
    return len(classes)


def _scalar(c, k):
    return tuple(tuple(c if i == j else 0 for j in range(k)) for i in range(k))


def _scale(g, c, mod):
    return tuple(tuple(x * c % mod for x in row) for row in g)


def elementary_sl_order(k, mod):
    """|E_k(Z/mod) / scalars| via transvections; equals the adjoint E(A_{k-1}, Z/mod)."""
    gens = [_elem(k, i, j, 1, mod) for i in range(k) for j in range(k) if i != j]
    return _mod_scalars(_bfs(gens, k, mod), k, mod)


def elementary_sp4_order(mod):
    """|Ep_4(Z/mod) / {+-1}| for the form J = [[0, I], [-I, 0]]; equals adjoint E(B2, Z/mod)."""
    def block(S, upper):
        m = [list(r) for r in _eye(4)]
        for i, j in itertools.product(range(2), repeat=2):
            if upper:
                m[i][2 + j] = S[i][j] % mod
            else:
                m[2 + i][j] = S[i][j] % mod
        return tuple(tuple(r) for r in m)

    gens = []
    for S in ([[1, 0], [0, 0]], [[0, 0], [0, 1]], [[0, 1], [1, 0]]):
        gens += [block(S, True), block(S, False)]
    # diag(A, A^-T) with A = I + e12 and I + e21
    for i, j in ((0, 1), (1, 0)):
        m = [list(r) for r in _eye(4)]
        m[i][j] = 1
        m[2 + j][2 + i] = (-1) % mod
        gens.append(tuple(tuple(r) for r in m))
    return _mod_scalars(_bfs(gens, 4, mod), 4, mod)


def chevalley_field_order(letter, rank, q):
    """Orders of the adjoint (simple) groups over F_q from the classical formulas."""
    from math import gcd, prod
    if letter == "A":
        n = rank + 1
        sl = q ** (n * (n - 1) // 2) * prod(q ** i - 1 for i in range(2, n + 1))
        return sl // gcd(n, q - 1)
    if letter in "BC":
        n = rank
        full = q ** (n * n) * prod(q ** (2 * i) - 1 for i in range(1, n + 1))
        return full // gcd(2, q - 1)
    if letter == "G":
        return q ** 6 * (q ** 6 - 1) * (q ** 2 - 1)
    raise ValueError(letter)


def weyl_order(roots):
    """Order of the group generated by root reflections, acting on the root set."""
    roots = [tuple(r) for r in roots]
    idx = {r: i for i, r in enumerate(roots)}

    def refl(a):
        aa = sum(x * x for x in a)
        return tuple(idx[tuple(b[k] - (2 * sum(x * y for x, y in zip(a, b)) // aa) * a[k]
                               for k in range(len(a)))] for b in roots)

    gens = [refl(a) for a in roots]
    ident = tuple(range(len(roots)))
    seen = {ident}
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for g in gens:
            h = tuple(g[i] for i in p)
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return len(seen)


def brute_ideals(n):
    """Ideals of Z/n are dZ/n for d | n."""
    return sorted(frozenset((d * k) % n for k in range(n)) for d in range(1, n + 1) if n % d == 0)
