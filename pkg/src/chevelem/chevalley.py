"""Chevalley basis, adjoint root elements and commutator constants.

The Lie algebra is built on the Chevalley Z-form with basis e_alpha (roots in
lexicographic order) followed by h_i (simple coroots).  Structure constants
N_{alpha,beta} come from the extraspecial-pair algorithm: N = +(p+1) on every
extraspecial pair, and the remaining signs follow from the standard
antisymmetry, triangle and quadrilateral relations.

Group elements are matrices over a finite ring stored as coordinate arrays of
shape (d, d, m): entry [a, b] is the ring element with residues [a, b, :].
"""

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from .errors import AxiomError, DomainError
from .linalg import dot, rank, solve
from .rootsystem import CheckReport, RootSystem

DEFAULT_MAX_DIM = 52


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _neg(a):
    return tuple(-x for x in a)


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _scale(k, a):
    return tuple(k * x for x in a)


# ---------------------------------------------------------------------------
# structure constants


def _string_depth(phi, alpha, beta):
    """Largest p with beta - p*alpha a root."""
    p = 0
    while _sub(beta, _scale(p + 1, alpha)) in phi:
        p += 1
    return p


def structure_constants(phi):
    """N_{alpha,beta} for all pairs with alpha + beta a root."""
    pos = sorted(phi.positive_roots, key=lambda r: (phi.height(r), r))
    order = {r: i for i, r in enumerate(pos)}
    norm = {r: dot(r, r) for r in phi.roots}
    Npos = {}

    def N(a, b):
        s = _add(a, b)
        if s not in phi:
            return 0
        if a in order and b in order:
            return Npos[(a, b)]
        if a not in order and b not in order:
            return -N(_neg(a), _neg(b))
        # mixed signs: use the triangle relation for a + b + c = 0
        c = _neg(s)
        # N_ab / |c|^2 = N_bc / |a|^2 = N_ca / |b|^2
        sa, sb, sc = (x in order for x in (a, b, c))
        if sb == sc:
            return Fraction(N(b, c) * norm[c], norm[a])
        return Fraction(N(c, a) * norm[c], norm[b])

    by_height = {}
    for xi in pos:
        by_height.setdefault(phi.height(xi), []).append(xi)
    for h in sorted(by_height):
        for xi in by_height[h]:
            pairs = [(a, _sub(xi, a)) for a in pos if _sub(xi, a) in order]
            if not pairs:
                continue  # simple root
            a0, b0 = min(pairs, key=lambda ab: order[ab[0]])
            Npos[(a0, b0)] = _string_depth(phi, a0, b0) + 1
            Npos[(b0, a0)] = -Npos[(a0, b0)]
            for g, d in pairs:
                if (g, d) in Npos or order[g] > order[d]:
                    continue
                # quadrilateral relation on (a0, b0, -g, -d)
                t1 = 0
                if _sub(b0, g) in phi:
                    t1 = Fraction(N(b0, _neg(g)) * N(a0, _neg(d)), norm[_sub(b0, g)])
                t2 = 0
                if _sub(a0, g) in phi:
                    t2 = Fraction(N(_neg(g), a0) * N(b0, _neg(d)), norm[_sub(a0, g)])
                val = Fraction(norm[xi], Npos[(a0, b0)]) * (t1 + t2)
                if val.denominator != 1:
                    raise AxiomError("non-integral structure constant", (g, d, val))
                Npos[(g, d)] = int(val)
                Npos[(d, g)] = -int(val)
    out = {}
    for a in phi.roots:
        for b in phi.roots:
            if _add(a, b) in phi:
                v = N(a, b)
                if Fraction(v).denominator != 1:
                    raise AxiomError("non-integral structure constant", (a, b, v))
                out[(a, b)] = int(v)
    return out


# ---------------------------------------------------------------------------
# Chevalley data


@dataclass
class ChevalleyData:
    """Integral Chevalley basis of the adjoint module plus divided powers."""

    system: RootSystem
    roots: tuple
    simple: tuple
    N: dict
    ad: dict
    divided: dict
    nilpotency_bound: int
    coroot_coords: dict = field(repr=False)

    @property
    def dim(self):
        return len(self.roots) + len(self.simple)

    @property
    def labels(self):
        return [f"e{list(r)}" for r in self.roots] + [f"h{i + 1}" for i in range(len(self.simple))]

    def index(self, alpha):
        return self._index[tuple(alpha)]

    def __post_init__(self):
        self._index = {r: i for i, r in enumerate(self.roots)}

    def bracket(self, x, y):
        """Lie bracket of two coordinate vectors (integer arrays)."""
        out = np.zeros(self.dim, dtype=np.int64)
        for i, r in enumerate(self.roots):
            if x[i]:
                out += x[i] * (self.ad[r] @ y)
        # h-part of x acts diagonally: [h_i, e_b] = <b, a_i^vee> e_b
        n = len(self.roots)
        for k, s in enumerate(self.simple):
            c = x[n + k]
            if c:
                diag = np.array([self.system.pairing(b, s) for b in self.roots] + [0] * len(self.simple))
                out += c * diag * y
        return out

    def to_dict(self):
        return {
            "system": self.system.label,
            "basis": self.labels,
            "roots": [list(r) for r in self.roots],
            "simple_roots": [list(s) for s in self.simple],
            "structure_constants": [[list(a), list(b), n] for (a, b), n in sorted(self.N.items())],
            "nilpotency_bound": self.nilpotency_bound,
            "divided_powers": {
                json.dumps(list(r)): [m.tolist() for m in self.divided[r]] for r in self.roots
            },
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def build_chevalley(phi, max_dim=DEFAULT_MAX_DIM):
    """Chevalley basis and divided-power matrices for a reduced root system."""
    if not phi.is_reduced:
        raise DomainError(f"{phi.label}: non-reduced systems have no split group")
    dim = len(phi) + phi.rank
    if dim > max_dim:
        raise DomainError(f"{phi.label}: adjoint dimension {dim} exceeds limit {max_dim}")
    roots = phi.roots
    simple = phi.simple_roots
    n = len(roots)
    idx = {r: i for i, r in enumerate(roots)}
    N = structure_constants(phi)
    # coroot of alpha in the basis of simple coroots
    sc_vee = [_scale(Fraction(2, dot(s, s)), s) for s in simple]
    coroot = {}
    for r in roots:
        c = solve(sc_vee, _scale(Fraction(2, dot(r, r)), r))
        if c is None or any(x.denominator != 1 for x in c):
            raise AxiomError("coroot not integral in simple coroots", r)
        coroot[r] = tuple(int(x) for x in c)
    ad = {}
    for a in roots:
        m = np.zeros((dim, dim), dtype=np.int64)
        for b in roots:
            s = _add(a, b)
            if s in idx:
                m[idx[s], idx[b]] = N[(a, b)]
            elif not any(s):
                for k, c in enumerate(coroot[a]):
                    m[n + k, idx[b]] = c
        for k, s in enumerate(simple):
            m[idx[a], n + k] = -phi.pairing(a, s)
        ad[a] = m
    divided = {}
    bound = 0
    for a in roots:
        mats = [np.eye(dim, dtype=np.int64)]
        power = np.eye(dim, dtype=np.int64)
        i = 0
        while True:
            i += 1
            power = power @ ad[a]
            if not power.any():
                break
            f = factorial(i)
            if (power % f).any():
                raise AxiomError("divided power not integral", (a, i))
            mats.append(power // f)
        bound = max(bound, i)
        divided[a] = mats
    return ChevalleyData(phi, roots, simple, N, ad, divided, bound, coroot)


def check_jacobi(C):
    """Exhaustive Jacobi identity on basis triples, plus |N| = p + 1."""
    d = C.dim
    basis = np.eye(d, dtype=np.int64)
    for i in range(d):
        for j in range(i + 1, d):
            bij = C.bracket(basis[i], basis[j])
            for k in range(j + 1, d):
                s = (C.bracket(bij, basis[k])
                     + C.bracket(C.bracket(basis[j], basis[k]), basis[i])
                     + C.bracket(C.bracket(basis[k], basis[i]), basis[j]))
                if s.any():
                    return CheckReport("jacobi", False, {"triple": [C.labels[t] for t in (i, j, k)]})
    for (a, b), v in C.N.items():
        if abs(v) != _string_depth(C.system, a, b) + 1:
            return CheckReport("jacobi", False, {"pair": [a, b], "N": v})
    return CheckReport("jacobi", True, None, {"dim": d, "pairs": len(C.N)})


# ---------------------------------------------------------------------------
# matrices over a finite ring


def right_operator(R, B):
    """Float matrix W with (A @ B) == (A.reshape(d, d*m) @ W) reduced mod moduli."""
    d, _, m = B.shape
    # W[(b,i),(c,k)] = sum_j B[b,c,j] T[i,j,k]
    W = np.einsum("bcj,ijk->bick", B, R.table) % R._mod
    return W.reshape(d * m, d * m).astype(np.float64)


def mat_mul(R, A, B):
    """Product of ring matrices (works on a leading batch axis of A too)."""
    d, _, m = B.shape
    if m == 1:
        out = np.matmul(A[..., 0].astype(np.float64), B[..., 0].astype(np.float64))
        return (out.astype(np.int64) % R.moduli[0])[..., None]
    W = right_operator(R, B)
    shape = A.shape
    out = A.reshape(-1, d * m).astype(np.float64) @ W
    return out.astype(np.int64).reshape(shape) % R._mod


def identity(R, d):
    out = np.zeros((d, d, R.m), dtype=np.int64)
    for i in range(d):
        out[i, i] = R.one
    return out


@dataclass(eq=False)
class GroupElement:
    """Invertible matrix over a ring with its inverse and an optional word."""

    ring: object
    matrix: np.ndarray
    inverse: np.ndarray
    word: tuple = None

    def __mul__(self, other):
        w = None if self.word is None or other.word is None else self.word + other.word
        return GroupElement(self.ring, mat_mul(self.ring, self.matrix, other.matrix),
                            mat_mul(self.ring, other.inverse, self.inverse), w)

    def inv(self):
        w = None
        if self.word is not None:
            w = tuple((tag, self.ring.neg(x)) for tag, x in reversed(self.word))
        return GroupElement(self.ring, self.inverse, self.matrix, w)

    def conj(self, h):
        """The conjugate g h g^-1."""
        return self * h * self.inv()

    def key(self):
        return self.matrix.astype(np.uint8).tobytes() if max(self.ring.moduli) < 256 \
            else self.matrix.tobytes()

    def __eq__(self, other):
        return np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.key())

    @property
    def is_identity(self):
        return np.array_equal(self.matrix, identity(self.ring, self.matrix.shape[0]))

    def check(self):
        """The stored inverse is a two-sided inverse."""
        I = identity(self.ring, self.matrix.shape[0])
        return (np.array_equal(mat_mul(self.ring, self.matrix, self.inverse), I)
                and np.array_equal(mat_mul(self.ring, self.inverse, self.matrix), I))


def _poly_matrix(C, R, alpha, x):
    """sum_i x^i M_{alpha,i} as a coordinate array."""
    mats = C.divided[alpha]
    out = np.zeros((C.dim, C.dim, R.m), dtype=np.int64)
    xi = R.one
    for M in mats:
        out += M[:, :, None] * np.asarray(xi, dtype=np.int64)[None, None, :]
        xi = R.mul(xi, x)
    return out % R._mod


def root_element(C, R, alpha, x):
    """t_alpha(x) in the adjoint representation over R."""
    alpha = C.system.check_root(alpha)
    x = R.elem(x)
    return GroupElement(R, _poly_matrix(C, R, alpha, x), _poly_matrix(C, R, alpha, R.neg(x)),
                        ((alpha, x),))


def weyl_element(C, R, alpha, u):
    """w_alpha(u) = t_alpha(u) t_{-alpha}(-u^-1) t_alpha(u)."""
    u = R.elem(u)
    ui = R.inverse(u)
    if ui is None:
        raise DomainError(f"{R.label(u)} is not a unit of {R.descriptor}")
    a = tuple(alpha)
    return (root_element(C, R, a, u) * root_element(C, R, _neg(a), R.neg(ui))
            * root_element(C, R, a, u))


def torus_element(C, R, alpha, u):
    """h_alpha(u) = w_alpha(u) w_alpha(1)^-1."""
    return weyl_element(C, R, alpha, u) * weyl_element(C, R, alpha, R.one).inv()


def commutator(g, h):
    """[g, h] = g h g^-1 h^-1."""
    return g * h * g.inv() * h.inv()


def check_torus_conjugation(C, R):
    """h_alpha(u) t_beta(x) h_alpha(u)^-1 = t_beta(u^<beta,alpha^vee> x) for all data."""
    count = 0
    for a in C.roots:
        for u in R.units:
            h = torus_element(C, R, a, u)
            for b in C.roots:
                k = C.system.pairing(b, a)
                uk = R.power(u, k) if k >= 0 else R.power(R.inverse(u), -k)
                for x in R.elements:
                    lhs = h.conj(root_element(C, R, b, x))
                    rhs = root_element(C, R, b, R.mul(uk, x))
                    count += 1
                    if lhs != rhs:
                        return CheckReport("torus-conjugation", False,
                                           {"alpha": a, "u": u, "beta": b, "x": x})
    return CheckReport("torus-conjugation", True, None, {"checks": count})


# ---------------------------------------------------------------------------
# symbolic commutator table in Z[x, y]


class PolyMatrix:
    """Matrix with entries in Z[x, y], stored sparsely as {(i, j): int matrix}."""

    def __init__(self, terms):
        self.terms = {k: v for k, v in terms.items() if v.any()}

    @classmethod
    def root(cls, C, alpha, coeff, i, j):
        """t_alpha(coeff * x^i y^j)."""
        out = {}
        for n, M in enumerate(C.divided[alpha]):
            key = (n * i, n * j)
            out[key] = out.get(key, 0) + (coeff ** n) * M
        return cls(out)

    def __mul__(self, other):
        out = {}
        for (i, j), A in self.terms.items():
            for (k, l), B in other.terms.items():
                key = (i + k, j + l)
                P = A @ B
                out[key] = out[key] + P if key in out else P
        return PolyMatrix(out)

    def __eq__(self, other):
        if set(self.terms) != set(other.terms):
            return False
        return all(np.array_equal(v, other.terms[k]) for k, v in self.terms.items())

    def coefficient(self, i, j):
        return self.terms.get((i, j))


@dataclass
class CommutatorTable:
    """[t_a(x), t_b(y)] = prod t_{ia+jb}(c_{abij} x^i y^j) in a fixed order."""

    system_label: str
    entries: dict

    def factors(self, a, b):
        return self.entries.get((tuple(a), tuple(b)), ())

    def rows(self):
        out = []
        for (a, b), fs in sorted(self.entries.items()):
            for i, j, _, c in fs:
                out.append((a, b, i, j, c))
        return out

    def to_csv(self):
        lines = ["alpha,beta,i,j,coefficient"]
        for a, b, i, j, c in self.rows():
            lines.append(f"\"{list(a)}\",\"{list(b)}\",{i},{j},{c}")
        return "\n".join(lines) + "\n"

    def coefficients(self):
        return {c for fs in self.entries.values() for *_, c in fs}


def product_order(phi, a, b):
    """Pairs (i, j), i, j > 0, with ia + jb a root, by increasing height then (i, j)."""
    terms = []
    for i in range(1, 4):
        for j in range(1, 4):
            g = _add(_scale(i, a), _scale(j, b))
            if g in phi:
                terms.append((phi.height(g), i, j, g))
    terms.sort()
    return [(i, j, g) for _, i, j, g in terms]


def _symbolic_commutator(C, a, b):
    ta = PolyMatrix.root(C, a, 1, 1, 0)
    tb = PolyMatrix.root(C, b, 1, 0, 1)
    ta_inv = PolyMatrix.root(C, a, -1, 1, 0)
    tb_inv = PolyMatrix.root(C, b, -1, 0, 1)
    return ta * tb * ta_inv * tb_inv


def _reassemble(C, factors):
    out = PolyMatrix({(0, 0): np.eye(C.dim, dtype=np.int64)})
    for i, j, g, c in factors:
        out = out * PolyMatrix.root(C, g, c, i, j)
    return out


def derive_commutator_table(C, pairs=None):
    """Derive every c_{abij} and verify the reassembled product symbolically."""
    phi = C.system
    entries = {}
    if pairs is None:
        pairs = [(a, b) for a in C.roots for b in C.roots if rank([a, b]) == 2]
    for a, b in pairs:
        comm = _symbolic_commutator(C, a, b)
        order = product_order(phi, a, b)
        known = {}
        unknown = []
        for i, j, g in order:
            if min(i, j) == 1:
                coef = comm.coefficient(i, j)
                ad = C.ad[g]
                nz = np.argwhere(ad)
                r, s = nz[0]
                c = Fraction(int(coef[r, s]) if coef is not None else 0, int(ad[r, s]))
                if c.denominator != 1 or coef is None or not np.array_equal(coef, int(c) * ad):
                    raise AxiomError("commutator coefficient not a multiple of ad e", (a, b, i, j))
                known[(i, j)] = int(c)
            else:
                unknown.append((i, j))
        found = None
        for values in itertools.product((1, -1, 2, -2, 3, -3), repeat=len(unknown)):
            trial = dict(known)
            trial.update(zip(unknown, values))
            factors = [(i, j, g, trial[(i, j)]) for i, j, g in order]
            if _reassemble(C, factors) == comm:
                found = factors
                break
        if found is None:
            raise AxiomError("commutator formula does not reassemble", (a, b))
        entries[(a, b)] = tuple(found)
    return CommutatorTable(phi.label, entries)


def verify_commutator_table(C, table):
    """Independent re-check of every entry against the symbolic commutator."""
    bad = []
    for (a, b), factors in sorted(table.entries.items()):
        if not _reassemble(C, factors) == _symbolic_commutator(C, a, b):
            bad.append((a, b))
    coeffs = table.coefficients()
    ok = not bad and coeffs <= {1, -1, 2, -2, 3, -3}
    return CheckReport("commutator-table", ok, bad or None,
                       {"pairs": len(table.entries), "coefficients": sorted(coeffs)})


def check_homogeneity(C, R, table=None):
    """Matrix-level commutator formula over R for all parameters, and
    f(kx, k'y) = f(x, y) k^i k'^j for the table's monomials."""
    table = table or derive_commutator_table(C)
    elems = R.elements
    checks = 0
    for (a, b), factors in sorted(table.entries.items()):
        ta = {x: root_element(C, R, a, x) for x in elems}
        tb = {y: root_element(C, R, b, y) for y in elems}
        for x in elems:
            for y in elems:
                lhs = commutator(ta[x], tb[y])
                rhs = identity(R, C.dim)
                for i, j, g, c in factors:
                    f = R.mul(R.from_int(c), R.mul(R.power(x, i), R.power(y, j)))
                    rhs = mat_mul(R, rhs, _poly_matrix(C, R, g, f))
                checks += 1
                if not np.array_equal(lhs.matrix, rhs):
                    return CheckReport("homogeneity", False, {"alpha": a, "beta": b, "x": x, "y": y})
        for i, j, g, c in factors:
            for x in elems:
                for y in elems:
                    f = R.mul(R.from_int(c), R.mul(R.power(x, i), R.power(y, j)))
                    for k in elems:
                        for k2 in elems:
                            kx, ky = R.mul(k, x), R.mul(k2, y)
                            lhs = R.mul(R.from_int(c), R.mul(R.power(kx, i), R.power(ky, j)))
                            rhs = R.mul(f, R.mul(R.power(k, i), R.power(k2, j)))
                            if lhs != rhs:
                                return CheckReport("homogeneity", False,
                                                   {"alpha": a, "beta": b, "i": i, "j": j,
                                                    "x": x, "y": y, "k": k, "k2": k2})
    return CheckReport("homogeneity", True, None, {"ring": R.descriptor, "matrix_checks": checks})
