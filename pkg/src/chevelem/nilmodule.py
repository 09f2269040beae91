"""2-step nilpotent K-modules in the split cocycle model.

Elements are pairs (u, v) with u in K^m0 (the central part M_0) and v in K^m.
The group law is twisted by a K-bilinear cocycle c:

    (u, v) + (u', v') = (u + u' + c(v, v'), v + v')
    (u, v) . k        = (k^2 u, k v)
    tau(u, v)         = 2u - c(v, v)

tau is forced by m.(k + k') = m.k + kk' tau(m) + m.k'; the axiom checks below
re-derive it rather than trusting it.
"""

import itertools
from dataclasses import dataclass, field

from .errors import AxiomError
from .rootsystem import CheckReport


@dataclass(frozen=True)
class NilElement:
    u: tuple
    v: tuple
    parent: object = field(default=None, compare=False, repr=False, hash=False)

    def __add__(self, other):
        return self.parent.plus(self, other)

    def __neg__(self):
        return self.parent.neg(self)

    def __sub__(self, other):
        return self.parent.minus(self, other)

    def __mul__(self, k):
        return self.parent.scale(self, k)


class NilModule:
    """Split 2-step nilpotent module over a finite ring K.

    ``cocycle`` is either an integer array C[a][b][k] (so that
    c(v, v')_k = sum_ab C[a][b][k] v_a v'_b) or a callable (v, v') -> u.
    """

    def __init__(self, K, m0, m, cocycle):
        self.K = K
        self.m0 = m0
        self.m = m
        if callable(cocycle):
            self._c = cocycle
            self.structure = None
        else:
            C = [[[int(x) for x in row] for row in plane] for plane in cocycle]
            self.structure = C
            self._c = self._bilinear(C)
        self._elements = None
        # memo tables; the carriers checked exhaustively are small
        self._memo_c, self._memo_plus, self._memo_scale = {}, {}, {}

    def _bilinear(self, C):
        K = self.K

        def c(v, w):
            out = []
            for k in range(self.m0):
                acc = K.zero
                for a in range(self.m):
                    for b in range(self.m):
                        coef = C[a][b][k]
                        if coef:
                            acc = K.add(acc, K.smul(coef, K.mul(v[a], w[b])))
                out.append(acc)
            return tuple(out)

        return c

    # -- construction ----------------------------------------------------------

    def element(self, u, v):
        return NilElement(tuple(u), tuple(v), self)

    @property
    def zero(self):
        z = self.K.zero
        return self.element((z,) * self.m0, (z,) * self.m)

    @property
    def elements(self):
        if self._elements is None:
            E = self.K.elements
            us = list(itertools.product(E, repeat=self.m0))
            vs = list(itertools.product(E, repeat=self.m))
            self._elements = tuple(self.element(u, v) for u in us for v in vs)
        return self._elements

    @property
    def central(self):
        z = (self.K.zero,) * self.m
        return tuple(x for x in self.elements if x.v == z)

    def __len__(self):
        return len(self.K) ** (self.m0 + self.m)

    def c(self, v, w):
        key = (v, w)
        out = self._memo_c.get(key)
        if out is None:
            out = self._memo_c[key] = self._c(v, w)
        return out

    # -- vector helpers --------------------------------------------------------

    def _vadd(self, *vs):
        K = self.K
        out = vs[0]
        for w in vs[1:]:
            out = tuple(K.add(a, b) for a, b in zip(out, w))
        return out

    def _vneg(self, v):
        return tuple(self.K.neg(a) for a in v)

    def _vscale(self, k, v):
        return tuple(self.K.mul(k, a) for a in v)

    # -- structure maps --------------------------------------------------------

    def plus(self, x, y):
        key = (x, y)
        out = self._memo_plus.get(key)
        if out is None:
            out = self.element(self._vadd(x.u, y.u, self.c(x.v, y.v)), self._vadd(x.v, y.v))
            self._memo_plus[key] = out
        return out

    def neg(self, x):
        return self.element(self._vadd(self._vneg(x.u), self.c(x.v, x.v)), self._vneg(x.v))

    def minus(self, x, y):
        return self.plus(x, self.neg(y))

    def scale(self, x, k):
        """Right action of the multiplicative monoid of K."""
        key = (x, k)
        out = self._memo_scale.get(key)
        if out is None:
            K = self.K
            out = self.element(self._vscale(K.mul(k, k), x.u), self._vscale(k, x.v))
            self._memo_scale[key] = out
        return out

    def kmul(self, k, x):
        """Left K-module structure on M_0."""
        return self.element(self._vscale(k, x.u), x.v)

    def tau(self, x):
        K = self.K
        u = self._vadd(tuple(K.smul(2, a) for a in x.u), self._vneg(self.c(x.v, x.v)))
        return self.element(u, (K.zero,) * self.m)

    def comm(self, x, y):
        """[x, y] = x + y - x - y."""
        u = self._vadd(self.c(x.v, y.v), self._vneg(self.c(y.v, x.v)))
        return self.element(u, (self.K.zero,) * self.m)

    def in_central(self, x):
        return all(a == self.K.zero for a in x.v)

    def to_dict(self):
        return {"ring": self.K.descriptor, "m0": self.m0, "m": self.m, "cocycle": self.structure}


def check_cocycle_bilinear(M):
    K = M.K
    vs = list(itertools.product(K.elements, repeat=M.m))
    for v, w, x in itertools.product(vs, repeat=3):
        vw = tuple(K.add(a, b) for a, b in zip(v, w))
        if M.c(vw, x) != M._vadd(M.c(v, x), M.c(w, x)):
            return (v, w, x)
        if M.c(x, vw) != M._vadd(M.c(x, v), M.c(x, w)):
            return (x, v, w)
    for v, w in itertools.product(vs, repeat=2):
        for k in K.elements:
            if M.c(M._vscale(k, v), w) != M._vscale(k, M.c(v, w)) or \
               M.c(v, M._vscale(k, w)) != M._vscale(k, M.c(v, w)):
                return (v, w, k)
    return None


def check_axioms(M):
    """Group law, filtration and scalar-action axioms, exhaustively."""
    K = M.K
    E = M.elements
    z = M.zero
    for x in E:
        if M.plus(x, z) != x or M.plus(z, x) != x or M.plus(x, M.neg(x)) != z:
            return CheckReport("nilmod-axioms", False, {"law": "identity/inverse", "m": x})
    for x, y in itertools.product(E, repeat=2):
        cm = M.comm(x, y)
        if cm != M.minus(M.plus(x, y), M.plus(y, x)):
            return CheckReport("nilmod-axioms", False, {"law": "commutator", "m": (x, y)})
        if not M.in_central(cm):
            return CheckReport("nilmod-axioms", False, {"law": "[M,M] in M0", "m": (x, y)})
        for k in K.elements:
            if M.scale(M.plus(x, y), k) != M.plus(M.scale(x, k), M.scale(y, k)):
                return CheckReport("nilmod-axioms", False, {"law": "endomorphism", "m": (x, y), "k": k})
    if len(E) <= 64:
        for x, y, w in itertools.product(E, repeat=3):
            if M.plus(M.plus(x, y), w) != M.plus(x, M.plus(y, w)):
                return CheckReport("nilmod-axioms", False, {"law": "associativity", "m": (x, y, w)})
    for x in M.central:
        for y in E:
            if M.plus(x, y) != M.plus(y, x):
                return CheckReport("nilmod-axioms", False, {"law": "[M,M0]=0", "m": (x, y)})
        for k in K.elements:
            if M.scale(x, k) != M.kmul(K.mul(k, k), x):
                return CheckReport("nilmod-axioms", False, {"law": "m0.k = k^2 m0", "m": x, "k": k})
    for x in E:
        if M.scale(x, K.one) != x:
            return CheckReport("nilmod-axioms", False, {"law": "m.1 = m", "m": x})
        t = M.tau(x)
        for k, k2 in itertools.product(K.elements, repeat=2):
            if M.scale(M.scale(x, k), k2) != M.scale(x, K.mul(k, k2)):
                return CheckReport("nilmod-axioms", False, {"law": "monoid action", "m": x, "k": (k, k2)})
            lhs = M.scale(x, K.add(k, k2))
            rhs = M.plus(M.plus(M.scale(x, k), M.kmul(K.mul(k, k2), t)), M.scale(x, k2))
            if lhs != rhs:
                return CheckReport("nilmod-axioms", False, {"law": "m.(k+k')", "m": x, "k": (k, k2)})
    for x, y in itertools.product(E, repeat=2):
        for k, k2 in itertools.product(K.elements, repeat=2):
            if M.comm(M.scale(x, k), M.scale(y, k2)) != M.kmul(K.mul(k, k2), M.comm(x, y)):
                return CheckReport("nilmod-axioms", False, {"law": "[m.k, m'.k']", "m": (x, y), "k": (k, k2)})
    return CheckReport("nilmod-axioms", True, None, {"elements": len(E)})


def make_nil_module(K, m0, m, cocycle, verify=True):
    """Build a split 2-step nilpotent module and verify its axioms."""
    M = NilModule(K, m0, m, cocycle)
    if verify:
        bad = check_cocycle_bilinear(M)
        if bad is not None:
            raise AxiomError("cocycle is not K-bilinear", bad)
        rep = check_axioms(M)
        if not rep.ok:
            raise AxiomError("2-step nilpotent module axiom failed", rep.witness)
    return M


def verify_derived_identities(M):
    """The eight consequences of the axioms, exhaustively."""
    K = M.K
    E = M.elements
    z = M.zero
    for x in E:
        if M.scale(x, K.zero) != z:
            return CheckReport("nilmod-derived", False, {"identity": "m.0 = 0", "m": x})
        for k in K.elements:
            lhs = M.scale(x, K.neg(k))
            rhs = M.minus(M.kmul(K.mul(k, k), M.tau(x)), M.scale(x, k))
            if lhs != rhs:
                return CheckReport("nilmod-derived", False, {"identity": "m.(-k)", "m": x, "k": k})
            if M.tau(M.scale(x, k)) != M.kmul(K.mul(k, k), M.tau(x)):
                return CheckReport("nilmod-derived", False, {"identity": "tau(m.k)", "m": x, "k": k})
        if M.tau(M.neg(x)) != M.kmul(K.neg(K.one), M.tau(x)):
            return CheckReport("nilmod-derived", False, {"identity": "tau(-m)", "m": x})
    if M.tau(z) != z:
        return CheckReport("nilmod-derived", False, {"identity": "tau(0) = 0"})
    for x in M.central:
        if M.tau(x) != M.kmul(K.from_int(2), x):
            return CheckReport("nilmod-derived", False, {"identity": "tau(m0) = 2 m0", "m": x})
    for x, y in itertools.product(E, repeat=2):
        if M.tau(M.plus(x, y)) != M.plus(M.plus(M.tau(x), M.comm(x, y)), M.tau(y)):
            return CheckReport("nilmod-derived", False, {"identity": "tau(m + m')", "m": (x, y)})
        for k, k2 in itertools.product(K.elements, repeat=2):
            if M.comm(M.scale(x, k), M.scale(y, k2)) != M.kmul(K.mul(k, k2), M.comm(x, y)):
                return CheckReport("nilmod-derived", False, {"identity": "[m.k, m'.k']", "m": (x, y)})
    return CheckReport("nilmod-derived", True, None, {"elements": len(E)})


# ---------------------------------------------------------------------------
# quadratic maps


@dataclass
class QuadraticMap:
    source: NilModule
    target: NilModule
    evaluator: object

    def __call__(self, x):
        return self.evaluator(x)

    def b(self, x, y):
        """b(m, m') = -q(m) + q(m + m') - q(m')."""
        N = self.target
        return N.minus(N.plus(N.neg(self(x)), self(self.source.plus(x, y))), self(y))


def _fail(law, **wit):
    return CheckReport("quadratic", False, dict(law=law, **wit))


def check_quadratic(q):
    """Verify the defining laws of a K-quadratic map, extract b, check that b is
    well defined on M/M_0 and bilinear, then check the derived identities."""
    M, N = q.source, q.target
    K = M.K
    E = M.elements
    Z = M.central
    for x in Z:
        if not N.in_central(q(x)):
            return _fail("q(M0) in N0", m=x)
        for k in K.elements:
            if q(M.kmul(k, x)) != N.kmul(k, q(x)):
                return _fail("linear on M0", m=x, k=k)
        for y in Z:
            if q(M.plus(x, y)) != N.plus(q(x), q(y)):
                return _fail("linear on M0", m=(x, y))
    for x in E:
        for k in K.elements:
            if q(M.scale(x, k)) != N.scale(q(x), k):
                return _fail("q(m.k) = q(m).k", m=x, k=k)
    b = {}
    for x, y in itertools.product(E, repeat=2):
        val = q.b(x, y)
        if not N.in_central(val):
            return _fail("b lands in N0", m=(x, y))
        b[(x, y)] = val
    # b factors through M/M0 x M/M0
    classes = {}
    for (x, y), val in b.items():
        key = (x.v, y.v)
        if classes.setdefault(key, val) != val:
            return _fail("b well defined mod M0", m=(x, y))
    reps = {}
    for x in E:
        reps.setdefault(x.v, x)
    rv = list(reps.values())
    for x, y, w in itertools.product(rv, repeat=3):
        if b[(M.plus(x, y), w)] != N.plus(b[(x, w)], b[(y, w)]):
            return _fail("b additive (left)", m=(x, y, w))
        if b[(w, M.plus(x, y))] != N.plus(b[(w, x)], b[(w, y)]):
            return _fail("b additive (right)", m=(x, y, w))
    for x, y in itertools.product(rv, repeat=2):
        for k in K.elements:
            if b[(M.scale(x, k), y)] != N.kmul(k, b[(x, y)]) or b[(x, M.scale(y, k))] != N.kmul(k, b[(x, y)]):
                return _fail("b K-bilinear", m=(x, y), k=k)
    # derived laws
    if q(M.zero) != N.zero:
        return _fail("q(0) = 0")
    for x in E:
        if q(M.neg(x)) != N.minus(b[(x, x)], q(x)):
            return _fail("q(-m) = b(m,m) - q(m)", m=x)
        if q(M.tau(x)) != N.minus(N.tau(q(x)), b[(x, x)]):
            return _fail("q(tau m) = tau(q m) - b(m,m)", m=x)
    for x, y in itertools.product(E, repeat=2):
        rhs = N.minus(N.plus(N.comm(q(x), q(y)), b[(x, y)]), b[(y, x)])
        if q(M.comm(x, y)) != rhs:
            return _fail("q([m,m'])", m=(x, y))
    return CheckReport("quadratic", True, None, {"b_is_zero": all(v == N.zero for v in classes.values())})


# Cocycle catalog: (ring descriptor, m0, m, structure constants C[a][b][k])
COCYCLE_CATALOG = (
    ("Z/2", 1, 1, [[[1]]]),
    ("Z/3", 1, 1, [[[2]]]),
    ("Z/4", 1, 1, [[[1]]]),
    ("Z/4", 1, 1, [[[0]]]),
    ("Z/2", 1, 2, [[[0], [1]], [[0], [0]]]),
    ("Z/3", 1, 2, [[[0], [1]], [[2], [0]]]),
    ("Z/4", 1, 2, [[[1], [1]], [[0], [3]]]),
    ("Z/2", 2, 2, [[[1, 0], [0, 1]], [[0, 0], [1, 0]]]),
)
