"""Finite commutative rings with exact arithmetic.

A ring lives inside a coordinate module (Z/n_1) x ... x (Z/n_m); elements are
tuples of residues and multiplication is the bilinear map given by integer
structure constants ``table[i, j, k]`` (e_i * e_j = sum_k table[i,j,k] e_k).
A ring may use the whole coordinate module as carrier or only a subset closed
under the operations (this is how semidirect products A x| R are realized
inside R x| R).
"""

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import AxiomError, CoverError, DescriptorError, DomainError
from .rootsystem import CheckReport

DEFAULT_SIZE_CAP = 4096
FAST_TABLE_LIMIT = 512


class FiniteRing:
    def __init__(self, moduli, table, one, carrier=None, descriptor=None, size_cap=DEFAULT_SIZE_CAP):
        self.moduli = tuple(int(n) for n in moduli)
        self.m = len(self.moduli)
        self._mod = np.array(self.moduli, dtype=np.int64)
        t = np.asarray(table, dtype=np.int64).reshape(self.m, self.m, self.m)
        self.table = t % self._mod[None, None, :]
        self.one = tuple(int(x) for x in one)
        self.zero = (0,) * self.m
        self.descriptor = descriptor or f"ring{self.moduli}"
        full = int(np.prod(self.moduli)) if self.m else 1
        if carrier is None:
            if full > size_cap:
                raise DomainError(f"{self.descriptor}: carrier of {full} elements exceeds cap {size_cap}")
            carrier = itertools.product(*(range(n) for n in self.moduli))
        self.elements = tuple(sorted(tuple(int(x) for x in c) for c in carrier))
        if len(self.elements) > size_cap:
            raise DomainError(f"{self.descriptor}: carrier exceeds cap {size_cap}")
        self._pos = {x: i for i, x in enumerate(self.elements)}
        self._tables = None
        self._fast = None
        if len(self.elements) <= FAST_TABLE_LIMIT:
            add, mul, neg = self.tables()
            self._fast = (add.tolist(), mul.tolist(), neg.tolist())

    # -- element arithmetic --------------------------------------------------

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return tuple(x) in self._pos

    def __repr__(self):
        return f"FiniteRing({self.descriptor!r}, {len(self)} elements)"

    @property
    def size(self):
        return len(self.elements)

    def index(self, x):
        return self._pos[tuple(x)]

    def add(self, x, y):
        if self._fast:
            p = self._pos
            return self.elements[self._fast[0][p[x]][p[y]]]
        return tuple((a + b) % n for a, b, n in zip(x, y, self.moduli))

    def neg(self, x):
        return tuple((-a) % n for a, n in zip(x, self.moduli))

    def sub(self, x, y):
        return tuple((a - b) % n for a, b, n in zip(x, y, self.moduli))

    def mul(self, x, y):
        if self._fast:
            p = self._pos
            return self.elements[self._fast[1][p[x]][p[y]]]
        v = np.einsum("i,j,ijk->k", np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64), self.table)
        return tuple(int(a) for a in v % self._mod)

    def smul(self, k, x):
        """Integer multiple k*x."""
        return tuple((k * a) % n for a, n in zip(x, self.moduli))

    def from_int(self, k):
        return self.smul(k, self.one)

    def power(self, x, k):
        out = self.one
        for _ in range(k):
            out = self.mul(out, x)
        return out

    def is_zero(self, x):
        return not any(x)

    def is_unit(self, x):
        return self.inverse(x) is not None

    def inverse(self, x):
        x = tuple(x)
        for y in self.elements:
            if self.mul(x, y) == self.one:
                return y
        return None

    @property
    def units(self):
        return tuple(x for x in self.elements if self.is_unit(x))

    def elem(self, value):
        """Coerce an int, tuple or string to an element of this ring."""
        if isinstance(value, str):
            value = value.strip()
            if value.startswith("("):
                value = tuple(int(v) for v in value.strip("()").split(",") if v.strip())
            else:
                value = int(value)
        if isinstance(value, (int, np.integer)):
            x = self.from_int(int(value))
        else:
            x = tuple(int(v) % n for v, n in zip(value, self.moduli))
        if x not in self._pos:
            raise DomainError(f"{value!r} is not an element of {self.descriptor}")
        return x

    def label(self, x):
        return str(x[0]) if self.m == 1 else "(" + ",".join(map(str, x)) + ")"

    # -- vectorized arithmetic on coordinate arrays ----------------------------

    def add_arr(self, x, y):
        return (x + y) % self._mod

    def mul_arr(self, x, y):
        return np.einsum("...i,...j,ijk->...k", x, y, self.table) % self._mod

    def elements_array(self):
        return np.array(self.elements, dtype=np.int64).reshape(len(self), self.m)

    def tables(self):
        """(add, mul, neg) tables indexed by carrier positions."""
        if self._tables is None:
            arr = self.elements_array()
            n = len(self)
            radix = self._radix()
            pos = np.full(int(np.prod(self.moduli)), -1, dtype=np.int64)
            pos[arr @ radix] = np.arange(n)
            add = pos[(self.add_arr(arr[:, None, :], arr[None, :, :])) @ radix]
            mul = pos[(self.mul_arr(arr[:, None, :], arr[None, :, :])) @ radix]
            neg = pos[((-arr) % self._mod) @ radix]
            if (add < 0).any() or (mul < 0).any() or (neg < 0).any():
                raise AxiomError(f"{self.descriptor}: carrier not closed under the operations")
            self._tables = (add, mul, neg)
        return self._tables

    def _radix(self):
        r = np.ones(self.m, dtype=np.int64)
        for i in range(self.m - 2, -1, -1):
            r[i] = r[i + 1] * self.moduli[i + 1]
        return r

    def to_dict(self):
        return {"descriptor": self.descriptor, "moduli": list(self.moduli),
                "table": self.table.tolist(), "one": list(self.one), "size": len(self)}


# ---------------------------------------------------------------------------
# constructors


def zmod(n):
    if n < 1:
        raise DescriptorError("modulus must be >= 1")
    return FiniteRing((n,), [[[1]]], (1 % n,), descriptor=f"Z/{n}")


def _parse_poly(text, p):
    """Coefficient list (low degree first) of a polynomial in x over Z/p."""
    text = text.replace(" ", "").replace("*", "")
    if not text:
        raise DescriptorError("empty polynomial")
    terms = re.findall(r"[+-]?[^+-]+", text)
    coeffs = {}
    for t in terms:
        m = re.fullmatch(r"([+-]?)(\d*)(x(?:\^(\d+))?)?", t)
        if not m or (not m.group(2) and not m.group(3)):
            raise DescriptorError(f"bad polynomial term {t!r}")
        sign = -1 if m.group(1) == "-" else 1
        c = int(m.group(2)) if m.group(2) else 1
        deg = 0 if not m.group(3) else int(m.group(4) or 1)
        coeffs[deg] = coeffs.get(deg, 0) + sign * c
    d = max(coeffs)
    return [coeffs.get(i, 0) % p for i in range(d + 1)]


def poly_quotient(p, f_coeffs, name=None):
    """(Z/p)[x]/(f) for a monic f given by coefficients, low degree first."""
    d = len(f_coeffs) - 1
    if d < 1:
        raise DescriptorError("modulus polynomial must have degree >= 1")
    if f_coeffs[-1] % p != 1 % p:
        raise DescriptorError("modulus polynomial must be monic")
    # x^k reduced modulo f, as coordinate vectors in the basis 1, x, ..., x^{d-1}
    powers = []
    cur = [1 % p] + [0] * (d - 1)
    for _ in range(2 * d - 1):
        powers.append(cur)
        top = cur[-1]
        cur = [0] + cur[:-1]
        cur = [(c - top * f) % p for c, f in zip(cur, f_coeffs[:-1])]
    table = [[powers[i + j] for j in range(d)] for i in range(d)]
    one = [1 % p] + [0] * (d - 1)
    return FiniteRing((p,) * d, table, one, descriptor=name or f"Z/{p}[x]/({_poly_str(f_coeffs)})")


def _poly_str(c):
    terms = []
    for i in range(len(c) - 1, -1, -1):
        if c[i] == 0:
            continue
        mon = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        coef = "" if (c[i] == 1 and i > 0) else str(c[i])
        terms.append(coef + mon)
    return "+".join(terms)


def product_ring(*rings):
    moduli = sum((r.moduli for r in rings), ())
    m = len(moduli)
    table = np.zeros((m, m, m), dtype=np.int64)
    one = []
    off = 0
    for r in rings:
        k = r.m
        table[off:off + k, off:off + k, off:off + k] = r.table
        one.extend(r.one)
        off += k
    return FiniteRing(moduli, table, one, descriptor=" x ".join(r.descriptor for r in rings))


_ALIASES = {"F2": "Z/2", "F3": "Z/3", "F5": "Z/5", "F7": "Z/7",
            "F4": "Z/2[x]/(x^2+x+1)", "F8": "Z/2[x]/(x^3+x+1)", "F9": "Z/3[x]/(x^2+1)"}


def make_ring(descriptor, size_cap=DEFAULT_SIZE_CAP):
    """Build a ring from ``Z/n``, ``Z/p[x]/(f)``, aliases like ``F4``, or a
    product ``A x B`` of those."""
    text = descriptor.strip()
    factors = [f.strip() for f in re.split(r"\s+x\s+|×", text) if f.strip()]
    if not factors:
        raise DescriptorError(f"empty ring descriptor {descriptor!r}")
    rings = [_make_factor(f) for f in factors]
    r = rings[0] if len(rings) == 1 else product_ring(*rings)
    total = int(np.prod(r.moduli))
    if total > size_cap:
        raise DomainError(f"{descriptor}: {total} elements exceeds cap {size_cap}")
    r.descriptor = text
    return r


def _make_factor(text):
    key = text.upper().replace("_", "").replace("𝔽", "F").replace("GF", "F")
    if key in _ALIASES:
        return _make_factor(_ALIASES[key])
    m = re.fullmatch(r"Z/(\d+)", text.replace(" ", ""))
    if m:
        return zmod(int(m.group(1)))
    m = re.fullmatch(r"Z/(\d+)\[x\]/\((.+)\)", text.replace(" ", ""))
    if m:
        p = int(m.group(1))
        return poly_quotient(p, _parse_poly(m.group(2), p), name=text.replace(" ", ""))
    raise DescriptorError(f"bad ring descriptor {text!r}")


def verify_ring_axioms(R, exhaustive=True):
    """Commutative unital ring axioms.

    The basis-level check is complete for the full coordinate module because the
    product is bilinear; with ``exhaustive`` every element triple is tested too.
    """
    t, mod = R.table, R._mod
    for i in range(R.m):
        if ((R.moduli[i] * t[i]) % mod[None, :]).any():
            return CheckReport("ring-axioms", False, {"ill_defined_basis": i})
    if (t != t.transpose(1, 0, 2)).any():
        return CheckReport("ring-axioms", False, {"noncommutative": True})
    lhs = np.einsum("ijk,klm->ijlm", t, t) % mod
    rhs = np.einsum("jlk,ikm->ijlm", t, t) % mod
    if (lhs != rhs).any():
        return CheckReport("ring-axioms", False, {"nonassociative_basis": np.argwhere(lhs != rhs)[0].tolist()})
    if not exhaustive:
        return CheckReport("ring-axioms", True, None, {"mode": "basis"})
    add, mul, neg = R.tables()
    n = len(R)
    zero = R.index(R.zero)
    one = R.index(R.one)
    idx = np.arange(n)
    if (mul != mul.T).any() or (add != add.T).any():
        return CheckReport("ring-axioms", False, {"noncommutative": True})
    if (mul[one] != idx).any() or (add[zero] != idx).any() or (add[idx, neg] != zero).any():
        return CheckReport("ring-axioms", False, {"identity_or_inverse": True})
    for a in range(n):
        if (mul[mul[a]][:, :] != mul[a][mul]).any():
            return CheckReport("ring-axioms", False, {"assoc_mul_at": R.elements[a]})
        if (add[add[a]] != add[a][add]).any():
            return CheckReport("ring-axioms", False, {"assoc_add_at": R.elements[a]})
        if (mul[a][add] != add[mul[a][:, None], mul[a][None, :]]).any():
            return CheckReport("ring-axioms", False, {"distributivity_at": R.elements[a]})
    return CheckReport("ring-axioms", True, None, {"mode": "exhaustive", "size": n})


# ---------------------------------------------------------------------------
# homomorphisms


def is_field(R):
    return len(R) > 1 and len(R.units) == len(R) - 1


def ring_homomorphisms(R, S):
    """All unital ring maps R -> S (R must use its full coordinate module)."""
    if len(R) != int(np.prod(R.moduli)):
        raise DomainError("ring_homomorphisms needs a ring on its full coordinate module")
    basis = [tuple(int(i == j) for j in range(R.m)) for i in range(R.m)]
    out = []
    for imgs in itertools.product(S.elements, repeat=R.m):
        if any(S.smul(R.moduli[i], imgs[i]) != S.zero for i in range(R.m)):
            continue

        def phi(x, imgs=imgs):
            acc = S.zero
            for c, y in zip(x, imgs):
                acc = S.add(acc, S.smul(c, y))
            return acc

        if phi(R.one) != S.one:
            continue
        if all(phi(R.mul(basis[i], basis[j])) == S.mul(imgs[i], imgs[j])
               for i in range(R.m) for j in range(i, R.m)):
            out.append(phi)
    return out


def reduction_map(R, S):
    """The canonical map Z/n -> Z/m (m | n), coordinatewise for matching shapes."""
    if len(R.moduli) != len(S.moduli) or any(a % b for a, b in zip(R.moduli, S.moduli)):
        raise DomainError(f"no coordinate reduction {R.descriptor} -> {S.descriptor}")
    return lambda x: tuple(a % b for a, b in zip(x, S.moduli))


# ---------------------------------------------------------------------------
# subobjects


class Subalgebra:
    """An ideal-like subset A of a ring R: closed under +, -, * and R-action."""

    def __init__(self, parent, carrier, name=None):
        self.parent = parent
        self.elements = tuple(sorted({tuple(x) for x in carrier}))
        self._set = frozenset(self.elements)
        self.name = name or f"ideal of {parent.descriptor} ({len(self.elements)} elements)"
        if parent.zero not in self._set:
            raise AxiomError("subalgebra must contain zero")
        self.zero = parent.zero

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return tuple(x) in self._set

    def __eq__(self, other):
        return isinstance(other, Subalgebra) and self.parent is other.parent and self._set == other._set

    def __hash__(self):
        return hash(self._set)

    def __repr__(self):
        return f"Subalgebra({self.name})"

    def add(self, x, y):
        return self.parent.add(x, y)

    def mul(self, x, y):
        return self.parent.mul(x, y)

    def neg(self, x):
        return self.parent.neg(x)

    @property
    def is_ideal(self):
        P = self.parent
        return all(P.mul(r, a) in self._set for r in P.elements for a in self.elements)

    @property
    def unital_over_parent(self):
        span = additive_span(self.parent, {self.parent.mul(x, a) for x in self.parent for a in self})
        return span == self._set

    def check_closed(self):
        P = self.parent
        for a in self.elements:
            if P.neg(a) not in self._set:
                raise AxiomError("not closed under negation", a)
            for b in self.elements:
                if P.add(a, b) not in self._set or P.mul(a, b) not in self._set:
                    raise AxiomError("not closed under + or *", (a, b))
        return True


def additive_span(R, gens):
    """Additive subgroup of R generated by ``gens`` (as a frozenset)."""
    span = {R.zero}
    frontier = [R.zero]
    gens = sorted(set(tuple(g) for g in gens))
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = R.add(x, g)
                if y not in span:
                    span.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(span)


def ideal(R, generators, name=None):
    gens = [R.elem(g) if not isinstance(g, tuple) else g for g in generators]
    products = {R.mul(r, g) for r in R.elements for g in gens}
    return Subalgebra(R, additive_span(R, products), name=name)


def principal_ideal(R, s):
    s = R.elem(s) if not isinstance(s, tuple) else s
    return ideal(R, [s], name=f"{R.label(s)}*({R.descriptor})")


def whole(R):
    return Subalgebra(R, R.elements, name=R.descriptor)


def all_ideals(R, max_generators=2):
    """Ideals generated by at most ``max_generators`` elements, deduplicated."""
    seen = {}
    for k in range(max_generators + 1):
        for gens in itertools.combinations(R.elements, k):
            I = ideal(R, gens) if gens else Subalgebra(R, [R.zero])
            seen.setdefault(I._set, I)
    return sorted(seen.values(), key=lambda I: (len(I), I.elements))


# ---------------------------------------------------------------------------
# homotopes and semidirect products


class HomotopeRing:
    """Additive group of A with the twisted product a o b = a*b*s."""

    def __init__(self, base, twist):
        self.base = base
        parent = base.parent if isinstance(base, Subalgebra) else base
        self.acting = parent
        self.twist = tuple(twist)
        self.elements = tuple(base.elements)
        self.zero = parent.zero

    def __len__(self):
        return len(self.elements)

    def add(self, x, y):
        return self.acting.add(x, y)

    def mul(self, x, y):
        R = self.acting
        return R.mul(R.mul(x, y), self.twist)

    def check_axioms(self):
        """Associativity and commutativity of the twisted product, exhaustively."""
        E = self.elements
        for a in E:
            for b in E:
                ab = self.mul(a, b)
                if ab != self.mul(b, a):
                    return CheckReport("homotope", False, {"noncommutative": (a, b)})
                for c in E:
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)):
                        return CheckReport("homotope", False, {"nonassociative": (a, b, c)})
        return CheckReport("homotope", True)


class SemidirectRing(FiniteRing):
    """A x| R with (a, b)(a', b') = (aa' + ab' + a'b, bb'), realized inside R x| R.

    Elements are pairs of coordinate tuples flattened into one tuple
    (A-part first).
    """

    def __init__(self, A, R=None):
        R = R or A.parent
        m = R.m
        big = np.zeros((2 * m, 2 * m, 2 * m), dtype=np.int64)
        t = R.table
        big[:m, :m, :m] = t
        big[:m, m:, :m] = t
        big[m:, :m, :m] = t
        big[m:, m:, m:] = t
        carrier = [a + b for a in A.elements for b in R.elements]
        super().__init__(R.moduli * 2, big, R.zero + R.one, carrier=carrier,
                         descriptor=f"({A.name}) x| {R.descriptor}")
        self.ideal_part = A
        self.ring_part = R

    def pair(self, a, b):
        return tuple(a) + tuple(b)

    def split(self, x):
        m = self.ring_part.m
        return x[:m], x[m:]

    def projection(self, x):
        return self.split(x)[1]

    def inclusion(self, a):
        return tuple(a) + self.ring_part.zero

    def section(self, b):
        return self.ring_part.zero + tuple(b)

    def collapse(self, x):
        """The ring map A x| R -> R, (a, b) -> a + b (A an ideal of R)."""
        a, b = self.split(x)
        return self.ring_part.add(a, b)


def semidirect(A, R=None):
    return SemidirectRing(A, R)


def crossed_module_check(A, delta, R=None):
    """Check that delta: A -> R is additive, R-equivariant, and satisfies
    x*y = delta(x)*y for x, y in A."""
    R = R or A.parent
    d = {a: tuple(delta(a)) for a in A.elements}
    for a in A.elements:
        for b in A.elements:
            if d[A.add(a, b)] != R.add(d[a], d[b]):
                return CheckReport("crossed-module", False, {"additivity": (a, b)})
            if A.mul(a, b) != R.mul(d[a], b):
                return CheckReport("crossed-module", False, {"peiffer": (a, b)})
        for r in R.elements:
            if d[R.mul(r, a)] != R.mul(r, d[a]):
                return CheckReport("crossed-module", False, {"equivariance": (r, a)})
    return CheckReport("crossed-module", True)


# ---------------------------------------------------------------------------
# localization via idempotent powers


@dataclass
class IdempotentPower:
    e: tuple
    N: int
    localization: FiniteRing

    def localize(self, r):
        return self.localization.parent_mul(self.e, r)


class LocalizedRing(FiniteRing):
    """The ring eR with unit e, standing for R_s when e is the idempotent power of s."""

    def __init__(self, R, e):
        carrier = {R.mul(e, r) for r in R.elements}
        super().__init__(R.moduli, R.table, e, carrier=carrier, descriptor=f"{R.descriptor}[1/s]")
        self.base = R
        self.e = e

    def parent_mul(self, x, y):
        return self.base.mul(x, y)

    def canonical_map(self, r):
        return self.base.mul(self.e, r)


def idempotent_power(R, s):
    """The unique idempotent e among s, s^2, ... and the least N with s^N = e."""
    s = R.elem(s) if not isinstance(s, tuple) else s
    seen = []
    cur = s
    while cur not in seen:
        seen.append(cur)
        cur = R.mul(cur, s)
    for n, x in enumerate(seen, start=1):
        if R.mul(x, x) == x:
            return IdempotentPower(x, n, LocalizedRing(R, x))
    raise AssertionError("no idempotent among powers")  # impossible in a finite monoid


def join(R, x, y):
    return R.sub(R.add(x, y), R.mul(x, y))


# ---------------------------------------------------------------------------
# colocalization towers


@dataclass
class Tower:
    """Finite prefix of the tower ... -> A^(s^2) -> A^(s) -> A.

    Every level has A's carrier; the map from level n+1 to level n is a -> a*s.
    ``images[k]`` is the image s^k A of level k in level 0.
    """

    A: object
    s: tuple
    depth: int
    semantics: str
    maps: list
    images: list
    stabilization_index: object
    stable_part: object
    checks: dict = field(default_factory=dict)

    @property
    def stabilized(self):
        return self.stabilization_index is not None

    def level(self, n):
        return HomotopeRing(self.A, self.A.parent.power(self.s, n) if isinstance(self.A, Subalgebra)
                            else self.A.power(self.s, n))

    def to_dict(self):
        return {
            "semantics": self.semantics,
            "s": list(self.s),
            "depth": self.depth,
            "carrier": [list(a) for a in self.A.elements],
            "maps": [list(map(int, m)) for m in self.maps],
            "image_sizes": [len(i) for i in self.images],
            "stabilization_index": self.stabilization_index,
            "stable_part": sorted(list(a) for a in self.stable_part) if self.stable_part is not None else None,
            "checks": self.checks,
        }


def _acting_ring(A):
    return A.parent if isinstance(A, Subalgebra) else A


def colocalization_tower(A, s, depth):
    """Build the tower of homotopes A^(s^n), n <= depth, locate where the images
    s^n A stabilize, and check the finite form of the monomorphism statement:
    the kernel of A^(s^(n+n*)) -> A_s dies in A^(s^n)."""
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if not isinstance(A, Subalgebra):
        A = whole(A)
    R = A.parent
    s = R.elem(s) if not isinstance(s, tuple) else s
    pos = {a: i for i, a in enumerate(A.elements)}
    step = [pos[R.mul(a, s)] for a in A.elements]
    maps = [list(step) for _ in range(depth)]
    images = [frozenset(A.elements)]
    for _ in range(depth):
        images.append(frozenset(R.mul(a, s) for a in images[-1]))
    nstar = next((n for n in range(depth) if images[n] == images[n + 1]), None)
    checks = {}
    stable = images[nstar] if nstar is not None else None
    if nstar is not None:
        loc = idempotent_power(R, s)
        e = loc.e
        bij = len({R.mul(a, s) for a in stable}) == len(stable)
        checks["stable_map_bijective"] = bij
        mono = True
        witness = None
        sn = R.power(s, nstar)
        for n in range(0, depth - nstar + 1):
            m = n + nstar
            sm = R.power(s, m)
            for a in A.elements:
                if R.mul(e, R.mul(sm, a)) == R.zero and R.mul(sn, a) != R.zero:
                    mono = False
                    witness = {"n": n, "element": a}
                    break
            if not mono:
                break
        checks["kernel_dies"] = mono
        if witness:
            checks["witness"] = witness
    else:
        checks["note"] = "images did not stabilize within depth"
    return Tower(A, s, depth, "colocalization", maps, images, nstar, stable, checks)


# ---------------------------------------------------------------------------
# power idempotence and cover sums


def check_power_idempotent(A, kmax):
    """For k = 1..kmax, check A = additive span {x*y^k : x, y in A} using A's own
    product."""
    if kmax < 1:
        raise DomainError("kmax must be >= 1")
    ring = _acting_ring(A) if not isinstance(A, HomotopeRing) else A.acting
    carrier = frozenset(A.elements)
    for k in range(1, kmax + 1):
        powk = {}
        for y in A.elements:
            p = y
            for _ in range(k - 1):
                p = A.mul(p, y)
            powk[y] = p
        prods = {A.mul(x, powk[y]) for x in A.elements for y in A.elements}
        span = additive_span(ring, prods)
        if span != carrier:
            missing = min(carrier - span)
            return CheckReport("power-idem", False, {"k": k, "missing": missing})
    return CheckReport("power-idem", True, None, {"kmax": kmax})


def stable_part(A, s):
    """Stable image s^{n*} A of the colocalization tower."""
    depth = max(2, len(A) + 1)
    t = colocalization_tower(A, s, depth)
    return t.stable_part


def check_cover_sum(A, s, parts):
    """Check that the stable part at s is the sum of the stable parts at the s_i,
    given that D(s) is covered by the D(s_i)."""
    if not isinstance(A, Subalgebra):
        A = whole(A)
    R = A.parent
    s = R.elem(s) if not isinstance(s, tuple) else s
    parts = [R.elem(p) if not isinstance(p, tuple) else p for p in parts]
    e = idempotent_power(R, s).e
    es = [idempotent_power(R, p).e for p in parts]
    acc = R.zero
    for ei in es:
        if R.mul(ei, e) != ei:
            raise CoverError(f"D({R.label(ei)}) is not inside D(s)")
        acc = join(R, acc, ei)
    if acc != e:
        raise CoverError(f"idempotents join to {R.label(acc)}, not {R.label(e)}")
    target = stable_part(A, s)
    pieces = [stable_part(A, p) for p in parts]
    total = additive_span(R, set().union(*pieces)) if pieces else frozenset([R.zero])
    if total != target:
        diff = sorted(target ^ total)
        return CheckReport("cozariski", False, {"difference": diff[0]})
    return CheckReport("cozariski", True, None, {"e": e, "parts": es})


def idempotents(R):
    return tuple(x for x in R.elements if R.mul(x, x) == x)


CATALOG_RINGS = (
    "Z/2", "Z/3", "Z/4", "Z/5", "Z/6", "Z/7", "Z/8", "Z/9", "Z/10", "Z/12", "Z/16",
    "Z/18", "Z/24", "Z/30", "Z/32", "Z/36", "Z/60", "Z/64",
    "F4", "F8", "F9", "Z/2[x]/(x^2)", "Z/2[x]/(x^3)", "Z/3[x]/(x^2)", "Z/4[x]/(x^2)",
    "Z/2[x]/(x^2+x)", "Z/2 x Z/2", "Z/2 x Z/3", "Z/2 x Z/2 x Z/2", "Z/4 x Z/2", "Z/2 x F4",
)

CATALOG_FIELDS = ("Z/2", "Z/3", "Z/5", "Z/7", "F4", "F8", "F9")
