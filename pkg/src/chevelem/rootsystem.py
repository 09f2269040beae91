"""Crystallographic root systems (reduced and of type BC) as integer vectors.

Roots are plain tuples of ints.  All geometric predicates (cones, angles,
hyperplanes) are decided in exact rational arithmetic.
"""

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DescriptorError, DomainError, MorphismError
from .linalg import dot, independent_basis, nullspace, primitive, rank, solve

VALID_TYPES = ("A", "B", "C", "D", "E", "F", "G", "BC")


# ---------------------------------------------------------------------------
# standard realizations


def _unit(n, i, c=1):
    v = [0] * n
    v[i] = c
    return v


def _type_a(n):
    d = n + 1
    out = []
    for i in range(d):
        for j in range(d):
            if i != j:
                v = [0] * d
                v[i], v[j] = 1, -1
                out.append(v)
    return out


def _pm_pairs(n, scale=1):
    out = []
    for i, j in itertools.combinations(range(n), 2):
        for a in (1, -1):
            for b in (1, -1):
                v = [0] * n
                v[i], v[j] = a * scale, b * scale
                out.append(v)
    return out


def _type_b(n):
    return _pm_pairs(n) + [_unit(n, i, c) for i in range(n) for c in (1, -1)]


def _type_c(n):
    return _pm_pairs(n) + [_unit(n, i, c) for i in range(n) for c in (2, -2)]


def _type_d(n):
    return _pm_pairs(n)


def _type_bc(n):
    return _type_b(n) + [_unit(n, i, c) for i in range(n) for c in (2, -2)]


def _type_g2():
    out = []
    for i, j in itertools.permutations(range(3), 2):
        v = [0, 0, 0]
        v[i], v[j] = 1, -1
        out.append(v)
    for i in range(3):
        for s in (1, -1):
            out.append([s * (2 if k == i else -1) for k in range(3)])
    return out


def _type_f4():
    # doubled coordinates so that every root is integral
    out = _pm_pairs(4, scale=2) + [_unit(4, i, c) for i in range(4) for c in (2, -2)]
    out += [list(s) for s in itertools.product((1, -1), repeat=4)]
    return out


def _type_e8():
    out = _pm_pairs(8, scale=2)
    for s in itertools.product((1, -1), repeat=8):
        if s.count(-1) % 2 == 0:
            out.append(list(s))
    return out


def _type_e(n):
    roots = _type_e8()
    if n == 8:
        return roots
    walls = [(1,) * 8]
    if n == 6:
        walls.append((-2, -2, 0, 0, 0, 0, 0, 0))
    return [r for r in roots if all(dot(r, w) == 0 for w in walls)]


def _realize(letter, n):
    if letter == "A" and n >= 1:
        return _type_a(n)
    if letter == "B" and n >= 2:
        return _type_b(n)
    if letter == "C" and n >= 2:
        return _type_c(n)
    if letter == "D" and n >= 4:
        return _type_d(n)
    if letter == "BC" and n >= 1:
        return _type_bc(n)
    if letter == "E" and 6 <= n <= 8:
        return _type_e(n)
    if letter == "F" and n == 4:
        return _type_f4()
    if letter == "G" and n == 2:
        return _type_g2()
    raise DescriptorError(f"invalid rank {n} for type {letter}")


_TOKEN = re.compile(r"^(BC|[A-G])(\d+)$")


def parse_descriptor(text):
    """Parse ``"A1,G2"`` (or a list of tokens) into [(letter, rank), ...]."""
    if isinstance(text, str):
        text = text.strip().strip("[]")
        if not text.strip():
            raise DescriptorError("empty root system descriptor")
        tokens = [t.strip() for t in text.split(",")]
    else:
        tokens = [str(t).strip() for t in text]
    if not tokens:
        raise DescriptorError("empty root system descriptor")
    out = []
    for tok in tokens:
        m = _TOKEN.match(tok.upper())
        if not m or m.group(1) not in VALID_TYPES:
            raise DescriptorError(f"bad root system token {tok!r}")
        n = int(m.group(2))
        if n < 1:
            raise DescriptorError(f"rank must be >= 1 in {tok!r}")
        out.append((m.group(1), n))
    return out


# ---------------------------------------------------------------------------
# classification of irreducible pieces


def _norm(v):
    return dot(v, v)


def _irreducible_components(roots):
    roots = list(roots)
    seen = set()
    comps = []
    for r in roots:
        if r in seen:
            continue
        comp = {r}
        stack = [r]
        seen.add(r)
        while stack:
            x = stack.pop()
            for y in roots:
                if y not in seen and dot(x, y) != 0:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(tuple(sorted(comp)))
    comps.sort()
    return comps


def _classify_irreducible(comp):
    """Return (letter, rank) for an irreducible root set."""
    rset = set(comp)
    n = rank(comp)
    count = len(comp)
    if any(tuple(2 * x for x in r) in rset for r in comp):
        return ("BC", n)
    norms = sorted({_norm(r) for r in comp})
    if len(norms) == 1:
        if count == n * (n + 1):
            return ("A", n)
        if n >= 4 and count == 2 * n * (n - 1):
            return ("D", n)
        if (n, count) in ((6, 72), (7, 126), (8, 240)):
            return ("E", n)
    else:
        if n == 2 and count == 12:
            return ("G", 2)
        if n == 4 and count == 48:
            return ("F", 4)
        short = sum(1 for r in comp if _norm(r) == norms[0])
        if count == 2 * n * n:
            if n == 2 or short == 2 * n:
                return ("B", n)
            return ("C", n)
    raise DomainError(f"unrecognized irreducible root set of rank {n} with {count} roots")


def _length_classes(comp):
    rset = set(comp)
    out = {}
    if any(tuple(2 * x for x in r) in rset for r in comp):
        for r in comp:
            if tuple(2 * x for x in r) in rset:
                out[r] = "ultrashort"
            elif all(x % 2 == 0 for x in r) and tuple(x // 2 for x in r) in rset:
                out[r] = "long"
            else:
                out[r] = "short"
        return out
    top = max(_norm(r) for r in comp)
    for r in comp:
        out[r] = "long" if _norm(r) == top else "short"
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    letter: str
    rank: int
    roots: tuple

    @property
    def label(self):
        return f"{self.letter}{self.rank}"


class RootSystem:
    """A finite root system given by integer vectors in Z^ambient_rank."""

    def __init__(self, roots, ambient_rank=None):
        roots = sorted({tuple(int(x) for x in r) for r in roots})
        if ambient_rank is None:
            ambient_rank = len(roots[0]) if roots else 0
        for r in roots:
            if len(r) != ambient_rank:
                raise DomainError("roots of mixed dimension")
            if not any(r):
                raise DomainError("zero vector is not a root")
        self.ambient_rank = ambient_rank
        self.roots = tuple(roots)
        self._set = frozenset(roots)
        comps = _irreducible_components(self.roots)
        self.components = tuple(Component(*_classify_irreducible(c), c) for c in comps)
        self._component_of = {r: i for i, c in enumerate(self.components) for r in c.roots}
        self.length_class = {}
        for c in self.components:
            self.length_class.update(_length_classes(c.roots))
        self.rank = rank(self.roots) if self.roots else 0
        self._simple = None
        self._coeffs = None

    # -- basic protocol ------------------------------------------------------

    def __contains__(self, v):
        return tuple(v) in self._set

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)

    def __eq__(self, other):
        return isinstance(other, RootSystem) and self.roots == other.roots

    def __hash__(self):
        return hash(self.roots)

    def __repr__(self):
        return f"RootSystem({self.label}, {len(self.roots)} roots)"

    @property
    def label(self):
        return ",".join(c.label for c in self.components) if self.components else "0"

    @property
    def is_irreducible(self):
        return len(self.components) == 1

    @property
    def is_reduced(self):
        return all(c.letter != "BC" for c in self.components)

    @property
    def reduced_marker(self):
        """Roots alpha with 2*alpha not a root."""
        return tuple(r for r in self.roots if tuple(2 * x for x in r) not in self._set)

    def component_index(self, alpha):
        return self._component_of[tuple(alpha)]

    def check_root(self, alpha):
        alpha = tuple(alpha)
        if alpha not in self._set:
            raise DomainError(f"{alpha} is not a root of {self.label}")
        return alpha

    # -- pairing and reflections --------------------------------------------

    def pairing(self, beta, alpha):
        """Cartan integer <beta, alpha^vee> = 2(beta, alpha)/(alpha, alpha)."""
        q = Fraction(2 * dot(beta, alpha), dot(alpha, alpha))
        if q.denominator != 1:
            raise DomainError(f"non-integral pairing <{beta},{alpha}>")
        return int(q)

    def reflect(self, alpha, beta):
        k = self.pairing(beta, alpha)
        return tuple(b - k * a for a, b in zip(alpha, beta))

    # -- positive / simple roots -------------------------------------------

    def is_positive(self, alpha):
        for x in alpha:
            if x:
                return x > 0
        raise DomainError("zero vector")

    @property
    def positive_roots(self):
        return tuple(r for r in self.roots if self.is_positive(r))

    @property
    def simple_roots(self):
        if self._simple is None:
            pos = self.positive_roots
            sums = {tuple(a + b for a, b in zip(x, y)) for x in pos for y in pos}
            self._simple = tuple(r for r in pos if r not in sums)
        return self._simple

    def simple_coefficients(self, alpha):
        """Integer coordinates of alpha in the basis of simple roots."""
        if self._coeffs is None:
            simple = self.simple_roots
            coeffs = {}
            for r in self.roots:
                c = solve(simple, r)
                coeffs[r] = tuple(int(x) for x in c)
            self._coeffs = coeffs
        return self._coeffs[tuple(alpha)]

    def height(self, alpha):
        return sum(self.simple_coefficients(alpha))

    # -- serialization -------------------------------------------------------

    def to_dict(self):
        return {
            "label": self.label,
            "ambient_rank": self.ambient_rank,
            "roots": [list(r) for r in self.roots],
            "components": [
                {"type": c.letter, "rank": c.rank, "roots": [list(r) for r in c.roots]}
                for c in self.components
            ],
            "length_class": [self.length_class[r] for r in self.roots],
        }

    @classmethod
    def from_dict(cls, d):
        return cls([tuple(r) for r in d["roots"]], d["ambient_rank"])


def build_root_system(descriptor):
    """Root system for a descriptor such as ``"A2"``, ``["B2"]`` or ``"A1,G2"``.

    Components are placed in orthogonal blocks of coordinates.
    """
    parts = parse_descriptor(descriptor)
    blocks = [_realize(letter, n) for letter, n in parts]
    dims = [len(b[0]) for b in blocks]
    total = sum(dims)
    roots = []
    offset = 0
    for b, d in zip(blocks, dims):
        for r in b:
            v = [0] * total
            v[offset:offset + d] = r
            roots.append(tuple(v))
        offset += d
    return RootSystem(roots, total)


# ---------------------------------------------------------------------------
# neighbors and hyperplanes


def _independent(a, b):
    return rank([a, b]) == 2


def in_open_angle(gamma, alpha, beta):
    c = solve([alpha, beta], gamma)
    return c is not None and c[0] > 0 and c[1] > 0


def neighbors(phi, alpha):
    """Roots beta that are independent of alpha, not orthogonal to it, and with
    no root strictly inside the cone R_{>0} alpha + R_{>0} beta."""
    alpha = phi.check_root(alpha)
    out = []
    for beta in phi.roots:
        if not _independent(alpha, beta) or dot(alpha, beta) == 0:
            continue
        if any(in_open_angle(g, alpha, beta) for g in phi.roots):
            continue
        out.append(beta)
    return tuple(out)


def _lines(vectors):
    """One representative per line through the origin, in canonical order."""
    reps = {}
    for v in vectors:
        reps.setdefault(primitive(v), v)
    return [reps[k] for k in sorted(reps)]


def _normal_in_span(basis, constraints):
    """A primitive integer vector in span(basis) orthogonal to ``constraints``.

    Returns None unless the solution space is one-dimensional.
    """
    rows = [[dot(h, b) for b in basis] for h in constraints]
    ns = nullspace(rows, ncols=len(basis))
    if len(ns) != 1:
        return None
    c = ns[0]
    n = [sum(c[k] * basis[k][i] for k in range(len(basis))) for i in range(len(basis[0]))]
    return primitive(n)


def root_hyperplanes(phi):
    """All hyperplanes of R.phi spanned by roots, as primitive normal vectors
    (normals lie in the span of phi)."""
    basis = independent_basis(phi.roots)
    r = len(basis)
    lines = _lines(phi.roots)
    normals = set()
    for subset in itertools.combinations(lines, r - 1):
        if rank(list(subset)) != r - 1:
            continue
        n = _normal_in_span(basis, list(subset))
        if n is not None:
            normals.add(n)
    return sorted(normals)


@dataclass
class CheckReport:
    """Outcome of a verification: ``ok`` plus an optional witness."""

    name: str
    ok: bool
    witness: object = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {"name": self.name, "ok": self.ok, "witness": _jsonable(self.witness),
                "details": _jsonable(self.details)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in x]
        if isinstance(x, (set, frozenset)):
            items.sort(key=repr)
        return items
    if isinstance(x, Fraction):
        return str(x)
    if hasattr(x, "tolist"):
        return x.tolist()
    return x


def verify_hyperplane_lemma(phi):
    """Check that an irreducible phi is not covered by two hyperplanes, and that
    every root on a hyperplane H has a neighbor off H."""
    if not phi.is_irreducible:
        raise DomainError(f"{phi.label} is not irreducible")
    hyper = root_hyperplanes(phi)
    on = {n: frozenset(r for r in phi.roots if dot(n, r) == 0) for n in hyper}
    allroots = frozenset(phi.roots)
    for h1, h2 in itertools.combinations_with_replacement(hyper, 2):
        if on[h1] | on[h2] == allroots:
            return CheckReport("root-sys-dec", False, {"cover": [h1, h2]},
                               {"hyperplanes": len(hyper)})
    nbrs = {a: neighbors(phi, a) for a in phi.roots}
    for h in hyper:
        for a in sorted(on[h]):
            if not any(b not in on[h] for b in nbrs[a]):
                return CheckReport("root-sys-dec", False, {"hyperplane": h, "root": a},
                                   {"hyperplanes": len(hyper)})
    return CheckReport("root-sys-dec", True, None, {"hyperplanes": len(hyper)})


# ---------------------------------------------------------------------------
# cones


class Cone:
    """Polyhedral cone generated by finitely many integer vectors.

    Facets of a cone generated by a finite set are spanned by generators, so
    they are found by scanning (dim-1)-subsets of generator directions.
    """

    def __init__(self, generators):
        self.generators = [tuple(g) for g in generators]
        self.basis = independent_basis(self.generators)
        self.dim = len(self.basis)
        normals = set()
        if self.dim:
            dirs = _lines(self.generators)
            for subset in itertools.combinations(dirs, self.dim - 1):
                if self.dim > 1 and rank(list(subset)) != self.dim - 1:
                    continue
                n = _normal_in_span(self.basis, list(subset))
                if n is None:
                    continue
                signs = {(dot(n, g) > 0) - (dot(n, g) < 0) for g in self.generators}
                if -1 not in signs:
                    normals.add(n)
                elif 1 not in signs:
                    normals.add(tuple(-x for x in n))
        self.normals = sorted(normals)

    @property
    def is_pointed(self):
        if self.dim == 0:
            return True
        return rank(self.normals) == self.dim if self.normals else False

    def in_span(self, v):
        return rank(self.basis + [tuple(v)]) == self.dim

    def __contains__(self, v):
        v = tuple(v)
        if not any(v):
            return True
        if self.dim == 0 or not self.in_span(v):
            return False
        return all(dot(n, v) >= 0 for n in self.normals)

    def is_extreme_ray(self, v):
        """Whether R_{>=0} v is an extreme ray (cone assumed pointed, v in it)."""
        tight = [n for n in self.normals if dot(n, v) == 0]
        return rank(tight) == self.dim - 1 if tight else self.dim == 1


@dataclass(frozen=True)
class RootSubset:
    parent: RootSystem
    members: tuple
    kind: str = "generic"
    witnesses: tuple = ()

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def to_dict(self):
        return {"kind": self.kind, "members": [list(r) for r in self.members],
                "witnesses": [list(w) for w in self.witnesses]}


@dataclass
class SubsetClass:
    saturated_special_closed: bool
    extreme_roots: tuple


def classify_subset(phi, sigma):
    """Decide whether sigma = phi ∩ C for a pointed convex cone C, and list the
    extreme roots when it is."""
    sigma = sorted({phi.check_root(a) for a in sigma})
    cone = Cone(sigma)
    if not cone.is_pointed:
        return SubsetClass(False, ())
    sset = set(sigma)
    if any(r not in sset and r in cone for r in phi.roots):
        return SubsetClass(False, ())
    extreme = []
    for a in sigma:
        if all(x % 2 == 0 for x in a) and tuple(x // 2 for x in a) in sset:
            continue
        if cone.is_extreme_ray(a):
            extreme.append(a)
    return SubsetClass(True, tuple(extreme))


def thick_series(phi, alpha):
    """Partition phi minus R.alpha into the sets phi ∩ (R_{>0} beta + R alpha)."""
    alpha = phi.check_root(alpha)
    aa = dot(alpha, alpha)
    groups = {}
    for g in phi.roots:
        if not _independent(alpha, g):
            continue
        k = Fraction(dot(g, alpha), aa)
        proj = primitive_direction([x - k * a for x, a in zip(g, alpha)])
        groups.setdefault(proj, []).append(g)
    parts = []
    for members in groups.values():
        members = tuple(sorted(members))
        sub = RootSubset(phi, members, "thick_series", (alpha, members[0]))
        if not classify_subset(phi, members).saturated_special_closed:
            raise AssertionError(f"thick series {members} is not saturated special closed")
        parts.append(sub)
    parts.sort(key=lambda s: s.members)
    return parts


def primitive_direction(v):
    """Primitive integer vector on the open ray through v (sign preserved)."""
    p = primitive(v)
    # primitive() normalizes the sign; undo that to keep the ray
    for x, y in zip(v, p):
        if x != 0:
            return p if (x > 0) == (y > 0) else tuple(-t for t in p)
    return p


def saturated_special_closed_subsets(phi, max_roots=12):
    """Every saturated special closed subset (exhaustive; small systems only)."""
    if len(phi) > max_roots:
        raise DomainError(f"{phi.label} has more than {max_roots} roots")
    out = []
    roots = phi.roots
    for mask in range(1 << len(roots)):
        sigma = [roots[i] for i in range(len(roots)) if mask >> i & 1]
        if classify_subset(phi, sigma).saturated_special_closed:
            out.append(tuple(sigma))
    return out


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class RootMorphism:
    source: RootSystem
    target: RootSystem
    matrix: tuple  # rows indexed by target coordinates

    def __call__(self, v):
        return tuple(sum(m * x for m, x in zip(row, v)) for row in self.matrix)

    def to_dict(self):
        return {"source": self.source.to_dict(), "target": self.target.to_dict(),
                "matrix": [list(r) for r in self.matrix]}


@dataclass
class MorphismImage:
    image_system: RootSystem
    is_factor: bool
    kernel_components: tuple
    component_map: dict


def apply_morphism(f):
    """Image, surjectivity and component bookkeeping of a root-system morphism."""
    images = {}
    for r in f.source.roots:
        v = f(r)
        if any(v) and v not in f.target:
            raise MorphismError(f"root {r} maps to {v}, which is not a root or zero")
        images[r] = v
    nonzero = sorted({v for v in images.values() if any(v)})
    is_factor = set(nonzero) == set(f.target.roots)
    kernel = []
    cmap = {}
    for i, comp in enumerate(f.source.components):
        hit = {f.target.component_index(images[r]) for r in comp.roots if any(images[r])}
        if not hit:
            kernel.append(i)
        elif len(hit) > 1:
            raise MorphismError(f"component {comp.label} spreads over target components {sorted(hit)}")
        else:
            cmap[i] = hit.pop()
    image = RootSystem(nonzero, f.target.ambient_rank) if nonzero else None
    return MorphismImage(image, is_factor, tuple(kernel), cmap)
