"""Breadth-first subgroup closure over finite rings.

Elements are stored as uint8 coordinate arrays; the canonical key of an
element is the byte string of its matrix.  Closure expands the frontier by
right multiplication with every generator (and generator inverse), one batched
GEMM per generator, and records a parent pointer so that every element carries
a shortest word in the generators.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chevalley import GroupElement, identity, mat_mul, root_element
from .errors import CapExceeded, DomainError

DEFAULT_CAP = 100_000
CHUNK = 8192
BLOCK_ENTRIES = 2_000_000  # matrix entries per product batch


def additive_generators(R, carrier=None):
    """Greedy additive generating set of a subgroup of (R, +), in sorted order."""
    carrier = sorted(carrier if carrier is not None else R.elements)
    span = {R.zero}
    gens = []
    for x in carrier:
        if x in span:
            continue
        gens.append(x)
        # close the span under adding the new generator
        frontier = list(span)
        while frontier:
            nxt = []
            for y in frontier:
                z = R.add(y, x)
                if z not in span:
                    span.add(z)
                    nxt.append(z)
            frontier = nxt
    return gens


@dataclass
class GeneratorFamily:
    """Root elements t_alpha(x) for x in a parameter domain, per root."""

    chevalley: object
    ring: object
    generators: list

    def elements(self):
        out = []
        for alpha, domain in self.generators:
            for x in domain:
                if any(x):
                    out.append(root_element(self.chevalley, self.ring, alpha, x))
        return out


def _keys(batch):
    flat = np.ascontiguousarray(batch.reshape(batch.shape[0], -1))
    return flat.view(f"V{flat.shape[1]}").ravel().tolist()


def _dedupe(gens):
    seen, out = set(), []
    for g in gens:
        k = g.key()
        if k not in seen:
            seen.add(k)
            out.append(g)
    return out


@dataclass(eq=False)
class GroupSet:
    """A finite set of matrices with BFS metadata (depth, parent pointers)."""

    ring: object
    dim: int
    matrices: np.ndarray
    index: dict
    depth: np.ndarray
    parent: np.ndarray
    via: np.ndarray
    generators: list
    complete: bool = True
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.index)

    @property
    def order(self):
        return len(self.index)

    def __contains__(self, g):
        return _key_of(g) in self.index

    def keyset(self):
        return frozenset(self.index)

    def same_elements(self, other):
        return len(self) == len(other) and all(k in other.index for k in self.index)

    def position(self, g):
        return self.index.get(_key_of(g))

    def word_indices(self, i):
        out = []
        while self.parent[i] >= 0:
            out.append(int(self.via[i]))
            i = int(self.parent[i])
        return out[::-1]

    def element(self, i):
        """GroupElement for position i, with inverse and word from the BFS tree."""
        g = GroupElement(self.ring, identity(self.ring, self.dim), identity(self.ring, self.dim), ())
        for j in self.word_indices(i):
            g = g * self.generators[j]
        g.matrix = self.matrices[i].astype(np.int64)
        return g

    def word(self, i):
        return self.element(i).word

    def inverses(self):
        """Inverse matrices of all elements, built along the BFS tree."""
        R = self.ring
        inv = np.empty_like(self.matrices)
        inv[0] = self.matrices[0]
        for lvl in range(1, self.diameter + 1):
            idx = np.nonzero(self.depth == lvl)[0]
            for gi, g in enumerate(self.generators):
                sel = idx[self.via[idx] == gi]
                if len(sel):
                    # (p g)^-1 = g^-1 p^-1
                    inv[sel] = left_mul(R, g.inverse, inv[self.parent[sel]]).astype(np.uint8)
        return inv

    def elements(self):
        """All elements as GroupElements (matrix, inverse), without words."""
        inv = self.inverses()
        return [GroupElement(self.ring, self.matrices[i].astype(np.int64), inv[i].astype(np.int64))
                for i in range(len(self))]

    def depth_of(self, g):
        i = self.position(g)
        return None if i is None else int(self.depth[i])

    @property
    def diameter(self):
        return int(self.depth.max()) if len(self) else 0

    def dump(self):
        """Sorted list of matrices (as nested lists)."""
        order = sorted(range(len(self)), key=lambda i: self.matrices[i].tobytes())
        return [self.matrices[i].tolist() for i in order]

    def map(self, fn, ring):
        """Image under an injective-on-this-set homomorphism given on arrays."""
        mats = fn(self.matrices.astype(np.int64)).astype(np.uint8)
        keys = _keys(mats)
        index = {k: i for i, k in enumerate(keys)}
        if len(index) != len(keys):
            raise DomainError("map is not injective on this set")
        gens = [GroupElement(ring, fn(g.matrix), fn(g.inverse), g.word) for g in self.generators]
        return GroupSet(ring, self.dim, mats, index, self.depth.copy(), self.parent.copy(),
                        self.via.copy(), gens, self.complete, dict(self.meta))

    def to_dict(self, with_elements=False):
        d = {"order": len(self), "complete": self.complete, "diameter": self.diameter,
             "generators": len(self.generators), "ring": self.ring.descriptor}
        d.update(self.meta)
        if with_elements:
            d["elements"] = self.dump()
        return d


def _key_of(g):
    m = g.matrix if isinstance(g, GroupElement) else np.asarray(g)
    return np.ascontiguousarray(m.astype(np.uint8)).tobytes()


def closure(gens, ring=None, dim=None, cap=DEFAULT_CAP, targets=None, depth_cap=None,
            workers=1, strict=False):
    """Subgroup generated by ``gens`` (GroupElements), by breadth-first search.

    Generator inverses are added.  With ``targets`` the search stops as soon
    as every target is found (the result is then flagged incomplete).  If the
    cap is hit the partial set is returned flagged incomplete, or
    ``CapExceeded`` is raised when ``strict``.
    """
    gens = _dedupe(list(gens) + [g.inv() for g in gens])
    if gens:
        ring, dim = gens[0].ring, gens[0].matrix.shape[0]
    if ring is None:
        raise DomainError("closure of an empty family needs ring and dim")
    if max(ring.moduli) > 255:
        raise DomainError("moduli above 255 are not supported by the closure engine")
    ident = identity(ring, dim).astype(np.uint8)
    store = [ident[None]]
    index = {_keys(ident[None])[0]: 0}
    depth, parent, via = [0], [-1], [-1]
    pending = set(_key_of(t) for t in targets) if targets is not None else None
    if pending is not None:
        pending.discard(_keys(ident[None])[0])
    frontier = np.array([0])
    level = 0
    complete = True
    stopped = pending is not None and not pending
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    all_mats = ident[None]
    chunk = max(256, min(CHUNK, BLOCK_ENTRIES // (dim * dim * ring.m)))
    try:
        while len(frontier) and not stopped:
            if depth_cap is not None and level >= depth_cap:
                complete = False
                break
            level += 1
            new_idx = []
            for start in range(0, len(frontier), chunk):
                block = all_mats[frontier[start:start + chunk]].astype(np.int64)
                jobs = [(gi, g) for gi, g in enumerate(gens)]
                if pool:
                    prods = pool.map(lambda t: mat_mul(ring, block, t[1].matrix), jobs)
                else:
                    # lazily, one generator at a time, to bound peak memory
                    prods = (mat_mul(ring, block, g.matrix) for _, g in jobs)
                for (gi, _), prod in zip(jobs, prods):
                    prod = prod.astype(np.uint8)
                    keys = _keys(prod)
                    fresh = []
                    for j, k in enumerate(keys):
                        if k not in index:
                            index[k] = len(depth) + len(fresh)
                            fresh.append(j)
                    if fresh:
                        fresh = np.array(fresh)
                        store.append(prod[fresh])
                        depth.extend([level] * len(fresh))
                        parent.extend(frontier[start + fresh].tolist())
                        via.extend([gi] * len(fresh))
                        new_idx.extend(range(len(depth) - len(fresh), len(depth)))
                        if pending:
                            pending.difference_update(keys[j] for j in fresh)
                    if len(depth) > cap:
                        complete = False
                        stopped = True
                        break
                    if pending is not None and not pending:
                        complete = False
                        stopped = True
                        break
                if stopped:
                    break
            all_mats = np.concatenate(store) if len(store) > 1 else store[0]
            store = [all_mats]
            frontier = np.array(new_idx, dtype=np.int64)
    finally:
        if pool:
            pool.shutdown()
    all_mats = np.concatenate(store) if len(store) > 1 else store[0]
    gs = GroupSet(ring, dim, all_mats, index, np.array(depth), np.array(parent), np.array(via),
                  gens, complete)
    if pending is not None:
        gs.meta["targets_found"] = not pending
    if len(depth) > cap:
        gs.meta["cap_exceeded"] = True
        if strict:
            raise CapExceeded(f"closure exceeded cap {cap}", gs)
    return gs


def contains_all(gens, targets, cap=DEFAULT_CAP, ring=None, dim=None):
    """True if every target lies in the group generated by ``gens``; None if the
    cap was hit first.  Returns (answer, GroupSet)."""
    targets = list(targets)
    gs = closure(gens, ring=ring, dim=dim, cap=cap, targets=targets)
    if gs.meta.get("targets_found"):
        return True, gs
    if gs.complete:
        return False, gs
    return None, gs


def left_mul(R, g, mats):
    """g X for a fixed matrix g and a batch X."""
    mats = mats.astype(np.int64)
    if R.m == 1:
        out = np.matmul(g[..., 0].astype(np.float64), mats[..., 0].astype(np.float64))
        return (out.astype(np.int64) % R.moduli[0])[..., None]
    return np.einsum("abi,nbcj,ijk->nack", g, mats, R.table) % R._mod


def pair_mul(R, A, B):
    """Elementwise products A[n] B[n] of two batches."""
    A, B = A.astype(np.int64), B.astype(np.int64)
    if R.m == 1:
        out = np.matmul(A[..., 0].astype(np.float64), B[..., 0].astype(np.float64))
        return (out.astype(np.int64) % R.moduli[0])[..., None]
    return np.einsum("nabi,nbcj,ijk->nack", A, B, R.table) % R._mod


def conjugate_batch(R, g, mats):
    """g X g^-1 for a fixed g and a batch X."""
    return mat_mul(R, left_mul(R, g.matrix, mats), g.inverse)


def conjugates_by_set(R, mats, invs, h):
    """g h g^-1 for every g in a batch (with inverses given)."""
    return pair_mul(R, mat_mul(R, mats.astype(np.int64), h.matrix), invs)


def keys_of(batch):
    return _keys(np.asarray(batch).astype(np.uint8))


def normal_closure(gens, conjugators, cap=DEFAULT_CAP, ring=None, dim=None, targets=None,
                   max_rounds=64):
    """Smallest subgroup containing ``gens`` and normalized by ``conjugators``.

    Generators are conjugated until the closure is stable; each round adds
    the conjugates that fall outside the current closure.
    """
    conj = _dedupe(list(conjugators) + [c.inv() for c in conjugators])
    gens = _dedupe(gens)
    for _ in range(max_rounds):
        H = closure(gens, ring=ring, dim=dim, cap=cap, targets=targets)
        if not H.complete:
            return H
        fresh = []
        for c in conj:
            for g in gens:
                h = c.conj(g)
                if h not in H and all(h != f for f in fresh):
                    fresh.append(h)
        if not fresh:
            H.meta["normal_generators"] = len(gens)
            return H
        gens = gens + fresh
    raise CapExceeded("normal closure did not stabilize", None)


def is_normalized_by(H, conjugators):
    """Every element of H conjugated by every conjugator stays in H (exhaustive)."""
    R = H.ring
    for c in conjugators:
        for start in range(0, len(H), CHUNK):
            block = H.matrices[start:start + CHUNK]
            conj = conjugate_batch(R, c, block).astype(np.uint8)
            for j, k in enumerate(_keys(conj)):
                if k not in H.index:
                    return False, (c, start + j)
    return True, None


def minkowski_product(R, sets, cap=10 * DEFAULT_CAP):
    """Set of products h_1 ... h_n, h_i in sets[i], as a key set."""
    cur = sets[0].matrices
    for S in sets[1:]:
        out = {}
        for g in S.matrices:
            prod = mat_mul(R, cur.astype(np.int64), g.astype(np.int64)).astype(np.uint8)
            for k, row in zip(_keys(prod), prod):
                out.setdefault(k, row)
            if len(out) > cap:
                raise CapExceeded(f"product set exceeds {cap}", None)
        cur = np.array([out[k] for k in sorted(out)])
    return frozenset(_keys(cur))


def word_width(G, target):
    """BFS depth of ``target`` in G: the shortest word in G's generators."""
    d = G.depth_of(target)
    if d is None:
        raise DomainError("target is not an element of the group")
    return d


# ---------------------------------------------------------------------------
# elementary groups


def elementary_generators(C, R, domain=None, roots=None):
    """t_alpha(x) for roots alpha and x in an additive generating set (or all of ``domain``)."""
    roots = C.roots if roots is None else roots
    params = domain if domain is not None else additive_generators(R)
    return [root_element(C, R, a, x) for a in roots for x in params if any(x)]


def elementary_group(C, R, cap=DEFAULT_CAP, full=False, workers=1, strict=False):
    """E(R): closure of all root elements.  With ``full`` every nonzero parameter
    is a generator, so depth equals word width in root elements."""
    dom = [x for x in R.elements if any(x)] if full else None
    gens = elementary_generators(C, R, domain=dom)
    G = closure(gens, ring=R, dim=C.dim, cap=cap, workers=workers, strict=strict)
    G.meta["group"] = f"E({C.system.label}, {R.descriptor})"
    return G


def generate(gens, ring=None, dim=None, cap=DEFAULT_CAP, targets=None):
    """Closure of a possibly redundant generating list.

    Generators already in the current closure are skipped, so the final BFS
    runs over a small subset; the resulting set is the same subgroup.
    """
    gens = _dedupe(gens)
    chosen = gens[:1]
    while True:
        H = closure(chosen, ring=ring, dim=dim, cap=cap, targets=targets)
        if not H.complete:
            return H
        missing = next((g for g in gens if g not in H), None)
        if missing is None:
            H.meta["generators_offered"] = len(gens)
            return H
        chosen = chosen + [missing]


@dataclass
class RelativePair:
    """E(R), E(A x| R) and the kernel E(R, A), the latter mapped into G(R)."""

    base: object
    total: object
    kernel: GroupSet
    route: str
    ring: object
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        d = {"route": self.route, "kernel_order": len(self.kernel),
             "kernel_complete": self.kernel.complete}
        if self.base is not None:
            d["base_order"] = len(self.base)
        if self.total is not None:
            d["total_order"] = len(self.total)
        d.update(self.meta)
        return d


def _collapse(R):
    m = R.m

    def fn(arr):
        return (arr[..., :m] + arr[..., m:]) % R._mod
    return fn


def relative_elementary(C, R, A, cap=DEFAULT_CAP, base=None, route="auto"):
    """E(R, A) = Ker(E(A x| R) -> E(R)), realized inside G(R).

    The kernel of the split epimorphism E(A x| R) -> E(R) is the normal closure
    of the generators t_alpha(a x| 0) under the section generators
    t_alpha(0 x| r); this is computed over A x| R and mapped to G(R) by
    (a, b) -> a + b, which is injective on the kernel.  When E(R) is known and
    |E(R)| * |kernel| fits under the cap, E(A x| R) is also enumerated and the
    kernel is extracted literally and compared ("kernel" route).
    """
    from .rings import SemidirectRing

    gens_a = [a for a in additive_generators(R, A.elements) if any(a)]
    if not gens_a:
        K = closure([], ring=R, dim=C.dim)
        return RelativePair(base, None, K, "trivial", None)
    S = SemidirectRing(A, R)
    X = [root_element(C, S, a, S.inclusion(x)) for a in C.roots for x in gens_a]
    Y = [root_element(C, S, a, S.section(r)) for a in C.roots for r in additive_generators(R)]
    KS = normal_closure(X, Y, cap=cap, ring=S, dim=C.dim)
    m = R.m
    ident = identity(R, C.dim)
    if not np.array_equal(KS.matrices[..., m:], np.broadcast_to(ident, KS.matrices[..., m:].shape)):
        raise DomainError("normal closure left the kernel of the projection")
    kernel = KS.map(_collapse(R), R)
    pair = RelativePair(base, None, kernel, "split", S)
    if route == "split" or not KS.complete:
        return pair
    if base is not None and base.complete and len(base) * len(kernel) <= cap:
        total = closure(X + Y, ring=S, dim=C.dim, cap=cap)
        if total.complete:
            proj = total.matrices[..., m:]
            mask = np.all(proj.reshape(len(total), -1) == ident.reshape(1, -1).astype(np.uint8), axis=1)
            lit = _collapse(R)(total.matrices[mask].astype(np.int64)).astype(np.uint8)
            lit_keys = set(_keys(lit))
            pair.total = total
            pair.route = "kernel"
            pair.meta["literal_kernel_matches"] = lit_keys == set(kernel.index)
            pair.meta["total_over_base"] = len(total) // len(base)
    return pair
