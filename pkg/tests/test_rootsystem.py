import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chevelem.errors import DescriptorError, DomainError, MorphismError
from chevelem.rootsystem import (RootMorphism, RootSystem, apply_morphism, build_root_system,
                                 classify_subset, neighbors, root_hyperplanes,
                                 saturated_special_closed_subsets, thick_series,
                                 verify_hyperplane_lemma)

from oracles import weyl_order

# |Phi| and |W| for the catalog; |W| frozen from the reflection-group oracle
CATALOG = {
    "A1": (2, 2), "A2": (6, 6), "A3": (12, 24), "A4": (20, 120), "B2": (8, 8), "B3": (18, 48),
    "B4": (32, 384), "C3": (18, 48), "C4": (32, 384), "D4": (24, 192), "G2": (12, 12),
    "F4": (48, 1152), "BC1": (4, 2), "BC2": (12, 8), "BC3": (24, 48),
}
RANK_LE_4 = [d for d in CATALOG if int(d[-1]) <= 4]


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def neg(a):
    return tuple(-x for x in a)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


@pytest.mark.parametrize("desc", sorted(CATALOG))
def test_root_counts_and_weyl_orders(desc):
    phi = build_root_system(desc)
    n, w = CATALOG[desc]
    assert len(phi) == n
    assert weyl_order(phi.roots) == w
    assert len(phi.positive_roots) == n // 2


@pytest.mark.parametrize("desc", sorted(CATALOG) + ["A1,A1", "A1,G2", "E6"])
def test_reflection_closure_and_integral_pairings(desc):
    phi = build_root_system(desc)
    for a, b in itertools.product(phi.roots, repeat=2):
        assert phi.reflect(a, b) in phi
        p = Fraction(2 * dot(a, b), dot(a, a))
        assert p.denominator == 1 and phi.pairing(b, a) == p
    assert all(neg(a) in phi for a in phi.roots)


def test_descriptor_examples():
    a2 = build_root_system("A2")
    assert len(set(a2.length_class.values())) == 1
    assert len(build_root_system("A1")) == 2
    bc1 = build_root_system("BC1")
    assert len(bc1) == 4
    short = [r for r in bc1.roots if bc1.length_class[r] == "ultrashort"]
    assert len(short) == 2 and all(tuple(2 * x for x in r) in bc1 for r in short)
    assert not bc1.is_reduced and a2.is_reduced


@pytest.mark.parametrize("bad", ["", "X2", "E5", "F3", "G3", "A0", "B1", "A2,", "A-1"])
def test_bad_descriptors(bad):
    with pytest.raises(DescriptorError):
        build_root_system(bad)


@pytest.mark.parametrize("desc", ["BC2", "BC3"])
def test_ultrashort_iff_double_is_root(desc):
    phi = build_root_system(desc)
    for r in phi.roots:
        doubled = tuple(2 * x for x in r) in phi
        assert (phi.length_class[r] == "ultrashort") == doubled


def test_components_orthogonal_and_labeled():
    phi = build_root_system("A1,G2")
    assert sorted(c.label for c in phi.components) == ["A1", "G2"]
    c1, c2 = phi.components
    assert all(dot(a, b) == 0 for a in c1.roots for b in c2.roots)
    assert not phi.is_irreducible


def _neighbors_oracle(phi, a):
    """The three conditions, open angle decided by solving 2x2 systems with fractions."""
    out = set()
    for b in phi.roots:
        indep = any(a[i] * b[j] - a[j] * b[i] for i in range(len(a)) for j in range(len(a)))
        if not indep or dot(a, b) == 0:
            continue
        g11, g12, g22 = dot(a, a), dot(a, b), dot(b, b)
        det = g11 * g22 - g12 * g12
        blocked = False
        for g in phi.roots:
            r1, r2 = dot(g, a), dot(g, b)
            x = Fraction(r1 * g22 - r2 * g12, det)
            y = Fraction(g11 * r2 - g12 * r1, det)
            inside = all(c == 0 for c in
                         (gi - x * ai - y * bi for gi, ai, bi in zip(g, a, b)))
            if inside and x > 0 and y > 0:
                blocked = True
                break
        if not blocked:
            out.add(b)
    return out


@pytest.mark.parametrize("desc", ["A2", "B2", "G2", "A3", "B3", "C3", "BC2", "A1,A1"])
def test_neighbors_against_oracle(desc):
    phi = build_root_system(desc)
    for a in phi.roots:
        assert set(neighbors(phi, a)) == _neighbors_oracle(phi, a)


def test_neighbors_examples():
    a2 = build_root_system("A2")
    al, be = a2.simple_roots
    assert set(neighbors(a2, al)) == {add(al, be), neg(be)}
    a1a1 = build_root_system("A1,A1")
    assert neighbors(a1a1, a1a1.roots[0]) == ()
    bc1 = build_root_system("BC1")
    u = next(r for r in bc1.roots if bc1.length_class[r] == "ultrashort")
    assert neighbors(bc1, u) == ()
    with pytest.raises(DomainError):
        neighbors(a2, (5, 5, 5))


@pytest.mark.parametrize("desc", ["A2", "B2", "G2", "A3", "B3", "C3", "D4", "BC2", "BC3", "A4", "F4"])
def test_neighbors_symmetric(desc):
    phi = build_root_system(desc)
    nb = {a: set(neighbors(phi, a)) for a in phi.roots}
    assert all((b in nb[a]) == (a in nb[b]) for a in phi.roots for b in phi.roots)


@pytest.mark.parametrize("desc", [d for d in RANK_LE_4 if d not in ("A1", "BC1")] + ["A1", "BC1"])
def test_hyperplane_lemma_catalog(desc):
    assert verify_hyperplane_lemma(build_root_system(desc)).ok


@pytest.mark.parametrize("desc,lines", [("A2", 3), ("B2", 4), ("G2", 6)])
def test_hyperplane_counts(desc, lines):
    phi = build_root_system(desc)
    assert len(root_hyperplanes(phi)) == lines
    assert verify_hyperplane_lemma(phi).details["hyperplanes"] == lines


def test_hyperplane_lemma_rejects_reducible_and_detects_cover():
    with pytest.raises(DomainError):
        verify_hyperplane_lemma(build_root_system("A1,A1"))
    # A1 x A1 is covered by two hyperplanes; the check should see that if forced
    phi = build_root_system("A1,A1")
    normals = root_hyperplanes(phi)
    on = [{r for r in phi.roots if dot(n, r) == 0} for n in normals]
    assert any(a | b == set(phi.roots) for a, b in itertools.combinations(on, 2))


def test_classify_examples():
    a2 = build_root_system("A2")
    al, be = a2.simple_roots
    c = classify_subset(a2, {al, be, add(al, be)})
    assert c.saturated_special_closed and set(c.extreme_roots) == {al, be}
    assert not classify_subset(a2, {al, neg(al)}).saturated_special_closed
    # {al, be} misses al+be which lies in the cone: not saturated
    assert not classify_subset(a2, {al, be}).saturated_special_closed
    bc1 = build_root_system("BC1")
    u = next(r for r in bc1.roots if bc1.length_class[r] == "ultrashort" and bc1.is_positive(r))
    c = classify_subset(bc1, {u, tuple(2 * x for x in u)})
    assert c.saturated_special_closed and c.extreme_roots == (u,)


def _pointed_oracle(sigma):
    """Pointedness by linear programming: no nonzero nonnegative combination vanishes."""
    import numpy as np
    from scipy.optimize import linprog
    A = np.array(sigma, dtype=float).T
    n = len(sigma)
    res = linprog(-np.ones(n), A_eq=A, b_eq=np.zeros(A.shape[0]), bounds=[(0, 1)] * n,
                  method="highs")
    return res.status == 0 and -res.fun < 1e-9


def _in_cone_oracle(sigma, v):
    import numpy as np
    from scipy.optimize import linprog
    A = np.array(sigma, dtype=float).T
    res = linprog(np.zeros(len(sigma)), A_eq=A, b_eq=np.array(v, dtype=float),
                  bounds=[(0, None)] * len(sigma), method="highs")
    return res.status == 0


@pytest.mark.parametrize("desc", ["A2", "B2", "BC1", "A1,A1"])
def test_classify_exhaustive_against_lp(desc):
    phi = build_root_system(desc)
    roots = phi.roots
    for k in range(1, len(roots) + 1):
        for sigma in itertools.combinations(roots, k):
            got = classify_subset(phi, sigma).saturated_special_closed
            want = _pointed_oracle(sigma) and all(
                r in sigma or not _in_cone_oracle(sigma, r) for r in roots)
            assert got == want, sigma


@pytest.mark.parametrize("desc", ["A2", "B2", "G2", "A3", "B3", "C3", "D4", "BC2", "BC3", "A1,A1", "A4"])
def test_thick_series_partition(desc):
    phi = build_root_system(desc)
    for a in phi.roots:
        parts = thick_series(phi, a)
        members = [r for p in parts for r in p.members]
        assert len(members) == len(set(members))
        rest = {r for r in phi.roots
                if any(r[i] * a[j] - r[j] * a[i] for i in range(len(a)) for j in range(len(a)))}
        assert set(members) == rest
        for p in parts:
            assert classify_subset(phi, p.members).saturated_special_closed


def test_thick_series_examples():
    a2 = build_root_system("A2")
    al, be = a2.simple_roots
    parts = {frozenset(p.members) for p in thick_series(a2, al)}
    assert parts == {frozenset({be, add(al, be)}), frozenset({neg(be), neg(add(al, be))})}
    b2 = build_root_system("B2")
    long_root = next(r for r in b2.roots if b2.length_class[r] == "long")
    assert sorted(len(p) for p in thick_series(b2, long_root)) == [3, 3]
    a1a1 = build_root_system("A1,A1")
    assert sorted(len(p) for p in thick_series(a1a1, a1a1.roots[0])) == [1, 1]
    assert thick_series(build_root_system("A1"), (1, -1)) == []


def test_saturated_subsets_include_half_systems():
    a2 = build_root_system("A2")
    subs = {frozenset(s) for s in saturated_special_closed_subsets(a2)}
    assert frozenset(a2.positive_roots) in subs
    with pytest.raises(DomainError):
        saturated_special_closed_subsets(build_root_system("G2"), max_roots=8)


def test_morphism_examples():
    b2 = build_root_system("B2")
    bc1 = build_root_system("BC1")
    # (x, y) -> x + y lands in {+-1, +-2}
    img = apply_morphism(RootMorphism(b2, bc1, ((1, 1),)))
    assert img.is_factor and img.kernel_components == ()
    assert set(img.image_system.roots) == set(bc1.roots)
    a2 = build_root_system("A2")
    ident = tuple(tuple(int(i == j) for j in range(3)) for i in range(3))
    img = apply_morphism(RootMorphism(a2, a2, ident))
    assert img.is_factor and img.kernel_components == ()
    a1a1 = build_root_system("A1,A1")
    a1 = RootSystem([r for r in a1a1.components[0].roots], a1a1.ambient_rank)
    proj = tuple(tuple(int(i == j and i < 2) for j in range(4)) for i in range(4))
    img = apply_morphism(RootMorphism(a1a1, a1, proj))
    assert img.is_factor and len(img.kernel_components) == 1
    with pytest.raises(MorphismError):
        apply_morphism(RootMorphism(b2, bc1, ((2, 1),)))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["A2", "B2", "G2", "A3", "B3", "C3", "BC2"]), st.data())
def test_factor_morphism_components(desc, data):
    """Projection onto one component of a product is a factor morphism whose other
    components land in the kernel."""
    other = data.draw(st.sampled_from(["A1", "A2", "B2"]))
    prod = build_root_system(f"{desc},{other}")
    first = prod.components[0]
    target = RootSystem(first.roots, prod.ambient_rank)
    support = {i for r in first.roots for i, x in enumerate(r) if x}
    proj = tuple(tuple(int(i == j and i in support) for j in range(prod.ambient_rank))
                 for i in range(prod.ambient_rank))
    img = apply_morphism(RootMorphism(prod, target, proj))
    assert img.is_factor
    for i, comp in enumerate(prod.components):
        assert (i in img.kernel_components) == (comp is not first)
        if i not in img.kernel_components:
            assert img.component_map[i] == 0


def test_json_roundtrip():
    phi = build_root_system("G2")
    again = RootSystem.from_dict(phi.to_dict())
    assert again == phi
