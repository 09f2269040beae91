import pytest

from chevelem.chevalley import build_chevalley
from chevelem.errors import DomainError
from chevelem.lemmas import (EXPECTED_FAILURES, GROUP_LEMMAS, LEMMA_IDS, RELATIVE_LEMMAS,
                             RING_LEMMAS, SYSTEM_LEMMAS, Caps, LemmaReport, Workspace,
                             is_expected_failure, outside_perfect_hypothesis, run_lemma,
                             sigma_catalog, verify_decomposition, verify_generation_lemmas,
                             verify_normalization, verify_perfectness,
                             verify_relative_characterizations)
from chevelem.rings import make_ring, principal_ideal, whole, zmod
from chevelem.rootsystem import build_root_system

_WS = {}


def ws(system, ring, cap=100_000):
    key = (system, ring, cap)
    if key not in _WS:
        _WS[key] = Workspace(system, ring, Caps(element_cap=cap))
    return _WS[key]


def statuses(lemma, w, **kw):
    return [r.status for r in run_lemma(lemma, w, **kw)]


def test_catalog_partition():
    assert len(LEMMA_IDS) == 18 == len(set(LEMMA_IDS))
    assert SYSTEM_LEMMAS | RING_LEMMAS | GROUP_LEMMAS == set(LEMMA_IDS)
    assert RELATIVE_LEMMAS <= GROUP_LEMMAS
    with pytest.raises(DomainError):
        run_lemma("no-such-lemma", ws("A2", "Z/2"))


@pytest.mark.parametrize("system", ["A2", "B2", "G2", "BC2", "A3"])
def test_root_sys_dec(system):
    assert statuses("root-sys-dec", Workspace(system)) == ["pass"]


def test_root_sys_dec_reducible_rejected():
    # two orthogonal lines are covered by two hyperplanes
    with pytest.raises(DomainError):
        run_lemma("root-sys-dec", Workspace("A1,A1"))


@pytest.mark.parametrize("system", ["A2", "B2", "G2"])
def test_commutator_table_lemma(system):
    (rep,) = run_lemma("commutator-table", Workspace(system))
    assert rep.passed and rep.instance["ring"] is None


@pytest.mark.parametrize("lemma", sorted(RING_LEMMAS))
@pytest.mark.parametrize("ring", ["Z/4", "Z/6", "Z/2 x Z/2"])
def test_ring_lemmas(lemma, ring):
    (rep,) = run_lemma(lemma, Workspace(ring=ring))
    assert rep.passed and rep.instance["system"] is None


def test_missing_inputs_are_domain_errors():
    with pytest.raises(DomainError):
        run_lemma("perfect", Workspace("A2"))
    with pytest.raises(DomainError):
        run_lemma("homogeneity", Workspace(ring="Z/2"))


@pytest.mark.parametrize("ring", ["Z/2", "Z/3"])
def test_group_lemmas_a2(ring):
    w = ws("A2", ring)
    for lemma in sorted(GROUP_LEMMAS - RELATIVE_LEMMAS):
        assert set(statuses(lemma, w)) == {"pass"}, lemma


def test_relative_lemmas_a2_z4():
    w = ws("A2", "Z/4")
    for lemma in sorted(RELATIVE_LEMMAS):
        reps = run_lemma(lemma, w)
        assert [r.instance["ideal"] for r in reps] == ["2"]
        assert all(r.passed for r in reps), lemma
    (rep,) = run_lemma("rel-elem", w, ideal_text="2")
    assert rep.details["kernel_order"] == rep.details["reduction_kernel_order"] == 256


def test_relative_characterizations_wrappers():
    C, R = build_chevalley(build_root_system("A2")), zmod(4)
    rep = verify_relative_characterizations(C, R, principal_ideal(R, R.elem(2)))
    assert rep.passed and set(rep.details) == {"rel-elem", "rel-expl", "z-sigma", "expl-conj"}
    rep = verify_decomposition(C, R, whole(R), [principal_ideal(R, R.elem(2)), whole(R)])
    assert rep.passed


def test_decomposition_parts_must_sum():
    C, R = build_chevalley(build_root_system("A2")), zmod(6)
    with pytest.raises(DomainError):
        verify_decomposition(C, R, whole(R), [principal_ideal(R, R.elem(2))])


def test_decomposition_product_mode():
    # Z/6 = 2Z/6 + 3Z/6, neither part is everything, so the product is enumerated
    w = Workspace("A1", "Z/6")
    (rep,) = run_lemma("xmod-dec", w, ideal_text="R", parts_text="2,3")
    assert rep.passed and rep.details["mode"] == "product"
    assert rep.details["product_size"] == rep.details["order"]


def test_generation_lemmas_need_rank_two():
    C = build_chevalley(build_root_system("A1"))
    with pytest.raises(DomainError):
        verify_generation_lemmas(C, zmod(2))
    rep = verify_generation_lemmas(build_chevalley(build_root_system("B2")), zmod(2))
    assert rep.passed


def test_perfect_and_expected_failure():
    B2, A2 = build_chevalley(build_root_system("B2")), build_chevalley(build_root_system("A2"))
    rep = verify_perfectness(B2, zmod(2))
    assert rep.status == "fail" and rep.details["index"] == 2
    assert is_expected_failure(rep)
    assert verify_perfectness(B2, zmod(3)).passed
    good = verify_perfectness(A2, zmod(2))
    assert good.passed and not is_expected_failure(good)
    # the registry is the residue-field rule
    assert [e[1] for e in EXPECTED_FAILURES] == ["B2", "G2"]
    phi = build_root_system("B2")
    assert outside_perfect_hypothesis(phi, zmod(4)) and outside_perfect_hypothesis(phi, make_ring("Z/6"))
    assert not outside_perfect_hypothesis(phi, zmod(3))
    assert not outside_perfect_hypothesis(phi, make_ring("F4"))
    assert not outside_perfect_hypothesis(build_root_system("A2"), zmod(2))


def test_residue_obstruction_mode():
    (rep,) = run_lemma("perfect", Workspace("B2", "Z/4", Caps(element_cap=50_000)))
    assert rep.status == "fail" and rep.details["mode"] == "residue-obstruction"
    assert rep.details["quotient"] == "Z/2" and is_expected_failure(rep)


def test_normalization_and_functoriality():
    C = build_chevalley(build_root_system("A2"))
    assert verify_normalization(C, zmod(3)).passed
    (rep,) = run_lemma("functoriality", ws("A2", "Z/4"))
    assert rep.passed


def test_cap_exceeded_status():
    w = Workspace("A2", "Z/7", Caps(element_cap=500))
    (rep,) = run_lemma("rel-elem", w, ideal_text="R")
    assert rep.status == "cap-exceeded" and "message" in rep.details


def test_report_serialization():
    (rep,) = run_lemma("perfect", ws("A2", "Z/2"), timings=True)
    d = rep.to_dict()
    assert set(d) == {"lemma_id", "instance", "status", "witnesses", "details", "timings"}
    assert d["timings"]["seconds"] >= 0
    assert isinstance(rep, LemmaReport)


def test_sigma_catalog():
    for label in ("A2", "B2", "G2"):
        phi = build_root_system(label)
        cat = sigma_catalog(phi)
        assert cat and all(s and set(s) <= set(phi.roots) for s in cat)


def test_ideal_parsing():
    w = ws("A2", "Z/4")
    assert len(w.parse_ideal("R")) == 4
    assert len(w.parse_ideal("2")) == 2
    assert [len(I) for I in w.default_ideals()] == [2]
    assert [len(I) for I in Workspace("A2", "Z/3").default_ideals()] == [3]


@pytest.mark.slow
def test_a2_z6_decomposition_large_cap():
    w = Workspace("A2", "Z/6", Caps(element_cap=2_000_000))
    (rep,) = run_lemma("xmod-dec", w, ideal_text="R", parts_text="3,4")
    assert rep.passed
