import pytest

from subsat.logic import (
    FALSE,
    TRUE,
    Not,
    evaluate_eso,
    evaluate_fo,
    is_existential_sentence,
    parse_formula,
    render_formula,
)
from subsat.structures import (
    Signature,
    Structure,
    enumerate_structures,
    enumerate_submodels,
    generated_carrier,
    induced_substructure,
)
from subsat.theta import (
    atomic_diagram,
    modal_laws_check,
    theta_bounded_semantic,
    theta_bounded_to_existential_functional,
    theta_bounded_to_existential_predicate,
    theta_semantic,
    theta_to_eso,
)

BINARY = Signature(predicates=(("R", 2),))
UNAR = Signature(functions=(("F", 1),))


def digraph(n, edges):
    return Structure(BINARY, n, predicates={"R": set(edges)})


def unar(n, table):
    return Structure(UNAR, n, functions={"F": {(i,): v for i, v in table.items()}})


def c3_cycle():
    return digraph(3, [(0, 1), (1, 2), (2, 0)])


EXISTS_FORALL = parse_formula("exists x. forall y. R(x,y)", BINARY)
FORALL_EXISTS = parse_formula("forall x. exists y. R(x,y)", BINARY)
LOOP = parse_formula("exists x. R(x,x)", BINARY)
MOVED = parse_formula("exists x. F(x) != x", UNAR)


# --- theta_semantic ----------------------------------------------------------


def test_theta_semantic_loop_witness():
    report = theta_semantic(digraph(2, [(0, 0)]), EXISTS_FORALL)
    assert report.truth
    assert report.witness == frozenset({0})


def test_theta_semantic_false_is_false():
    for s in [digraph(2, [(0, 1)]), c3_cycle()]:
        report = theta_semantic(s, FALSE)
        assert not report.truth and report.witness is None
        assert report.inspected == 2**s.size - 1


def test_theta_semantic_cycle_needs_full_carrier():
    report = theta_semantic(c3_cycle(), FORALL_EXISTS)
    assert report.truth
    assert report.witness == frozenset({0, 1, 2})
    assert report.inspected == 7


def test_theta_semantic_rejects_open_formula():
    with pytest.raises(ValueError):
        theta_semantic(c3_cycle(), parse_formula("R(x,x)", BINARY))


def test_theta_witness_carrier_reverifies():
    for s in [digraph(3, [(0, 0), (1, 2)]), c3_cycle(), digraph(2, [])]:
        for phi in [EXISTS_FORALL, FORALL_EXISTS, LOOP]:
            report = theta_semantic(s, phi)
            if report.truth:
                assert evaluate_fo(induced_substructure(s, report.witness), phi)


# --- theta_bounded_semantic --------------------------------------------------


def test_theta_bounded_unar_paper_example():
    s = unar(4, {0: 1, 1: 2, 2: 3, 3: 0})
    report = theta_bounded_semantic(s, MOVED, 1)
    assert report.truth
    assert report.witness == frozenset({0, 1, 2, 3})


def test_theta_bounded_singletons_lack_cycles():
    report = theta_bounded_semantic(c3_cycle(), FORALL_EXISTS, 1)
    assert not report.truth


def test_theta_bounded_true_with_bound_one():
    assert theta_bounded_semantic(c3_cycle(), TRUE, 1).truth


def test_theta_bounded_zero_needs_constants():
    with pytest.raises(ValueError):
        theta_bounded_semantic(c3_cycle(), TRUE, 0)
    sig = Signature(constants=("c",))
    s = Structure(sig, 2, constants={"c": 1})
    report = theta_bounded_semantic(s, parse_formula("forall x. x = c", sig), 0)
    assert report.truth and report.witness == frozenset({1})


def test_theta_bounded_implies_theta():
    for s in enumerate_structures(BINARY, 3, up_to_iso=True):
        for phi in [EXISTS_FORALL, FORALL_EXISTS, LOOP]:
            if theta_bounded_semantic(s, phi, 2).truth:
                assert theta_semantic(s, phi).truth


# --- theta_to_eso ------------------------------------------------------------


def test_theta_to_eso_shape_predicate_only():
    f = theta_to_eso(LOOP, BINARY)
    text = render_formula(f)
    assert text.startswith("existsSet X. ")
    assert "X(x0)" in text  # nonemptiness conjunct over a fresh variable


def test_theta_to_eso_includes_function_closure():
    f = theta_to_eso(MOVED, UNAR)
    text = render_formula(f)
    assert "X(F(" in text  # closure-under-F conjunct


def test_theta_to_eso_includes_constants():
    sig = Signature(functions=(("F", 1),), constants=("c",))
    f = theta_to_eso(parse_formula("F(c) != c", sig), sig)
    assert "X(c)" in render_formula(f)


@pytest.mark.parametrize(
    "phi",
    [EXISTS_FORALL, FORALL_EXISTS, LOOP, parse_formula("forall x. forall y. x = y", BINARY)],
)
def test_theta_to_eso_matches_semantics_binary(phi):
    f = theta_to_eso(phi, BINARY)
    for n in (1, 2, 3):
        for s in enumerate_structures(BINARY, n, up_to_iso=True):
            assert evaluate_eso(s, f) == theta_semantic(s, phi).truth


@pytest.mark.parametrize(
    "phi", [MOVED, parse_formula("forall x. F(x) = x", UNAR)]
)
def test_theta_to_eso_matches_semantics_unar(phi):
    f = theta_to_eso(phi, UNAR)
    for n in (1, 2, 3):
        for s in enumerate_structures(UNAR, n, up_to_iso=True):
            assert evaluate_eso(s, f) == theta_semantic(s, phi).truth


def test_theta_to_eso_paper_worked_case():
    f = theta_to_eso(EXISTS_FORALL, BINARY)
    assert evaluate_eso(digraph(2, [(0, 0)]), f)


# --- predicate-case existential translation ---------------------------------


def test_predicate_translation_paper_examples():
    f = theta_bounded_to_existential_predicate(EXISTS_FORALL, 1)
    assert render_formula(f) == "exists x0. R(x0,x0)"
    g = theta_bounded_to_existential_predicate(Not(FORALL_EXISTS), 1)
    assert render_formula(g) == "exists x0. !R(x0,x0)"
    t = theta_bounded_to_existential_predicate(TRUE, 1)
    assert render_formula(t) == "exists x0. true"


def test_predicate_translation_is_existential():
    for phi in [EXISTS_FORALL, FORALL_EXISTS, LOOP]:
        for lam in (1, 2, 3):
            f = theta_bounded_to_existential_predicate(phi, lam)
            assert is_existential_sentence(f)


def test_predicate_translation_rejects_functional():
    with pytest.raises(ValueError):
        theta_bounded_to_existential_predicate(MOVED, 1)
    with pytest.raises(ValueError):
        theta_bounded_to_existential_predicate(LOOP, 1, sig=UNAR)


def test_predicate_translation_matches_bounded_semantics():
    sentences = [EXISTS_FORALL, FORALL_EXISTS, LOOP, Not(FORALL_EXISTS)]
    for phi in sentences:
        for lam in (1, 2):
            f = theta_bounded_to_existential_predicate(phi, lam)
            for n in (1, 2, 3):
                for s in enumerate_structures(BINARY, n, up_to_iso=True):
                    assert evaluate_fo(s, f) == theta_bounded_semantic(s, phi, lam).truth


# --- functional-case existential translation ---------------------------------


def test_functional_translation_unar_two_disjuncts():
    result = theta_bounded_to_existential_functional(MOVED, UNAR, 1, 2)
    assert result.disjuncts == 2
    assert is_existential_sentence(result.sentence)
    text = render_formula(result.sentence)
    # chain to a fixed point and the 2-cycle
    assert "F(F(x0)) = F(x0)" in text
    assert "F(F(x0)) = x0" in text
    assert "x0 != F(x0)" in text


def test_functional_translation_identity_single_disjunct():
    phi = parse_formula("forall x. F(x) = x", UNAR)
    result = theta_bounded_to_existential_functional(phi, UNAR, 1, 3)
    assert result.disjuncts == 1
    assert render_formula(result.sentence) == "exists x0. F(x0) = x0"


def test_functional_translation_false_is_empty_disjunction():
    result = theta_bounded_to_existential_functional(FALSE, UNAR, 1, 2)
    assert result.disjuncts == 0
    assert render_formula(result.sentence) == "exists x0. false"


def test_functional_translation_soundness_and_conditional_completeness():
    nu = 3
    for phi in [MOVED, parse_formula("forall x. F(x) = x", UNAR),
                parse_formula("exists x. F(F(x)) = x", UNAR)]:
        result = theta_bounded_to_existential_functional(phi, UNAR, 1, nu)
        for n in (1, 2, 3, 4):
            for s in enumerate_structures(UNAR, n, up_to_iso=True):
                translated = evaluate_fo(s, result.sentence)
                semantic = theta_bounded_semantic(s, phi, 1).truth
                if translated:
                    assert semantic  # soundness, unconditionally
                small = all(
                    len(generated_carrier(s, (e,))) <= nu for e in range(s.size)
                )
                if small:
                    assert translated == semantic


# --- modal laws ---------------------------------------------------------------


def law_corpus():
    out = []
    for n in (1, 2):
        out.extend(enumerate_structures(BINARY, n, up_to_iso=True))
    return out


def test_modal_laws_pass_on_small_corpus():
    report = modal_laws_check(EXISTS_FORALL, LOOP, law_corpus())
    assert report.passed, [r.law for r in report.results if not r.holds]


def test_modal_laws_strictness_witnesses():
    phi = EXISTS_FORALL
    psi = parse_formula("forall x. forall y. !R(x,y)", BINARY)
    structures = list(enumerate_structures(BINARY, 2, up_to_iso=True)) + list(
        enumerate_structures(BINARY, 3, up_to_iso=True)
    )
    report = modal_laws_check(phi, psi, structures)
    assert report.passed
    assert report.result("vi").strictness_witness is not None
    one_point = parse_formula("forall x. forall y. x = y", BINARY)
    report2 = modal_laws_check(one_point, psi, structures)
    assert report2.passed
    assert report2.result("vii").strictness_witness is not None
    report3 = modal_laws_check(LOOP, psi, structures)
    assert report3.passed
    assert report3.result("v-and").strictness_witness is not None


def test_modal_law_iv_vacuous_when_premise_fails():
    report = modal_laws_check(LOOP, FALSE, law_corpus())
    assert report.result("iv").holds
    assert "vacuous" in report.result("iv").note


def test_theta_monotone_in_submodel_order():
    for s in enumerate_structures(BINARY, 3, up_to_iso=True):
        carriers = list(enumerate_submodels(s))
        for c1 in carriers:
            for c2 in carriers:
                if c1 <= c2:
                    t1 = theta_semantic(induced_substructure(s, c1), EXISTS_FORALL).truth
                    t2 = theta_semantic(induced_substructure(s, c2), EXISTS_FORALL).truth
                    if t1:
                        assert t2


# --- diagrams -----------------------------------------------------------------


def test_atomic_diagram_unar_chain():
    s = unar(2, {0: 1, 1: 1})
    diagram = atomic_diagram(s, (0,), ("g0",))
    rendered = [render_formula(lit) for lit in diagram.literals]
    assert rendered == ["F(F(g0)) = F(g0)", "g0 != F(g0)"]


def test_atomic_diagram_characterizes_up_to_marked_isomorphism():
    # two marked 2-element unars: diagrams must differ
    chain = atomic_diagram(unar(2, {0: 1, 1: 1}), (0,), ("g0",))
    cycle = atomic_diagram(unar(2, {0: 1, 1: 0}), (0,), ("g0",))
    assert chain.literals != cycle.literals
