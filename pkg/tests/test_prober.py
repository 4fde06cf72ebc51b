import pytest

from subsat.corpus import CORPUS
from subsat.logic import TRUE, Not, evaluate_fo, parse_formula
from subsat.prober import (
    BoundedThetaOf,
    ProbeConfig,
    ThetaOf,
    constant_blindness_demo,
    equivalence_oracle,
    evaluate_sentence_like,
    has_directed_cycle,
    preservation_under_extensions,
    render_probe_report,
    wellfoundedness_demo,
    witness_bound_search,
    _generic_first_counterexample,
)
from subsat.structures import (
    Signature,
    Structure,
    find_isomorphism,
    induced_substructure,
    enumerate_submodels,
)
from subsat.theta import theta_bounded_semantic, theta_semantic, theta_to_eso

BINARY = Signature(predicates=(("R", 2),))
UNAR = Signature(functions=(("F", 1),))

EXISTS_FORALL = parse_formula("exists x. forall y. R(x,y)", BINARY)
FORALL_EXISTS = parse_formula("forall x. exists y. R(x,y)", BINARY)
LOOP = parse_formula("exists x. R(x,x)", BINARY)
NO_LOOP = parse_formula("exists x. !R(x,x)", BINARY)
MOVED = parse_formula("exists x. F(x) != x", UNAR)


def digraph(n, edges):
    return Structure(BINARY, n, predicates={"R": set(edges)})


def cycle(n):
    return digraph(n, [(i, (i + 1) % n) for i in range(n)])


# --- equivalence oracle -------------------------------------------------------


def test_equivalence_theta_of_exists_forall_is_loop():
    cfg = ProbeConfig(BINARY, n_max=4)
    verdict = equivalence_oracle(ThetaOf(EXISTS_FORALL), LOOP, cfg)
    assert verdict.equal
    assert verdict.checked == 2 + 10 + 104 + 3044


def test_equivalence_theta_of_moved_is_itself():
    cfg = ProbeConfig(UNAR, n_max=4)
    verdict = equivalence_oracle(ThetaOf(MOVED), MOVED, cfg)
    assert verdict.equal


def test_equivalence_counterexample_at_size_one():
    cfg = ProbeConfig(BINARY, n_max=3)
    verdict = equivalence_oracle(LOOP, Not(LOOP), cfg)
    assert not verdict.equal
    assert verdict.counterexample.size == 1
    assert verdict.checked == 1


def test_equivalence_eso_formula_dispatch():
    cfg = ProbeConfig(BINARY, n_max=3)
    verdict = equivalence_oracle(theta_to_eso(EXISTS_FORALL, BINARY), LOOP, cfg)
    assert verdict.equal


def test_equivalence_counterexample_reverifies():
    cfg = ProbeConfig(BINARY, n_max=3)
    verdict = equivalence_oracle(ThetaOf(FORALL_EXISTS), FORALL_EXISTS, cfg)
    assert not verdict.equal
    s = verdict.counterexample
    assert theta_semantic(s, FORALL_EXISTS).truth != evaluate_fo(s, FORALL_EXISTS)


def test_equivalence_with_workers_matches_serial():
    cfg1 = ProbeConfig(BINARY, n_max=3, workers=1)
    cfg2 = ProbeConfig(BINARY, n_max=3, workers=2)
    a = equivalence_oracle(ThetaOf(EXISTS_FORALL), LOOP, cfg1)
    b = equivalence_oracle(ThetaOf(EXISTS_FORALL), LOOP, cfg2)
    assert a.equal == b.equal and a.checked == b.checked


# --- preservation under extensions ----------------------------------------------


def test_preservation_of_theta_passes():
    cfg = ProbeConfig(BINARY, n_max=3)
    verdict = preservation_under_extensions(EXISTS_FORALL, cfg)
    assert verdict.preserved


def test_preservation_of_raw_pi2_sentence_fails():
    cfg = ProbeConfig(BINARY, n_max=3)
    verdict = preservation_under_extensions(FORALL_EXISTS, cfg, apply_theta=False)
    assert not verdict.preserved
    carrier, sub, s = verdict.counterexample
    assert evaluate_fo(sub, FORALL_EXISTS)
    assert not evaluate_fo(s, FORALL_EXISTS)


def test_preservation_of_top_passes():
    cfg = ProbeConfig(BINARY, n_max=2)
    assert preservation_under_extensions(TRUE, cfg).preserved


# --- witness-bound search --------------------------------------------------------


def test_witness_bound_exists_forall_is_one():
    cfg = ProbeConfig(BINARY, n_max=4, lambda_max=3, nu=4)
    verdict = witness_bound_search(EXISTS_FORALL, cfg)
    assert verdict.outcome == "WITNESS_BOUND_FOUND"
    assert verdict.bound == 1


def test_witness_bound_forall_exists_no_bound_with_cycles():
    cfg = ProbeConfig(BINARY, n_max=5, lambda_max=4, nu=4)
    verdict = witness_bound_search(FORALL_EXISTS, cfg)
    assert verdict.outcome == "NO_BOUND_UP_TO"
    assert [lam for lam, _ in verdict.counterexamples] == [1, 2, 3, 4]
    sizes = [s.size for _, s in verdict.counterexamples]
    assert sizes == [2, 3, 4, 5]  # strictly increasing family
    for lam, s in verdict.counterexamples:
        assert find_isomorphism(s, cycle(s.size)) is not None
        # counterexamples are certificates: they re-verify
        assert evaluate_fo(s, FORALL_EXISTS)
        assert not theta_bounded_semantic(s, FORALL_EXISTS, lam).truth


def test_witness_bound_fragment_mode_unar():
    cfg = ProbeConfig(UNAR, n_max=3, lambda_max=2, nu=3, mode="fragment")
    verdict = witness_bound_search(MOVED, cfg)
    assert verdict.outcome == "WITNESS_BOUND_FOUND"
    assert verdict.bound == 1


def test_witness_bound_fragment_equals_submodel_for_predicate_only():
    for phi in [EXISTS_FORALL, LOOP]:
        sub = witness_bound_search(phi, ProbeConfig(BINARY, n_max=3, lambda_max=2))
        frag = witness_bound_search(
            phi, ProbeConfig(BINARY, n_max=3, lambda_max=2, mode="fragment")
        )
        assert sub.outcome == frag.outcome
        assert sub.bound == frag.bound


def test_witness_bound_monotone_in_n_max():
    bounds = []
    for n_max in (2, 3, 4):
        verdict = witness_bound_search(
            EXISTS_FORALL, ProbeConfig(BINARY, n_max=n_max, lambda_max=2, nu=2)
        )
        assert verdict.outcome == "WITNESS_BOUND_FOUND"
        bounds.append(verdict.bound)
    assert bounds == sorted(bounds)


def test_sieve_agrees_with_generic_path():
    tables = {}
    for phi in [EXISTS_FORALL, FORALL_EXISTS, LOOP, NO_LOOP]:
        for n in (2, 3):
            for lam in (1, 2):
                if lam >= n:
                    continue
                cfg = ProbeConfig(BINARY, n_max=n, lambda_max=max(lam, 1), nu=4)
                from subsat.prober import _sieve_first_counterexample

                sieve_hit, _ = _sieve_first_counterexample(phi, BINARY, n, lam, dict())
                generic_hit, _ = _generic_first_counterexample(phi, BINARY, n, lam, 10**7)
                assert (sieve_hit is None) == (generic_hit is None)
                if sieve_hit is not None:
                    assert sieve_hit == generic_hit


def test_witness_bound_counterexamples_lack_small_witnesses():
    cfg = ProbeConfig(BINARY, n_max=4, lambda_max=3, nu=4)
    verdict = witness_bound_search(FORALL_EXISTS, cfg)
    for lam, s in verdict.counterexamples:
        assert all(
            not evaluate_fo(induced_substructure(s, c), FORALL_EXISTS)
            for c in enumerate_submodels(s, max_card=lam)
        )


# --- wellfoundedness demo ---------------------------------------------------------


def test_has_directed_cycle_oracle():
    assert has_directed_cycle(cycle(3), "R")
    assert has_directed_cycle(digraph(1, [(0, 0)]), "R")
    assert not has_directed_cycle(digraph(3, [(0, 1), (1, 2), (0, 2)]), "R")
    assert not has_directed_cycle(digraph(1, []), "R")


def test_wellfoundedness_demo_passes_to_n4():
    report = wellfoundedness_demo(ProbeConfig(BINARY, n_max=4, lambda_max=1, nu=1))
    assert report.passed
    assert report.structures_checked == 2 + 10 + 104 + 3044
    assert 0 < report.cyclic_count < report.structures_checked


def test_wellfoundedness_demo_examples():
    phi = parse_formula("forall x. exists y. R(y,x)", BINARY)
    assert theta_semantic(cycle(3), phi).truth
    chain = digraph(3, [(0, 1), (1, 2), (0, 2)])
    assert not theta_semantic(chain, phi).truth
    assert not theta_semantic(digraph(1, []), phi).truth


def test_wellfoundedness_demo_requires_binary_signature():
    with pytest.raises(ValueError):
        wellfoundedness_demo(ProbeConfig(UNAR, n_max=2, lambda_max=1, nu=1))


# --- constant blindness demo --------------------------------------------------------


def test_constant_blindness_k3():
    sig = Signature(constants=("c0", "c1", "c2"))
    psi = parse_formula("c0 = c1", sig)
    report = constant_blindness_demo(3, psi)
    assert report.agree_on_psi
    assert report.theta_in_a and not report.theta_in_b
    assert report.theta_differs
    assert report.distinguishing_constant == "c2"


def test_constant_blindness_psi_with_no_constants_is_inconclusive():
    report = constant_blindness_demo(2, TRUE)
    assert report.agree_on_psi
    # with no constant pinned to the first point, the second structure keeps a
    # one-point submodel, so the check cannot differ
    assert not report.theta_differs


def test_constant_blindness_rejects_full_naming():
    sig = Signature(constants=("c0",))
    psi = parse_formula("c0 = c0", sig)
    with pytest.raises(ValueError):
        constant_blindness_demo(1, psi)


# --- sentence-like dispatch -----------------------------------------------------------


def test_evaluate_sentence_like_dispatch():
    s = digraph(2, [(0, 0)])
    assert evaluate_sentence_like(LOOP, s)
    assert evaluate_sentence_like(ThetaOf(EXISTS_FORALL), s)
    assert evaluate_sentence_like(BoundedThetaOf(EXISTS_FORALL, 1), s)
    assert evaluate_sentence_like(lambda t: t.size == 2, s)
    assert evaluate_sentence_like(theta_to_eso(LOOP, BINARY), s)


# --- report rendering ---------------------------------------------------------------


def test_render_probe_report_witness_bound():
    cfg = ProbeConfig(BINARY, n_max=3, lambda_max=2, nu=2)
    verdict = witness_bound_search(FORALL_EXISTS, cfg)
    text = render_probe_report(verdict)
    assert "VERDICT lambda=none n_max=3 mode=submodel outcome=NO_BOUND_UP_TO" in text
    assert "structure counterexample_lambda_1" in text
    assert text == render_probe_report(witness_bound_search(FORALL_EXISTS, cfg))


def test_render_probe_report_equivalence_and_demos():
    cfg = ProbeConfig(BINARY, n_max=2)
    text = render_probe_report(equivalence_oracle(ThetaOf(EXISTS_FORALL), LOOP, cfg))
    assert "VERDICT equal=yes" in text
    text2 = render_probe_report(wellfoundedness_demo(ProbeConfig(BINARY, n_max=2, lambda_max=1, nu=1)))
    assert "VERDICT agree=yes" in text2
    sig = Signature(constants=("c0", "c1", "c2"))
    text3 = render_probe_report(constant_blindness_demo(3, parse_formula("c0 = c1", sig)))
    assert "VERDICT differs=yes" in text3


def test_cross_module_soundness_pin():
    # the evaluated second-order translation and the semantic submodel check
    # are indistinguishable as pseudo-sentences, across the whole corpus
    for entry in CORPUS:
        cfg = ProbeConfig(entry.signature, n_max=3, workers=1)
        phi = entry.formula
        verdict = equivalence_oracle(theta_to_eso(phi, entry.signature), ThetaOf(phi), cfg)
        assert verdict.equal, entry.name
    for entry in CORPUS:
        if entry.signature_name not in ("binary", "unar"):
            continue
        cfg = ProbeConfig(entry.signature, n_max=4, workers=1)
        phi = entry.formula
        verdict = equivalence_oracle(theta_to_eso(phi, entry.signature), ThetaOf(phi), cfg)
        assert verdict.equal, entry.name
